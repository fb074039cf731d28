#pragma once

#include <vector>

#include "geom/vec2.hpp"

namespace gf {

// Row-wise sparse accumulator with the constraint transformations needed for
// free-slip boundaries, backed by a direct sparse LU for the solve.
class LinearSystem {
public:
    explicit LinearSystem(int n);

    int size() const { return n_; }
    void add(int row, int col, double value);
    void add_rhs(int row, double value) { rhs_[row] += value; }
    double& rhs(int row) { return rhs_[row]; }

    // Rotate the (dof_x, dof_y) pair into the (normal, tangent) frame:
    // rows dof_x/dof_y become the normal/tangent equations and every column
    // pair is transformed accordingly. Call before set_dirichlet on dof_x.
    void rotate_pairs(const std::vector<std::pair<int, Vec2>>& rotations);

    void set_dirichlet(int dof, double value);

    // Eliminates Dirichlet columns into the RHS and installs identity rows.
    void finalize();

    // Direct sparse solve with iterative refinement; relative residual must
    // reach 1e-10. Throws FactorizationFailure otherwise. Rotated dof pairs
    // are mapped back to their original frame in the returned vector.
    std::vector<double> solve() const;

    double residual_norm(const std::vector<double>& x) const;
    double row_dot(int row, const std::vector<double>& x) const;
    std::size_t nonzeros() const;

private:
    int n_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<double> rhs_;
    std::vector<std::pair<int, double>> dirichlet_;
    std::vector<std::pair<int, Vec2>> rotations_;
    bool finalized_ = false;

    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
};

}  // namespace gf
