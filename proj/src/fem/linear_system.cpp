#include "fem/linear_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "core/error.hpp"

namespace gf {

LinearSystem::LinearSystem(int n) : n_(n), rows_(n), rhs_(n, 0.0) {}

void LinearSystem::add(int row, int col, double value) {
    if (value == 0.0) return;
    auto& r = rows_[row];
    for (auto& [c, v] : r) {
        if (c == col) {
            v += value;
            return;
        }
    }
    r.emplace_back(col, value);
}

void LinearSystem::rotate_pairs(const std::vector<std::pair<int, Vec2>>& rotations) {
    if (rotations.empty()) return;
    rotations_.insert(rotations_.end(), rotations.begin(), rotations.end());
    // lookup: dof_x -> rotation id
    std::vector<int> rot_of(n_, -1);
    for (std::size_t k = 0; k < rotations.size(); ++k) rot_of[rotations[k].first] = static_cast<int>(k);

    // Row combination: (row_n, row_t) = (n_x rx + n_y ry, t_x rx + t_y ry).
    for (const auto& [dx, nrm] : rotations) {
        Vec2 tng = perp(nrm);
        int dy = dx + 1;
        auto rx = std::move(rows_[dx]);
        auto ry = std::move(rows_[dy]);
        rows_[dx].clear();
        rows_[dy].clear();
        for (const auto& [c, v] : rx) {
            if (v != 0.0) {
                add(dx, c, nrm.x * v);
                add(dy, c, tng.x * v);
            }
        }
        for (const auto& [c, v] : ry) {
            if (v != 0.0) {
                add(dx, c, nrm.y * v);
                add(dy, c, tng.y * v);
            }
        }
        double bx = rhs_[dx], by = rhs_[dy];
        rhs_[dx] = nrm.x * bx + nrm.y * by;
        rhs_[dy] = tng.x * bx + tng.y * by;
    }

    // Column transform: u = R^T v, so columns (cx, cy) -> (cx n_x + cy n_y, cx t_x + cy t_y).
    // A row may hold either column of a rotated pair alone; handle each pair once.
    std::vector<int> processed;
    for (auto& r : rows_) {
        processed.clear();
        for (std::size_t k = 0; k < r.size(); ++k) {
            int c = r[k].first;
            int base = (c % 2 == 0) ? c : c - 1;
            int rid = (base >= 0 && base < n_) ? rot_of[base] : -1;
            if (rid < 0) continue;
            if (std::find(processed.begin(), processed.end(), base) != processed.end()) continue;
            processed.push_back(base);
            Vec2 nrm = rotations[rid].second;
            Vec2 tng = perp(nrm);
            std::size_t kx = r.size(), ky = r.size();
            for (std::size_t m = 0; m < r.size(); ++m) {
                if (r[m].first == base) kx = m;
                if (r[m].first == base + 1) ky = m;
            }
            double vx = kx < r.size() ? r[kx].second : 0.0;
            double vy = ky < r.size() ? r[ky].second : 0.0;
            double cn = vx * nrm.x + vy * nrm.y;
            double ct = vx * tng.x + vy * tng.y;
            if (kx < r.size())
                r[kx].second = cn;
            else if (cn != 0.0)
                r.emplace_back(base, cn);
            if (ky < r.size())
                r[ky].second = ct;
            else if (ct != 0.0)
                r.emplace_back(base + 1, ct);
        }
    }
}

void LinearSystem::set_dirichlet(int dof, double value) { dirichlet_.emplace_back(dof, value); }

void LinearSystem::finalize() {
    if (dirichlet_.empty()) {
        finalized_ = true;
        return;
    }
    std::vector<char> is_dir(n_, 0);
    std::vector<double> dir_val(n_, 0.0);
    for (const auto& [d, v] : dirichlet_) {
        is_dir[d] = 1;
        dir_val[d] = v;
    }
    for (int r = 0; r < n_; ++r) {
        if (is_dir[r]) {
            rows_[r].clear();
            rows_[r].emplace_back(r, 1.0);
            rhs_[r] = dir_val[r];
            continue;
        }
        auto& row = rows_[r];
        std::size_t w = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (is_dir[row[k].first]) {
                rhs_[r] -= row[k].second * dir_val[row[k].first];
            } else {
                row[w++] = row[k];
            }
        }
        row.resize(w);
    }
    finalized_ = true;
}

std::size_t LinearSystem::nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows_) nnz += r.size();
    return nnz;
}

void LinearSystem::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (const auto& [c, v] : rows_[r]) s += v * x[c];
        y[r] = s;
    }
}

double LinearSystem::row_dot(int row, const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& [c, v] : rows_[row]) s += v * x[c];
    return s;
}

double LinearSystem::residual_norm(const std::vector<double>& x) const {
    std::vector<double> ax;
    matvec(x, ax);
    double rn = 0.0, bn = 0.0;
    for (int r = 0; r < n_; ++r) {
        rn += (ax[r] - rhs_[r]) * (ax[r] - rhs_[r]);
        bn += rhs_[r] * rhs_[r];
    }
    return bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
}

std::vector<double> LinearSystem::solve() const {
    using SpMat = Eigen::SparseMatrix<double>;
    // Row equilibration: momentum rows of almost-empty (eps -> floor)
    // elements and drag-pinned rows differ in scale by many orders of
    // magnitude, which wrecks the LU's pivoting accuracy. Scaling rows to
    // unit max-norm leaves the solution unchanged.
    std::vector<double> row_scale(n_, 1.0);
    for (int r = 0; r < n_; ++r) {
        double m = 0.0;
        for (const auto& [c, v] : rows_[r]) m = std::max(m, std::fabs(v));
        if (m > 0.0) row_scale[r] = 1.0 / m;
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(nonzeros());
    for (int r = 0; r < n_; ++r)
        for (const auto& [c, v] : rows_[r]) trips.emplace_back(r, c, v * row_scale[r]);
    SpMat A(n_, n_);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::FactorizationFailure, "sparse LU factorization failed");

    Eigen::VectorXd b(n_);
    for (int r = 0; r < n_; ++r) b[r] = rhs_[r] * row_scale[r];
    Eigen::VectorXd x = lu.solve(b);

    // iterative refinement, then enforce the residual contract
    for (int pass = 0; pass < 6; ++pass) {
        Eigen::VectorXd res = b - A * x;
        if (res.norm() <= 0.5e-10 * std::max(b.norm(), 1e-300)) break;
        x += lu.solve(res).eval();
    }
    double rel = (b - A * x).norm() / std::max(b.norm(), 1e-300);
    if (!std::isfinite(rel) || rel > 1e-10) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "linear solve residual %.3e above tolerance", rel);
        throw Error(ErrorCode::FactorizationFailure, msg);
    }

    std::vector<double> out(x.data(), x.data() + n_);
    // rotated pairs hold (v_n, v_t); hand back (u_x, u_y)
    for (const auto& [dx, nrm] : rotations_) {
        Vec2 tng = perp(nrm);
        Vec2 u = nrm * out[dx] + tng * out[dx + 1];
        out[dx] = u.x;
        out[dx + 1] = u.y;
    }
    return out;
}

}  // namespace gf
