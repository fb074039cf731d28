#include "geom/predicates.hpp"

#include <cmath>

// Expansion arithmetic after Shewchuk, "Adaptive Precision Floating-Point
// Arithmetic and Fast Robust Geometric Predicates". Expansions are arrays of
// doubles of increasing magnitude whose exact sum is the represented value.
// Only the zero-eliminating sum and scale are needed here; products of
// expansions are built from repeated scaling.

namespace gf {
namespace {

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwErrBoundA = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrBoundA = (10.0 + 96.0 * kEps) * kEps;

inline void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    double bvirt = x - a;
    double avirt = x - bvirt;
    double bround = b - bvirt;
    double around = a - avirt;
    y = around + bround;
}

inline void two_diff(double a, double b, double& x, double& y) {
    x = a - b;
    double bvirt = a - x;
    double avirt = x + bvirt;
    double bround = bvirt - b;
    double around = a - avirt;
    y = around + bround;
}

inline void two_product(double a, double b, double& x, double& y) {
    x = a * b;
    y = std::fma(a, b, -x);
}

// h = e + f, zero components eliminated. Returns length of h.
// Components are merged by increasing magnitude and folded with exact sums.
int fast_expansion_sum_zeroelim(int elen, const double* e, int flen, const double* f, double* h) {
    int eindex = 0, findex = 0, hindex = 0;
    auto take_e = [&]() {
        if (eindex >= elen) return false;
        if (findex >= flen) return true;
        double fn = f[findex], en = e[eindex];
        return (fn > en) == (fn > -en);  // |en| < |fn|
    };
    double Q = take_e() ? e[eindex++] : f[findex++];
    double Qnew, hh;
    while (eindex < elen || findex < flen) {
        double g = take_e() ? e[eindex++] : f[findex++];
        two_sum(g, Q, Qnew, hh);
        Q = Qnew;
        if (hh != 0.0) h[hindex++] = hh;
    }
    if ((Q != 0.0) || (hindex == 0)) h[hindex++] = Q;
    return hindex;
}

// h = e * b, zero components eliminated. Returns length of h.
int scale_expansion_zeroelim(int elen, const double* e, double b, double* h) {
    double Q, sum, hh, product1, product0;
    int hindex = 0;
    two_product(e[0], b, Q, hh);
    if (hh != 0.0) h[hindex++] = hh;
    for (int eindex = 1; eindex < elen; ++eindex) {
        two_product(e[eindex], b, product1, product0);
        two_sum(Q, product0, sum, hh);
        if (hh != 0.0) h[hindex++] = hh;
        two_sum(product1, sum, Q, hh);
        if (hh != 0.0) h[hindex++] = hh;
    }
    if ((Q != 0.0) || (hindex == 0)) h[hindex++] = Q;
    return hindex;
}

int expansion_negate(int elen, const double* e, double* h) {
    for (int i = 0; i < elen; ++i) h[i] = -e[i];
    return elen;
}

// h = e * f by scaling e with each component of f and summing.
// h must hold 2 * elen * flen doubles; tmp needs the same capacity.
int expansion_mul(int elen, const double* e, int flen, const double* f, double* h, double* tmp, double* tmp2) {
    int hlen = 1;
    h[0] = 0.0;
    for (int i = 0; i < flen; ++i) {
        int plen = scale_expansion_zeroelim(elen, e, f[i], tmp);
        int nlen = fast_expansion_sum_zeroelim(hlen, h, plen, tmp, tmp2);
        for (int k = 0; k < nlen; ++k) h[k] = tmp2[k];
        hlen = nlen;
    }
    return hlen;
}

inline double expansion_sign_value(int elen, const double* e) { return e[elen - 1]; }

double orient2d_exact(Vec2 pa, Vec2 pb, Vec2 pc) {
    double axcx1, axcx0, bycy1, bycy0, aycy1, aycy0, bxcx1, bxcx0;
    two_diff(pa.x, pc.x, axcx1, axcx0);
    two_diff(pb.y, pc.y, bycy1, bycy0);
    two_diff(pa.y, pc.y, aycy1, aycy0);
    two_diff(pb.x, pc.x, bxcx1, bxcx0);
    double e1[2] = {axcx0, axcx1}, e2[2] = {bycy0, bycy1};
    double e3[2] = {aycy0, aycy1}, e4[2] = {bxcx0, bxcx1};
    double left[16], right[16], tmp[16], tmp2[16], negright[16], det[32];
    int llen = expansion_mul(2, e1, 2, e2, left, tmp, tmp2);
    int rlen = expansion_mul(2, e3, 2, e4, right, tmp, tmp2);
    rlen = expansion_negate(rlen, right, negright);
    int dlen = fast_expansion_sum_zeroelim(llen, left, rlen, negright, det);
    return expansion_sign_value(dlen, det);
}

double incircle_exact(Vec2 pa, Vec2 pb, Vec2 pc, Vec2 pd) {
    // Work with coordinates relative to d; each difference is a 2-expansion.
    double adx[2], ady[2], bdx[2], bdy[2], cdx[2], cdy[2];
    two_diff(pa.x, pd.x, adx[1], adx[0]);
    two_diff(pa.y, pd.y, ady[1], ady[0]);
    two_diff(pb.x, pd.x, bdx[1], bdx[0]);
    two_diff(pb.y, pd.y, bdy[1], bdy[0]);
    two_diff(pc.x, pd.x, cdx[1], cdx[0]);
    two_diff(pc.y, pd.y, cdy[1], cdy[0]);

    static thread_local double tmp[4096], tmp2[4096];

    // lift_k = kdx^2 + kdy^2 (up to 16 terms)
    auto lift = [&](const double* kx, const double* ky, double* out) {
        double sqx[8], sqy[8];
        int lx = expansion_mul(2, kx, 2, kx, sqx, tmp, tmp2);
        int ly = expansion_mul(2, ky, 2, ky, sqy, tmp, tmp2);
        return fast_expansion_sum_zeroelim(lx, sqx, ly, sqy, out);
    };
    double alift[16], blift[16], clift[16];
    int allen = lift(adx, ady, alift);
    int bllen = lift(bdx, bdy, blift);
    int cllen = lift(cdx, cdy, clift);

    // 2x2 minors (up to 16 terms each)
    auto minor2 = [&](const double* ux, const double* vy, const double* vx, const double* uy, double* out) {
        double p1[8], p2[8], n2[8];
        int l1 = expansion_mul(2, ux, 2, vy, p1, tmp, tmp2);
        int l2 = expansion_mul(2, vx, 2, uy, p2, tmp, tmp2);
        l2 = expansion_negate(l2, p2, n2);
        return fast_expansion_sum_zeroelim(l1, p1, l2, n2, out);
    };
    double bc[16], ca[16], ab[16];
    int bclen = minor2(bdx, cdy, cdx, bdy, bc);  // bdx*cdy - cdx*bdy
    int calen = minor2(cdx, ady, adx, cdy, ca);  // cdx*ady - adx*cdy
    int ablen = minor2(adx, bdy, bdx, ady, ab);  // adx*bdy - bdx*ady

    static thread_local double ta[1024], tb[1024], tc[1024], s1[2048], det[4096];
    int talen = expansion_mul(allen, alift, bclen, bc, ta, tmp, tmp2);
    int tblen = expansion_mul(bllen, blift, calen, ca, tb, tmp, tmp2);
    int tclen = expansion_mul(cllen, clift, ablen, ab, tc, tmp, tmp2);
    int s1len = fast_expansion_sum_zeroelim(talen, ta, tblen, tb, s1);
    int dlen = fast_expansion_sum_zeroelim(s1len, s1, tclen, tc, det);
    return expansion_sign_value(dlen, det);
}

}  // namespace

double orient2d(Vec2 pa, Vec2 pb, Vec2 pc) {
    double detleft = (pa.x - pc.x) * (pb.y - pc.y);
    double detright = (pa.y - pc.y) * (pb.x - pc.x);
    double det = detleft - detright;
    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0) return det;
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det;
        detsum = -detleft - detright;
    } else {
        return det;
    }
    double errbound = kCcwErrBoundA * detsum;
    if (det >= errbound || -det >= errbound) return det;
    return orient2d_exact(pa, pb, pc);
}

double incircle(Vec2 pa, Vec2 pb, Vec2 pc, Vec2 pd) {
    double adx = pa.x - pd.x, ady = pa.y - pd.y;
    double bdx = pb.x - pd.x, bdy = pb.y - pd.y;
    double cdx = pc.x - pd.x, cdy = pc.y - pd.y;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double alift = adx * adx + ady * ady;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double blift = bdx * bdx + bdy * bdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                       (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                       (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    double errbound = kIccErrBoundA * permanent;
    if (det > errbound || -det > errbound) return det;
    return incircle_exact(pa, pb, pc, pd);
}

}  // namespace gf
