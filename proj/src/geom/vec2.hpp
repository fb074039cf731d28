#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace gf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    bool operator==(const Vec2&) const = default;

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
// counter-clockwise 90 degree rotation
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double dist2(Vec2 a, Vec2 b) { return (a - b).norm2(); }

inline Vec2 normalized(Vec2 v) {
    double n = v.norm();
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

using Point2 = Vec2;

// Squared distance from p to segment [a,b] plus the closest point.
inline double closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b, Vec2& out) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) {
        out = a;
        return dist2(p, a);
    }
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    out = a + ab * t;
    return dist2(p, out);
}

}  // namespace gf
