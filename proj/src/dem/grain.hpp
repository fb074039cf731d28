#pragma once

#include <cmath>
#include <numbers>

#include "geom/vec2.hpp"

namespace gf {

// Rigid disc, per unit out-of-plane thickness.
struct Grain {
    int id = 0;
    Vec2 X{};          // center [m]
    Vec2 V{};          // velocity [m/s]
    double omega = 0;  // angular velocity [rad/s]
    double radius = 0;
    double mass = 0;     // [kg/m]
    double inertia = 0;  // m r^2 / 2
    Vec2 Fc{};           // contact force from the last solve [N/m]
    double Mc = 0;       // contact torque [N]
    Vec2 Ffluid{};       // fluid interaction force [N/m]

    double area() const { return std::numbers::pi * radius * radius; }
};

inline Grain make_grain(int id, Vec2 x, double radius, double density) {
    Grain g;
    g.id = id;
    g.X = x;
    g.radius = radius;
    g.mass = density * std::numbers::pi * radius * radius;
    g.inertia = 0.5 * g.mass * radius * radius;
    return g;
}

struct GrainMaterial {
    double density = 2500.0;       // [kg/m^3]
    double friction = 0.0;         // grain-grain Coulomb coefficient
    double wall_friction = 0.0;    // grain-wall Coulomb coefficient
    // restitution is identically zero: inelastic non-smooth contacts
};

}  // namespace gf
