#ifndef CAPSIM_GEOMETRY_HPP
#define CAPSIM_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "capsim/errors.hpp"

namespace capsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
  double x{}, y{}, z{};
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// Point of S^2 as a Euclidean 3-vector of unit norm.  Constructed only through
// chart_forward or normalized(), so the unit invariant holds by construction.
struct UnitVec3 {
  double x{}, y{}, z{1.0};
  Vec3 vec() const { return {x, y, z}; }
};

inline UnitVec3 normalized(Vec3 v) {
  double n = norm(v);
  if (!(n > 0.0)) throw DomainError("normalized: zero vector");
  return {v.x / n, v.y / n, v.z / n};
}

inline double dot(UnitVec3 a, UnitVec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double dot(UnitVec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Chart-psi1 coordinates: co-latitude theta in (0,pi), lifted longitude in R.
// The lift is the canonical representation; reduction mod 2pi happens only in
// chart_forward.
struct SphPoint {
  double theta{};
  double phi{};

  SphPoint() = default;
  SphPoint(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!(theta > 0.0 && theta < kPi))
      throw PoleError("SphPoint: co-latitude outside open (0,pi)");
  }
};

struct TangentFrame {
  Vec3 e_theta;
  Vec3 e_phi;
};

// psi1(theta, phi mod 2pi)
inline UnitVec3 chart_forward(const SphPoint& p) {
  double phi = std::remainder(p.phi, kTwoPi);
  double st = std::sin(p.theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(p.theta)};
}

// Inverse of psi1 with the lifted-longitude branch closest to phi_hint.
inline SphPoint chart_inverse(const UnitVec3& x, double phi_hint) {
  if (std::fabs(x.z) >= 1.0 - 1e-12)
    throw PoleError("chart_inverse: point within 1e-12 of a pole");
  double theta = std::acos(x.z);
  double base = std::atan2(x.y, x.x);
  double phi = base + kTwoPi * std::round((phi_hint - base) / kTwoPi);
  return SphPoint(theta, phi);
}

inline double chord_distance(const UnitVec3& a, const UnitVec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// |x-y| = 2 sin(d/2)  =>  d = 2 asin(|x-y|/2); robust at both ends of [0,pi].
inline double geodesic_distance(const UnitVec3& a, const UnitVec3& b) {
  double half = 0.5 * chord_distance(a, b);
  return 2.0 * std::asin(half > 1.0 ? 1.0 : half);
}

// e_theta = d(psi1)/d(theta), e_phi = d(psi1)/d(phi) / sin(theta).
// Orientation: e_theta x e_phi = +x (outward).
inline TangentFrame tangent_frame(const SphPoint& p) {
  double st = std::sin(p.theta), ct = std::cos(p.theta);
  double phi = std::remainder(p.phi, kTwoPi);
  double cp = std::cos(phi), sp = std::sin(phi);
  return {{ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

// Sum of geodesic segment lengths between consecutive chart images, with the
// closing segment when closed.  Compensated (Neumaier) accumulation.
double polyline_length(std::span<const SphPoint> points, bool closed);

// Rodrigues rotation about a unit axis.
inline Vec3 rotate(Vec3 v, UnitVec3 axis, double angle) {
  Vec3 k = axis.vec();
  double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(k, v) + (dot(k, v) * (1.0 - c)) * k;
}

inline UnitVec3 rotate(UnitVec3 v, UnitVec3 axis, double angle) {
  return normalized(rotate(v.vec(), axis, angle));
}

// Compensated running sum (Neumaier).
struct KahanSum {
  double s{}, c{};
  void add(double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace capsim

#endif
