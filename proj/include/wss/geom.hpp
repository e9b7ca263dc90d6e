#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace wss {

template <typename Scalar> using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar> using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

using Vec2 = Vec2T<double>;
using Vec3 = Vec3T<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Absolute tolerances, interpreted in the normalized frame (initial bounding
// box scaled to unit max extent).
struct Tolerances {
  double eps_geom = 1e-9;
  double eps_param = 1e-9;
  double eps_time_cluster = 1e-9;

  void validate() const {
    if (!(eps_geom > 0) || !(eps_param > 0) || !(eps_time_cluster > 0) ||
        eps_param > 1)
      throw std::invalid_argument("tolerances must be positive, eps_param <= 1");
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

// 2D cross product (z component of the 3D cross product).
template <typename Scalar>
Scalar cross2(const Vec2T<Scalar>& a, const Vec2T<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Outward normal of a directed edge with unit direction u, for
// counter-clockwise outer loops (interior on the left).
template <typename Scalar>
Vec2T<Scalar> outward_normal(const Vec2T<Scalar>& u) {
  return Vec2T<Scalar>(u.y(), -u.x());
}

template <typename Scalar>
Scalar project_length(const Vec2T<Scalar>& d, const Vec2T<Scalar>& u) {
  return d.dot(u);
}

// Local coordinate xi in [-1, 1] where the linear interpolant
//   f(xi) = 1/2 (1 - xi) f_n + 1/2 (1 + xi) f_np1
// vanishes. Returns nullopt when f does not reach zero on the interval.
template <typename Scalar>
std::optional<Scalar> zero_crossing_xi(Scalar f_n, Scalar f_np1,
                                       Scalar eps_geom = Scalar(1e-9)) {
  const Scalar f_mid = Scalar(0.5) * (f_np1 + f_n);
  const Scalar f_diff = Scalar(0.5) * (f_np1 - f_n);
  if (f_diff == Scalar(0)) {
    if (std::abs(f_mid) <= eps_geom) return Scalar(-1);
    return std::nullopt;
  }
  const bool brackets = (f_n <= 0 && f_np1 >= 0) || (f_n >= 0 && f_np1 <= 0) ||
                        std::abs(f_np1) <= eps_geom;
  if (!brackets) return std::nullopt;
  return std::clamp(-f_mid / f_diff, Scalar(-1), Scalar(1));
}

template <typename Scalar>
Scalar xi_to_dt(Scalar xi, Scalar dt_n) {
  return Scalar(0.5) * (Scalar(1) + xi) * dt_n;
}

template <typename Scalar>
Scalar lerp_xi(Scalar f_n, Scalar f_np1, Scalar xi) {
  return Scalar(0.5) * (Scalar(1) - xi) * f_n +
         Scalar(0.5) * (Scalar(1) + xi) * f_np1;
}

// Twice the signed area of a closed ring.
template <typename Range>
double signed_area2(const Range& ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return acc;
}

template <typename Range>
double signed_area(const Range& ring) {
  return 0.5 * signed_area2(ring);
}

// Proper or touching intersection of closed segments [a,b] and [c,d],
// decided with an absolute tolerance on the orientation tests.
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                               const Vec2& d, double eps) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return cross2<double>(q - p, r - p);
  };
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
    return true;
  auto on_seg = [eps](const Vec2& p, const Vec2& q, const Vec2& r) {
    // r on segment pq
    const Vec2 pq = q - p;
    const double len2 = pq.squaredNorm();
    if (len2 <= eps * eps) return (r - p).norm() <= eps;
    const double s = (r - p).dot(pq) / len2;
    if (s < 0 || s > 1) return false;
    return (p + s * pq - r).norm() <= eps;
  };
  return on_seg(a, b, c) || on_seg(a, b, d) || on_seg(c, d, a) ||
         on_seg(c, d, b);
}

// Strict crossing: interiors intersect transversally by more than eps.
inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c,
                           const Vec2& d, double eps) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return cross2<double>(q - p, r - p);
  };
  const double lab = (b - a).norm(), lcd = (d - c).norm();
  const double d1 = orient(c, d, a) / std::max(lcd, 1e-300);
  const double d2 = orient(c, d, b) / std::max(lcd, 1e-300);
  const double d3 = orient(a, b, c) / std::max(lab, 1e-300);
  const double d4 = orient(a, b, d) / std::max(lab, 1e-300);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

}  // namespace wss
