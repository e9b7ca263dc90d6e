#pragma once

#include "wss/geom.hpp"

#include <Eigen/Dense>

#include <optional>

namespace wss {

// Roof plane over one wavefront edge.
template <typename Scalar> struct RoofPlaneT {
  Vec3T<Scalar> s;       // unit normal
  Scalar alpha;          // inclination in (0, pi)
  Vec2T<Scalar> edge_u;  // edge direction
  Vec2T<Scalar> edge_n_out;
};
using RoofPlane = RoofPlaneT<double>;

// Unit vector inside the roof plane, perpendicular to the edge. n_out is the
// outward edge normal, so alpha < pi/2 leans inward.
template <typename Scalar>
Vec3T<Scalar> roof_tangent(Scalar alpha, const Vec2T<Scalar>& n_out) {
  const Scalar c = std::cos(Scalar(kPi) - alpha);
  const Scalar s = std::sin(Scalar(kPi) - alpha);
  return Vec3T<Scalar>(c * n_out.x(), c * n_out.y(), s);
}

template <typename Scalar>
Vec3T<Scalar> roof_normal(const Vec2T<Scalar>& u, const Vec3T<Scalar>& t) {
  return Vec3T<Scalar>(u.x(), u.y(), Scalar(0)).cross(t);
}

template <typename Scalar>
RoofPlaneT<Scalar> make_roof_plane(Scalar alpha, const Vec2T<Scalar>& u,
                                   const Vec2T<Scalar>& n_out) {
  return {roof_normal(u, roof_tangent(alpha, n_out)), alpha, u, n_out};
}

template <typename Scalar>
bool is_colinear(const Vec3T<Scalar>& s_prev, const Vec3T<Scalar>& s_next,
                 Scalar eps = Scalar(1e-9)) {
  const Vec2T<Scalar> a = s_prev.template head<2>();
  const Vec2T<Scalar> b = s_next.template head<2>();
  const Scalar scale = std::max(a.norm(), b.norm());
  if (scale == Scalar(0)) return true;
  return std::abs(cross2(a, b)) <= eps * scale * scale;
}

// Planar velocity keeping the vertex inside both roof planes:
//   s_prev_xy . v + s_prev_z v_z = 0,  s_next_xy . v + s_next_z v_z = 0.
// nullopt marks the colinear singularity.
template <typename Scalar>
std::optional<Vec2T<Scalar>> solve_vertex_velocity(const Vec3T<Scalar>& s_prev,
                                                   const Vec3T<Scalar>& s_next,
                                                   Scalar v_z,
                                                   Scalar eps = Scalar(1e-9)) {
  if (is_colinear(s_prev, s_next, eps)) return std::nullopt;
  Eigen::Matrix<Scalar, 2, 2> m;
  m.row(0) = s_prev.template head<2>().transpose();
  m.row(1) = s_next.template head<2>().transpose();
  const Vec2T<Scalar> rhs(-s_prev.z() * v_z, -s_next.z() * v_z);
  return Vec2T<Scalar>(m.inverse() * rhs);
}

// Same system written with planar inward speeds w (w = cot(alpha) per unit
// v_z): (-n_prev) . v = w_prev, (-n_next) . v = w_next.
template <typename Scalar>
std::optional<Vec2T<Scalar>> velocity_from_weights(const Vec2T<Scalar>& n_out_prev,
                                                   Scalar w_prev,
                                                   const Vec2T<Scalar>& n_out_next,
                                                   Scalar w_next,
                                                   Scalar eps = Scalar(1e-9)) {
  Eigen::Matrix<Scalar, 2, 2> m;
  m.row(0) = -n_out_prev.transpose();
  m.row(1) = -n_out_next.transpose();
  const Scalar scale = std::max(n_out_prev.norm(), n_out_next.norm());
  if (std::abs(m.determinant()) <= eps * scale * scale) return std::nullopt;
  return Vec2T<Scalar>(m.inverse() * Vec2T<Scalar>(w_prev, w_next));
}

template <typename Scalar> Scalar weight_to_alpha(Scalar w) {
  // arccot with range (0, pi)
  return Scalar(kPi) / 2 - std::atan(w);
}

template <typename Scalar> Scalar alpha_to_weight(Scalar alpha) {
  return std::cos(alpha) / std::sin(alpha);
}

}  // namespace wss
