#pragma once

// Conservation-law definitions: shallow water (h, hu, hv), 2D viscous Burgers
// (u, v) and compressible Euler (rho, rho u, rho v, rho E).
//
// The flux code is templated on the scalar type so the same expressions give
// both values (double) and exact local Jacobians (Dual<N>).

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "sdrom/dual.hpp"
#include "sdrom/errors.hpp"
#include "sdrom/mesh.hpp"

namespace sdrom {

enum class System { swe, burgers, euler };
enum class Direction { x, y };
enum class BcType { slip_wall, dirichlet, neumann, schwarz };
/// How the SWE Coriolis source reads its "u" and "v": as velocities or as
/// momenta (hu, hv).
enum class SourceReading { velocity, momentum };

std::string_view system_name(System s);
System parse_system(std::string_view name);
std::string_view bc_name(BcType bc);

struct FluxModel {
  System system = System::swe;
  double gravity = 9.8;
  double gamma = 1.4;
  /// Entropy-fix threshold as a fraction of the largest wave speed magnitude.
  double entropy_fix = 0.05;
  SourceReading source_reading = SourceReading::velocity;

  int n_vars() const;
};

/// Only the entry matching the active system is read.
struct ParamSet {
  double mu = 0.0;         // SWE Coriolis parameter
  double diffusion = 0.0;  // Burgers diffusion coefficient D
  double p_upper = 1.5;    // Euler upper-right initial pressure
};

/// Reads the one parameter that varies for the given system.
double active_param(System s, const ParamSet& p);
ParamSet with_active_param(System s, ParamSet p, double value);

/// Per-side boundary tags, indexed by side_index(Side).
using BoundarySpec = std::array<BcType, 4>;

/// Reference settings for each system (domain, final time, step, boundaries).
struct SystemSettings {
  Bounds bounds;
  double final_time = 0.0;
  double dt = 0.0;
  BoundarySpec physical_bcs{};
};
SystemSettings default_settings(System s);

namespace phys {

template <class T, int NV>
using State = std::array<T, NV>;

template <class T>
const T& pick_max(const T& a, const T& b) {
  return value_of(a) >= value_of(b) ? a : b;
}

/// |lambda| with a parabolic smoothing below delta.
template <class T>
T fixed_abs(const T& lambda, const T& delta) {
  using std::abs;
  T a = abs(lambda);
  if (value_of(delta) <= 0.0 || value_of(a) >= value_of(delta)) return a;
  return (lambda * lambda + delta * delta) / (2.0 * delta);
}

[[noreturn]] void throw_state(const char* what, double value);

// ---------------------------------------------------------------- SWE
struct Swe {
  static constexpr int nv = 3;
  static constexpr std::array<int, 2> momentum{1, 2};

  template <class T>
  static void check(const State<T, nv>& w, const FluxModel&) {
    if (!(value_of(w[0]) > 0.0)) throw_state("non-positive water height h", value_of(w[0]));
  }

  template <class T>
  static State<T, nv> flux_x(const State<T, nv>& w, const FluxModel& m) {
    check(w, m);
    const T u = w[1] / w[0];
    return {w[1], w[1] * u + 0.5 * m.gravity * w[0] * w[0], w[2] * u};
  }

  template <class T>
  static State<T, nv> roe_x(const State<T, nv>& l, const State<T, nv>& r, const FluxModel& m) {
    using std::abs;
    using std::sqrt;
    const auto fl = flux_x(l, m);
    const auto fr = flux_x(r, m);
    const T sl = sqrt(l[0]);
    const T sr = sqrt(r[0]);
    const T ul = l[1] / l[0], vl = l[2] / l[0];
    const T ur = r[1] / r[0], vr = r[2] / r[0];
    const T u = (sl * ul + sr * ur) / (sl + sr);
    const T v = (sl * vl + sr * vr) / (sl + sr);
    const T h = 0.5 * (l[0] + r[0]);
    if (!(value_of(h) > 0.0)) throw_state("non-positive Roe-averaged height", value_of(h));
    const T c = sqrt(m.gravity * h);
    const T dh = r[0] - l[0], dhu = r[1] - l[1], dhv = r[2] - l[2];
    const T a1 = ((u + c) * dh - dhu) / (2.0 * c);
    const T a3 = (dhu - (u - c) * dh) / (2.0 * c);
    const T a2 = dhv - v * dh;
    const T l1 = u - c, l3 = u + c;
    const T delta = m.entropy_fix * pick_max(pick_max(T(abs(l1)), T(abs(u))), T(abs(l3)));
    const T k1 = fixed_abs(l1, delta) * a1;
    const T k2 = fixed_abs(u, delta) * a2;
    const T k3 = fixed_abs(l3, delta) * a3;
    State<T, nv> diss{k1 + k3, k1 * (u - c) + k3 * (u + c), (k1 + k3) * v + k2};
    State<T, nv> f;
    for (int i = 0; i < nv; ++i) f[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * diss[i];
    return f;
  }
};

// ---------------------------------------------------------------- Burgers
struct Burgers {
  static constexpr int nv = 2;
  static constexpr std::array<int, 2> momentum{0, 1};

  template <class T>
  static void check(const State<T, nv>&, const FluxModel&) {}

  template <class T>
  static State<T, nv> flux_x(const State<T, nv>& w, const FluxModel&) {
    return {0.5 * w[0] * w[0], 0.5 * w[0] * w[1]};
  }

  // Flux Jacobian at the arithmetic mean is lower triangular:
  //   [[a, 0], [b/2, a/2]],  a = mean u, b = mean v.
  // |A| uses the divided-difference form of a matrix function on a
  // triangular matrix.
  template <class T>
  static State<T, nv> roe_x(const State<T, nv>& l, const State<T, nv>& r, const FluxModel& m) {
    using std::abs;
    const auto fl = flux_x(l, m);
    const auto fr = flux_x(r, m);
    const T a = 0.5 * (l[0] + r[0]);
    const T b = 0.5 * (l[1] + r[1]);
    const T l1 = a, l2 = 0.5 * a;
    const T delta = m.entropy_fix * pick_max(T(abs(l1)), T(abs(l2)));
    const T f1 = fixed_abs(l1, delta);
    const T f2 = fixed_abs(l2, delta);
    const T gap = l1 - l2;
    const T dd = std::abs(value_of(gap)) > 1e-300 ? T((f1 - f2) / gap) : T(0.0);
    const T du = r[0] - l[0], dv = r[1] - l[1];
    State<T, nv> f;
    f[0] = 0.5 * (fl[0] + fr[0]) - 0.5 * (f1 * du);
    f[1] = 0.5 * (fl[1] + fr[1]) - 0.5 * (0.5 * b * dd * du + f2 * dv);
    return f;
  }
};

// ---------------------------------------------------------------- Euler
struct Euler {
  static constexpr int nv = 4;
  static constexpr std::array<int, 2> momentum{1, 2};

  template <class T>
  static T pressure(const State<T, nv>& w, double gamma) {
    if (!(value_of(w[0]) > 0.0)) throw_state("non-positive density", value_of(w[0]));
    const T p = (gamma - 1.0) * (w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / w[0]);
    if (!(value_of(p) > 0.0)) throw_state("non-positive pressure", value_of(p));
    return p;
  }

  template <class T>
  static void check(const State<T, nv>& w, const FluxModel& m) {
    (void)pressure(w, m.gamma);
  }

  template <class T>
  static State<T, nv> flux_x(const State<T, nv>& w, const FluxModel& m) {
    const T p = pressure(w, m.gamma);
    const T u = w[1] / w[0];
    return {w[1], w[1] * u + p, w[2] * u, (w[3] + p) * u};
  }

  template <class T>
  static State<T, nv> roe_x(const State<T, nv>& l, const State<T, nv>& r, const FluxModel& m) {
    using std::abs;
    using std::sqrt;
    const double g = m.gamma;
    const auto fl = flux_x(l, m);
    const auto fr = flux_x(r, m);
    const T pl = pressure(l, g), pr = pressure(r, g);
    const T sl = sqrt(l[0]), sr = sqrt(r[0]);
    const T ul = l[1] / l[0], vl = l[2] / l[0], hl = (l[3] + pl) / l[0];
    const T ur = r[1] / r[0], vr = r[2] / r[0], hr = (r[3] + pr) / r[0];
    const T inv = 1.0 / (sl + sr);
    const T u = (sl * ul + sr * ur) * inv;
    const T v = (sl * vl + sr * vr) * inv;
    const T h = (sl * hl + sr * hr) * inv;
    const T ke = 0.5 * (u * u + v * v);
    const T c2 = (g - 1.0) * (h - ke);
    if (!(value_of(c2) > 0.0)) throw_state("non-positive Roe-averaged sound speed squared", value_of(c2));
    const T c = sqrt(c2);
    const T rho = sl * sr;
    const T drho = r[0] - l[0], dp = pr - pl, du = ur - ul, dv = vr - vl;
    const T a1 = (dp - rho * c * du) / (2.0 * c2);
    const T a2 = drho - dp / c2;
    const T a3 = rho * dv;
    const T a4 = (dp + rho * c * du) / (2.0 * c2);
    const T l1 = u - c, l4 = u + c;
    const T delta = m.entropy_fix * pick_max(pick_max(T(abs(l1)), T(abs(u))), T(abs(l4)));
    const T k1 = fixed_abs(l1, delta) * a1;
    const T k2 = fixed_abs(u, delta) * a2;
    const T k3 = fixed_abs(u, delta) * a3;
    const T k4 = fixed_abs(l4, delta) * a4;
    State<T, nv> diss{
        k1 + k2 + k4,
        k1 * (u - c) + k2 * u + k4 * (u + c),
        (k1 + k2 + k4) * v + k3,
        k1 * (h - u * c) + k2 * ke + k3 * v + k4 * (h + u * c),
    };
    State<T, nv> f;
    for (int i = 0; i < nv; ++i) f[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * diss[i];
    return f;
  }
};

template <class Sys, class T>
State<T, Sys::nv> swap_xy(State<T, Sys::nv> w) {
  std::swap(w[Sys::momentum[0]], w[Sys::momentum[1]]);
  return w;
}

template <class Sys, class T>
State<T, Sys::nv> physical_flux(const State<T, Sys::nv>& w, Direction d, const FluxModel& m) {
  if (d == Direction::x) return Sys::flux_x(w, m);
  return swap_xy<Sys>(Sys::flux_x(swap_xy<Sys>(w), m));
}

template <class Sys, class T>
State<T, Sys::nv> roe_flux(const State<T, Sys::nv>& l, const State<T, Sys::nv>& r, Direction d,
                           const FluxModel& m) {
  if (d == Direction::x) return Sys::roe_x(l, r, m);
  return swap_xy<Sys>(Sys::roe_x(swap_xy<Sys>(l), swap_xy<Sys>(r), m));
}

/// Advective Roe flux plus the two-point diffusive flux (Burgers only).
template <class Sys, class T>
State<T, Sys::nv> face_flux(const State<T, Sys::nv>& l, const State<T, Sys::nv>& r, Direction d,
                            double spacing, const FluxModel& m, const ParamSet& p) {
  auto f = roe_flux<Sys>(l, r, d, m);
  if constexpr (std::is_same_v<Sys, Burgers>) {
    if (p.diffusion != 0.0) {
      const double k = p.diffusion / spacing;
      for (int i = 0; i < Sys::nv; ++i) f[i] -= k * (r[i] - l[i]);
    }
  }
  return f;
}

template <class Sys, class T>
State<T, Sys::nv> source(const State<T, Sys::nv>& w, const FluxModel& m, const ParamSet& p) {
  State<T, Sys::nv> s{};
  for (auto& x : s) x = T(0.0);
  if constexpr (std::is_same_v<Sys, Swe>) {
    if (p.mu != 0.0) {
      if (m.source_reading == SourceReading::velocity) {
        Sys::check(w, m);
        s[1] = -p.mu * (w[2] / w[0]);
        s[2] = p.mu * (w[1] / w[0]);
      } else {
        s[1] = -p.mu * w[2];
        s[2] = p.mu * w[1];
      }
    }
  }
  return s;
}

/// Diagonal of the linear map interior -> ghost for a physical boundary.
template <class Sys>
std::array<double, Sys::nv> ghost_factors(BcType bc, Side outward) {
  std::array<double, Sys::nv> f{};
  f.fill(1.0);
  switch (bc) {
    case BcType::slip_wall: {
      const bool x_normal = outward == Side::left || outward == Side::right;
      f[Sys::momentum[x_normal ? 0 : 1]] = -1.0;
      break;
    }
    case BcType::dirichlet:
      f.fill(-1.0);
      break;
    case BcType::neumann:
      break;
    case BcType::schwarz:
      throw InternalError("interface ghosts are set by transfer, not by a boundary rule");
  }
  return f;
}

}  // namespace phys

// ---------------------------------------------------------------- runtime API

std::vector<double> physical_flux(const FluxModel& m, std::span<const double> w, Direction d);
std::vector<double> roe_flux(const FluxModel& m, std::span<const double> left, std::span<const double> right,
                             Direction d);
std::vector<double> diffusive_flux(const FluxModel& m, std::span<const double> left,
                                   std::span<const double> right, double spacing, double diffusion);
std::vector<double> source_term(const FluxModel& m, std::span<const double> w, const ParamSet& p);
std::vector<double> ghost_state(BcType bc, std::span<const double> interior, Side outward, const FluxModel& m);
double pressure(const FluxModel& m, std::span<const double> w);

/// Primitive Euler state (density, velocities, pressure).
struct Primitive {
  double rho = 0.0, u = 0.0, v = 0.0, p = 0.0;
};

/// Four-quadrant Riemann data whose interfaces are all single shocks moving
/// toward -x / -y. Quadrant 0 is upper-right, then counter-clockwise.
struct QuadrantStates {
  std::array<Primitive, 4> q;
  int newton_iterations = 0;
};

QuadrantStates four_shock_states(double rho_upper, double p_upper, double p_lower_left, double gamma);

/// Largest relative Rankine-Hugoniot defect across a planar jump (left -> right
/// along x, or below -> above along y). Also returns the shock speed.
struct JumpCheck {
  double defect = 0.0;
  double speed = 0.0;
};
JumpCheck rankine_hugoniot_defect(const Primitive& a, const Primitive& b, Direction d, double gamma);

std::array<double, 4> to_conservative(const Primitive& w, double gamma);

/// Quadrant split lines for the Euler Riemann problem.
inline constexpr double euler_split_x = 0.8;
inline constexpr double euler_split_y = 0.8;
inline constexpr double euler_p_lower_left = 0.029;
inline constexpr double euler_rho_upper = 1.5;

/// Cell-centroid evaluation of the system's initial condition over the whole grid.
std::vector<double> initial_condition(const FluxModel& m, const ParamSet& p, const CartesianGrid& grid);

}  // namespace sdrom

namespace sdrom::phys {

/// Calls f(Swe{}), f(Burgers{}) or f(Euler{}) for the runtime system tag.
template <class F>
decltype(auto) visit_system(System s, F&& f) {
  switch (s) {
    case System::swe: return f(Swe{});
    case System::burgers: return f(Burgers{});
    case System::euler: return f(Euler{});
  }
  throw InternalError("unknown system");
}

}  // namespace sdrom::phys
