#include "sdrom/physics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdrom {

std::string_view system_name(System s) {
  switch (s) {
    case System::swe: return "swe";
    case System::burgers: return "burgers";
    case System::euler: return "euler";
  }
  return "?";
}

System parse_system(std::string_view name) {
  if (name == "swe") return System::swe;
  if (name == "burgers") return System::burgers;
  if (name == "euler") return System::euler;
  throw ConfigError("unknown system '" + std::string(name) + "' (expected swe, burgers or euler)");
}

std::string_view bc_name(BcType bc) {
  switch (bc) {
    case BcType::slip_wall: return "slip_wall";
    case BcType::dirichlet: return "dirichlet";
    case BcType::neumann: return "neumann";
    case BcType::schwarz: return "schwarz";
  }
  return "?";
}

int FluxModel::n_vars() const {
  return phys::visit_system(system, [](auto sys) { return decltype(sys)::nv; });
}

double active_param(System s, const ParamSet& p) {
  switch (s) {
    case System::swe: return p.mu;
    case System::burgers: return p.diffusion;
    case System::euler: return p.p_upper;
  }
  return 0.0;
}

ParamSet with_active_param(System s, ParamSet p, double value) {
  switch (s) {
    case System::swe: p.mu = value; break;
    case System::burgers: p.diffusion = value; break;
    case System::euler: p.p_upper = value; break;
  }
  return p;
}

SystemSettings default_settings(System s) {
  SystemSettings st;
  switch (s) {
    case System::swe:
      st.bounds = {-5.0, 5.0, -5.0, 5.0};
      st.final_time = 10.0;
      st.dt = 0.01;
      st.physical_bcs.fill(BcType::slip_wall);
      break;
    case System::burgers:
      st.bounds = {-1.0, 1.0, -1.0, 1.0};
      st.final_time = 7.5;
      st.dt = 0.05;
      st.physical_bcs[side_index(Side::left)] = BcType::dirichlet;
      st.physical_bcs[side_index(Side::bottom)] = BcType::dirichlet;
      st.physical_bcs[side_index(Side::right)] = BcType::neumann;
      st.physical_bcs[side_index(Side::top)] = BcType::neumann;
      break;
    case System::euler:
      st.bounds = {0.0, 1.0, 0.0, 1.0};
      st.final_time = 0.9;
      st.dt = 0.005;
      st.physical_bcs.fill(BcType::neumann);
      break;
  }
  return st;
}

namespace phys {

void throw_state(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (value " << value << ")";
  throw StateError(os.str());
}

}  // namespace phys

namespace {

template <class Sys>
phys::State<double, Sys::nv> load(std::span<const double> w) {
  if (w.size() != static_cast<std::size_t>(Sys::nv)) {
    throw ConfigError("state vector has " + std::to_string(w.size()) + " entries, expected " +
                      std::to_string(Sys::nv));
  }
  phys::State<double, Sys::nv> s{};
  std::copy_n(w.begin(), Sys::nv, s.begin());
  return s;
}

template <std::size_t N>
std::vector<double> to_vec(const std::array<double, N>& a) {
  return {a.begin(), a.end()};
}

}  // namespace

std::vector<double> physical_flux(const FluxModel& m, std::span<const double> w, Direction d) {
  return phys::visit_system(m.system, [&](auto sys) {
    using Sys = decltype(sys);
    return to_vec(phys::physical_flux<Sys>(load<Sys>(w), d, m));
  });
}

std::vector<double> roe_flux(const FluxModel& m, std::span<const double> left, std::span<const double> right,
                             Direction d) {
  return phys::visit_system(m.system, [&](auto sys) {
    using Sys = decltype(sys);
    return to_vec(phys::roe_flux<Sys>(load<Sys>(left), load<Sys>(right), d, m));
  });
}

std::vector<double> diffusive_flux(const FluxModel& m, std::span<const double> left,
                                   std::span<const double> right, double spacing, double diffusion) {
  if (m.system != System::burgers) throw ConfigError("diffusive flux is only defined for the Burgers system");
  if (!(spacing > 0.0)) throw ConfigError("edge spacing must be positive");
  std::vector<double> f(left.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = -diffusion * (right[i] - left[i]) / spacing;
  return f;
}

std::vector<double> source_term(const FluxModel& m, std::span<const double> w, const ParamSet& p) {
  return phys::visit_system(m.system, [&](auto sys) {
    using Sys = decltype(sys);
    return to_vec(phys::source<Sys>(load<Sys>(w), m, p));
  });
}

std::vector<double> ghost_state(BcType bc, std::span<const double> interior, Side outward, const FluxModel& m) {
  return phys::visit_system(m.system, [&](auto sys) {
    using Sys = decltype(sys);
    auto w = load<Sys>(interior);
    const auto f = phys::ghost_factors<Sys>(bc, outward);
    for (int i = 0; i < Sys::nv; ++i) w[i] *= f[i];
    return to_vec(w);
  });
}

double pressure(const FluxModel& m, std::span<const double> w) {
  if (m.system != System::euler) throw ConfigError("pressure is only defined for the Euler system");
  return phys::Euler::pressure(load<phys::Euler>(w), m.gamma);
}

std::array<double, 4> to_conservative(const Primitive& w, double gamma) {
  return {w.rho, w.rho * w.u, w.rho * w.v, w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)};
}

namespace {

// Post/pre-shock density ratio along the Hugoniot for pressure ratio pi.
double hugoniot_density_ratio(double pi, double gamma) {
  return ((gamma + 1.0) * pi + (gamma - 1.0)) / ((gamma - 1.0) * pi + (gamma + 1.0));
}

// Normal velocity jump across a shock from (rho_a, p_a) to pressure p_b.
struct ShockJump {
  double rho_b;
  double du;
};

ShockJump shock_jump(double rho_a, double p_a, double p_b, double gamma) {
  const double rho_b = rho_a * hugoniot_density_ratio(p_b / p_a, gamma);
  const double prod = (p_a - p_b) * (1.0 / rho_b - 1.0 / rho_a);
  return {rho_b, std::sqrt(std::max(prod, 0.0))};
}

}  // namespace

QuadrantStates four_shock_states(double rho_upper, double p_upper, double p_lower_left, double gamma) {
  if (!(rho_upper > 0.0) || !(p_upper > 0.0) || !(p_lower_left > 0.0)) {
    throw ConfigError("four-shock data needs positive density and pressures");
  }
  QuadrantStates out;
  const double rel = std::abs(p_upper - p_lower_left) / p_upper;
  if (rel < 1e-14) {
    for (auto& q : out.q) q = {rho_upper, 0.0, 0.0, p_upper};
    return out;
  }
  if (p_upper < p_lower_left) {
    throw ConfigError("four-shock configuration needs the upper-right pressure above the lower-left pressure");
  }

  // Unknown: intermediate pressure p_m of the upper-left / lower-right states.
  // The x-jump from upper-right to upper-left must equal the y-jump from
  // upper-left to lower-left. Solve in s = log(p_m) with a bracketed,
  // damped Newton iteration.
  auto mismatch = [&](double s) {
    const double pm = std::exp(s);
    const auto j1 = shock_jump(rho_upper, p_upper, pm, gamma);
    const auto j2 = shock_jump(j1.rho_b, pm, p_lower_left, gamma);
    return j1.du - j2.du;
  };
  double lo = std::log(p_lower_left);
  double hi = std::log(p_upper);
  double s = 0.5 * (lo + hi);
  double f = mismatch(s);
  int it = 0;
  for (; it < 200; ++it) {
    // mismatch is negative near p_upper (first jump vanishes) and positive
    // near p_lower_left (second jump vanishes).
    if (f > 0.0) lo = s; else hi = s;
    const double h = 1e-7 * std::max(1.0, std::abs(s));
    const double df = (mismatch(s + h) - mismatch(s - h)) / (2.0 * h);
    double next = (df != 0.0) ? s - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double fn = mismatch(next);
    // Damping: halve toward s while the defect grows.
    for (int k = 0; k < 30 && std::abs(fn) > std::abs(f) && std::abs(next - s) > 1e-15; ++k) {
      next = 0.5 * (next + s);
      fn = mismatch(next);
    }
    const double step = std::abs(next - s);
    s = next;
    f = fn;
    if (std::abs(f) < 1e-14 || step < 1e-13 * std::max(1.0, std::abs(s))) break;
  }
  if (std::abs(f) > 1e-10) throw ConfigError("four-shock compatibility solve did not converge");

  const double pm = std::exp(s);
  const auto j1 = shock_jump(rho_upper, p_upper, pm, gamma);
  const auto j2 = shock_jump(j1.rho_b, pm, p_lower_left, gamma);
  out.q[0] = {rho_upper, 0.0, 0.0, p_upper};
  out.q[1] = {j1.rho_b, j1.du, 0.0, pm};
  out.q[2] = {j2.rho_b, j1.du, j2.du, p_lower_left};
  out.q[3] = {j1.rho_b, 0.0, j1.du, pm};
  out.newton_iterations = it + 1;
  return out;
}

JumpCheck rankine_hugoniot_defect(const Primitive& a, const Primitive& b, Direction d, double gamma) {
  FluxModel m;
  m.system = System::euler;
  m.gamma = gamma;
  const auto ua = to_conservative(a, gamma);
  const auto ub = to_conservative(b, gamma);
  const auto fa = phys::physical_flux<phys::Euler>(ua, d, m);
  const auto fb = phys::physical_flux<phys::Euler>(ub, d, m);
  JumpCheck out;
  const double drho = ub[0] - ua[0];
  if (std::abs(drho) > 1e-300) out.speed = (fb[0] - fa[0]) / drho;
  double scale = 1.0;
  for (int i = 0; i < 4; ++i) scale = std::max({scale, std::abs(fa[i]), std::abs(fb[i])});
  for (int i = 0; i < 4; ++i) {
    const double r = (fb[i] - fa[i]) - out.speed * (ub[i] - ua[i]);
    out.defect = std::max(out.defect, std::abs(r) / scale);
  }
  return out;
}

std::vector<double> initial_condition(const FluxModel& m, const ParamSet& p, const CartesianGrid& grid) {
  const int nv = m.n_vars();
  if (grid.n_vars != nv) throw ConfigError("grid n_vars does not match the flux model");
  std::vector<double> u(static_cast<std::size_t>(grid.n_dofs()), 0.0);
  QuadrantStates quad;
  std::array<std::array<double, 4>, 4> cons{};
  if (m.system == System::euler) {
    quad = four_shock_states(euler_rho_upper, p.p_upper, euler_p_lower_left, m.gamma);
    for (int k = 0; k < 4; ++k) cons[k] = to_conservative(quad.q[k], m.gamma);
  }
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const auto [x, y] = grid.centroid(i, j);
      double* w = u.data() + static_cast<std::size_t>((i + j * grid.nx) * nv);
      switch (m.system) {
        case System::swe:
          w[0] = 1.0 + 0.125 * std::exp(-(x - 1.0) * (x - 1.0) - (y - 1.0) * (y - 1.0));
          w[1] = 0.0;
          w[2] = 0.0;
          break;
        case System::burgers: {
          const double g = 0.5 * std::exp((-(x + 0.5) * (x + 0.5) - (y + 0.4) * (y + 0.4)) / 0.075);
          w[0] = g;
          w[1] = g;
          break;
        }
        case System::euler: {
          const bool right = x > euler_split_x;
          const bool upper = y > euler_split_y;
          const int q = upper ? (right ? 0 : 1) : (right ? 3 : 2);
          std::copy(cons[q].begin(), cons[q].end(), w);
          break;
        }
      }
    }
  }
  return u;
}

}  // namespace sdrom
