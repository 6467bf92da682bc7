#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "sdrom/fv_core.hpp"
#include "sdrom/physics.hpp"

namespace test_support {

using namespace sdrom;

// Owns everything a ResidualContext points to, for one monolithic grid.
struct Problem {
  CartesianGrid grid;
  Subdomain sub;
  GhostLayer ghosts;
  std::vector<double> prev;
  ResidualContext ctx;

  Problem(System sys, int nx, int ny, double dt, ParamSet params = {},
          std::optional<Bounds> bounds = std::nullopt) {
    const auto st = default_settings(sys);
    FluxModel m;
    m.system = sys;
    grid = build_grid(nx, ny, bounds.value_or(st.bounds), m.n_vars());
    sub = decompose(grid, 1, 1, 0).front();
    ghosts = make_ghost_layer(sub, m.n_vars());
    prev = initial_condition(m, params, grid);
    ctx.sub = &sub;
    ctx.dx = grid.dx;
    ctx.dy = grid.dy;
    ctx.model = m;
    ctx.params = params;
    ctx.bcs = st.physical_bcs;
    ctx.dt = dt;
    ctx.prev = prev;
    ctx.ghosts = &ghosts;
  }
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  void set_prev(std::vector<double> p) {
    prev = std::move(p);
    ctx.prev = prev;
  }
};

// A random physically valid state near a reference level.
inline std::vector<double> random_state(System sys, int n_cells, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w;
  for (int c = 0; c < n_cells; ++c) {
    switch (sys) {
      case System::swe:
        w.push_back(1.0 + 0.3 * u(rng));
        w.push_back(0.4 * u(rng));
        w.push_back(0.4 * u(rng));
        break;
      case System::burgers:
        w.push_back(0.5 * u(rng));
        w.push_back(0.5 * u(rng));
        break;
      case System::euler: {
        const double rho = 1.0 + 0.4 * u(rng);
        const double vx = 0.5 * u(rng), vy = 0.5 * u(rng);
        const double p = 1.0 + 0.4 * u(rng);
        w.push_back(rho);
        w.push_back(rho * vx);
        w.push_back(rho * vy);
        w.push_back(p / 0.4 + 0.5 * rho * (vx * vx + vy * vy));
        break;
      }
    }
  }
  return w;
}

// Dense central-difference Jacobian of the time residual.
inline std::vector<std::vector<double>> central_fd_jacobian(const ResidualContext& ctx, std::vector<double> x,
                                                            double rel_step = 1e-6) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = rel_step * (1.0 + std::abs(x[j]));
    const double x0 = x[j];
    x[j] = x0 + h;
    const auto rp = time_residual(ctx, x);
    x[j] = x0 - h;
    const auto rm = time_residual(ctx, x);
    x[j] = x0;
    cols[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) cols[j][i] = (rp[i] - rm[i]) / (2.0 * h);
  }
  return cols;
}

}  // namespace test_support
