#include "sdrom/fv_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdrom {

GhostLayer make_ghost_layer(const Subdomain& sub, int nv) {
  GhostLayer g;
  for (Side s : all_sides) {
    if (sub.is_interface(s)) g.side[side_index(s)].assign(static_cast<std::size_t>(sub.side_length(s) * nv), 0.0);
  }
  return g;
}

BoundarySpec subdomain_bcs(const Subdomain& sub, const BoundarySpec& physical) {
  BoundarySpec b = physical;
  for (Side s : all_sides) {
    if (sub.is_interface(s)) b[side_index(s)] = BcType::schwarz;
  }
  return b;
}

Eigen::SparseMatrix<double> SparseJacobian::to_eigen(int n_cells) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(blocks.size());
  for (int r = 0; r < n_row_cells(); ++r) {
    for (int b = 0; b < slots; ++b) {
      const int c = col_cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
      if (c < 0) continue;
      const double* blk = block(r, b);
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
          const double v = blk[i * nv + j];
          if (v != 0.0) trips.emplace_back(r * nv + i, c * nv + j, v);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(n_row_cells() * nv, n_cells * nv);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

namespace {

constexpr std::array<Side, 4> slot_side{Side::left, Side::right, Side::bottom, Side::top};

template <class Sys>
class Assembler {
 public:
  static constexpr int nv = Sys::nv;
  using State = phys::State<double, nv>;

  Assembler(const ResidualContext& ctx, std::span<const double> state, std::span<const char> available = {})
      : ctx_(ctx), state_(state), available_(available), nx_(ctx.sub->nx()), ny_(ctx.sub->ny()) {}

  State load(int cell) const {
    State w;
    std::copy_n(state_.begin() + static_cast<std::ptrdiff_t>(cell * nv), nv, w.begin());
    return w;
  }

  struct Neighbor {
    int cell = -1;  // interior neighbor, or -1
    bool folded = false;  // ghost derived from the center cell
    std::array<double, nv> factors{};
    State value{};
  };

  Neighbor neighbor(int li, int lj, Side s, const State& center) const {
    int ni = li, nj = lj;
    int slot = 0;
    switch (s) {
      case Side::left: ni = li - 1; slot = lj; break;
      case Side::right: ni = li + 1; slot = lj; break;
      case Side::bottom: nj = lj - 1; slot = li; break;
      case Side::top: nj = lj + 1; slot = li; break;
    }
    Neighbor n;
    if (ni >= 0 && ni < nx_ && nj >= 0 && nj < ny_) {
      n.cell = ni + nj * nx_;
      if (!available_.empty() && !available_[static_cast<std::size_t>(n.cell)]) {
        throw InternalError("sample-mesh closure is missing cell (" + std::to_string(ni) + "," + std::to_string(nj) +
                            ") of subdomain " + std::to_string(ctx_.sub->id));
      }
      n.value = load(n.cell);
      return n;
    }
    const BcType bc = ctx_.bcs[side_index(s)];
    if (bc == BcType::schwarz) {
      const auto g = ctx_.ghosts->slot(s, slot, nv);
      std::copy(g.begin(), g.end(), n.value.begin());
      return n;
    }
    n.folded = true;
    n.factors = phys::ghost_factors<Sys>(bc, s);
    for (int i = 0; i < nv; ++i) n.value[i] = n.factors[i] * center[i];
    return n;
  }

  void check_cell(int cell) const {
    try {
      Sys::check(load(cell), ctx_.model);
    } catch (const StateError& e) {
      throw StateError(std::string(e.what()) + " at cell (" + std::to_string(cell % nx_ + ctx_.sub->i0) + "," +
                       std::to_string(cell / nx_ + ctx_.sub->j0) + ") of subdomain " + std::to_string(ctx_.sub->id));
    }
  }

  void residual_cell(int cell, double* out, bool with_time) const {
    const int li = cell % nx_, lj = cell / nx_;
    try {
      const State w = load(cell);
      const auto nl = neighbor(li, lj, Side::left, w);
      const auto nr = neighbor(li, lj, Side::right, w);
      const auto nb = neighbor(li, lj, Side::bottom, w);
      const auto nt = neighbor(li, lj, Side::top, w);
      const auto& m = ctx_.model;
      const auto& p = ctx_.params;
      const auto fr = phys::face_flux<Sys>(w, nr.value, Direction::x, ctx_.dx, m, p);
      const auto fl = phys::face_flux<Sys>(nl.value, w, Direction::x, ctx_.dx, m, p);
      const auto gt = phys::face_flux<Sys>(w, nt.value, Direction::y, ctx_.dy, m, p);
      const auto gb = phys::face_flux<Sys>(nb.value, w, Direction::y, ctx_.dy, m, p);
      const auto src = phys::source<Sys>(w, m, p);
      for (int i = 0; i < nv; ++i) {
        out[i] = (fr[i] - fl[i]) / ctx_.dx + (gt[i] - gb[i]) / ctx_.dy - src[i];
      }
      if (with_time) {
        const double* prev = ctx_.prev.data() + static_cast<std::size_t>(cell * nv);
        for (int i = 0; i < nv; ++i) out[i] += (w[i] - prev[i]) / ctx_.dt;
      }
    } catch (const StateError& e) {
      throw StateError(std::string(e.what()) + " at cell (" + std::to_string(li + ctx_.sub->i0) + "," +
                       std::to_string(lj + ctx_.sub->j0) + ") of subdomain " + std::to_string(ctx_.sub->id));
    }
  }

  // Exact local Jacobian of the time residual of one cell; blocks holds five
  // nv x nv row-major blocks (self, left, right, bottom, top).
  void jacobian_cell(int cell, double* blocks, std::array<int, 5>& cols) const {
    using D = Dual<2 * nv>;
    const int li = cell % nx_, lj = cell / nx_;
    std::fill_n(blocks, 5 * nv * nv, 0.0);
    const State w = load(cell);
    std::array<Neighbor, 4> nbr;
    for (int k = 0; k < 4; ++k) nbr[static_cast<std::size_t>(k)] = neighbor(li, lj, slot_side[static_cast<std::size_t>(k)], w);
    cols[0] = cell;
    for (int k = 0; k < 4; ++k) cols[static_cast<std::size_t>(k + 1)] = nbr[static_cast<std::size_t>(k)].cell;

    auto add = [&](int slot, int i, int j, double v) { blocks[(slot * nv + i) * nv + j] += v; };

    // face between a (left/below) and b (right/above); sign/scale applied to
    // the residual of this cell. `center_is_a` says which side is this cell.
    auto face = [&](const Neighbor& n, Direction dir, double spacing, bool center_is_a, int nslot, double sign) {
      phys::State<D, nv> a, b;
      const State& av = center_is_a ? w : n.value;
      const State& bv = center_is_a ? n.value : w;
      for (int i = 0; i < nv; ++i) {
        a[i] = D::variable(av[i], i);
        b[i] = D::variable(bv[i], nv + i);
      }
      const auto f = phys::face_flux<Sys>(a, b, dir, spacing, ctx_.model, ctx_.params);
      const int c_off = center_is_a ? 0 : nv;
      const int n_off = center_is_a ? nv : 0;
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
          add(0, i, j, sign * f[i].d[c_off + j]);
          const double dn = sign * f[i].d[n_off + j];
          if (n.cell >= 0) {
            add(nslot, i, j, dn);
          } else if (n.folded) {
            add(0, i, j, dn * n.factors[j]);
          }
        }
      }
    };

    try {
      face(nbr[1], Direction::x, ctx_.dx, true, 2, 1.0 / ctx_.dx);
      face(nbr[0], Direction::x, ctx_.dx, false, 1, -1.0 / ctx_.dx);
      face(nbr[3], Direction::y, ctx_.dy, true, 4, 1.0 / ctx_.dy);
      face(nbr[2], Direction::y, ctx_.dy, false, 3, -1.0 / ctx_.dy);

      using S = Dual<nv>;
      phys::State<S, nv> ws;
      for (int i = 0; i < nv; ++i) ws[i] = S::variable(w[i], i);
      const auto src = phys::source<Sys>(ws, ctx_.model, ctx_.params);
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) add(0, i, j, -src[i].d[j]);
        add(0, i, i, 1.0 / ctx_.dt);
      }
    } catch (const StateError& e) {
      throw StateError(std::string(e.what()) + " at cell (" + std::to_string(li + ctx_.sub->i0) + "," +
                       std::to_string(lj + ctx_.sub->j0) + ") of subdomain " + std::to_string(ctx_.sub->id));
    }
  }

  std::array<int, 5> stencil_cols(int cell) const {
    const int li = cell % nx_, lj = cell / nx_;
    return {cell, li > 0 ? cell - 1 : -1, li < nx_ - 1 ? cell + 1 : -1, lj > 0 ? cell - nx_ : -1,
            lj < ny_ - 1 ? cell + nx_ : -1};
  }

  int nx() const { return nx_; }

 private:
  const ResidualContext& ctx_;
  std::span<const double> state_;
  std::span<const char> available_;
  int nx_;
  int ny_;
};

void check_sizes(const ResidualContext& ctx, std::span<const double> state, bool need_prev) {
  if (ctx.sub == nullptr) throw InternalError("residual context without subdomain");
  if (state.size() != static_cast<std::size_t>(ctx.n_dofs())) {
    throw InternalError("state size " + std::to_string(state.size()) + " does not match subdomain DOFs " +
                        std::to_string(ctx.n_dofs()));
  }
  if (need_prev && (!(ctx.dt > 0.0) || ctx.prev.size() != state.size())) {
    throw ConfigError("time residual needs dt > 0 and a previous state of matching size");
  }
  if (ctx.sub->has_interfaces() && ctx.ghosts == nullptr) {
    throw InternalError("subdomain with interfaces needs a ghost layer");
  }
}

std::vector<double> residual_impl(const ResidualContext& ctx, std::span<const double> state, bool with_time) {
  check_sizes(ctx, state, with_time);
  return phys::visit_system(ctx.model.system, [&](auto sys) {
    using Sys = decltype(sys);
    Assembler<Sys> a(ctx, state);
    std::vector<double> r(state.size());
    const int n = ctx.sub->n_cells();
    for (int c = 0; c < n; ++c) a.check_cell(c);
    for (int c = 0; c < n; ++c) a.residual_cell(c, r.data() + static_cast<std::size_t>(c * Sys::nv), with_time);
    return r;
  });
}

// Colored forward differences over the rows in `cells`.
template <class Sys>
SparseJacobian colored_fd(const ResidualContext& ctx, std::span<const double> state, std::span<const int> cells,
                          std::span<const char> available) {
  constexpr int nv = Sys::nv;
  SparseJacobian jac;
  jac.nv = nv;
  jac.row_cells.assign(cells.begin(), cells.end());
  jac.col_cells.resize(cells.size());
  jac.blocks.assign(cells.size() * 5 * nv * nv, 0.0);

  std::vector<double> work(state.begin(), state.end());
  Assembler<Sys> base(ctx, state, available);
  Assembler<Sys> pert(ctx, work, available);
  const int nx = base.nx();
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

  std::vector<double> r0(cells.size() * nv);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    base.residual_cell(cells[r], r0.data() + r * nv, true);
    jac.col_cells[r] = base.stencil_cols(cells[r]);
  }

  // cells whose perturbation can reach a requested row
  std::vector<int> touched;
  {
    std::vector<char> mark(static_cast<std::size_t>(ctx.sub->n_cells()), 0);
    for (const auto& cols : jac.col_cells) {
      for (int c : cols) {
        if (c >= 0 && !mark[static_cast<std::size_t>(c)]) {
          mark[static_cast<std::size_t>(c)] = 1;
          touched.push_back(c);
        }
      }
    }
  }

  std::vector<double> rp(nv);
  for (int color = 0; color < 5; ++color) {
    for (int v = 0; v < nv; ++v) {
      for (int c : touched) {
        if (stencil_color(c % nx, c / nx) != color) continue;
        const auto k = static_cast<std::size_t>(c * nv + v);
        work[k] = state[k] + eps * (1.0 + std::abs(state[k]));
      }
      for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto& cols = jac.col_cells[r];
        int slot = -1;
        for (int b = 0; b < 5; ++b) {
          const int c = cols[static_cast<std::size_t>(b)];
          if (c >= 0 && stencil_color(c % nx, c / nx) == color) slot = b;
        }
        if (slot < 0) continue;
        const int c = cols[static_cast<std::size_t>(slot)];
        const auto k = static_cast<std::size_t>(c * nv + v);
        const double h = work[k] - state[k];
        pert.residual_cell(cells[r], rp.data(), true);
        double* blk = jac.block(static_cast<int>(r), slot);
        for (int i = 0; i < nv; ++i) blk[i * nv + v] = (rp[static_cast<std::size_t>(i)] - r0[r * nv + static_cast<std::size_t>(i)]) / h;
      }
      for (int c : touched) {
        const auto k = static_cast<std::size_t>(c * nv + v);
        work[k] = state[k];
      }
    }
  }
  return jac;
}

template <class Sys>
SparseJacobian analytic_rows(const ResidualContext& ctx, std::span<const double> state, std::span<const int> cells,
                             std::span<const char> available) {
  constexpr int nv = Sys::nv;
  SparseJacobian jac;
  jac.nv = nv;
  jac.row_cells.assign(cells.begin(), cells.end());
  jac.col_cells.resize(cells.size());
  jac.blocks.assign(cells.size() * 5 * nv * nv, 0.0);
  Assembler<Sys> a(ctx, state, available);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    a.jacobian_cell(cells[r], jac.block(static_cast<int>(r), 0), jac.col_cells[r]);
  }
  return jac;
}

SparseJacobian jacobian_rows(const ResidualContext& ctx, std::span<const double> state, std::span<const int> cells,
                             JacobianMethod method, std::span<const char> available) {
  return phys::visit_system(ctx.model.system, [&](auto sys) {
    using Sys = decltype(sys);
    return method == JacobianMethod::analytic ? analytic_rows<Sys>(ctx, state, cells, available)
                                              : colored_fd<Sys>(ctx, state, cells, available);
  });
}

}  // namespace

std::vector<double> spatial_residual(const ResidualContext& ctx, std::span<const double> state) {
  return residual_impl(ctx, state, false);
}

std::vector<double> time_residual(const ResidualContext& ctx, std::span<const double> state) {
  return residual_impl(ctx, state, true);
}

SparseJacobian residual_jacobian(const ResidualContext& ctx, std::span<const double> state, JacobianMethod method) {
  check_sizes(ctx, state, true);
  std::vector<int> all(static_cast<std::size_t>(ctx.sub->n_cells()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return jacobian_rows(ctx, state, all, method, {});
}

std::vector<double> sampled_time_residual(const ResidualContext& ctx, std::span<const double> state,
                                          std::span<const int> cells) {
  check_sizes(ctx, state, true);
  return phys::visit_system(ctx.model.system, [&](auto sys) {
    using Sys = decltype(sys);
    Assembler<Sys> a(ctx, state);
    std::vector<double> r(cells.size() * Sys::nv);
    for (std::size_t k = 0; k < cells.size(); ++k) a.residual_cell(cells[k], r.data() + k * Sys::nv, true);
    return r;
  });
}

SampledAssembly sampled_residual_and_jacobian(const ResidualContext& ctx, std::span<const double> state,
                                              std::span<const int> cells, JacobianMethod method,
                                              std::span<const char> available) {
  check_sizes(ctx, state, true);
  SampledAssembly out;
  out.residual = phys::visit_system(ctx.model.system, [&](auto sys) {
    using Sys = decltype(sys);
    Assembler<Sys> a(ctx, state, available);
    std::vector<double> r(cells.size() * Sys::nv);
    for (std::size_t k = 0; k < cells.size(); ++k) a.residual_cell(cells[k], r.data() + k * Sys::nv, true);
    return r;
  });
  out.jacobian = jacobian_rows(ctx, state, cells, method, available);
  return out;
}

}  // namespace sdrom
