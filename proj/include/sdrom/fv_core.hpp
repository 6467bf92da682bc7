#pragma once

// First-order cell-centered finite-volume residuals on one subdomain.
//
// Layout: physical DOFs of a subdomain are cell-major, `cell * n_vars + var`,
// with cell = li + lj * nx. Ghost values for Schwarz interface sides live in a
// GhostLayer; ghosts on physical boundaries are produced on the fly from the
// adjacent interior cell.

#include <array>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "sdrom/mesh.hpp"
#include "sdrom/physics.hpp"

namespace sdrom {

/// Interface ghost values per side (slot-major, n_vars per slot). Sides that
/// are physical boundaries stay empty.
struct GhostLayer {
  std::array<std::vector<double>, 4> side;

  std::span<double> slot(Side s, int k, int nv) {
    return {side[side_index(s)].data() + static_cast<std::size_t>(k * nv), static_cast<std::size_t>(nv)};
  }
  std::span<const double> slot(Side s, int k, int nv) const {
    return {side[side_index(s)].data() + static_cast<std::size_t>(k * nv), static_cast<std::size_t>(nv)};
  }
};

/// Allocate interface ghost storage for a subdomain (zero-filled).
GhostLayer make_ghost_layer(const Subdomain& sub, int nv);

struct ResidualContext {
  const Subdomain* sub = nullptr;
  double dx = 0.0;
  double dy = 0.0;
  FluxModel model;
  ParamSet params;
  /// Tag per side; BcType::schwarz on interface sides.
  BoundarySpec bcs{};
  double dt = 0.0;
  /// State at the previous time level (physical DOFs).
  std::span<const double> prev;
  /// Frozen interface ghost values.
  const GhostLayer* ghosts = nullptr;

  int nv() const { return model.n_vars(); }
  int n_dofs() const { return sub->n_cells() * nv(); }
};

/// Builds the side tags from the subdomain's neighbors and the physical BCs.
BoundarySpec subdomain_bcs(const Subdomain& sub, const BoundarySpec& physical);

enum class JacobianMethod { analytic, colored_fd };

/// Block-sparse rows of the residual Jacobian over physical DOFs. Each row
/// block (one cell) holds up to five n_vars x n_vars blocks: self, left,
/// right, bottom, top. Absent neighbors have column cell -1.
struct SparseJacobian {
  static constexpr int slots = 5;
  int nv = 0;
  std::vector<int> row_cells;
  std::vector<std::array<int, slots>> col_cells;
  /// row-major blocks; block (r, b) starts at ((r * slots) + b) * nv * nv
  std::vector<double> blocks;

  int n_row_cells() const { return static_cast<int>(row_cells.size()); }
  const double* block(int r, int b) const {
    return blocks.data() + static_cast<std::size_t>((r * slots + b) * nv * nv);
  }
  double* block(int r, int b) { return blocks.data() + static_cast<std::size_t>((r * slots + b) * nv * nv); }

  /// Assemble into an Eigen matrix (rows = row cells, columns = all cells).
  Eigen::SparseMatrix<double> to_eigen(int n_cells) const;
};

/// du/dt + spatial_residual(u) = 0; includes the source term.
std::vector<double> spatial_residual(const ResidualContext& ctx, std::span<const double> state);

/// Implicit Euler residual (u - u_prev)/dt + spatial_residual(u).
std::vector<double> time_residual(const ResidualContext& ctx, std::span<const double> state);

SparseJacobian residual_jacobian(const ResidualContext& ctx, std::span<const double> state,
                                 JacobianMethod method = JacobianMethod::analytic);

struct SampledAssembly {
  std::vector<double> residual;  // cells.size() * nv, in the order given
  SparseJacobian jacobian;
};

/// Row-restricted time residual and Jacobian, touching only `cells` and their
/// face neighbors. `state` is indexed like a full subdomain vector, but only
/// stencil cells are read. When `available` is non-empty it flags which cells
/// hold valid values; reading any other cell is an InternalError.
SampledAssembly sampled_residual_and_jacobian(const ResidualContext& ctx, std::span<const double> state,
                                              std::span<const int> cells,
                                              JacobianMethod method = JacobianMethod::analytic,
                                              std::span<const char> available = {});

/// Only the time residual rows of the sampled cells.
std::vector<double> sampled_time_residual(const ResidualContext& ctx, std::span<const double> state,
                                          std::span<const int> cells);

/// Distance-2 coloring of the 5-point stencil.
inline int stencil_color(int li, int lj) { return (li + 2 * lj) % 5; }

}  // namespace sdrom
