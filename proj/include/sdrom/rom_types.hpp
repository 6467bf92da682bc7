#pragma once

// Trial basis and sample mesh containers shared by the solvers, the offline
// pipeline and the Schwarz driver.

#include <span>
#include <utility>
#include <vector>

#include "sdrom/mesh.hpp"

namespace sdrom {

/// Affine trial space x = center + phi * q. phi is row-major (n_rows x n_modes)
/// so a cell's rows are contiguous.
struct TrialBasis {
  int n_rows = 0;
  int n_modes = 0;
  std::vector<double> phi;
  std::vector<double> center;
  std::vector<double> sigma;

  const double* row(int r) const { return phi.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n_modes); }

  /// Full reconstruction center + phi q.
  std::vector<double> reconstruct(std::span<const double> q) const;
  /// Writes center + phi q into `out` (full-size) at the given cells only.
  void reconstruct_cells(std::span<const double> q, std::span<const int> cells, int nv, std::span<double> out) const;
  /// phi^T (u - center)
  std::vector<double> project(std::span<const double> u) const;
  /// phi^T center, used for reduced-space norms.
  std::vector<double> center_coupling() const;
  /// Identity basis (n x n) with zero center.
  static TrialBasis identity(int n);
};

/// Sampled cells plus everything needed to evaluate their residual rows.
struct SampleMesh {
  /// S, sorted ascending (local cell ids)
  std::vector<int> sample_cells;
  /// face neighbors of S that are not in S
  std::vector<int> closure_cells;
  std::vector<int> interface_seeds;
  std::vector<int> qdeim_seeds;
  /// interface ghost slots read by sampled cells: (side, slot)
  std::vector<std::pair<Side, int>> ghost_augmentation;

  int n_s() const { return static_cast<int>(sample_cells.size()); }
  /// S union closure, sorted ascending.
  std::vector<int> stencil_cells() const;
};

}  // namespace sdrom
