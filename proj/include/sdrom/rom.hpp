#pragma once

// Offline pipeline: snapshot matrices, POD, QDEIM, sample meshes, and the
// binary snapshot/basis container.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sdrom/mesh.hpp"
#include "sdrom/rom_types.hpp"

namespace sdrom {

struct SnapshotMeta {
  double param = 0.0;
  double time = 0.0;
  int run = 0;
};

/// Column-major snapshot store.
struct SnapshotMatrix {
  int n_rows = 0;
  std::vector<double> data;
  std::vector<SnapshotMeta> meta;

  int n_cols() const { return static_cast<int>(meta.size()); }
  std::span<const double> column(int k) const {
    return {data.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n_rows), static_cast<std::size_t>(n_rows)};
  }
  void append(std::span<const double> col, const SnapshotMeta& m);
};

/// Concatenate runs column-wise (run order, then time). `names` label the
/// runs in error messages.
SnapshotMatrix assemble_snapshots(const std::vector<SnapshotMatrix>& runs, const std::vector<std::string>& names = {});

/// Restrict every column to each subdomain's physical cells.
std::vector<SnapshotMatrix> split_snapshots(const SnapshotMatrix& mono, const CartesianGrid& grid,
                                            const std::vector<Subdomain>& subdomains);

/// Rank-M POD of the snapshots. With center = false the centering vector is
/// forced to zero.
TrialBasis compute_pod(const SnapshotMatrix& snapshots, int m, bool center = true);

struct ProjectionError {
  std::vector<double> per_variable;
  double aggregate = 0.0;
};

/// sum_n ||u_n - (c + Phi Phi^T (u_n - c))||^2 / sum_n ||u_n||^2
ProjectionError projection_error(const TrialBasis& basis, const SnapshotMatrix& snapshots, int n_vars);

/// First M pivots of a column-pivoted QR of Phi^T (row indices of Phi).
std::vector<int> qdeim_indices(const TrialBasis& basis);

struct SampleMeshOptions {
  /// target |S| in cells (seeds included)
  int n_s = 0;
  /// interface sampling interval; 0 disables interface seeding
  int n_b = 1;
  std::uint64_t seed = 0;
  /// extra seed cells (e.g. QDEIM DOFs mapped to cells)
  std::vector<int> seed_cells;
};

SampleMesh build_sample_mesh(const Subdomain& sub, const SampleMeshOptions& opts);

/// Cells containing the given DOFs (order of first appearance).
std::vector<int> dofs_to_cells(std::span<const int> dofs, int n_vars);

/// Cell count for a percentage of `n_cells`, at least 1.
int sample_count(double percent, int n_cells);

// ---------------------------------------------------------------- files

struct SnapshotFileHeader {
  int nx = 0;
  int ny = 0;
  int n_vars = 0;
  std::uint64_t n_cols = 0;
};

/// Binary snapshot file plus a `<path>.meta` text sidecar.
void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& s, int nx, int ny, int n_vars,
                     double dt);
SnapshotMatrix read_snapshots(const std::filesystem::path& path, SnapshotFileHeader* header = nullptr);

void write_basis(const std::filesystem::path& path, const TrialBasis& b, int nx, int ny, int n_vars);
TrialBasis read_basis(const std::filesystem::path& path, SnapshotFileHeader* header = nullptr);

/// Sample mesh as `key = value` text.
void write_sample_mesh(const std::filesystem::path& path, const SampleMesh& m);
SampleMesh read_sample_mesh(const std::filesystem::path& path);

}  // namespace sdrom
