#include "sdrom/rom_types.hpp"

#include <algorithm>

#include "sdrom/errors.hpp"
#include "sdrom/kernels.hpp"

namespace sdrom {

std::vector<double> TrialBasis::reconstruct(std::span<const double> q) const {
  if (q.size() != static_cast<std::size_t>(n_modes)) throw InternalError("generalized coordinate size mismatch");
  std::vector<double> x(static_cast<std::size_t>(n_rows));
  const auto m = static_cast<std::size_t>(n_modes);
  for (int r = 0; r < n_rows; ++r) {
    x[static_cast<std::size_t>(r)] = center[static_cast<std::size_t>(r)] + kernels::dot({row(r), m}, q);
  }
  return x;
}

void TrialBasis::reconstruct_cells(std::span<const double> q, std::span<const int> cells, int nv,
                                   std::span<double> out) const {
  if (q.size() != static_cast<std::size_t>(n_modes)) throw InternalError("generalized coordinate size mismatch");
  const auto m = static_cast<std::size_t>(n_modes);
  for (int c : cells) {
    for (int i = 0; i < nv; ++i) {
      const int r = c * nv + i;
      out[static_cast<std::size_t>(r)] = center[static_cast<std::size_t>(r)] + kernels::dot({row(r), m}, q);
    }
  }
}

std::vector<double> TrialBasis::project(std::span<const double> u) const {
  if (u.size() != static_cast<std::size_t>(n_rows)) throw InternalError("state size does not match basis rows");
  std::vector<double> q(static_cast<std::size_t>(n_modes), 0.0);
  const auto m = static_cast<std::size_t>(n_modes);
  for (int r = 0; r < n_rows; ++r) {
    kernels::axpy(u[static_cast<std::size_t>(r)] - center[static_cast<std::size_t>(r)], {row(r), m}, q);
  }
  return q;
}

std::vector<double> TrialBasis::center_coupling() const {
  std::vector<double> c(static_cast<std::size_t>(n_modes), 0.0);
  const auto m = static_cast<std::size_t>(n_modes);
  for (int r = 0; r < n_rows; ++r) kernels::axpy(center[static_cast<std::size_t>(r)], {row(r), m}, c);
  return c;
}

TrialBasis TrialBasis::identity(int n) {
  TrialBasis b;
  b.n_rows = n;
  b.n_modes = n;
  b.phi.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) b.phi[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = 1.0;
  b.center.assign(static_cast<std::size_t>(n), 0.0);
  b.sigma.assign(static_cast<std::size_t>(n), 1.0);
  return b;
}

std::vector<int> SampleMesh::stencil_cells() const {
  std::vector<int> all = sample_cells;
  all.insert(all.end(), closure_cells.begin(), closure_cells.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace sdrom
