#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace sdrom {

struct Bounds {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
};

/// Uniform cell-centered Cartesian grid over a rectangle.
struct CartesianGrid {
  int nx = 0;
  int ny = 0;
  Bounds bounds;
  double dx = 0.0;
  double dy = 0.0;
  int n_vars = 1;

  int n_cells() const { return nx * ny; }
  int n_dofs() const { return nx * ny * n_vars; }
  std::array<double, 2> centroid(int i, int j) const {
    return {bounds.x_lo + (i + 0.5) * dx, bounds.y_lo + (j + 0.5) * dy};
  }
};

CartesianGrid build_grid(int nx, int ny, const Bounds& bounds, int n_vars);

enum class Side { left = 0, right = 1, bottom = 2, top = 3 };
inline constexpr std::array<Side, 4> all_sides{Side::left, Side::right, Side::bottom, Side::top};
inline constexpr int side_index(Side s) { return static_cast<int>(s); }
Side opposite(Side s);
const char* side_name(Side s);

/// A rectangular block of global cells [i0, i1) x [j0, j1). Ghost depth is one
/// cell per side; corner ghosts do not exist.
struct Subdomain {
  int id = 0;
  int tile_x = 0;
  int tile_y = 0;
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  int overlap = 0;
  /// Neighbor subdomain id per side, -1 for the physical boundary.
  std::array<int, 4> neighbor{-1, -1, -1, -1};

  int nx() const { return i1 - i0; }
  int ny() const { return j1 - j0; }
  int n_cells() const { return nx() * ny(); }
  int local_cell(int li, int lj) const { return li + lj * nx(); }
  bool contains(int gi, int gj) const { return gi >= i0 && gi < i1 && gj >= j0 && gj < j1; }
  bool is_interface(Side s) const { return neighbor[side_index(s)] >= 0; }
  bool has_interfaces() const;
  /// Number of ghost slots along a side.
  int side_length(Side s) const { return (s == Side::left || s == Side::right) ? ny() : nx(); }
  /// Global (i, j) of ghost slot k on side s.
  std::array<int, 2> ghost_global(Side s, int k) const;
  /// Local cell adjacent (inside) to ghost slot k on side s.
  int boundary_cell(Side s, int k) const;
};

/// Split the grid into px * py tiles. `overlap` is the total number of shared
/// physical columns/rows between adjacent tiles; each side extends overlap/2
/// cells past the nominal split line.
std::vector<Subdomain> decompose(const CartesianGrid& grid, int px, int py, int overlap);

/// Ghost slot -> donor cell correspondence for one receiving side.
struct DonorMap {
  int receiver = -1;
  int donor = -1;
  Side side = Side::left;
  /// (ghost slot on receiver side, donor local cell index)
  std::vector<std::pair<int, int>> entries;
};

std::vector<DonorMap> build_donor_maps(const std::vector<Subdomain>& subdomains);

/// Owning subdomain for every global cell (lowest id wins on overlaps).
std::vector<int> ownership(const CartesianGrid& grid, const std::vector<Subdomain>& subdomains);

/// Copy the subdomain's physical cells out of a global DOF vector.
std::vector<double> restrict_field(const CartesianGrid& grid, const Subdomain& sub,
                                   std::span<const double> global);

/// Reassemble a global field from per-subdomain physical values.
std::vector<double> gather_field(const CartesianGrid& grid, const std::vector<Subdomain>& subdomains,
                                 const std::vector<std::vector<double>>& locals);

}  // namespace sdrom
