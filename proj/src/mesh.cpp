#include "sdrom/mesh.hpp"

#include <algorithm>
#include <string>

#include "sdrom/errors.hpp"

namespace sdrom {

CartesianGrid build_grid(int nx, int ny, const Bounds& bounds, int n_vars) {
  if (nx < 1 || ny < 1) {
    throw ConfigError("grid cell counts must be >= 1 (got " + std::to_string(nx) + "x" + std::to_string(ny) + ")");
  }
  if (!(bounds.x_hi > bounds.x_lo) || !(bounds.y_hi > bounds.y_lo)) {
    throw ConfigError("grid bounds must have positive extent");
  }
  if (n_vars < 1) throw ConfigError("n_vars must be >= 1");
  CartesianGrid g;
  g.nx = nx;
  g.ny = ny;
  g.bounds = bounds;
  g.dx = (bounds.x_hi - bounds.x_lo) / nx;
  g.dy = (bounds.y_hi - bounds.y_lo) / ny;
  g.n_vars = n_vars;
  return g;
}

Side opposite(Side s) {
  switch (s) {
    case Side::left: return Side::right;
    case Side::right: return Side::left;
    case Side::bottom: return Side::top;
    case Side::top: return Side::bottom;
  }
  return Side::left;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

bool Subdomain::has_interfaces() const {
  return std::any_of(neighbor.begin(), neighbor.end(), [](int n) { return n >= 0; });
}

std::array<int, 2> Subdomain::ghost_global(Side s, int k) const {
  switch (s) {
    case Side::left: return {i0 - 1, j0 + k};
    case Side::right: return {i1, j0 + k};
    case Side::bottom: return {i0 + k, j0 - 1};
    case Side::top: return {i0 + k, j1};
  }
  return {0, 0};
}

int Subdomain::boundary_cell(Side s, int k) const {
  switch (s) {
    case Side::left: return local_cell(0, k);
    case Side::right: return local_cell(nx() - 1, k);
    case Side::bottom: return local_cell(k, 0);
    case Side::top: return local_cell(k, ny() - 1);
  }
  return 0;
}

namespace {

// Half-open ranges of each tile along one axis.
std::vector<std::pair<int, int>> split_axis(int n, int parts, int overlap, const char* axis) {
  if (parts < 1) throw ConfigError(std::string("subdomain count along ") + axis + " must be >= 1");
  if (n % parts != 0) {
    throw ConfigError(std::string("cannot split ") + std::to_string(n) + " cells along " + axis + " into " +
                      std::to_string(parts) + " equal parts");
  }
  const int width = n / parts;
  const int half = overlap / 2;
  if (parts > 1 && half >= width) {
    throw ConfigError(std::string("overlap ") + std::to_string(overlap) + " too large for tile width " +
                      std::to_string(width) + " along " + axis);
  }
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p < parts; ++p) {
    const int lo = p * width - (p > 0 ? half : 0);
    const int hi = (p + 1) * width + (p < parts - 1 ? half : 0);
    out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace

std::vector<Subdomain> decompose(const CartesianGrid& grid, int px, int py, int overlap) {
  if (overlap < 0) throw ConfigError("overlap must be >= 0");
  if (overlap % 2 != 0) throw ConfigError("overlap must be even (split symmetrically across the interface)");
  const auto xs = split_axis(grid.nx, px, overlap, "x");
  const auto ys = split_axis(grid.ny, py, overlap, "y");
  std::vector<Subdomain> subs;
  subs.reserve(static_cast<std::size_t>(px * py));
  for (int ty = 0; ty < py; ++ty) {
    for (int tx = 0; tx < px; ++tx) {
      Subdomain s;
      s.id = tx + ty * px;
      s.tile_x = tx;
      s.tile_y = ty;
      s.i0 = xs[tx].first;
      s.i1 = xs[tx].second;
      s.j0 = ys[ty].first;
      s.j1 = ys[ty].second;
      s.overlap = overlap;
      s.neighbor[side_index(Side::left)] = tx > 0 ? s.id - 1 : -1;
      s.neighbor[side_index(Side::right)] = tx < px - 1 ? s.id + 1 : -1;
      s.neighbor[side_index(Side::bottom)] = ty > 0 ? s.id - px : -1;
      s.neighbor[side_index(Side::top)] = ty < py - 1 ? s.id + px : -1;
      subs.push_back(s);
    }
  }
  return subs;
}

std::vector<DonorMap> build_donor_maps(const std::vector<Subdomain>& subdomains) {
  std::vector<DonorMap> maps;
  for (const auto& rec : subdomains) {
    for (Side side : all_sides) {
      if (!rec.is_interface(side)) continue;
      const auto& don = subdomains.at(static_cast<std::size_t>(rec.neighbor[side_index(side)]));
      DonorMap m;
      m.receiver = rec.id;
      m.donor = don.id;
      m.side = side;
      const int len = rec.side_length(side);
      m.entries.reserve(static_cast<std::size_t>(len));
      for (int k = 0; k < len; ++k) {
        const auto [gi, gj] = rec.ghost_global(side, k);
        if (!don.contains(gi, gj)) {
          throw InternalError("ghost (" + std::to_string(gi) + "," + std::to_string(gj) + ") of subdomain " +
                              std::to_string(rec.id) + " has no donor in subdomain " + std::to_string(don.id));
        }
        m.entries.emplace_back(k, don.local_cell(gi - don.i0, gj - don.j0));
      }
      maps.push_back(std::move(m));
    }
  }
  return maps;
}

std::vector<int> ownership(const CartesianGrid& grid, const std::vector<Subdomain>& subdomains) {
  std::vector<int> owner(static_cast<std::size_t>(grid.n_cells()), -1);
  for (const auto& s : subdomains) {
    for (int gj = s.j0; gj < s.j1; ++gj) {
      for (int gi = s.i0; gi < s.i1; ++gi) {
        int& o = owner[static_cast<std::size_t>(gi + gj * grid.nx)];
        if (o < 0 || s.id < o) o = s.id;
      }
    }
  }
  return owner;
}

std::vector<double> restrict_field(const CartesianGrid& grid, const Subdomain& sub,
                                   std::span<const double> global) {
  const int nv = grid.n_vars;
  std::vector<double> out(static_cast<std::size_t>(sub.n_cells() * nv));
  for (int lj = 0; lj < sub.ny(); ++lj) {
    for (int li = 0; li < sub.nx(); ++li) {
      const auto g = static_cast<std::size_t>(((sub.i0 + li) + (sub.j0 + lj) * grid.nx) * nv);
      const auto l = static_cast<std::size_t>(sub.local_cell(li, lj) * nv);
      std::copy_n(global.begin() + static_cast<std::ptrdiff_t>(g), nv, out.begin() + static_cast<std::ptrdiff_t>(l));
    }
  }
  return out;
}

std::vector<double> gather_field(const CartesianGrid& grid, const std::vector<Subdomain>& subdomains,
                                 const std::vector<std::vector<double>>& locals) {
  const int nv = grid.n_vars;
  const auto owner = ownership(grid, subdomains);
  std::vector<double> out(static_cast<std::size_t>(grid.n_dofs()), 0.0);
  for (const auto& s : subdomains) {
    const auto& loc = locals.at(static_cast<std::size_t>(s.id));
    for (int lj = 0; lj < s.ny(); ++lj) {
      for (int li = 0; li < s.nx(); ++li) {
        const int gc = (s.i0 + li) + (s.j0 + lj) * grid.nx;
        if (owner[static_cast<std::size_t>(gc)] != s.id) continue;
        const auto l = static_cast<std::ptrdiff_t>(s.local_cell(li, lj) * nv);
        std::copy_n(loc.begin() + l, nv, out.begin() + static_cast<std::ptrdiff_t>(gc * nv));
      }
    }
  }
  return out;
}

}  // namespace sdrom
