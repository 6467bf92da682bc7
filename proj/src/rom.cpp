#include "sdrom/rom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sdrom/errors.hpp"
#include "sdrom/kernels.hpp"

namespace sdrom {

void SnapshotMatrix::append(std::span<const double> col, const SnapshotMeta& m) {
  if (n_rows == 0 && meta.empty()) n_rows = static_cast<int>(col.size());
  if (col.size() != static_cast<std::size_t>(n_rows)) {
    throw IngestionError("snapshot has " + std::to_string(col.size()) + " rows, expected " + std::to_string(n_rows));
  }
  data.insert(data.end(), col.begin(), col.end());
  meta.push_back(m);
}

SnapshotMatrix assemble_snapshots(const std::vector<SnapshotMatrix>& runs, const std::vector<std::string>& names) {
  SnapshotMatrix out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    if (static_cast<std::size_t>(run.n_cols()) * static_cast<std::size_t>(run.n_rows) != run.data.size()) {
      throw IngestionError("run '" + (r < names.size() ? names[r] : std::to_string(r)) + "' has inconsistent storage");
    }
    if (r > 0 && run.n_rows != out.n_rows) {
      throw IngestionError("run '" + (r < names.size() ? names[r] : std::to_string(r)) + "' has " +
                           std::to_string(run.n_rows) + " rows, expected " + std::to_string(out.n_rows));
    }
    if (r == 0) out.n_rows = run.n_rows;
    out.data.insert(out.data.end(), run.data.begin(), run.data.end());
    out.meta.insert(out.meta.end(), run.meta.begin(), run.meta.end());
  }
  return out;
}

std::vector<SnapshotMatrix> split_snapshots(const SnapshotMatrix& mono, const CartesianGrid& grid,
                                            const std::vector<Subdomain>& subdomains) {
  if (mono.n_rows != grid.n_dofs()) throw IngestionError("snapshot rows do not match the grid");
  std::vector<SnapshotMatrix> out(subdomains.size());
  for (std::size_t s = 0; s < subdomains.size(); ++s) {
    out[s].n_rows = subdomains[s].n_cells() * grid.n_vars;
    out[s].data.reserve(static_cast<std::size_t>(out[s].n_rows) * static_cast<std::size_t>(mono.n_cols()));
    for (int k = 0; k < mono.n_cols(); ++k) {
      out[s].append(restrict_field(grid, subdomains[s], mono.column(k)), mono.meta[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

TrialBasis compute_pod(const SnapshotMatrix& snapshots, int m, bool center) {
  const int n = snapshots.n_rows;
  const int k = snapshots.n_cols();
  if (m < 1 || m > std::min(n, k)) {
    throw ConfigError("POD rank M = " + std::to_string(m) + " out of range [1, " + std::to_string(std::min(n, k)) + "]");
  }
  Eigen::Map<const Eigen::MatrixXd> x(snapshots.data.data(), n, k);
  TrialBasis b;
  b.n_rows = n;
  b.n_modes = m;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  if (center) mean = x.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU);
  const Eigen::MatrixXd& u = svd.matrixU();
  b.center.assign(mean.data(), mean.data() + n);
  b.sigma.assign(svd.singularValues().data(), svd.singularValues().data() + m);
  b.phi.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    // fix the sign: largest-magnitude entry positive
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    const double s = u(arg, j) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      b.phi[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] = s * u(i, j);
    }
  }
  return b;
}

ProjectionError projection_error(const TrialBasis& basis, const SnapshotMatrix& snapshots, int n_vars) {
  if (basis.n_rows != snapshots.n_rows) throw MetricError("basis rows do not match snapshot rows");
  if (n_vars < 1 || snapshots.n_rows % n_vars != 0) throw MetricError("row count is not a multiple of n_vars");
  std::vector<double> num(static_cast<std::size_t>(n_vars), 0.0), den(static_cast<std::size_t>(n_vars), 0.0);
  for (int k = 0; k < snapshots.n_cols(); ++k) {
    const auto u = snapshots.column(k);
    const auto q = basis.project(u);
    const auto p = basis.reconstruct(q);
    for (int r = 0; r < snapshots.n_rows; ++r) {
      const double e = u[static_cast<std::size_t>(r)] - p[static_cast<std::size_t>(r)];
      num[static_cast<std::size_t>(r % n_vars)] += e * e;
      den[static_cast<std::size_t>(r % n_vars)] += u[static_cast<std::size_t>(r)] * u[static_cast<std::size_t>(r)];
    }
  }
  ProjectionError out;
  double tn = 0.0, td = 0.0;
  for (int v = 0; v < n_vars; ++v) {
    const auto i = static_cast<std::size_t>(v);
    out.per_variable.push_back(den[i] > 0.0 ? num[i] / den[i] : 0.0);
    tn += num[i];
    td += den[i];
  }
  out.aggregate = td > 0.0 ? tn / td : 0.0;
  return out;
}

std::vector<int> qdeim_indices(const TrialBasis& basis) {
  const int n = basis.n_rows, m = basis.n_modes;
  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> r = basis.phi;  // rows of Phi = columns of Phi^T
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<int> piv;
  std::vector<double> q(mm);
  for (int k = 0; k < std::min(m, n); ++k) {
    int best = -1;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double v = kernels::squared_norm({r.data() + static_cast<std::size_t>(i) * mm, mm});
      if (v > best_norm) {
        best_norm = v;
        best = i;
      }
    }
    piv.push_back(best);
    used[static_cast<std::size_t>(best)] = 1;
    if (best_norm <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(best_norm);
    for (std::size_t j = 0; j < mm; ++j) q[j] = r[static_cast<std::size_t>(best) * mm + j] * inv;
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      std::span<double> row(r.data() + static_cast<std::size_t>(i) * mm, mm);
      kernels::axpy(-kernels::dot(row, q), q, row);
    }
  }
  return piv;
}

std::vector<int> dofs_to_cells(std::span<const int> dofs, int n_vars) {
  std::vector<int> cells;
  std::set<int> seen;
  for (int d : dofs) {
    const int c = d / n_vars;
    if (seen.insert(c).second) cells.push_back(c);
  }
  return cells;
}

int sample_count(double percent, int n_cells) {
  return std::max(1, static_cast<int>(std::lround(percent / 100.0 * n_cells)));
}

SampleMesh build_sample_mesh(const Subdomain& sub, const SampleMeshOptions& opts) {
  const int n = sub.n_cells();
  if (opts.n_b < 0) throw ConfigError("interface sampling interval N_b must be >= 1 (0 disables seeding)");
  if (opts.n_s < 1 || opts.n_s > n) {
    throw ConfigError("sample mesh size " + std::to_string(opts.n_s) + " out of range [1, " + std::to_string(n) + "]");
  }
  SampleMesh out;
  std::vector<char> in_s(static_cast<std::size_t>(n), 0);
  std::vector<int> chosen;
  auto take = [&](int c) {
    if (c < 0 || c >= n) throw ConfigError("seed cell " + std::to_string(c) + " outside the subdomain");
    if (in_s[static_cast<std::size_t>(c)]) return false;
    in_s[static_cast<std::size_t>(c)] = 1;
    chosen.push_back(c);
    return true;
  };
  if (opts.n_b > 0) {
    for (Side s : all_sides) {
      if (!sub.is_interface(s)) continue;
      for (int k = 0; k < sub.side_length(s); k += opts.n_b) {
        const int c = sub.boundary_cell(s, k);
        if (take(c)) out.interface_seeds.push_back(c);
      }
    }
  }
  for (int c : opts.seed_cells) {
    if (take(c)) out.qdeim_seeds.push_back(c);
  }
  if (static_cast<int>(chosen.size()) > opts.n_s) {
    throw ConfigError("seed cells (" + std::to_string(chosen.size()) + ") exceed the sample mesh size N_s = " +
                      std::to_string(opts.n_s));
  }
  // Fixed permutation of all cells; taking a prefix keeps larger meshes
  // supersets of smaller ones.
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(opts.seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  for (std::size_t k = 0; k < perm.size() && static_cast<int>(chosen.size()) < opts.n_s; ++k) take(perm[k]);

  out.sample_cells = chosen;
  std::sort(out.sample_cells.begin(), out.sample_cells.end());

  const int nx = sub.nx(), ny = sub.ny();
  std::set<int> closure;
  std::set<std::pair<int, int>> aug;
  for (int c : out.sample_cells) {
    const int li = c % nx, lj = c / nx;
    auto visit = [&](int ni, int nj, Side s, int slot) {
      if (ni >= 0 && ni < nx && nj >= 0 && nj < ny) {
        const int nc = ni + nj * nx;
        if (!in_s[static_cast<std::size_t>(nc)]) closure.insert(nc);
      } else if (sub.is_interface(s)) {
        aug.insert({side_index(s), slot});
      }
    };
    visit(li - 1, lj, Side::left, lj);
    visit(li + 1, lj, Side::right, lj);
    visit(li, lj - 1, Side::bottom, li);
    visit(li, lj + 1, Side::top, li);
  }
  out.closure_cells.assign(closure.begin(), closure.end());
  for (const auto& [s, k] : aug) out.ghost_augmentation.emplace_back(all_sides[static_cast<std::size_t>(s)], k);
  return out;
}

// ---------------------------------------------------------------- files

namespace {

constexpr char snapshot_magic[8] = {'S', 'D', 'R', 'O', 'M', 'S', 'N', 'P'};
constexpr char basis_magic[8] = {'S', 'D', 'R', 'O', 'M', 'B', 'A', 'S'};
constexpr std::uint32_t format_version = 1;

template <class T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IngestionError("truncated file " + path.string());
  return to_le(v);
}

void put_doubles(std::ostream& os, std::span<const double> v) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double d : v) put(os, d);
  }
}

void get_doubles(std::istream& is, std::span<double> v, const std::filesystem::path& path) {
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw IngestionError("truncated file " + path.string());
  if constexpr (std::endian::native == std::endian::big) {
    for (double& d : v) d = to_le(d);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("cannot write " + path.string());
  return os;
}

void write_header(std::ostream& os, const char* magic, int nx, int ny, int nv, std::uint64_t ncols) {
  os.write(magic, 8);
  put<std::uint32_t>(os, format_version);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ny));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(nv));
  put<std::uint64_t>(os, ncols);
}

SnapshotFileHeader read_header(std::istream& is, const char* magic, const std::filesystem::path& path) {
  char m[8];
  is.read(m, 8);
  if (!is || std::memcmp(m, magic, 8) != 0) throw IngestionError("bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is, path);
  if (version != format_version) {
    throw IngestionError("unsupported format version " + std::to_string(version) + " in " + path.string());
  }
  SnapshotFileHeader h;
  h.nx = static_cast<int>(get<std::uint32_t>(is, path));
  h.ny = static_cast<int>(get<std::uint32_t>(is, path));
  h.n_vars = static_cast<int>(get<std::uint32_t>(is, path));
  h.n_cols = get<std::uint64_t>(is, path);
  return h;
}

std::map<std::string, std::string> read_kv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IngestionError("cannot read " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

template <class T>
std::vector<T> split_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::istringstream ts(tok);
    T v{};
    ts >> v;
    out.push_back(v);
  }
  return out;
}

std::filesystem::path meta_path(const std::filesystem::path& p) { return p.string() + ".meta"; }

}  // namespace

void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& s, int nx, int ny, int n_vars,
                     double dt) {
  if (static_cast<long long>(nx) * ny * n_vars != s.n_rows) throw IngestionError("snapshot layout does not match rows");
  {
    auto os = open_out(path);
    write_header(os, snapshot_magic, nx, ny, n_vars, static_cast<std::uint64_t>(s.n_cols()));
    put_doubles(os, s.data);
    if (!os) throw IngestionError("write failed for " + path.string());
  }
  std::vector<double> params, times;
  std::vector<int> runs;
  for (const auto& m : s.meta) {
    params.push_back(m.param);
    times.push_back(m.time);
    runs.push_back(m.run);
  }
  std::ofstream ms(meta_path(path));
  ms.precision(17);
  ms << "dt = " << dt << "\n";
  ms << "params = " << join(params) << "\n";
  ms << "times = " << join(times) << "\n";
  ms << "runs = " << join(runs) << "\n";
}

SnapshotMatrix read_snapshots(const std::filesystem::path& path, SnapshotFileHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestionError("cannot read " + path.string());
  const auto h = read_header(is, snapshot_magic, path);
  if (header) *header = h;
  SnapshotMatrix s;
  s.n_rows = h.nx * h.ny * h.n_vars;
  s.data.resize(static_cast<std::size_t>(s.n_rows) * h.n_cols);
  get_doubles(is, s.data, path);
  s.meta.resize(h.n_cols);
  if (std::filesystem::exists(meta_path(path))) {
    auto kv = read_kv(meta_path(path));
    const auto params = split_list<double>(kv["params"]);
    const auto times = split_list<double>(kv["times"]);
    const auto runs = split_list<int>(kv["runs"]);
    if (params.size() != h.n_cols || times.size() != h.n_cols || runs.size() != h.n_cols) {
      throw IngestionError("metadata count does not match column count in " + meta_path(path).string());
    }
    for (std::size_t k = 0; k < h.n_cols; ++k) s.meta[k] = {params[k], times[k], runs[k]};
  }
  return s;
}

void write_basis(const std::filesystem::path& path, const TrialBasis& b, int nx, int ny, int n_vars) {
  if (static_cast<long long>(nx) * ny * n_vars != b.n_rows) throw IngestionError("basis layout does not match rows");
  auto os = open_out(path);
  write_header(os, basis_magic, nx, ny, n_vars, static_cast<std::uint64_t>(b.n_modes));
  put_doubles(os, b.sigma);
  put_doubles(os, b.center);
  // column-major payload
  std::vector<double> col(static_cast<std::size_t>(b.n_rows));
  for (int j = 0; j < b.n_modes; ++j) {
    for (int i = 0; i < b.n_rows; ++i) col[static_cast<std::size_t>(i)] = b.row(i)[j];
    put_doubles(os, col);
  }
  if (!os) throw IngestionError("write failed for " + path.string());
}

TrialBasis read_basis(const std::filesystem::path& path, SnapshotFileHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestionError("cannot read " + path.string());
  const auto h = read_header(is, basis_magic, path);
  if (header) *header = h;
  TrialBasis b;
  b.n_rows = h.nx * h.ny * h.n_vars;
  b.n_modes = static_cast<int>(h.n_cols);
  b.sigma.resize(h.n_cols);
  b.center.resize(static_cast<std::size_t>(b.n_rows));
  get_doubles(is, b.sigma, path);
  get_doubles(is, b.center, path);
  b.phi.resize(static_cast<std::size_t>(b.n_rows) * h.n_cols);
  std::vector<double> col(static_cast<std::size_t>(b.n_rows));
  for (int j = 0; j < b.n_modes; ++j) {
    get_doubles(is, col, path);
    for (int i = 0; i < b.n_rows; ++i) {
      b.phi[static_cast<std::size_t>(i) * h.n_cols + static_cast<std::size_t>(j)] = col[static_cast<std::size_t>(i)];
    }
  }
  return b;
}

void write_sample_mesh(const std::filesystem::path& path, const SampleMesh& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw IngestionError("cannot write " + path.string());
  std::vector<int> sides, slots;
  for (const auto& [s, k] : m.ghost_augmentation) {
    sides.push_back(side_index(s));
    slots.push_back(k);
  }
  os << "n_s = " << m.n_s() << "\n";
  os << "sample_cells = " << join(m.sample_cells) << "\n";
  os << "closure_cells = " << join(m.closure_cells) << "\n";
  os << "interface_seeds = " << join(m.interface_seeds) << "\n";
  os << "qdeim_seeds = " << join(m.qdeim_seeds) << "\n";
  os << "ghost_sides = " << join(sides) << "\n";
  os << "ghost_slots = " << join(slots) << "\n";
}

SampleMesh read_sample_mesh(const std::filesystem::path& path) {
  auto kv = read_kv(path);
  SampleMesh m;
  m.sample_cells = split_list<int>(kv["sample_cells"]);
  m.closure_cells = split_list<int>(kv["closure_cells"]);
  m.interface_seeds = split_list<int>(kv["interface_seeds"]);
  m.qdeim_seeds = split_list<int>(kv["qdeim_seeds"]);
  const auto sides = split_list<int>(kv["ghost_sides"]);
  const auto slots = split_list<int>(kv["ghost_slots"]);
  if (sides.size() != slots.size()) throw IngestionError("ghost augmentation lists differ in length in " + path.string());
  for (std::size_t k = 0; k < sides.size(); ++k) {
    if (sides[k] < 0 || sides[k] > 3) throw IngestionError("bad side index in " + path.string());
    m.ghost_augmentation.emplace_back(all_sides[static_cast<std::size_t>(sides[k])], slots[k]);
  }
  return m;
}

}  // namespace sdrom
