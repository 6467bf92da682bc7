#include "sdrom/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "sdrom/errors.hpp"

namespace sdrom {

namespace fs = std::filesystem;

CaseSpec make_case(const CampaignConfig& c, double param, bool decomposed) {
  CaseSpec s;
  s.model = c.model;
  s.model.system = c.system;
  s.params = with_active_param(c.system, c.base_params, param);
  s.physical_bcs = c.physical_bcs;
  s.dt = c.dt;
  s.grid = build_grid(c.nx, c.ny, c.bounds, s.model.n_vars());
  s.subs = decomposed ? decompose(s.grid, c.px, c.py, c.overlap) : decompose(s.grid, 1, 1, 0);
  s.newton.jacobian = c.jacobian;
  s.newton.iterative = c.iterative_linear;
  s.gauss_newton.jacobian = c.jacobian;
  s.schwarz = c.schwarz;
  s.warm_iterations = c.warm_iterations;
  return s;
}

std::unique_ptr<SchwarzController> build_controller(const CaseSpec& spec, const std::vector<ModelKind>& kinds,
                                                    std::span<const double> initial_global, const RomAssets& assets) {
  const std::size_t n = spec.subs.size();
  if (kinds.size() != 1 && kinds.size() != n) {
    throw ConfigError(std::to_string(kinds.size()) + " model kinds given for " + std::to_string(n) + " subdomains");
  }
  if (initial_global.size() != static_cast<std::size_t>(spec.grid.n_dofs())) {
    throw ConfigError("initial state size does not match the grid");
  }
  std::vector<std::unique_ptr<SubdomainModel>> models;
  for (std::size_t i = 0; i < n; ++i) {
    const ModelKind kind = kinds.size() == 1 ? kinds.front() : kinds[i];
    SubdomainSetup setup;
    setup.sub = spec.subs[i];
    setup.dx = spec.grid.dx;
    setup.dy = spec.grid.dy;
    setup.model = spec.model;
    setup.params = spec.params;
    setup.physical_bcs = spec.physical_bcs;
    setup.dt = spec.dt;
    setup.newton = spec.newton;
    setup.gauss_newton = spec.gauss_newton;
    setup.warm_iterations = spec.warm_iterations;
    auto init = restrict_field(spec.grid, spec.subs[i], initial_global);
    auto basis_for = [&]() {
      if (i >= assets.bases.size() || !assets.bases[i]) {
        throw ConfigError("no trial basis for subdomain " + std::to_string(i));
      }
      return assets.bases[i];
    };
    switch (kind) {
      case ModelKind::fom:
        models.push_back(make_fom(std::move(setup), std::move(init)));
        break;
      case ModelKind::prom:
        models.push_back(make_prom(std::move(setup), basis_for(), std::move(init)));
        break;
      case ModelKind::hprom: {
        auto b = basis_for();
        if (i >= assets.meshes.size() || !assets.meshes[i]) {
          throw ConfigError("no sample mesh for subdomain " + std::to_string(i));
        }
        models.push_back(make_hprom(std::move(setup), std::move(b), assets.meshes[i], std::move(init)));
        break;
      }
    }
  }
  return std::make_unique<SchwarzController>(spec.grid, spec.subs, std::move(models), spec.schwarz);
}

namespace {

void check_same_cadence(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size() || a.states.size() != b.states.size()) {
    throw MetricError("trajectories have different numbers of saved steps (" + std::to_string(a.times.size()) +
                      " vs " + std::to_string(b.times.size()) + ")");
  }
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    if (std::abs(a.times[n] - b.times[n]) > 1e-9 * std::max(1.0, std::abs(a.times[n]))) {
      throw MetricError("trajectories are saved at different times (step " + std::to_string(n) + ": " +
                        format_double(a.times[n]) + " vs " + format_double(b.times[n]) + ")");
    }
    if (a.states[n].size() != b.states[n].size()) throw MetricError("trajectory states differ in size");
  }
}

}  // namespace

SpaceTimeError space_time_error(const Trajectory& reference, const Trajectory& test, int n_vars) {
  check_same_cadence(reference, test);
  if (n_vars < 1) throw MetricError("n_vars must be positive");
  std::vector<double> num(static_cast<std::size_t>(n_vars), 0.0), den(num);
  for (std::size_t n = 0; n < reference.states.size(); ++n) {
    const auto& u = reference.states[n];
    const auto& v = test.states[n];
    if (u.size() % static_cast<std::size_t>(n_vars) != 0) throw MetricError("state size is not a multiple of n_vars");
    for (std::size_t r = 0; r < u.size(); ++r) {
      const auto k = r % static_cast<std::size_t>(n_vars);
      const double d = u[r] - v[r];
      num[k] += d * d;
      den[k] += u[r] * u[r];
    }
  }
  SpaceTimeError e;
  double tn = 0.0, td = 0.0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    e.per_variable.push_back(den[k] > 0.0 ? num[k] / den[k] : (num[k] > 0.0 ? INFINITY : 0.0));
    tn += num[k];
    td += den[k];
  }
  e.aggregate = td > 0.0 ? tn / td : (tn > 0.0 ? INFINITY : 0.0);
  return e;
}

std::vector<double> mean_abs_error_field(const Trajectory& reference, const Trajectory& test) {
  check_same_cadence(reference, test);
  if (reference.states.empty()) return {};
  std::vector<double> out(reference.states.front().size(), 0.0);
  for (std::size_t n = 0; n < reference.states.size(); ++n) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += std::abs(reference.states[n][r] - test.states[n][r]);
  }
  for (double& x : out) x /= static_cast<double>(reference.states.size());
  return out;
}

// ---------------------------------------------------------------- records

void write_records(const fs::path& path, const std::vector<RunRecord>& records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw IngestionError("cannot write " + path.string());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    os << "[r" << i << "]\n"
       << "run_id = " << r.run_id << "\n"
       << "label = " << r.label << "\n"
       << "param = " << format_double(r.param) << "\n"
       << "config_hash = " << r.config_hash << "\n"
       << "has_reference = " << (r.has_reference ? 1 : 0) << "\n"
       << "errors = ";
    for (std::size_t k = 0; k < r.errors.size(); ++k) os << (k ? "," : "") << format_double(r.errors[k]);
    os << "\naggregate_error = " << format_double(r.aggregate_error) << "\n"
       << "wall_seconds = " << format_double(r.wall_seconds) << "\n"
       << "mean_iterations = " << format_double(r.mean_iterations) << "\n";
    std::string status = r.status;
    std::replace(status.begin(), status.end(), '\n', ' ');
    std::replace(status.begin(), status.end(), '#', ' ');
    std::replace(status.begin(), status.end(), ';', ',');
    os << "status = " << status << "\n\n";
  }
}

std::vector<RunRecord> read_records(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IngestionError("cannot read run records " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const auto ini = IniFile::parse(ss.str(), path.string());
  std::map<int, RunRecord> by_index;
  for (const auto& [key, value] : ini.values()) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || key[0] != 'r') throw IngestionError("unexpected record key '" + key + "'");
    const int idx = std::stoi(key.substr(1, dot - 1));
    const auto field = key.substr(dot + 1);
    auto& r = by_index[idx];
    try {
      if (field == "run_id") {
        r.run_id = value;
      } else if (field == "label") {
        r.label = value;
      } else if (field == "param") {
        r.param = std::stod(value);
      } else if (field == "config_hash") {
        r.config_hash = value;
      } else if (field == "has_reference") {
        r.has_reference = value == "1";
      } else if (field == "errors") {
        std::stringstream es(value);
        std::string tok;
        while (std::getline(es, tok, ',')) {
          if (!tok.empty()) r.errors.push_back(std::stod(tok));
        }
      } else if (field == "aggregate_error") {
        r.aggregate_error = std::stod(value);
      } else if (field == "wall_seconds") {
        r.wall_seconds = std::stod(value);
      } else if (field == "mean_iterations") {
        r.mean_iterations = std::stod(value);
      } else if (field == "status") {
        r.status = value;
      } else {
        throw IngestionError("unknown record field '" + field + "'");
      }
    } catch (const std::invalid_argument&) {
      throw IngestionError("bad value for " + key + " in " + path.string());
    }
  }
  std::vector<RunRecord> out;
  for (auto& [i, r] : by_index) out.push_back(std::move(r));
  return out;
}

namespace {

bool is_fom_baseline(const std::string& label) { return label == "fom-mono" || label == "fom-decomp"; }

const RunRecord* find_record(const std::vector<RunRecord>& records, const std::string& label, double param) {
  for (const auto& r : records) {
    if (r.label == label && r.param == param) return &r;
  }
  return nullptr;
}

const RunRecord& baseline(const std::vector<RunRecord>& records, const std::string& label, double param) {
  const auto* r = find_record(records, label, param);
  if (!r && label == "fom-decomp") r = find_record(records, "fom-mono", param);
  if (!r) throw MetricError("missing baseline " + label + " at parameter " + format_double(param));
  if (!r->ok()) throw MetricError("baseline " + label + " at parameter " + format_double(param) + " " + r->status);
  if (!(r->wall_seconds > 0.0)) throw MetricError("baseline " + label + " has no wall time");
  return *r;
}

}  // namespace

std::vector<ParetoRow> speedup_report(const std::vector<RunRecord>& records) {
  std::vector<ParetoRow> rows;
  for (const auto& r : records) {
    if (is_fom_baseline(r.label) || !r.ok()) continue;
    const auto& mono = baseline(records, "fom-mono", r.param);
    const auto& decomp = baseline(records, "fom-decomp", r.param);
    ParetoRow p;
    p.label = r.label;
    p.param = r.param;
    p.error = r.aggregate_error;
    p.wall_seconds = r.wall_seconds;
    p.speedup_vs_mono = mono.wall_seconds / r.wall_seconds;
    p.speedup_vs_decomp = decomp.wall_seconds / r.wall_seconds;
    rows.push_back(p);
  }
  return rows;
}

// ---------------------------------------------------------------- campaign

Campaign::Campaign(CampaignConfig config) : config_(std::move(config)) {
  validate_config(config_);
  hash_ = config_hash(config_);
}

std::string Campaign::mono_label(ModelKind k) { return std::string(model_kind_name(k)) + "-mono"; }

std::string Campaign::decomp_label(const std::string& family) {
  std::string s = family;
  std::replace(s.begin(), s.end(), '/', '+');
  return s + "-decomp";
}

void Campaign::write_config() const {
  fs::create_directories(config_.output);
  std::ofstream os(config_.output / "config.ini");
  if (!os) throw IngestionError("cannot write " + (config_.output / "config.ini").string());
  os << "# hash " << hash_ << "\n" << serialize_config(config_);
}

std::vector<ModelKind> Campaign::family_kinds(const std::string& family) const {
  std::vector<ModelKind> kinds;
  std::stringstream ss(family);
  std::string tok;
  while (std::getline(ss, tok, '/')) {
    const auto a = tok.find_first_not_of(' ');
    const auto b = tok.find_last_not_of(' ');
    if (a != std::string::npos) kinds.push_back(parse_model_kind(tok.substr(a, b - a + 1)));
  }
  return kinds;
}

fs::path Campaign::train_path(std::size_t k) const {
  return config_.output / "train" / ("param_" + std::to_string(k) + ".snap");
}

namespace {

struct Phased {
  std::vector<double> warm_state;
  RunResult result;
};

// Runs [0, warm) with no output, then [warm, T] at the requested cadence.
Phased run_phased(SchwarzController& ctl, const CampaignConfig& c, bool skip_warm_phase) {
  const int total = step_count(c.final_time, c.dt);
  const int warm = step_count(c.warm_start_time, c.dt);
  Phased p;
  if (!skip_warm_phase && warm > 0) run_transient(ctl, warm, 0.0, c.dt, warm);
  p.warm_state = ctl.gathered_state();
  p.result = run_transient(ctl, total - warm, warm * c.dt, c.dt, c.cadence);
  return p;
}

void dump_field(const fs::path& path, std::span<const double> field, const CampaignConfig& c, int nv, double param,
                double time) {
  SnapshotMatrix m;
  m.append(field, {param, time, 0});
  write_snapshots(path, m, c.nx, c.ny, nv, c.dt);
}

std::string param_tag(std::size_t k) { return "p" + std::to_string(k); }

}  // namespace

void Campaign::train() {
  write_config();
  const auto& c = config_;
  for (std::size_t k = 0; k < c.train.size(); ++k) {
    const double mu = c.train[k];
    const auto spec = make_case(c, mu, false);
    const auto init = initial_condition(spec.model, spec.params, spec.grid);
    auto ctl = build_controller(spec, {ModelKind::fom}, init);
    const auto res = run_transient(*ctl, step_count(c.final_time, c.dt), 0.0, c.dt, 1);
    SnapshotMatrix snaps;
    for (std::size_t n = 0; n < res.trajectory.states.size(); ++n) {
      snaps.append(res.trajectory.states[n], {mu, res.trajectory.times[n], static_cast<int>(k)});
    }
    write_snapshots(train_path(k), snaps, c.nx, c.ny, spec.model.n_vars(), c.dt);
    std::cerr << "train: parameter " << format_double(mu) << " done (" << snaps.n_cols() << " snapshots)\n";
  }
}

void Campaign::basis() {
  write_config();
  const auto& c = config_;
  if (c.train.empty()) throw ConfigError("no training parameters");
  std::vector<SnapshotMatrix> runs;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < c.train.size(); ++k) {
    SnapshotFileHeader h;
    auto s = read_snapshots(train_path(k), &h);
    if (h.nx != c.nx || h.ny != c.ny) {
      throw IngestionError("training run " + train_path(k).string() + " was computed on a different grid");
    }
    // ROM runs start at the warm-start time, so earlier states are left out.
    if (c.warm_start_time > 0.0) {
      SnapshotMatrix kept;
      const double t0 = c.warm_start_time - 1e-9 * c.dt;
      for (int n = 0; n < s.n_cols(); ++n) {
        if (s.meta[static_cast<std::size_t>(n)].time >= t0) kept.append(s.column(n), s.meta[static_cast<std::size_t>(n)]);
      }
      s = std::move(kept);
    }
    runs.push_back(std::move(s));
    names.push_back(train_path(k).string());
  }
  const auto mono = assemble_snapshots(runs, names);
  const auto spec = make_case(c, c.train.front(), true);
  const int nv = spec.model.n_vars();
  const fs::path dir = c.output / "bases";
  fs::create_directories(dir);
  std::ofstream summary(dir / "projection_errors.csv");
  summary << "basis,modes,aggregate";
  for (const auto& v : c.variable_names()) summary << "," << v;
  summary << "\n";
  auto record = [&](const std::string& name, const TrialBasis& b, const SnapshotMatrix& s) {
    const auto pe = projection_error(b, s, nv);
    summary << name << "," << b.n_modes << "," << format_double(pe.aggregate);
    for (double e : pe.per_variable) summary << "," << format_double(e);
    summary << "\n";
  };

  const auto mono_basis = compute_pod(mono, c.mono_modes);
  write_basis(dir / "mono.basis", mono_basis, c.nx, c.ny, nv);
  record("mono", mono_basis, mono);
  if (c.qdeim_modes > 0) {
    const int mq = std::min({c.qdeim_modes, mono.n_rows, mono.n_cols()});
    write_basis(dir / "qdeim_mono.basis", compute_pod(mono, mq), c.nx, c.ny, nv);
  }

  const auto split = split_snapshots(mono, spec.grid, spec.subs);
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& sub = spec.subs[i];
    const auto b = compute_pod(split[i], c.modes_for(static_cast<int>(i)));
    write_basis(dir / ("sub" + std::to_string(i) + ".basis"), b, sub.nx(), sub.ny(), nv);
    record("sub" + std::to_string(i), b, split[i]);
    if (c.qdeim_modes > 0) {
      const int mq = std::min({c.qdeim_modes, split[i].n_rows, split[i].n_cols()});
      write_basis(dir / ("qdeim_sub" + std::to_string(i) + ".basis"), compute_pod(split[i], mq), sub.nx(), sub.ny(),
                  nv);
    }
  }
  std::cerr << "basis: " << mono.n_cols() << " snapshots, " << split.size() << " subdomain bases\n";
}

void Campaign::sample() {
  write_config();
  const auto& c = config_;
  const fs::path bases = c.output / "bases";
  const fs::path dir = c.output / "samples";
  fs::create_directories(dir);
  const int nv = c.model.n_vars();
  auto seeds_from = [&](const fs::path& p) {
    std::vector<int> cells;
    if (c.qdeim_modes > 0) {
      const auto q = read_basis(p);
      const auto dofs = qdeim_indices(q);
      cells = dofs_to_cells(dofs, nv);
    }
    return cells;
  };

  const auto mono_grid = decompose(build_grid(c.nx, c.ny, c.bounds, nv), 1, 1, 0).front();
  SampleMeshOptions mo;
  mo.n_s = sample_count(c.sample_percent, mono_grid.n_cells());
  mo.n_b = c.n_b;
  mo.seed = c.seed;
  mo.seed_cells = seeds_from(bases / "qdeim_mono.basis");
  write_sample_mesh(dir / "mono.txt", build_sample_mesh(mono_grid, mo));

  const auto spec = make_case(c, c.train.empty() ? 0.0 : c.train.front(), true);
  for (std::size_t i = 0; i < spec.subs.size(); ++i) {
    SampleMeshOptions o;
    // the percentage is of the full mesh, capped at the subdomain's own cells
    o.n_s = std::min(mo.n_s, spec.subs[i].n_cells());
    o.n_b = c.n_b;
    o.seed = c.seed + i;
    o.seed_cells = seeds_from(bases / ("qdeim_sub" + std::to_string(i) + ".basis"));
    write_sample_mesh(dir / ("sub" + std::to_string(i) + ".txt"), build_sample_mesh(spec.subs[i], o));
  }
  std::cerr << "sample: " << spec.subs.size() + 1 << " sample meshes\n";
}

RomAssets Campaign::load_assets(bool decomposed, bool need_meshes) const {
  RomAssets a;
  const fs::path bases = config_.output / "bases";
  const fs::path samples = config_.output / "samples";
  if (!decomposed) {
    a.bases.push_back(std::make_shared<const TrialBasis>(read_basis(bases / "mono.basis")));
    if (need_meshes) a.meshes.push_back(std::make_shared<const SampleMesh>(read_sample_mesh(samples / "mono.txt")));
    return a;
  }
  for (int i = 0; i < config_.n_subdomains(); ++i) {
    const auto tag = "sub" + std::to_string(i);
    a.bases.push_back(std::make_shared<const TrialBasis>(read_basis(bases / (tag + ".basis"))));
    if (need_meshes) a.meshes.push_back(std::make_shared<const SampleMesh>(read_sample_mesh(samples / (tag + ".txt"))));
  }
  return a;
}

std::vector<RunRecord> Campaign::run() {
  write_config();
  const auto& c = config_;
  const int nv = c.model.n_vars();
  const bool split = c.n_subdomains() > 1;
  const fs::path fields = c.output / "fields";
  fs::create_directories(fields);
  std::vector<RunRecord> records;

  struct Variant {
    std::string label;
    std::vector<ModelKind> kinds;
    bool decomposed;
  };
  std::vector<Variant> variants;
  std::set<std::string> seen{"fom-mono", "fom-decomp"};
  for (const auto& family : c.runs) {
    const auto kinds = family_kinds(family);
    const bool uniform = std::all_of(kinds.begin(), kinds.end(), [&](ModelKind k) { return k == kinds.front(); });
    if (uniform && kinds.front() == ModelKind::fom) continue;
    if (uniform && (c.monolithic_roms || !split)) {
      const auto l = mono_label(kinds.front());
      if (seen.insert(l).second) variants.push_back({l, {kinds.front()}, false});
    }
    if (split) {
      const auto l = decomp_label(family);
      if (seen.insert(l).second) variants.push_back({l, kinds, true});
    }
  }

  for (std::size_t k = 0; k < c.test.size(); ++k) {
    const double mu = c.test[k];
    auto base_record = [&](const std::string& label) {
      RunRecord r;
      r.label = label;
      r.param = mu;
      r.run_id = label + ":" + format_double(mu);
      r.config_hash = hash_;
      return r;
    };
    auto finish = [&](RunRecord& r, const Trajectory& ref, const RunResult& res) {
      const auto e = space_time_error(ref, res.trajectory, nv);
      r.has_reference = true;
      r.errors = e.per_variable;
      r.aggregate_error = e.aggregate;
      r.wall_seconds = res.stats.total_wall_seconds;
      r.mean_iterations = res.stats.mean_iterations();
      r.status = "ok";
      const auto stem = r.label + "_" + param_tag(k);
      const double t_end = res.trajectory.times.back();
      dump_field(fields / (stem + "_final.snap"), res.trajectory.states.back(), c, nv, mu, t_end);
      dump_field(fields / (stem + "_mean_abs_error.snap"), mean_abs_error_field(ref, res.trajectory), c, nv, mu,
                 t_end);
    };

    // Monolithic FOM reference.
    const auto mono_spec = make_case(c, mu, false);
    const auto init = initial_condition(mono_spec.model, mono_spec.params, mono_spec.grid);
    RunRecord ref_rec = base_record("fom-mono");
    Phased ref;
    try {
      auto ctl = build_controller(mono_spec, {ModelKind::fom}, init);
      ref = run_phased(*ctl, c, false);
      finish(ref_rec, ref.result.trajectory, ref.result);
      // the reference carries no error against itself
      ref_rec.has_reference = false;
      ref_rec.errors.clear();
      ref_rec.aggregate_error = 0.0;
    } catch (const std::exception& e) {
      ref_rec.status = std::string("failed: ") + e.what();
      records.push_back(ref_rec);
      std::cerr << "run: reference at " << format_double(mu) << " failed, skipping dependent runs\n";
      continue;
    }
    records.push_back(ref_rec);
    const auto& ref_traj = ref.result.trajectory;

    auto attempt = [&](const std::string& label, const std::vector<ModelKind>& kinds, bool decomposed,
                       bool from_warm) {
      RunRecord r = base_record(label);
      try {
        const auto spec = make_case(c, mu, decomposed);
        const bool rom = std::any_of(kinds.begin(), kinds.end(), [](ModelKind m) { return m != ModelKind::fom; });
        const bool hyper = std::any_of(kinds.begin(), kinds.end(), [](ModelKind m) { return m == ModelKind::hprom; });
        const RomAssets assets = rom ? load_assets(decomposed, hyper) : RomAssets{};
        auto ctl = build_controller(spec, kinds, from_warm ? std::span<const double>(ref.warm_state) : init, assets);
        auto res = run_phased(*ctl, c, from_warm);
        finish(r, ref_traj, res.result);
      } catch (const std::exception& e) {
        r.status = std::string("failed: ") + e.what();
      }
      std::cerr << "run: " << r.run_id << " " << (r.ok() ? "ok" : r.status) << "\n";
      records.push_back(r);
    };

    if (split) attempt("fom-decomp", {ModelKind::fom}, true, false);
    for (const auto& v : variants) attempt(v.label, v.kinds, v.decomposed, c.warm_start_time > 0.0);
  }
  write_records(c.output / "runs" / "records.txt", records);
  return records;
}

void Campaign::report() {
  const auto& c = config_;
  const auto records = read_records(c.output / "runs" / "records.txt");
  const fs::path dir = c.output / "tables";
  fs::create_directories(dir);
  const auto vars = c.variable_names();

  std::ofstream all(dir / "records.csv");
  all << "run_id,label,param,config_hash,status,aggregate_error,mean_schwarz_iters,wall_time_s\n";
  for (const auto& r : records) {
    all << r.run_id << "," << r.label << "," << format_double(r.param) << "," << r.config_hash << ","
        << (r.ok() ? "ok" : "failed") << "," << format_double(r.has_reference ? r.aggregate_error : NAN) << ","
        << format_double(r.mean_iterations) << "," << format_double(r.wall_seconds) << "\n";
  }

  std::vector<std::string> labels;
  for (const auto& r : records) {
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
  }
  for (const auto& label : labels) {
    std::ofstream os(dir / (label + ".csv"));
    os << table_header << "\n";
    for (const auto& r : records) {
      if (r.label != label) continue;
      double s_mono = NAN, s_decomp = NAN;
      if (r.ok()) {
        s_mono = baseline(records, "fom-mono", r.param).wall_seconds / r.wall_seconds;
        s_decomp = baseline(records, "fom-decomp", r.param).wall_seconds / r.wall_seconds;
      }
      const auto row = [&](const std::string& var, double err) {
        os << format_double(r.param) << "," << var << "," << format_double(r.ok() ? err : NAN) << ","
           << format_double(r.ok() ? r.mean_iterations : NAN) << "," << format_double(r.ok() ? r.wall_seconds : NAN)
           << "," << format_double(s_mono) << "," << format_double(s_decomp) << "\n";
      };
      for (std::size_t v = 0; v < vars.size(); ++v) row(vars[v], v < r.errors.size() ? r.errors[v] : NAN);
      row("all", r.has_reference ? r.aggregate_error : NAN);
    }
  }

  std::ofstream pareto(dir / "pareto.csv");
  pareto << "label,param,error,wall_time_s,speedup_vs_mono,speedup_vs_decomp\n";
  for (const auto& p : speedup_report(records)) {
    pareto << p.label << "," << format_double(p.param) << "," << format_double(p.error) << ","
           << format_double(p.wall_seconds) << "," << format_double(p.speedup_vs_mono) << ","
           << format_double(p.speedup_vs_decomp) << "\n";
  }
}

void Campaign::run_all() {
  train();
  if (config_.test.empty()) return;
  basis();
  const bool hyper = std::any_of(config_.runs.begin(), config_.runs.end(),
                                 [](const std::string& f) { return f.find("hprom") != std::string::npos; });
  if (hyper) sample();
  run();
  report();
}

}  // namespace sdrom
