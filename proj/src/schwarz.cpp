#include "sdrom/schwarz.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "sdrom/errors.hpp"
#include "sdrom/kernels.hpp"

namespace sdrom {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::fom: return "fom";
    case ModelKind::prom: return "prom";
    case ModelKind::hprom: return "hprom";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "fom") return ModelKind::fom;
  if (name == "prom") return ModelKind::prom;
  if (name == "hprom") return ModelKind::hprom;
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected fom, prom or hprom)");
}

SubdomainModel::SubdomainModel(SubdomainSetup setup)
    : setup_(std::move(setup)), ghosts_(make_ghost_layer(setup_.sub, setup_.model.n_vars())) {}

bool SubdomainModel::needs_ghost(Side, int) const { return true; }

ResidualContext SubdomainModel::context(std::span<const double> prev) const {
  ResidualContext ctx;
  ctx.sub = &setup_.sub;
  ctx.dx = setup_.dx;
  ctx.dy = setup_.dy;
  ctx.model = setup_.model;
  ctx.params = setup_.params;
  ctx.bcs = subdomain_bcs(setup_.sub, setup_.physical_bcs);
  ctx.dt = setup_.dt;
  ctx.prev = prev;
  ctx.ghosts = &ghosts_;
  return ctx;
}

namespace {

class FomModel final : public SubdomainModel {
 public:
  FomModel(SubdomainSetup setup, std::vector<double> initial) : SubdomainModel(std::move(setup)) {
    if (initial.size() != static_cast<std::size_t>(setup_.sub.n_cells() * nv())) {
      throw ConfigError("initial state does not match subdomain " + std::to_string(setup_.sub.id));
    }
    exposed_ = std::move(initial);
    state_n_ = exposed_;
    pending_ = exposed_;
  }

  ModelKind kind() const override { return ModelKind::fom; }
  void begin_step() override { state_n_ = exposed_; }

  void solve() override {
    const auto t0 = clock_type::now();
    const auto ctx = context(state_n_);
    auto res = newton_step_solve(ctx, setup_.warm_iterations ? exposed_ : state_n_, setup_.newton);
    pending_ = std::move(res.state);
    last_report_ = std::move(res.report);
    last_solve_seconds_ = seconds_since(t0);
  }

  void export_cell(int cell, double* out) const override {
    const int n = nv();
    std::copy_n(exposed_.data() + static_cast<std::size_t>(cell * n), n, out);
  }

  std::pair<double, double> pending_change() const override {
    return {kernels::squared_distance(pending_, exposed_), kernels::squared_norm(pending_)};
  }

  void commit() override { exposed_ = pending_; }
  std::vector<double> state() const override { return exposed_; }

 private:
  std::vector<double> state_n_, exposed_, pending_;
};

class RomModelBase : public SubdomainModel {
 public:
  RomModelBase(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis, std::span<const double> initial)
      : SubdomainModel(std::move(setup)), basis_(std::move(basis)) {
    if (!basis_) throw ConfigError("ROM subdomain " + std::to_string(setup_.sub.id) + " has no trial basis");
    if (basis_->n_rows != setup_.sub.n_cells() * nv()) {
      throw ConfigError("trial basis rows (" + std::to_string(basis_->n_rows) + ") do not match subdomain " +
                        std::to_string(setup_.sub.id) + " DOFs (" + std::to_string(setup_.sub.n_cells() * nv()) + ")");
    }
    q_exposed_ = basis_->project(initial);
    q_n_ = q_exposed_;
    q_pending_ = q_exposed_;
    coupling_ = basis_->center_coupling();
    center_sq_ = kernels::squared_norm(basis_->center);
  }

  void export_cell(int cell, double* out) const override {
    const auto m = static_cast<std::size_t>(basis_->n_modes);
    for (int i = 0; i < nv(); ++i) {
      const int r = cell * nv() + i;
      out[i] = basis_->center[static_cast<std::size_t>(r)] + kernels::dot({basis_->row(r), m}, q_exposed_);
    }
  }

  // Phi is orthonormal, so state norms follow from the coordinates.
  std::pair<double, double> pending_change() const override {
    const double d = kernels::squared_distance(q_pending_, q_exposed_);
    const double n = center_sq_ + 2.0 * kernels::dot(coupling_, q_pending_) + kernels::squared_norm(q_pending_);
    return {d, std::max(n, 0.0)};
  }

  void commit() override { q_exposed_ = q_pending_; }
  std::vector<double> state() const override { return basis_->reconstruct(q_exposed_); }

 protected:
  std::span<const double> start() const { return setup_.warm_iterations ? q_exposed_ : q_n_; }

  std::shared_ptr<const TrialBasis> basis_;
  std::vector<double> q_n_, q_exposed_, q_pending_;
  std::vector<double> coupling_;
  double center_sq_ = 0.0;
};

class PromModel final : public RomModelBase {
 public:
  using RomModelBase::RomModelBase;
  ModelKind kind() const override { return ModelKind::prom; }

  void begin_step() override {
    q_n_ = q_exposed_;
    prev_ = basis_->reconstruct(q_n_);
  }

  void solve() override {
    const auto t0 = clock_type::now();
    if (prev_.empty()) prev_ = basis_->reconstruct(q_n_);
    auto res = lspg_gauss_newton(*basis_, context(prev_), start(), setup_.gauss_newton);
    q_pending_ = std::move(res.qhat);
    last_report_ = std::move(res.report);
    last_solve_seconds_ = seconds_since(t0);
  }

 private:
  std::vector<double> prev_;
};

class HpromModel final : public RomModelBase {
 public:
  HpromModel(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis, std::shared_ptr<const SampleMesh> mesh,
             std::span<const double> initial)
      : RomModelBase(std::move(setup), std::move(basis), initial), mesh_(std::move(mesh)) {
    if (!mesh_) throw ConfigError("HPROM subdomain " + std::to_string(setup_.sub.id) + " has no sample mesh");
    for (int c : mesh_->stencil_cells()) {
      if (c < 0 || c >= setup_.sub.n_cells()) throw ConfigError("sample mesh cell outside subdomain");
    }
    for (Side s : all_sides) needed_[side_index(s)].assign(static_cast<std::size_t>(setup_.sub.side_length(s)), 0);
    for (const auto& [s, k] : mesh_->ghost_augmentation) needed_[side_index(s)][static_cast<std::size_t>(k)] = 1;
    prev_.assign(static_cast<std::size_t>(basis_->n_rows), 0.0);
  }

  ModelKind kind() const override { return ModelKind::hprom; }

  bool needs_ghost(Side s, int slot) const override {
    return needed_[side_index(s)][static_cast<std::size_t>(slot)] != 0;
  }

  void begin_step() override {
    q_n_ = q_exposed_;
    basis_->reconstruct_cells(q_n_, mesh_->sample_cells, nv(), prev_);
    primed_ = true;
  }

  void solve() override {
    const auto t0 = clock_type::now();
    if (!primed_) begin_step();
    auto res = lspg_collocated(*basis_, context(prev_), *mesh_, start(), setup_.gauss_newton);
    q_pending_ = std::move(res.qhat);
    last_report_ = std::move(res.report);
    last_solve_seconds_ = seconds_since(t0);
  }

 private:
  std::shared_ptr<const SampleMesh> mesh_;
  std::array<std::vector<char>, 4> needed_;
  std::vector<double> prev_;
  bool primed_ = false;
};

}  // namespace

std::unique_ptr<SubdomainModel> make_fom(SubdomainSetup setup, std::vector<double> initial) {
  return std::make_unique<FomModel>(std::move(setup), std::move(initial));
}

std::unique_ptr<SubdomainModel> make_prom(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis,
                                          std::vector<double> initial) {
  return std::make_unique<PromModel>(std::move(setup), std::move(basis), initial);
}

std::unique_ptr<SubdomainModel> make_hprom(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis,
                                           std::shared_ptr<const SampleMesh> mesh, std::vector<double> initial) {
  return std::make_unique<HpromModel>(std::move(setup), std::move(basis), std::move(mesh), initial);
}

ConvergenceMeasure schwarz_convergence(std::span<const std::pair<double, double>> changes) {
  ConvergenceMeasure m;
  double abs_sq = 0.0, rel_sq = 0.0;
  for (const auto& [d, n] : changes) {
    abs_sq += d;
    if (n > 0.0) {
      rel_sq += d / n;
    } else {
      m.rel_fallback = true;
    }
  }
  m.eps_abs = std::sqrt(abs_sq);
  m.eps_rel = std::sqrt(rel_sq);
  return m;
}

SchwarzController::SchwarzController(CartesianGrid grid, std::vector<Subdomain> subdomains,
                                     std::vector<std::unique_ptr<SubdomainModel>> models, SchwarzSettings settings)
    : grid_(std::move(grid)), subs_(std::move(subdomains)), models_(std::move(models)), settings_(settings) {
  if (subs_.size() != models_.size()) throw ConfigError("one model per subdomain is required");
  if (settings_.max_iters < 1) throw ConfigError("max_schwarz_iters must be >= 1");
  maps_ = build_donor_maps(subs_);
}

void SchwarzController::transfer_ghosts() {
  for (const auto& map : maps_) {
    auto& rec = *models_[static_cast<std::size_t>(map.receiver)];
    const auto& don = *models_[static_cast<std::size_t>(map.donor)];
    const int nv = rec.nv();
    for (const auto& [slot, cell] : map.entries) {
      if (!rec.needs_ghost(map.side, slot)) continue;
      don.export_cell(cell, rec.ghosts().slot(map.side, slot, nv).data());
    }
  }
}

StepRecord SchwarzController::step() {
  StepRecord rec;
  for (auto& m : models_) m->begin_step();
  const std::size_t n = models_.size();
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::pair<double, double>> changes(n);
  ConvergenceMeasure conv;
  for (int k = 1; k <= settings_.max_iters; ++k) {
    auto t0 = clock_type::now();
    transfer_ghosts();
    double overhead = seconds_since(t0);

    auto run_one = [&](std::size_t i) {
      try {
        models_[i]->solve();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    if (settings_.parallel && n > 1) {
      std::vector<std::thread> workers;
      workers.reserve(n);
      for (std::size_t i = 0; i < n; ++i) workers.emplace_back(run_one, i);
      for (auto& w : workers) w.join();
    } else {
      for (std::size_t i = 0; i < n; ++i) run_one(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!errors[i]) continue;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw CouplingError("subdomain " + std::to_string(i) + " (" + model_kind_name(models_[i]->kind()) +
                            ") failed in Schwarz iteration " + std::to_string(k) + ": " + e.what());
      }
    }
    double slowest = 0.0;
    for (const auto& m : models_) slowest = std::max(slowest, m->last_solve_seconds());

    t0 = clock_type::now();
    for (std::size_t i = 0; i < n; ++i) changes[i] = models_[i]->pending_change();
    conv = schwarz_convergence(changes);
    for (auto& m : models_) m->commit();
    overhead += seconds_since(t0);

    rec.wall_seconds += slowest + overhead;
    rec.iterations = k;
    rec.eps_abs.push_back(conv.eps_abs);
    rec.eps_rel.push_back(conv.eps_rel);
    rec.rel_fallback = rec.rel_fallback || conv.rel_fallback;

    if (!has_interfaces()) return rec;
    const bool ok = conv.eps_abs < settings_.delta_abs && (conv.rel_fallback || conv.eps_rel < settings_.delta_rel);
    if (k >= 2 && ok) return rec;
  }
  std::ostringstream os;
  os.precision(3);
  os << "Schwarz iteration did not converge in " << settings_.max_iters << " iterations; eps_abs/eps_rel history:";
  for (std::size_t i = 0; i < rec.eps_abs.size(); ++i) {
    if (rec.eps_abs.size() > 8 && i == 4) {
      os << " ...";
      i = rec.eps_abs.size() - 4;
    }
    os << " " << rec.eps_abs[i] << "/" << rec.eps_rel[i];
  }
  throw CouplingError(os.str());
}

std::vector<double> SchwarzController::gathered_state() const {
  std::vector<std::vector<double>> locals;
  locals.reserve(models_.size());
  for (const auto& m : models_) locals.push_back(m->state());
  return gather_field(grid_, subs_, locals);
}

double SchwarzStats::mean_iterations() const {
  if (iterations.empty()) return 0.0;
  double s = 0.0;
  for (int k : iterations) s += k;
  return s / static_cast<double>(iterations.size());
}

int step_count(double duration, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (duration < 0.0) throw ConfigError("simulated duration must be non-negative");
  return static_cast<int>(std::lround(duration / dt));
}

namespace {

std::string format_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

RunResult run_transient(SchwarzController& ctl, int n_steps, double t0, double dt, int cadence) {
  if (cadence < 1) throw ConfigError("output cadence must be >= 1");
  RunResult out;
  out.trajectory.times.push_back(t0);
  out.trajectory.states.push_back(ctl.gathered_state());
  for (int s = 1; s <= n_steps; ++s) {
    StepRecord rec;
    try {
      rec = ctl.step();
    } catch (const CouplingError& e) {
      throw CouplingError("time step " + std::to_string(s) + " (t = " + format_time(t0 + s * dt) + "): " + e.what());
    }
    out.stats.iterations.push_back(rec.iterations);
    out.stats.wall_seconds.push_back(rec.wall_seconds);
    out.stats.total_wall_seconds += rec.wall_seconds;
    if (s % cadence == 0) {
      out.trajectory.times.push_back(t0 + s * dt);
      out.trajectory.states.push_back(ctl.gathered_state());
    }
  }
  return out;
}

}  // namespace sdrom
