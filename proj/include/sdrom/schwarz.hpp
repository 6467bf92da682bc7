#pragma once

// Additive Schwarz time loop over FOM / PROM / HPROM subdomain models with
// Dirichlet-Dirichlet ghost transfer.

#include <memory>
#include <span>
#include <vector>

#include "sdrom/fv_core.hpp"
#include "sdrom/mesh.hpp"
#include "sdrom/rom_types.hpp"
#include "sdrom/solvers.hpp"

namespace sdrom {

enum class ModelKind { fom, prom, hprom };
const char* model_kind_name(ModelKind k);
ModelKind parse_model_kind(std::string_view name);

/// What every subdomain model shares: geometry, physics, and its ghosts.
struct SubdomainSetup {
  Subdomain sub;
  double dx = 0.0;
  double dy = 0.0;
  FluxModel model;
  ParamSet params;
  BoundarySpec physical_bcs{};
  double dt = 0.0;
  NewtonSettings newton;
  GaussNewtonSettings gauss_newton;
  /// Warm-start each Schwarz iteration from the previous iterate instead of
  /// re-solving from t_n.
  bool warm_iterations = false;
};

class SubdomainModel {
 public:
  explicit SubdomainModel(SubdomainSetup setup);
  virtual ~SubdomainModel() = default;
  SubdomainModel(const SubdomainModel&) = delete;
  SubdomainModel& operator=(const SubdomainModel&) = delete;

  virtual ModelKind kind() const = 0;
  const Subdomain& sub() const { return setup_.sub; }
  int nv() const { return setup_.model.n_vars(); }
  GhostLayer& ghosts() { return ghosts_; }
  const GhostLayer& ghosts() const { return ghosts_; }

  /// Freeze the converged state as t_n.
  virtual void begin_step() = 0;
  /// Solve t_n -> t_{n+1} with the current ghosts into the pending iterate.
  virtual void solve() = 0;
  /// Exposed (previous-iterate) value of one cell.
  virtual void export_cell(int cell, double* out) const = 0;
  /// Whether this ghost slot is read by the model's residual.
  virtual bool needs_ghost(Side s, int slot) const;
  /// (||pending - exposed||^2, ||pending||^2)
  virtual std::pair<double, double> pending_change() const = 0;
  /// exposed <- pending
  virtual void commit() = 0;
  /// Full reconstruction of the exposed state.
  virtual std::vector<double> state() const = 0;

  double last_solve_seconds() const { return last_solve_seconds_; }
  const NonlinearSolveReport& last_report() const { return last_report_; }

 protected:
  ResidualContext context(std::span<const double> prev) const;

  SubdomainSetup setup_;
  GhostLayer ghosts_;
  double last_solve_seconds_ = 0.0;
  NonlinearSolveReport last_report_;
};

std::unique_ptr<SubdomainModel> make_fom(SubdomainSetup setup, std::vector<double> initial);
std::unique_ptr<SubdomainModel> make_prom(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis,
                                          std::vector<double> initial);
std::unique_ptr<SubdomainModel> make_hprom(SubdomainSetup setup, std::shared_ptr<const TrialBasis> basis,
                                           std::shared_ptr<const SampleMesh> mesh, std::vector<double> initial);

struct SchwarzSettings {
  double delta_abs = 1e-11;
  double delta_rel = 1e-11;
  int max_iters = 100;
  /// one thread per subdomain inside each iteration
  bool parallel = false;
};

struct StepRecord {
  int iterations = 0;
  /// cost-model seconds: sum over iterations of (max solve + overhead)
  double wall_seconds = 0.0;
  bool rel_fallback = false;
  std::vector<double> eps_abs;
  std::vector<double> eps_rel;
};

struct ConvergenceMeasure {
  double eps_abs = 0.0;
  double eps_rel = 0.0;
  bool rel_fallback = false;
};

/// eps_abs = sqrt(sum d_i), eps_rel = sqrt(sum d_i / n_i) over (d_i, n_i) pairs.
ConvergenceMeasure schwarz_convergence(std::span<const std::pair<double, double>> changes);

class SchwarzController {
 public:
  SchwarzController(CartesianGrid grid, std::vector<Subdomain> subdomains,
                    std::vector<std::unique_ptr<SubdomainModel>> models, SchwarzSettings settings = {});

  /// Copy each interface ghost from its donor's exposed state.
  void transfer_ghosts();
  /// Advance one time step.
  StepRecord step();

  std::vector<double> gathered_state() const;
  const CartesianGrid& grid() const { return grid_; }
  const std::vector<Subdomain>& subdomains() const { return subs_; }
  SubdomainModel& model(int i) { return *models_[static_cast<std::size_t>(i)]; }
  int n_subdomains() const { return static_cast<int>(models_.size()); }
  bool has_interfaces() const { return !maps_.empty(); }

 private:
  CartesianGrid grid_;
  std::vector<Subdomain> subs_;
  std::vector<DonorMap> maps_;
  std::vector<std::unique_ptr<SubdomainModel>> models_;
  SchwarzSettings settings_;
};

struct Trajectory {
  std::vector<double> times;
  /// gathered global states, one per saved step
  std::vector<std::vector<double>> states;
};

struct SchwarzStats {
  std::vector<int> iterations;
  std::vector<double> wall_seconds;
  double total_wall_seconds = 0.0;
  double mean_iterations() const;
};

struct RunResult {
  Trajectory trajectory;
  SchwarzStats stats;
};

/// n_steps steps from t0; saves the initial state and every `cadence`-th step.
RunResult run_transient(SchwarzController& ctl, int n_steps, double t0, double dt, int cadence = 1);

/// round(T / dt) with a guard against representation error.
int step_count(double duration, double dt);

}  // namespace sdrom
