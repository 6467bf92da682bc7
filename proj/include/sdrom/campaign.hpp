#pragma once

// Campaign driver: training runs, bases and sample meshes, test runs against
// monolithic FOM references, and the summary tables.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sdrom/config.hpp"
#include "sdrom/rom.hpp"
#include "sdrom/schwarz.hpp"

namespace sdrom {

/// Everything needed to build a controller for one parameter value.
struct CaseSpec {
  FluxModel model;
  ParamSet params;
  BoundarySpec physical_bcs{};
  double dt = 0.0;
  CartesianGrid grid;
  std::vector<Subdomain> subs;
  NewtonSettings newton;
  GaussNewtonSettings gauss_newton;
  SchwarzSettings schwarz;
  bool warm_iterations = false;
};

CaseSpec make_case(const CampaignConfig& c, double param, bool decomposed);

/// Per-subdomain ROM ingredients (entries may be null for FOM subdomains).
struct RomAssets {
  std::vector<std::shared_ptr<const TrialBasis>> bases;
  std::vector<std::shared_ptr<const SampleMesh>> meshes;
};

/// One kind for all subdomains, or one per subdomain.
std::unique_ptr<SchwarzController> build_controller(const CaseSpec& spec, const std::vector<ModelKind>& kinds,
                                                    std::span<const double> initial_global,
                                                    const RomAssets& assets = {});

struct SpaceTimeError {
  std::vector<double> per_variable;
  double aggregate = 0.0;
};

/// sum_n ||u_n - v_n||^2 / sum_n ||u_n||^2 per variable (no square root).
SpaceTimeError space_time_error(const Trajectory& reference, const Trajectory& test, int n_vars);

/// mean_n |u_n - v_n| per DOF.
std::vector<double> mean_abs_error_field(const Trajectory& reference, const Trajectory& test);

struct RunRecord {
  std::string run_id;
  /// run family and layout, e.g. "prom-decomp"
  std::string label;
  double param = 0.0;
  std::string config_hash;
  bool has_reference = false;
  std::vector<double> errors;
  double aggregate_error = 0.0;
  double wall_seconds = 0.0;
  double mean_iterations = 0.0;
  /// "ok" or "failed: <reason>"
  std::string status;

  bool ok() const { return status == "ok"; }
};

void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

struct ParetoRow {
  std::string label;
  double param = 0.0;
  double error = 0.0;
  double wall_seconds = 0.0;
  double speedup_vs_mono = 0.0;
  double speedup_vs_decomp = 0.0;
};

/// Speedups of every successful ROM record against the FOM baselines at the
/// same parameter.
std::vector<ParetoRow> speedup_report(const std::vector<RunRecord>& records);

inline constexpr const char* table_header =
    "param,variable,error,mean_schwarz_iters,wall_time_s,speedup_vs_mono,speedup_vs_decomp";

class Campaign {
 public:
  explicit Campaign(CampaignConfig config);

  const CampaignConfig& config() const { return config_; }
  const std::filesystem::path& output() const { return config_.output; }

  /// Monolithic FOM runs at the training parameters; snapshots to disk.
  void train();
  /// Monolithic and per-subdomain POD bases (and QDEIM seeding bases).
  void basis();
  /// Monolithic and per-subdomain sample meshes.
  void sample();
  /// Test-parameter runs; records and field dumps to disk.
  std::vector<RunRecord> run();
  /// CSV tables from the stored records.
  void report();
  void run_all();

  static std::string mono_label(ModelKind k);
  static std::string decomp_label(const std::string& family);

 private:
  void write_config() const;
  std::vector<ModelKind> family_kinds(const std::string& family) const;
  RomAssets load_assets(bool decomposed, bool need_meshes) const;
  std::filesystem::path train_path(std::size_t k) const;

  CampaignConfig config_;
  std::string hash_;
};

}  // namespace sdrom
