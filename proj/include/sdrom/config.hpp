#pragma once

// Campaign configuration: INI text with `[section]` headers and `key = value`
// lines, addressed as "section.key".

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdrom/physics.hpp"
#include "sdrom/schwarz.hpp"

namespace sdrom {

class IniFile {
 public:
  static IniFile parse(const std::string& text, const std::string& origin = "<string>");
  static IniFile load(const std::filesystem::path& path);

  /// `section.key=value`
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string* find(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct CampaignConfig {
  System system = System::swe;
  int nx = 50;
  int ny = 50;
  Bounds bounds;
  double final_time = 0.0;
  double dt = 0.0;
  /// ROM runs start from the reference FOM state at this time
  double warm_start_time = 0.0;
  BoundarySpec physical_bcs{};
  FluxModel model;
  /// values of the non-varying parameters
  ParamSet base_params;

  int px = 1;
  int py = 1;
  int overlap = 0;

  /// one entry per run family; "fom", "prom", "hprom" or a per-subdomain
  /// list joined with '/'
  std::vector<std::string> runs{"prom"};
  /// also run monolithic variants of the uniform ROM families
  bool monolithic_roms = true;
  /// M, one value or one per subdomain
  std::vector<int> modes{20};
  int mono_modes = 20;
  /// N_s per sample mesh as a percentage of the full mesh cell count
  double sample_percent = 1.0;
  int n_b = 1;
  /// size of the basis used for QDEIM seeding, 0 disables it
  int qdeim_modes = 0;

  std::vector<double> train;
  std::vector<double> test;

  SchwarzSettings schwarz;
  bool warm_iterations = false;
  JacobianMethod jacobian = JacobianMethod::analytic;
  /// FOM Newton systems by BiCGSTAB (LU fallback) instead of sparse LU
  bool iterative_linear = false;

  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  int cadence = 1;

  int n_subdomains() const { return px * py; }
  int modes_for(int subdomain) const;
  std::vector<std::string> variable_names() const;
};

/// Defaults for a system: reference bounds, T, dt, warm start and the
/// training/testing parameter lists.
CampaignConfig default_config(System s);

CampaignConfig config_from_ini(const IniFile& ini);
/// Canonical text form; parsing it back gives an identical config.
std::string serialize_config(const CampaignConfig& c);
/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const CampaignConfig& c);
void validate_config(const CampaignConfig& c);

std::string format_double(double v);

}  // namespace sdrom
