#include "sdrom/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sdrom/errors.hpp"

namespace sdrom {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + v + "'");
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

BcType parse_bc(const std::string& key, const std::string& v) {
  for (BcType b : {BcType::slip_wall, BcType::dirichlet, BcType::neumann}) {
    if (v == bc_name(b)) return b;
  }
  throw ConfigError("'" + key + "': unknown boundary condition '" + v + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile ini;
  std::istringstream is(text);
  std::string line, section;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(n) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(n) + ": empty key");
    ini.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.string());
}

void IniFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  const auto key = trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' needs a section (section.key)");
  values_[key] = trim(assignment.substr(eq + 1));
}

const std::string* IniFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

int CampaignConfig::modes_for(int subdomain) const {
  if (modes.size() == 1) return modes.front();
  return modes.at(static_cast<std::size_t>(subdomain));
}

std::vector<std::string> CampaignConfig::variable_names() const {
  switch (system) {
    case System::swe: return {"h", "hu", "hv"};
    case System::burgers: return {"u", "v"};
    case System::euler: return {"rho", "rhou", "rhov", "E"};
  }
  return {};
}

CampaignConfig default_config(System s) {
  CampaignConfig c;
  c.system = s;
  c.model.system = s;
  const auto st = default_settings(s);
  c.bounds = st.bounds;
  c.final_time = st.final_time;
  c.dt = st.dt;
  c.physical_bcs = st.physical_bcs;
  switch (s) {
    case System::swe:
      c.train = {-4.0, -3.0, -2.0, -1.0, 0.0};
      c.test = {-3.5, -2.5, -1.5, -0.5};
      break;
    case System::burgers:
      c.train = {1e-4, 1.75e-4, 3.25e-4, 5.5e-4, 1e-3};
      c.test = {1.35e-4, 2.5e-4, 4.25e-4, 7.5e-4};
      c.qdeim_modes = 200;
      break;
    case System::euler:
      c.train = {0.5, 0.75, 1.0, 1.25, 1.5};
      c.test = {0.625, 0.875, 1.125, 1.375};
      c.warm_start_time = 0.05;
      break;
  }
  return c;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "problem.system", "problem.nx", "problem.ny", "problem.x_lo", "problem.x_hi", "problem.y_lo", "problem.y_hi",
      "problem.final_time", "problem.dt", "problem.warm_start_time", "problem.bc_left", "problem.bc_right",
      "problem.bc_bottom", "problem.bc_top", "problem.gravity", "problem.gamma", "problem.entropy_fix",
      "problem.source_reading", "problem.mu", "problem.diffusion", "problem.p_upper",
      "decomposition.px", "decomposition.py", "decomposition.overlap",
      "rom.runs", "rom.monolithic", "rom.modes", "rom.mono_modes", "rom.sample_percent", "rom.n_b",
      "rom.qdeim_modes",
      "parameters.train", "parameters.test",
      "schwarz.delta_abs", "schwarz.delta_rel", "schwarz.max_iters", "schwarz.parallel",
      "schwarz.warm_iterations",
      "run.seed", "run.output", "run.cadence", "run.jacobian", "run.linear_solver"};
  return keys;
}

}  // namespace

CampaignConfig config_from_ini(const IniFile& ini) {
  for (const auto& [k, v] : ini.values()) {
    if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  const auto* sys = ini.find("problem.system");
  if (!sys) throw ConfigError("config is missing problem.system");
  CampaignConfig c = default_config(parse_system(*sys));

  auto num = [&](const char* key, double& dst) {
    if (const auto* v = ini.find(key)) dst = to_double(key, *v);
  };
  auto integer = [&](const char* key, int& dst) {
    if (const auto* v = ini.find(key)) dst = static_cast<int>(to_int(key, *v));
  };
  auto flag = [&](const char* key, bool& dst) {
    if (const auto* v = ini.find(key)) dst = to_bool(key, *v);
  };
  auto doubles = [&](const char* key, std::vector<double>& dst) {
    if (const auto* v = ini.find(key)) {
      dst.clear();
      for (const auto& t : split(*v, ',')) dst.push_back(to_double(key, t));
    }
  };

  integer("problem.nx", c.nx);
  integer("problem.ny", c.ny);
  num("problem.x_lo", c.bounds.x_lo);
  num("problem.x_hi", c.bounds.x_hi);
  num("problem.y_lo", c.bounds.y_lo);
  num("problem.y_hi", c.bounds.y_hi);
  num("problem.final_time", c.final_time);
  num("problem.dt", c.dt);
  num("problem.warm_start_time", c.warm_start_time);
  num("problem.gravity", c.model.gravity);
  num("problem.gamma", c.model.gamma);
  num("problem.entropy_fix", c.model.entropy_fix);
  if (const auto* v = ini.find("problem.source_reading")) {
    if (*v == "velocity") {
      c.model.source_reading = SourceReading::velocity;
    } else if (*v == "momentum") {
      c.model.source_reading = SourceReading::momentum;
    } else {
      throw ConfigError("'problem.source_reading': expected velocity or momentum, got '" + *v + "'");
    }
  }
  num("problem.mu", c.base_params.mu);
  num("problem.diffusion", c.base_params.diffusion);
  num("problem.p_upper", c.base_params.p_upper);
  const char* bc_keys[4] = {"problem.bc_left", "problem.bc_right", "problem.bc_bottom", "problem.bc_top"};
  for (int s = 0; s < 4; ++s) {
    if (const auto* v = ini.find(bc_keys[s])) c.physical_bcs[static_cast<std::size_t>(s)] = parse_bc(bc_keys[s], *v);
  }

  integer("decomposition.px", c.px);
  integer("decomposition.py", c.py);
  integer("decomposition.overlap", c.overlap);

  if (const auto* v = ini.find("rom.runs")) c.runs = split(*v, ',');
  flag("rom.monolithic", c.monolithic_roms);
  if (const auto* v = ini.find("rom.modes")) {
    c.modes.clear();
    for (const auto& t : split(*v, ',')) c.modes.push_back(static_cast<int>(to_int("rom.modes", t)));
    c.mono_modes = c.modes.empty() ? 0 : c.modes.front();
  }
  integer("rom.mono_modes", c.mono_modes);
  num("rom.sample_percent", c.sample_percent);
  integer("rom.n_b", c.n_b);
  integer("rom.qdeim_modes", c.qdeim_modes);

  doubles("parameters.train", c.train);
  doubles("parameters.test", c.test);

  num("schwarz.delta_abs", c.schwarz.delta_abs);
  num("schwarz.delta_rel", c.schwarz.delta_rel);
  integer("schwarz.max_iters", c.schwarz.max_iters);
  flag("schwarz.parallel", c.schwarz.parallel);
  flag("schwarz.warm_iterations", c.warm_iterations);

  if (const auto* v = ini.find("run.seed")) {
    std::uint64_t s = 0;
    const auto* end = v->data() + v->size();
    const auto [p, ec] = std::from_chars(v->data(), end, s);
    if (ec != std::errc() || p != end) throw ConfigError("'run.seed': expected an unsigned integer, got '" + *v + "'");
    c.seed = s;
  }
  if (const auto* v = ini.find("run.output")) c.output = *v;
  integer("run.cadence", c.cadence);
  if (const auto* v = ini.find("run.jacobian")) {
    if (*v == "analytic") {
      c.jacobian = JacobianMethod::analytic;
    } else if (*v == "colored_fd") {
      c.jacobian = JacobianMethod::colored_fd;
    } else {
      throw ConfigError("'run.jacobian': expected analytic or colored_fd, got '" + *v + "'");
    }
  }
  if (const auto* v = ini.find("run.linear_solver")) {
    if (*v != "direct" && *v != "iterative") {
      throw ConfigError("'run.linear_solver': expected direct or iterative, got '" + *v + "'");
    }
    c.iterative_linear = *v == "iterative";
  }
  validate_config(c);
  return c;
}

void validate_config(const CampaignConfig& c) {
  if (c.nx < 1 || c.ny < 1) throw ConfigError("grid size must be positive");
  if (!(c.bounds.x_hi > c.bounds.x_lo) || !(c.bounds.y_hi > c.bounds.y_lo)) throw ConfigError("empty domain bounds");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (c.final_time < 0.0) throw ConfigError("final_time must be non-negative");
  if (c.warm_start_time < 0.0 || c.warm_start_time > c.final_time) {
    throw ConfigError("warm_start_time must lie in [0, final_time]");
  }
  if (c.px < 1 || c.py < 1 || c.overlap < 0) throw ConfigError("invalid decomposition");
  if (c.cadence < 1) throw ConfigError("run.cadence must be >= 1");
  if (c.modes.empty()) throw ConfigError("rom.modes is empty");
  if (c.modes.size() != 1 && static_cast<int>(c.modes.size()) != c.n_subdomains()) {
    throw ConfigError("rom.modes lists " + std::to_string(c.modes.size()) + " values for " +
                      std::to_string(c.n_subdomains()) + " subdomains");
  }
  for (int m : c.modes) {
    if (m < 1) throw ConfigError("rom.modes entries must be >= 1");
  }
  if (c.mono_modes < 1) throw ConfigError("rom.mono_modes must be >= 1");
  if (!(c.sample_percent > 0.0) || c.sample_percent > 100.0) throw ConfigError("rom.sample_percent must be in (0, 100]");
  if (c.n_b < 0) throw ConfigError("rom.n_b must be >= 0");
  if (c.qdeim_modes < 0) throw ConfigError("rom.qdeim_modes must be >= 0");
  for (const auto& r : c.runs) {
    const auto kinds = split(r, '/');
    if (kinds.empty()) throw ConfigError("empty run family in rom.runs");
    for (const auto& k : kinds) parse_model_kind(k);
    if (kinds.size() != 1 && static_cast<int>(kinds.size()) != c.n_subdomains()) {
      throw ConfigError("run family '" + r + "' lists " + std::to_string(kinds.size()) + " kinds for " +
                        std::to_string(c.n_subdomains()) + " subdomains");
    }
  }
  for (double t : c.test) {
    if (std::find(c.train.begin(), c.train.end(), t) != c.train.end()) {
      throw ConfigError("parameter " + format_double(t) + " is in both the training and testing lists");
    }
  }
  if (c.schwarz.max_iters < 1) throw ConfigError("schwarz.max_iters must be >= 1");
}

std::string serialize_config(const CampaignConfig& c) {
  std::ostringstream os;
  os << "[problem]\n"
     << "system = " << system_name(c.system) << "\n"
     << "nx = " << c.nx << "\nny = " << c.ny << "\n"
     << "x_lo = " << format_double(c.bounds.x_lo) << "\nx_hi = " << format_double(c.bounds.x_hi) << "\n"
     << "y_lo = " << format_double(c.bounds.y_lo) << "\ny_hi = " << format_double(c.bounds.y_hi) << "\n"
     << "final_time = " << format_double(c.final_time) << "\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "warm_start_time = " << format_double(c.warm_start_time) << "\n"
     << "bc_left = " << bc_name(c.physical_bcs[0]) << "\nbc_right = " << bc_name(c.physical_bcs[1]) << "\n"
     << "bc_bottom = " << bc_name(c.physical_bcs[2]) << "\nbc_top = " << bc_name(c.physical_bcs[3]) << "\n"
     << "gravity = " << format_double(c.model.gravity) << "\n"
     << "gamma = " << format_double(c.model.gamma) << "\n"
     << "entropy_fix = " << format_double(c.model.entropy_fix) << "\n"
     << "source_reading = " << (c.model.source_reading == SourceReading::velocity ? "velocity" : "momentum") << "\n"
     << "mu = " << format_double(c.base_params.mu) << "\n"
     << "diffusion = " << format_double(c.base_params.diffusion) << "\n"
     << "p_upper = " << format_double(c.base_params.p_upper) << "\n\n"
     << "[decomposition]\npx = " << c.px << "\npy = " << c.py << "\noverlap = " << c.overlap << "\n\n"
     << "[rom]\nruns = ";
  for (std::size_t i = 0; i < c.runs.size(); ++i) os << (i ? ", " : "") << c.runs[i];
  os << "\nmonolithic = " << (c.monolithic_roms ? "true" : "false") << "\nmodes = ";
  for (std::size_t i = 0; i < c.modes.size(); ++i) os << (i ? ", " : "") << c.modes[i];
  os << "\nmono_modes = " << c.mono_modes << "\n"
     << "sample_percent = " << format_double(c.sample_percent) << "\n"
     << "n_b = " << c.n_b << "\nqdeim_modes = " << c.qdeim_modes << "\n\n"
     << "[parameters]\ntrain = " << join_doubles(c.train) << "\ntest = " << join_doubles(c.test) << "\n\n"
     << "[schwarz]\ndelta_abs = " << format_double(c.schwarz.delta_abs) << "\n"
     << "delta_rel = " << format_double(c.schwarz.delta_rel) << "\n"
     << "max_iters = " << c.schwarz.max_iters << "\n"
     << "parallel = " << (c.schwarz.parallel ? "true" : "false") << "\n"
     << "warm_iterations = " << (c.warm_iterations ? "true" : "false") << "\n\n"
     << "[run]\nseed = " << c.seed << "\noutput = " << c.output.string() << "\ncadence = " << c.cadence << "\n"
     << "jacobian = " << (c.jacobian == JacobianMethod::analytic ? "analytic" : "colored_fd") << "\n"
     << "linear_solver = " << (c.iterative_linear ? "iterative" : "direct") << "\n";
  return os.str();
}

std::string config_hash(const CampaignConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sdrom
