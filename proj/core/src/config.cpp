#include "beamre/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace beamre {

void SolverConfig::validate() const {
  const double tols[] = {eps1, eps2, eps3, eps4, eps5, step_scale};
  for (double t : tols)
    if (!(t > 0))
      throw std::invalid_argument("solver tolerances must be > 0");
  const int caps[] = {max_mm_iter, max_fp_iter, max_newton_iter,
                      max_bisect_iter, mc_samples};
  for (int c : caps)
    if (c < 1) throw std::invalid_argument("iteration caps must be >= 1");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kNone: return "none";
    case SweepKind::kPmax: return "pmax";
    case SweepKind::kBeta: return "beta";
    case SweepKind::kTradeoff: return "tradeoff";
    case SweepKind::kConvergence: return "convergence";
    case SweepKind::kMultistart: return "multistart";
    case SweepKind::kRateCompare: return "rate_compare";
  }
  return "none";
}

SweepKind sweep_kind_from_string(const std::string& s) {
  if (s == "none") return SweepKind::kNone;
  if (s == "pmax") return SweepKind::kPmax;
  if (s == "beta") return SweepKind::kBeta;
  if (s == "tradeoff") return SweepKind::kTradeoff;
  if (s == "convergence") return SweepKind::kConvergence;
  if (s == "multistart") return SweepKind::kMultistart;
  if (s == "rate_compare") return SweepKind::kRateCompare;
  throw std::invalid_argument("unknown sweep kind '" + s + "'");
}

void ExperimentConfig::validate() const {
  params.validate();
  solver.validate();
  if (channel.omega_file.empty()) {
    if (!(channel.support_fraction > 0) || channel.support_fraction > 1)
      throw std::invalid_argument("support_fraction must be in (0, 1]");
    if (channel.decay < 0) throw std::invalid_argument("decay must be >= 0");
    if (channel.jitter < 0 || channel.jitter >= 1)
      throw std::invalid_argument("jitter must be in [0, 1)");
  }
  if (sweep != SweepKind::kNone && sweep != SweepKind::kMultistart) {
    if (!(sweep_step > 0))
      throw std::invalid_argument("sweep_step must be > 0");
    if (sweep_stop < sweep_start)
      throw std::invalid_argument("sweep range is empty");
  }
  if (sweep == SweepKind::kMultistart && multistart_count < 1)
    throw std::invalid_argument("multistart_count must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " +
                              msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class RawConfig {
 public:
  explicit RawConfig(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(lineno, "empty key");
      if (value.empty()) fail(lineno, "empty value for key '" + key + "'");
      if (entries_.count(key))
        fail(lineno, "duplicate key '" + key + "'");
      entries_[key] = RawEntry{value, lineno, false};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const RawEntry& get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw std::invalid_argument("config: missing required key '" + key +
                                  "'");
    it->second.used = true;
    return it->second;
  }

  // value in watts; accepts `dBm` / `W` suffix, bare numbers are watts
  double get_power(const std::string& key) {
    const RawEntry& e = get(key);
    std::istringstream is(e.value);
    double v;
    std::string unit;
    if (!(is >> v)) fail(e.line, "malformed number for '" + key + "'");
    is >> unit;
    if (unit.empty() || unit == "W" || unit == "w") return v;
    if (unit == "dBm" || unit == "dbm" || unit == "DBM")
      return dbm_to_watt(v);
    fail(e.line, "unknown power unit '" + unit + "' for '" + key + "'");
  }

  // a number for sweep bounds: bare numbers and `dBm` pass through,
  // `W` converts to dBm (pmax-style sweeps are bounded in dBm)
  double get_sweep_bound(const std::string& key) {
    const RawEntry& e = get(key);
    std::istringstream is(e.value);
    double v;
    std::string unit;
    if (!(is >> v)) fail(e.line, "malformed number for '" + key + "'");
    is >> unit;
    if (unit.empty() || unit == "dBm" || unit == "dbm") return v;
    if (unit == "W" || unit == "w") return watt_to_dbm(v);
    fail(e.line, "unknown unit '" + unit + "' for '" + key + "'");
  }

  double get_double(const std::string& key) {
    const RawEntry& e = get(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(e.line, "malformed number for '" + key + "'");
    }
  }

  long long get_int(const std::string& key) {
    const RawEntry& e = get(key);
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(e.line, "malformed integer for '" + key + "'");
    }
  }

  std::string get_string(const std::string& key) { return get(key).value; }

  // comma-separated integer list, or a single value replicated K times
  std::vector<int> get_int_list(const std::string& key, int expected) {
    const RawEntry& e = get(key);
    std::vector<int> out;
    std::stringstream ss(e.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      try {
        std::size_t pos = 0;
        out.push_back(static_cast<int>(std::stoll(tok, &pos)));
        if (pos != tok.size()) throw std::invalid_argument("");
      } catch (...) {
        fail(e.line, "malformed integer list for '" + key + "'");
      }
    }
    if (static_cast<int>(out.size()) == 1 && expected > 1)
      out.assign(expected, out[0]);
    if (static_cast<int>(out.size()) != expected)
      fail(e.line, "'" + key + "' must list 1 or K values");
    return out;
  }

  void check_all_used() const {
    for (const auto& [key, e] : entries_)
      if (!e.used)
        fail(e.line, "unknown key '" + key + "'");
  }

 private:
  std::map<std::string, RawEntry> entries_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  RawConfig raw(text);
  ExperimentConfig c;

  c.params.M = static_cast<int>(raw.get_int("M"));
  c.params.K = static_cast<int>(raw.get_int("K"));
  c.params.N = raw.get_int_list("N", c.params.K);
  c.params.W = raw.get_double("W");
  c.params.sigma2 = raw.get_power("sigma2");
  c.params.xi = raw.get_double("xi");
  c.params.Pc = raw.get_power("Pc");
  c.params.Ps = raw.get_power("Ps");
  c.params.Pmax = raw.get_power("Pmax");
  c.params.beta = raw.get_double("beta");

  if (raw.has("omega_file")) c.channel.omega_file = raw.get_string("omega_file");
  if (raw.has("pathloss_db")) c.channel.pathloss_db = raw.get_double("pathloss_db");
  if (raw.has("support_fraction"))
    c.channel.support_fraction = raw.get_double("support_fraction");
  if (raw.has("decay")) c.channel.decay = raw.get_double("decay");
  if (raw.has("jitter")) c.channel.jitter = raw.get_double("jitter");

  if (raw.has("eps1")) c.solver.eps1 = raw.get_double("eps1");
  if (raw.has("eps2")) c.solver.eps2 = raw.get_double("eps2");
  if (raw.has("eps3")) c.solver.eps3 = raw.get_double("eps3");
  if (raw.has("eps4")) c.solver.eps4 = raw.get_double("eps4");
  if (raw.has("eps5")) c.solver.eps5 = raw.get_double("eps5");
  if (raw.has("step_scale")) c.solver.step_scale = raw.get_double("step_scale");
  if (raw.has("max_mm_iter"))
    c.solver.max_mm_iter = static_cast<int>(raw.get_int("max_mm_iter"));
  if (raw.has("max_fp_iter"))
    c.solver.max_fp_iter = static_cast<int>(raw.get_int("max_fp_iter"));
  if (raw.has("max_newton_iter"))
    c.solver.max_newton_iter = static_cast<int>(raw.get_int("max_newton_iter"));
  if (raw.has("max_bisect_iter"))
    c.solver.max_bisect_iter = static_cast<int>(raw.get_int("max_bisect_iter"));
  if (raw.has("mc_samples"))
    c.solver.mc_samples = static_cast<int>(raw.get_int("mc_samples"));

  if (raw.has("seed")) c.seed = static_cast<std::uint64_t>(raw.get_int("seed"));
  c.solver.seed = c.seed;

  if (raw.has("sweep")) c.sweep = sweep_kind_from_string(raw.get_string("sweep"));
  if (c.sweep != SweepKind::kNone && c.sweep != SweepKind::kMultistart) {
    c.sweep_start = raw.get_sweep_bound("sweep_start");
    c.sweep_stop = raw.get_sweep_bound("sweep_stop");
    c.sweep_step = raw.get_double("sweep_step");
  } else {
    if (raw.has("sweep_start")) c.sweep_start = raw.get_sweep_bound("sweep_start");
    if (raw.has("sweep_stop")) c.sweep_stop = raw.get_sweep_bound("sweep_stop");
    if (raw.has("sweep_step")) c.sweep_step = raw.get_double("sweep_step");
  }
  if (raw.has("multistart_count"))
    c.multistart_count = static_cast<int>(raw.get_int("multistart_count"));
  if (raw.has("out_dir")) c.out_dir = raw.get_string("out_dir");
  if (raw.has("threads")) c.threads = static_cast<int>(raw.get_int("threads"));

  raw.check_all_used();
  c.validate();
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "M = " << c.params.M << "\n";
  os << "K = " << c.params.K << "\n";
  os << "N = ";
  for (int k = 0; k < c.params.K; ++k)
    os << (k ? "," : "") << c.params.N[k];
  os << "\n";
  os << "W = " << fmt(c.params.W) << "\n";
  os << "sigma2 = " << fmt(c.params.sigma2) << "\n";
  os << "xi = " << fmt(c.params.xi) << "\n";
  os << "Pc = " << fmt(c.params.Pc) << "\n";
  os << "Ps = " << fmt(c.params.Ps) << "\n";
  os << "Pmax = " << fmt(c.params.Pmax) << "\n";
  os << "beta = " << fmt(c.params.beta) << "\n";
  if (!c.channel.omega_file.empty())
    os << "omega_file = " << c.channel.omega_file << "\n";
  os << "pathloss_db = " << fmt(c.channel.pathloss_db) << "\n";
  os << "support_fraction = " << fmt(c.channel.support_fraction) << "\n";
  os << "decay = " << fmt(c.channel.decay) << "\n";
  os << "jitter = " << fmt(c.channel.jitter) << "\n";
  os << "eps1 = " << fmt(c.solver.eps1) << "\n";
  os << "eps2 = " << fmt(c.solver.eps2) << "\n";
  os << "eps3 = " << fmt(c.solver.eps3) << "\n";
  os << "eps4 = " << fmt(c.solver.eps4) << "\n";
  os << "eps5 = " << fmt(c.solver.eps5) << "\n";
  os << "step_scale = " << fmt(c.solver.step_scale) << "\n";
  os << "max_mm_iter = " << c.solver.max_mm_iter << "\n";
  os << "max_fp_iter = " << c.solver.max_fp_iter << "\n";
  os << "max_newton_iter = " << c.solver.max_newton_iter << "\n";
  os << "max_bisect_iter = " << c.solver.max_bisect_iter << "\n";
  os << "mc_samples = " << c.solver.mc_samples << "\n";
  os << "seed = " << c.seed << "\n";
  os << "sweep = " << to_string(c.sweep) << "\n";
  if (c.sweep != SweepKind::kNone && c.sweep != SweepKind::kMultistart) {
    os << "sweep_start = " << fmt(c.sweep_start) << "\n";
    os << "sweep_stop = " << fmt(c.sweep_stop) << "\n";
    os << "sweep_step = " << fmt(c.sweep_step) << "\n";
  }
  os << "multistart_count = " << c.multistart_count << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "threads = " << c.threads << "\n";
  return os.str();
}

bool operator==(const SystemParams& a, const SystemParams& b) {
  return a.M == b.M && a.K == b.K && a.N == b.N && a.W == b.W &&
         a.sigma2 == b.sigma2 && a.xi == b.xi && a.Pc == b.Pc &&
         a.Ps == b.Ps && a.Pmax == b.Pmax && a.beta == b.beta;
}

bool operator==(const SolverConfig& a, const SolverConfig& b) {
  return a.eps1 == b.eps1 && a.eps2 == b.eps2 && a.eps3 == b.eps3 &&
         a.eps4 == b.eps4 && a.eps5 == b.eps5 &&
         a.step_scale == b.step_scale && a.max_mm_iter == b.max_mm_iter &&
         a.max_fp_iter == b.max_fp_iter &&
         a.max_newton_iter == b.max_newton_iter &&
         a.max_bisect_iter == b.max_bisect_iter &&
         a.mc_samples == b.mc_samples && a.seed == b.seed;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.params == b.params && a.channel == b.channel &&
         a.solver == b.solver && a.sweep == b.sweep &&
         a.sweep_start == b.sweep_start && a.sweep_stop == b.sweep_stop &&
         a.sweep_step == b.sweep_step &&
         a.multistart_count == b.multistart_count && a.out_dir == b.out_dir &&
         a.seed == b.seed && a.threads == b.threads;
}

}  // namespace beamre
