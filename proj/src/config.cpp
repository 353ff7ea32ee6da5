#include "maarp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace maarp::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw InputError(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) fail(name, line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const InputError&) {
    throw;
  } catch (...) {
    fail(name, line, "expected a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) fail(name, line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const InputError&) {
    throw;
  } catch (...) {
    fail(name, line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v.find('-') != std::string::npos)
      fail(name, line, "expected an unsigned integer, got '" + v + "'");
    return x;
  } catch (const InputError&) {
    throw;
  } catch (...) {
    fail(name, line, "expected an unsigned integer, got '" + v + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names = {
      "rnccv_state", "rnccv_ergodic", "cvio_max", "loss_avg",
      "loss_timeavg", "loss_gammaavg", "fenchel"};
  return names;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
  ExperimentConfig cfg;
  bool saw_n = false, saw_d = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "game" && section != "constraints" && section != "schedule" &&
          section != "noise" && section != "run" && section != "output")
        fail(name, line, "unknown section '" + section + "'");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(name, line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    if (val.empty()) fail(name, line, "empty value for '" + key + "'");
    if (section.empty()) fail(name, line, "key '" + key + "' outside any section");

    if (section == "game") {
      if (key == "N") {
        cfg.agents = parse_int(name, line, val);
        saw_n = true;
      } else if (key == "D") {
        cfg.dim = parse_int(name, line, val);
        saw_d = true;
      } else if (key == "seed") {
        cfg.game_seed = parse_u64(name, line, val);
      } else if (key == "c_scale") {
        cfg.c_scale = parse_double(name, line, val);
      } else if (key == "c") {
        cfg.c_offset = parse_double(name, line, val);
      } else {
        fail(name, line, "unknown key '" + key + "' in [game]");
      }
    } else if (section == "constraints") {
      if (key == "R") {
        cfg.resources = parse_int(name, line, val);
      } else if (key == "A_scale") {
        cfg.a_scale = parse_double(name, line, val);
      } else if (key == "d") {
        cfg.d = parse_double(name, line, val);
      } else {
        fail(name, line, "unknown key '" + key + "' in [constraints]");
      }
    } else if (section == "schedule") {
      if (key == "gamma0") {
        cfg.gamma0 = parse_double(name, line, val);
      } else if (key == "p") {
        cfg.p = parse_double(name, line, val);
      } else if (key == "alpha") {
        cfg.alpha = parse_double(name, line, val);
      } else {
        fail(name, line, "unknown key '" + key + "' in [schedule]");
      }
    } else if (section == "noise") {
      if (key == "kind") {
        if (val == "none") cfg.noise_kind = dynamics::NoiseModel::Kind::none;
        else if (val == "gaussian") cfg.noise_kind = dynamics::NoiseModel::Kind::gaussian;
        else if (val == "product") cfg.noise_kind = dynamics::NoiseModel::Kind::product;
        else fail(name, line, "unknown noise kind '" + val + "'");
      } else if (key == "sigma") {
        cfg.sigma = parse_double(name, line, val);
      } else {
        fail(name, line, "unknown key '" + key + "' in [noise]");
      }
    } else if (section == "run") {
      if (key == "algorithms") {
        cfg.algorithms.clear();
        for (const auto& a : split_list(val)) {
          try {
            cfg.algorithms.push_back(dynamics::algorithm_from_name(a));
          } catch (const InputError& e) {
            fail(name, line, e.what());
          }
        }
        if (cfg.algorithms.empty()) fail(name, line, "empty algorithm list");
      } else if (key == "iters") {
        cfg.iters = parse_int(name, line, val);
      } else if (key == "samples") {
        cfg.samples = parse_int(name, line, val);
      } else if (key == "record_every") {
        cfg.record_every = parse_int(name, line, val);
      } else if (key == "master_seed") {
        cfg.master_seed = parse_u64(name, line, val);
      } else if (key == "mirror") {
        if (val == "entropy") cfg.mirror = geometry::RegularizerKind::entropy;
        else if (val == "euclidean") cfg.mirror = geometry::RegularizerKind::euclidean;
        else fail(name, line, "unknown mirror '" + val + "'");
      } else if (key == "ergodic_weighting") {
        if (val == "gamma") cfg.ergodic_weighting = metrics::ErgodicWeighting::gamma_weighted;
        else if (val == "uniform") cfg.ergodic_weighting = metrics::ErgodicWeighting::uniform;
        else fail(name, line, "unknown ergodic_weighting '" + val + "'");
      } else if (key == "y0") {
        cfg.y0 = parse_double(name, line, val);
      } else if (key == "lambda0") {
        cfg.lambda0 = parse_double(name, line, val);
      } else {
        fail(name, line, "unknown key '" + key + "' in [run]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        cfg.out_dir = val;
      } else if (key == "emit") {
        cfg.emit = split_list(val);
        if (cfg.emit.empty()) fail(name, line, "empty emit list");
        for (const auto& m : cfg.emit) {
          const auto& known = known_metrics();
          if (std::find(known.begin(), known.end(), m) == known.end())
            fail(name, line, "unknown metric '" + m + "'");
        }
      } else {
        fail(name, line, "unknown key '" + key + "' in [output]");
      }
    }
  }

  if (!saw_n || !saw_d)
    throw InputError(name + ": game.N and game.D are required");
  if (cfg.agents < 1 || cfg.dim < 1)
    throw InputError(name + ": game.N and game.D must be >= 1");
  if (cfg.resolved_resources() != cfg.dim)
    throw InputError(name + ": constraints.R must equal game.D for A = scale * I");
  if (!(cfg.gamma0 > 0.0)) throw InputError(name + ": schedule.gamma0 must be > 0");
  if (!(cfg.p > 0.0) || cfg.p > 1.0)
    throw InputError(name + ": schedule.p must lie in (0, 1]");
  if (cfg.alpha < 0.0) throw InputError(name + ": schedule.alpha must be >= 0");
  if (cfg.sigma < 0.0) throw InputError(name + ": noise.sigma must be >= 0");
  if (cfg.iters < 1) throw InputError(name + ": run.iters must be >= 1");
  if (cfg.samples < 1) throw InputError(name + ": run.samples must be >= 1");
  if (cfg.resolved_record_every() < 1)
    throw InputError(name + ": run.record_every must be >= 1");
  if (cfg.lambda0 < 0.0) throw InputError(name + ": run.lambda0 must be >= 0");
  if (!std::isfinite(cfg.y0)) throw InputError(name + ": run.y0 must be finite");
  if (cfg.out_dir.empty()) throw InputError(name + ": output.dir must be non-empty");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string canonical_text(const ExperimentConfig& cfg) {
  char buf[64];
  std::string s;
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
    s += "\n";
  };
  auto integer = [&](long long v) {
    s += std::to_string(v);
    s += "\n";
  };
  s += "game.N\n";
  integer(cfg.agents);
  s += "game.D\n";
  integer(cfg.dim);
  s += "game.seed\n";
  integer((long long)cfg.game_seed);
  s += "game.c_scale\n";
  num(cfg.c_scale);
  s += "game.c\n";
  num(cfg.c_offset);
  s += "constraints.R\n";
  integer(cfg.resolved_resources());
  s += "constraints.A_scale\n";
  num(cfg.a_scale);
  s += "constraints.d\n";
  num(cfg.resolved_d());
  s += "schedule.gamma0\n";
  num(cfg.gamma0);
  s += "schedule.p\n";
  num(cfg.p);
  s += "schedule.alpha\n";
  num(cfg.alpha);
  s += "noise.kind\n";
  s += (cfg.noise_kind == dynamics::NoiseModel::Kind::none
            ? "none"
            : cfg.noise_kind == dynamics::NoiseModel::Kind::gaussian ? "gaussian"
                                                                     : "product");
  s += "\nnoise.sigma\n";
  num(cfg.sigma);
  s += "run.algorithms\n";
  for (auto a : cfg.algorithms) {
    s += dynamics::algorithm_name(a);
    s += ",";
  }
  s += "\nrun.iters\n";
  integer(cfg.iters);
  s += "run.samples\n";
  integer(cfg.samples);
  s += "run.record_every\n";
  integer(cfg.resolved_record_every());
  s += "run.master_seed\n";
  integer((long long)cfg.master_seed);
  s += "run.mirror\n";
  s += cfg.mirror == geometry::RegularizerKind::entropy ? "entropy" : "euclidean";
  s += "\nrun.ergodic_weighting\n";
  s += cfg.ergodic_weighting == metrics::ErgodicWeighting::gamma_weighted ? "gamma"
                                                                          : "uniform";
  s += "\nrun.y0\n";
  num(cfg.y0);
  s += "run.lambda0\n";
  num(cfg.lambda0);
  s += "output.dir\n";
  s += cfg.out_dir;
  s += "\noutput.emit\n";
  for (const auto& m : cfg.emit) {
    s += m;
    s += ",";
  }
  s += "\n";
  return s;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace maarp::config
