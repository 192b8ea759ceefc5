#include "nk/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nk/errors.hpp"

namespace nk {

WeightSpec WeightSpec::constant(double value) {
  WeightSpec w;
  w.kind = Kind::Constant;
  w.amplitude = value;
  return w;
}

WeightSpec WeightSpec::bump(double amplitude, double center, double width) {
  WeightSpec w;
  w.kind = Kind::Bump;
  w.amplitude = amplitude;
  w.center = center;
  w.width = width;
  return w;
}

WeightSpec WeightSpec::sign_flip(double amplitude, double center, double width) {
  WeightSpec w = bump(amplitude, center, width);
  w.kind = Kind::SignFlip;
  return w;
}

WeightSpec WeightSpec::nodal(std::vector<double> values) {
  WeightSpec w;
  w.kind = Kind::Table;
  w.table = std::move(values);
  return w;
}

double WeightSpec::operator()(double x, const Domain& domain) const {
  switch (kind) {
    case Kind::Constant:
      return amplitude;
    case Kind::Bump: {
      // amp (1 - r^2)^2 on r < 1
      const double r = std::abs(x - center) / width;
      return r < 1.0 ? amplitude * (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
    case Kind::SignFlip:
      // positive within width/2 of the center, negative further out
      return amplitude * std::cos(std::numbers::pi * std::abs(x - center) / width);
    case Kind::Table: {
      if (table.size() == 1) return table.front();
      const double h = domain.measure() / static_cast<double>(table.size() - 1);
      double pos = (x - domain.lower) / h;
      pos = std::clamp(pos, 0.0, static_cast<double>(table.size() - 1));
      const auto i = std::min(static_cast<std::size_t>(pos), table.size() - 2);
      const double t = pos - static_cast<double>(i);
      return (1.0 - t) * table[i] + t * table[i + 1];
    }
  }
  return 0.0;
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant: os << "const:" << amplitude; break;
    case Kind::Bump: os << "bump:" << amplitude << "," << center << "," << width; break;
    case Kind::SignFlip: os << "signflip:" << amplitude << "," << center << "," << width; break;
    case Kind::Table:
      os << "table[" << table.size() << "]";
      break;
  }
  return os.str();
}

double sup_abs(const WeightSpec& w, const Domain& domain) {
  switch (w.kind) {
    case WeightSpec::Kind::Constant:
    case WeightSpec::Kind::Bump:
    case WeightSpec::Kind::SignFlip: {
      // sample densely; the presets attain their extremes at the center or
      // at the domain ends
      double m = std::max(std::abs(w(domain.lower, domain)), std::abs(w(domain.upper, domain)));
      if (domain.contains(w.center)) m = std::max(m, std::abs(w(w.center, domain)));
      const int samples = 4096;
      for (int i = 0; i <= samples; ++i) {
        const double x = domain.lower + domain.measure() * i / samples;
        m = std::max(m, std::abs(w(x, domain)));
      }
      return m;
    }
    case WeightSpec::Kind::Table: {
      double m = 0.0;
      for (double v : w.table) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

namespace {

bool weight_has_negative(const WeightSpec& w, const Domain& domain) {
  switch (w.kind) {
    case WeightSpec::Kind::Constant:
    case WeightSpec::Kind::Bump:
      return w.amplitude < 0.0;
    case WeightSpec::Kind::SignFlip: {
      if (w.amplitude == 0.0) return false;
      const int samples = 4096;
      for (int i = 0; i <= samples; ++i) {
        if (w(domain.lower + domain.measure() * i / samples, domain) < 0.0) return true;
      }
      return false;
    }
    case WeightSpec::Kind::Table:
      return std::any_of(w.table.begin(), w.table.end(), [](double v) { return v < 0.0; });
  }
  return false;
}

void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) throw Error(kind, msg);
}

}  // namespace

bool ValidatedConfig::critical() const {
  return std::abs(cfg_.q - pstar_) <= 1e-12 * pstar_;
}

ValidatedConfig ValidatedConfig::with_lambda(double lambda) const {
  ProblemConfig c = cfg_;
  c.lambda = lambda;
  return validate_config(c);
}

ValidatedConfig validate_config(const ProblemConfig& cfg) {
  require(cfg.n >= 1, ErrorKind::InvalidParameter, "n must be a positive integer");
  require(cfg.p > 1.0, ErrorKind::InvalidParameter, "p must exceed 1");
  require(cfg.s > 0.0 && cfg.s < 1.0, ErrorKind::InvalidParameter, "s must lie in (0,1)");
  require(cfg.n > cfg.p * cfg.s, ErrorKind::DimensionViolated,
          "n = " + std::to_string(cfg.n) + " must exceed p*s = " + std::to_string(cfg.p * cfg.s));
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
  require(cfg.theta > 1.0, ErrorKind::InvalidParameter, "theta must exceed 1");
  require(cfg.a > 0.0, ErrorKind::InvalidParameter, "a must be positive");
  require(cfg.b > 0.0, ErrorKind::InvalidParameter, "b must be positive");
  require(cfg.lambda > 0.0, ErrorKind::InvalidParameter, "lambda must be positive");
  require(cfg.domain.upper > cfg.domain.lower, ErrorKind::InvalidParameter, "empty domain");
  require(cfg.quad.gauss_points >= 1, ErrorKind::InvalidParameter, "quad.gauss must be at least 1");
  require(cfg.mesh_nodes >= 3, ErrorKind::InvalidParameter, "mesh needs at least 3 nodes");
  require(cfg.w_weight.kind != WeightSpec::Kind::Table || !cfg.w_weight.table.empty(),
          ErrorKind::InvalidParameter, "empty w table");
  require(cfg.c_weight.kind != WeightSpec::Kind::Table || !cfg.c_weight.table.empty(),
          ErrorKind::InvalidParameter, "empty c table");

  const double pstar = cfg.n * cfg.p / (cfg.n - cfg.p * cfg.s);
  require(cfg.q > cfg.p * cfg.theta, ErrorKind::ExponentChainViolated,
          "q = " + std::to_string(cfg.q) + " must exceed p*theta = " + std::to_string(cfg.p * cfg.theta));
  require(cfg.q <= pstar * (1.0 + 1e-12), ErrorKind::ExponentChainViolated,
          "q = " + std::to_string(cfg.q) + " exceeds the critical exponent " + std::to_string(pstar));
  require(!weight_has_negative(cfg.c_weight, cfg.domain), ErrorKind::NegativeWeight,
          "c must be nonnegative");

  ValidatedConfig v;
  v.cfg_ = cfg;
  v.pstar_ = pstar;
  v.pprime_ = cfg.p / (cfg.p - 1.0);
  v.gamma_ = sup_abs(cfg.w_weight, cfg.domain) + 1.0;
  return v;
}

ProblemConfig desk_config(bool critical) {
  ProblemConfig cfg;
  cfg.q = critical ? 10.0 : 4.0;
  cfg.lambda = 1e-2;
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigParse, "key '" + key + "': not a number: '" + text + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::ConfigParse, "key '" + key + "': not a boolean: '" + text + "'");
}

WeightSpec to_weight(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) {
    const auto values = to_list(key, t);
    if (values.size() == 1) return WeightSpec::constant(values.front());
    if (values.size() < 2) throw Error(ErrorKind::ConfigParse, "key '" + key + "': empty weight");
    return WeightSpec::nodal(values);
  }
  const std::string name = trim(t.substr(0, colon));
  const auto args = to_list(key, t.substr(colon + 1));
  auto want = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorKind::ConfigParse, "key '" + key + "': preset '" + name + "' takes " +
                                              std::to_string(count) + " parameters");
    }
  };
  if (name == "const") {
    want(1);
    return WeightSpec::constant(args[0]);
  }
  if (name == "bump") {
    want(3);
    return WeightSpec::bump(args[0], args[1], args[2]);
  }
  if (name == "signflip") {
    want(3);
    return WeightSpec::sign_flip(args[0], args[1], args[2]);
  }
  if (name == "table") return WeightSpec::nodal(args);
  throw Error(ErrorKind::ConfigParse, "key '" + key + "': unknown preset '" + name + "'");
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw Error(ErrorKind::ConfigParse, "key '" + key + "': not an integer");
  return static_cast<int>(v);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigParse, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ConfigParse, "line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

ProblemConfig config_from_key_values(const KeyValues& kv, ProblemConfig cfg) {
  for (const auto& [key, value] : kv) {
    if (key == "n") cfg.n = to_int(key, value);
    else if (key == "p") cfg.p = to_double(key, value);
    else if (key == "s") cfg.s = to_double(key, value);
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "theta") cfg.theta = to_double(key, value);
    else if (key == "a") cfg.a = to_double(key, value);
    else if (key == "b") cfg.b = to_double(key, value);
    else if (key == "lambda") cfg.lambda = to_double(key, value);
    else if (key == "q") cfg.q = to_double(key, value);
    else if (key == "domain") {
      const auto d = to_list(key, value);
      if (d.size() != 2) throw Error(ErrorKind::ConfigParse, "domain takes two bounds");
      cfg.domain = {d[0], d[1]};
    } else if (key == "c") cfg.c_weight = to_weight(key, value);
    else if (key == "w") cfg.w_weight = to_weight(key, value);
    else if (key == "mesh") cfg.mesh_nodes = to_int(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "quad.gauss") cfg.quad.gauss_points = to_int(key, value);
    else if (key == "quad.diagonal") {
      if (value == "analytic-linear") cfg.quad.diagonal = DiagonalTreatment::AnalyticLinear;
      else if (value == "offset") cfg.quad.diagonal = DiagonalTreatment::Offset;
      else throw Error(ErrorKind::ConfigParse, "quad.diagonal must be analytic-linear or offset");
    } else if (key == "quad.exterior") cfg.quad.exterior_correction = to_bool(key, value);
    else if (key == "thresholds.harmonize_norms") cfg.harmonize_norms = to_bool(key, value);
    else if (key == "solver.tol0") cfg.solver.tol0 = to_double(key, value);
    else if (key == "solver.tol") cfg.solver.tol_final = to_double(key, value);
    else if (key == "solver.max_iter") cfg.solver.max_iterations = to_int(key, value);
    else if (key == "solver.step_min") cfg.solver.step_min = to_double(key, value);
    else if (key == "solver.singular_floor") cfg.solver.singular_floor = to_double(key, value);
    else if (key == "solver.preconditioner") {
      if (value == "diagonal") cfg.solver.full_preconditioner = false;
      else if (value == "stiffness") cfg.solver.full_preconditioner = true;
      else throw Error(ErrorKind::ConfigParse, "solver.preconditioner must be diagonal or stiffness");
    } else {
      throw Error(ErrorKind::ConfigParse, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_key_values(parse_key_values(buf.str()), desk_config(false));
}

}  // namespace nk
