#include "novikov/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "novikov/initial_data.hpp"

namespace novikov {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

// Decimal number, "inf", or a fraction p/q of two decimals.
std::optional<double> parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  auto plain = [](std::string_view v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    if (v.front() == '+') v.remove_prefix(1);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    return out;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return plain(s);
  const auto num = plain(trim(std::string_view(s).substr(0, slash)));
  const auto den = plain(trim(std::string_view(s).substr(slash + 1)));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<InitialKind> parse_kind(const std::string& s) {
  static const std::pair<const char*, InitialKind> kinds[] = {
      {"gaussian", InitialKind::gaussian},
      {"sech", InitialKind::sech},
      {"sine", InitialKind::sine},
      {"mollified_peakon", InitialKind::mollified_peakon},
      {"odd_gaussian", InitialKind::odd_gaussian},
      {"file", InitialKind::file}};
  for (const auto& [name, kind] : kinds) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

class Resolver {
 public:
  explicit Resolver(const KeyValueDocument& doc) : doc_(doc) {}

  void issue(const std::string& key, const std::string& message) {
    const auto it = doc_.entries.find(key);
    issues_.push_back({doc_.origin, it == doc_.entries.end() ? 0 : it->second.line, key, message});
  }

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    const auto it = doc_.entries.find(key);
    return it == doc_.entries.end() ? nullptr : &it->second.value;
  }

  std::optional<double> number(const std::string& key, bool required) {
    const std::string* v = raw(key);
    if (v == nullptr) {
      if (required) issue(key, "required key is missing (no default)");
      return std::nullopt;
    }
    const auto x = parse_number(*v);
    if (!x) issue(key, "expected a number, got '" + *v + "'");
    return x;
  }

  double number_or(const std::string& key, double fallback) {
    return number(key, false).value_or(fallback);
  }

  std::optional<long long> integer(const std::string& key, bool required) {
    const auto x = number(key, required);
    if (!x) return std::nullopt;
    if (*x != std::floor(*x) || std::abs(*x) > 1e15) {
      issue(key, "expected an integer");
      return std::nullopt;
    }
    return static_cast<long long>(*x);
  }

  std::optional<std::size_t> count(const std::string& key, std::size_t fallback) {
    const auto x = integer(key, false);
    if (!x) return fallback;
    if (*x < 0) {
      issue(key, "must be >= 0");
      return fallback;
    }
    return static_cast<std::size_t>(*x);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const std::string* v = raw(key);
    return v ? *v : fallback;
  }

  void report_unknown() {
    for (const auto& [key, entry] : doc_.entries) {
      if (!used_.count(key)) issue(key, "unknown key");
    }
  }

  std::vector<ConfigIssue>& issues() { return issues_; }

 private:
  const KeyValueDocument& doc_;
  std::vector<ConfigIssue> issues_;
  std::set<std::string> used_;
};

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += '\n';
    out += i.to_string();
  }
  return out;
}

}  // namespace

std::string ConfigIssue::to_string() const {
  std::string out = origin;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": ";
  if (!field.empty()) out += field + ": ";
  return out + message;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

KeyValueDocument KeyValueDocument::parse(const std::string& text, const std::string& origin,
                                         const std::filesystem::path& base_dir) {
  KeyValueDocument doc;
  doc.origin = origin;
  doc.base_dir = base_dir;
  auto& issues = doc.issues;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      issues.push_back({origin, number, "", "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) {
      issues.push_back({origin, number, "", "empty key"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({origin, number, key, "empty value"});
      continue;
    }
    if (const auto it = doc.entries.find(key); it != doc.entries.end()) {
      issues.push_back({origin, number, key,
                        "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
      continue;
    }
    doc.entries[key] = {value, number};
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{path.string(), 0, "", "cannot open file"}});
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string(), path.parent_path());
}

void KeyValueDocument::set(const std::string& key, const std::string& value) {
  entries[key] = {value, 0};
}

const char* to_string(InitialKind kind) noexcept {
  switch (kind) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::sech: return "sech";
    case InitialKind::sine: return "sine";
    case InitialKind::mollified_peakon: return "mollified_peakon";
    case InitialKind::odd_gaussian: return "odd_gaussian";
    case InitialKind::file: return "file";
  }
  return "unknown";
}

ScenarioConfig resolve_config(const KeyValueDocument& doc) {
  Resolver r(doc);
  r.issues() = doc.issues;
  ScenarioConfig cfg;
  cfg.source = doc.origin;
  cfg.name = r.text("scenario.name", "");
  cfg.provenance = r.text("scenario.provenance", "");

  // grid
  if (const auto n = r.integer("grid.n_modes", true)) {
    if (*n < 8 || *n % 2 != 0 || *n > (1 << 24)) {
      r.issue("grid.n_modes", "must be an even integer in [8, 2^24]");
    } else {
      cfg.n_modes = static_cast<int>(*n);
    }
  }
  if (const auto L = r.number("grid.half_length", true)) {
    if (!(*L > 0.0) || !std::isfinite(*L)) {
      r.issue("grid.half_length", "must be finite and > 0");
    } else {
      cfg.half_length = *L;
    }
  }

  // model: no defaults for physical parameters
  const auto k = r.number("model.k", true);
  const auto lambda = r.number("model.lambda", true);
  if (k) cfg.model.k = *k;
  if (lambda) cfg.model.lambda = *lambda;
  if (const std::string* g = r.raw("model.g_coeffs")) {
    if (*g != "none") {
      for (const auto& item : split_list(*g)) {
        const auto v = parse_number(item);
        if (!v) {
          r.issue("model.g_coeffs", "expected a comma-separated list of numbers or 'none'");
          break;
        }
        cfg.model.g_coeffs.push_back(*v);
      }
    }
  } else {
    r.issue("model.g_coeffs", "required key is missing (no default; write 'none' for g = 0)");
  }
  const std::string grouping = r.text("model.grouping", "combined");
  if (grouping == "combined") {
    cfg.model.grouping = TermGrouping::combined;
  } else if (grouping == "split") {
    cfg.model.grouping = TermGrouping::split;
  } else {
    r.issue("model.grouping", "expected 'combined' or 'split'");
  }
  if (k && lambda) {
    try {
      cfg.model.validate();
    } catch (const std::exception& e) {
      r.issue("model", e.what());
    }
  }

  // initial data
  const std::string kind = r.text("initial.kind", "");
  if (kind.empty()) {
    r.issue("initial.kind", "required key is missing");
  } else if (const auto parsed = parse_kind(kind)) {
    cfg.initial.kind = *parsed;
  } else {
    r.issue("initial.kind",
            "unknown kind '" + kind +
                "' (gaussian, sech, sine, mollified_peakon, odd_gaussian, file)");
  }
  if (const std::string* rk = r.raw("initial.rho_kind")) {
    const auto parsed = parse_kind(*rk);
    if (!parsed || *parsed == InitialKind::file) {
      r.issue("initial.rho_kind", "unknown or unsupported kind '" + *rk + "'");
    } else {
      cfg.initial.rho_kind = parsed;
    }
  }
  cfg.initial.width = r.number_or("initial.width", 1.0);
  cfg.initial.center = r.number_or("initial.center", 0.0);
  if (!(cfg.initial.width > 0.0)) r.issue("initial.width", "must be > 0");
  if (const auto m = r.integer("initial.mode", false)) cfg.initial.mode = static_cast<int>(*m);
  cfg.initial.epsilon = r.number("initial.epsilon", false);
  const bool from_file = cfg.initial.kind == InitialKind::file && !kind.empty();
  const auto ua = r.number("initial.u_amplitude", !from_file);
  const auto ra = r.number("initial.rho_amplitude", !from_file);
  cfg.initial.u_amplitude = ua.value_or(0.0);
  cfg.initial.rho_amplitude = ra.value_or(0.0);
  const bool uses_peakon = cfg.initial.kind == InitialKind::mollified_peakon ||
                           cfg.initial.rho_kind == InitialKind::mollified_peakon;
  if (uses_peakon) {
    if (!cfg.initial.epsilon) {
      r.issue("initial.epsilon", "required for mollified_peakon");
    } else if (!(*cfg.initial.epsilon > 0.0)) {
      r.issue("initial.epsilon", "must be > 0");
    }
  }
  const std::string* file = r.raw("initial.file");
  if (from_file) {
    if (file == nullptr) {
      r.issue("initial.file", "required for kind 'file'");
    } else {
      cfg.initial.file = doc.base_dir / *file;
      try {
        const auto samples = read_samples_file(cfg.initial.file);
        if (cfg.n_modes > 0 && samples.first.size() != static_cast<std::size_t>(cfg.n_modes)) {
          r.issue("initial.file", "has " + std::to_string(samples.first.size()) +
                                      " rows, expected grid.n_modes = " +
                                      std::to_string(cfg.n_modes));
        }
      } catch (const std::exception& e) {
        r.issue("initial.file", e.what());
      }
    }
  } else if (file != nullptr) {
    r.issue("initial.file", "only used with kind 'file'");
  }

  // control
  cfg.control.cfl = r.number_or("control.cfl", cfg.control.cfl);
  cfg.control.dt_min = r.number_or("control.dt_min", cfg.control.dt_min);
  cfg.control.dt_max = r.number_or("control.dt_max", cfg.control.dt_max);
  cfg.control.breaking_threshold =
      r.number_or("control.breaking_threshold", cfg.control.breaking_threshold);
  if (const auto t = r.number("control.t_end", true)) cfg.control.t_end = *t;
  try {
    cfg.control.validate();
  } catch (const std::exception& e) {
    r.issue("control", e.what());
  }

  // weights: weight.<name>.<field>
  std::set<std::string> weight_names;
  for (const auto& [key, entry] : doc.entries) {
    if (key.rfind("weight.", 0) != 0) continue;
    const auto dot = key.find('.', 7);
    if (dot == std::string::npos || dot == 7) {
      r.issue(key, "expected weight.<name>.<field>");
      r.raw(key);
      continue;
    }
    weight_names.insert(key.substr(7, dot - 7));
  }
  for (const auto& name : weight_names) {
    const std::string prefix = "weight." + name + ".";
    NamedWeight w;
    w.name = name;
    w.spec.a = r.number_or(prefix + "a", 0.0);
    w.spec.b = r.number_or(prefix + "b", 0.0);
    w.spec.c = r.number_or(prefix + "c", 0.0);
    w.spec.d = r.number_or(prefix + "d", 0.0);
    w.spec.theta = r.number_or(prefix + "theta", 1.0);
    w.spec.truncation = r.number(prefix + "truncation", false);
    w.p = r.number_or(prefix + "p", 2.0);
    if (!(w.p >= 2.0)) r.issue(prefix + "p", "must be >= 2 or 'inf'");
    try {
      w.spec.validate();
    } catch (const std::exception& e) {
      r.issue(prefix.substr(0, prefix.size() - 1), e.what());
    }
    cfg.weights.push_back(std::move(w));
  }

  // trajectories
  cfg.trajectories.count = *r.count("trajectories.count", 0);
  cfg.trajectories.span = r.number_or("trajectories.span", 1.0);
  if (cfg.trajectories.count > 0 && !(cfg.trajectories.span > 0.0)) {
    r.issue("trajectories.span", "must be > 0");
  }

  // output
  cfg.output.directory = r.text("output.directory", cfg.output.directory);
  cfg.output.snapshot_stride = *r.count("output.snapshot_stride", 0);
  cfg.output.diagnostics_stride = *r.count("output.diagnostics_stride", 1);
  if (cfg.output.diagnostics_stride == 0) r.issue("output.diagnostics_stride", "must be >= 1");

  // convergence study
  auto& cv = cfg.convergence;
  cv.dt_coarse = r.number_or("convergence.dt_coarse", cv.dt_coarse);
  cv.horizon = r.number_or("convergence.horizon", cv.horizon);
  cv.spatial_dt = r.number_or("convergence.spatial_dt", cv.spatial_dt);
  cv.perturbation = r.number_or("convergence.perturbation", cv.perturbation);
  if (const auto v = r.integer("convergence.levels", false)) cv.levels = static_cast<int>(*v);
  if (const auto v = r.integer("convergence.spatial_n", false)) cv.spatial_n = static_cast<int>(*v);
  if (!(cv.dt_coarse > 0.0)) r.issue("convergence.dt_coarse", "must be > 0");
  if (!(cv.horizon > 0.0)) r.issue("convergence.horizon", "must be > 0");
  if (!(cv.spatial_dt > 0.0)) r.issue("convergence.spatial_dt", "must be > 0");
  if (!(cv.perturbation > 0.0)) r.issue("convergence.perturbation", "must be > 0");
  if (cv.levels < 2) r.issue("convergence.levels", "must be >= 2");
  if (cv.spatial_n < 8 || cv.spatial_n % 2 != 0) {
    r.issue("convergence.spatial_n", "must be an even integer >= 8");
  }

  r.report_unknown();
  if (!r.issues().empty()) throw ConfigError(std::move(r.issues()));
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return resolve_config(KeyValueDocument::load(path));
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "grid.n_modes=" << cfg.n_modes << '\n';
  out << "grid.half_length=" << fmt(cfg.half_length) << '\n';
  out << "model.k=" << fmt(cfg.model.k) << '\n';
  out << "model.lambda=" << fmt(cfg.model.lambda) << '\n';
  out << "model.g_coeffs=";
  for (std::size_t i = 0; i < cfg.model.g_coeffs.size(); ++i) {
    out << (i ? "," : "") << fmt(cfg.model.g_coeffs[i]);
  }
  out << '\n';
  out << "model.grouping="
      << (cfg.model.grouping == TermGrouping::combined ? "combined" : "split") << '\n';
  const auto& in = cfg.initial;
  out << "initial.kind=" << to_string(in.kind) << '\n';
  out << "initial.rho_kind=" << to_string(in.rho_kind.value_or(in.kind)) << '\n';
  out << "initial.u_amplitude=" << fmt(in.u_amplitude) << '\n';
  out << "initial.rho_amplitude=" << fmt(in.rho_amplitude) << '\n';
  out << "initial.width=" << fmt(in.width) << '\n';
  out << "initial.center=" << fmt(in.center) << '\n';
  out << "initial.epsilon=" << (in.epsilon ? fmt(*in.epsilon) : "none") << '\n';
  out << "initial.mode=" << in.mode << '\n';
  if (in.kind == InitialKind::file) {
    std::ifstream f(in.file, std::ios::binary);
    std::ostringstream content;
    content << f.rdbuf();
    out << "initial.file_sha256=" << sha256_hex(content.str()) << '\n';
  }
  const auto& c = cfg.control;
  out << "control.cfl=" << fmt(c.cfl) << '\n';
  out << "control.dt_min=" << fmt(c.dt_min) << '\n';
  out << "control.dt_max=" << fmt(c.dt_max) << '\n';
  out << "control.t_end=" << fmt(c.t_end) << '\n';
  out << "control.breaking_threshold=" << fmt(c.breaking_threshold) << '\n';
  for (const auto& w : cfg.weights) {
    const std::string p = "weight." + w.name + ".";
    out << p << "a=" << fmt(w.spec.a) << '\n' << p << "b=" << fmt(w.spec.b) << '\n';
    out << p << "c=" << fmt(w.spec.c) << '\n' << p << "d=" << fmt(w.spec.d) << '\n';
    out << p << "theta=" << fmt(w.spec.theta) << '\n' << p << "p=" << fmt(w.p) << '\n';
    out << p << "truncation=" << (w.spec.truncation ? fmt(*w.spec.truncation) : "none") << '\n';
  }
  out << "trajectories.count=" << cfg.trajectories.count << '\n';
  out << "trajectories.span=" << fmt(cfg.trajectories.span) << '\n';
  out << "output.snapshot_stride=" << cfg.output.snapshot_stride << '\n';
  out << "output.diagnostics_stride=" << cfg.output.diagnostics_stride << '\n';
  return out.str();
}

std::string config_hash(const ScenarioConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace novikov
