#include "srblab/experiment/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <algorithm>
#include <functional>
#include <sstream>
#include <vector>

#include "srblab/error.hpp"

namespace srblab::experiment {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("not a real number: '" + std::string(v) + "'");
  if (!std::isfinite(out)) throw ConfigError("real value must be finite: '" + std::string(v) + "'");
  return out;
}

template <class Int>
Int parse_int(std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("not an integer: '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("not a boolean (true/false): '" + std::string(v) + "'");
}

std::optional<double> parse_optional(std::string_view v, std::string_view keyword) {
  if (v == keyword) return std::nullopt;
  return parse_real(v);
}

std::string optional_text(const std::optional<double>& v, std::string_view keyword) {
  return v ? real(*v) : std::string(keyword);
}

struct Key {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

const std::vector<Key>& table() {
  using C = ExperimentConfig;
  using V = std::string_view;
  static const std::vector<Key> keys = {
      {"map.family", [](const C& c) { return std::string(family_name(c.map.family)); },
       [](C& c, V v) {
         const auto f = parse_family(v);
         if (!f) throw ConfigError("unknown map family '" + std::string(v) + "'");
         c.map.family = *f;
       }},
      {"map.d", [](const C& c) { return c.map.d ? std::to_string(*c.map.d) : std::string("default"); },
       [](C& c, V v) {
         if (v == "default") c.map.d.reset();
         else c.map.d = parse_int<int>(v);
       }},
      {"map.slope", [](const C& c) { return real(c.map.slope); }, [](C& c, V v) { c.map.slope = parse_real(v); }},
      {"map.a", [](const C& c) { return real(c.map.a); }, [](C& c, V v) { c.map.a = parse_real(v); }},
      {"map.t", [](const C& c) { return real(c.map.t); }, [](C& c, V v) { c.map.t = parse_real(v); }},
      {"map.a0", [](const C& c) { return optional_text(c.map.a0, "misiurewicz"); },
       [](C& c, V v) { c.map.a0 = parse_optional(v, "misiurewicz"); }},
      {"map.alpha", [](const C& c) { return real(c.map.alpha); }, [](C& c, V v) { c.map.alpha = parse_real(v); }},
      {"map.half_width", [](const C& c) { return optional_text(c.map.half_width, "auto"); },
       [](C& c, V v) { c.map.half_width = parse_optional(v, "auto"); }},
      {"sweep.param", [](const C& c) { return c.sweep.param; }, [](C& c, V v) { c.sweep.param = std::string(v); }},
      {"sweep.from", [](const C& c) { return real(c.sweep.from); }, [](C& c, V v) { c.sweep.from = parse_real(v); }},
      {"sweep.to", [](const C& c) { return real(c.sweep.to); }, [](C& c, V v) { c.sweep.to = parse_real(v); }},
      {"sweep.steps", [](const C& c) { return std::to_string(c.sweep.steps); },
       [](C& c, V v) { c.sweep.steps = parse_int<std::size_t>(v); }},
      {"orbit.n_iters", [](const C& c) { return std::to_string(c.orbit.n_iters); },
       [](C& c, V v) { c.orbit.n_iters = parse_int<std::size_t>(v); }},
      {"orbit.sample_size", [](const C& c) { return std::to_string(c.orbit.sample_size); },
       [](C& c, V v) { c.orbit.sample_size = parse_int<std::size_t>(v); }},
      {"orbit.retry_budget", [](const C& c) { return std::to_string(c.orbit.retry_budget); },
       [](C& c, V v) { c.orbit.retry_budget = parse_int<std::size_t>(v); }},
      {"ulam.bins", [](const C& c) { return std::to_string(c.ulam.bins); },
       [](C& c, V v) { c.ulam.bins = parse_int<std::size_t>(v); }},
      {"ulam.ambient_bins", [](const C& c) { return std::to_string(c.ulam.ambient_bins); },
       [](C& c, V v) { c.ulam.ambient_bins = parse_int<std::size_t>(v); }},
      {"ulam.plane_bins", [](const C& c) { return std::to_string(c.ulam.plane_bins); },
       [](C& c, V v) { c.ulam.plane_bins = parse_int<std::size_t>(v); }},
      {"ulam.mode", [](const C& c) { return std::string(c.ulam.mode == SolveMode::power ? "power" : "cesaro"); },
       [](C& c, V v) {
         if (v == "power") c.ulam.mode = SolveMode::power;
         else if (v == "cesaro") c.ulam.mode = SolveMode::cesaro;
         else throw ConfigError("ulam.mode must be power or cesaro");
       }},
      {"ulam.tol", [](const C& c) { return real(c.ulam.tol); }, [](C& c, V v) { c.ulam.tol = parse_real(v); }},
      {"ulam.max_iters", [](const C& c) { return std::to_string(c.ulam.max_iters); },
       [](C& c, V v) { c.ulam.max_iters = parse_int<std::size_t>(v); }},
      {"induce.delta_left", [](const C& c) { return optional_text(c.induce.delta_left, "none"); },
       [](C& c, V v) { c.induce.delta_left = parse_optional(v, "none"); }},
      {"induce.delta_right", [](const C& c) { return optional_text(c.induce.delta_right, "none"); },
       [](C& c, V v) { c.induce.delta_right = parse_optional(v, "none"); }},
      {"induce.tau_max", [](const C& c) { return std::to_string(c.induce.tau_max); },
       [](C& c, V v) { c.induce.tau_max = parse_int<std::size_t>(v); }},
      {"induce.tol", [](const C& c) { return real(c.induce.tol); }, [](C& c, V v) { c.induce.tol = parse_real(v); }},
      {"induce.exact", [](const C& c) { return std::string(c.induce.exact ? "true" : "false"); },
       [](C& c, V v) { c.induce.exact = parse_bool(v); }},
      {"tail.lambda", [](const C& c) { return real(c.tail.lambda); }, [](C& c, V v) { c.tail.lambda = parse_real(v); }},
      {"tail.delta", [](const C& c) { return real(c.tail.delta); }, [](C& c, V v) { c.tail.delta = parse_real(v); }},
      {"tail.epsilon", [](const C& c) { return real(c.tail.epsilon); },
       [](C& c, V v) { c.tail.epsilon = parse_real(v); }},
      {"tail.n_max", [](const C& c) { return std::to_string(c.tail.n_max); },
       [](C& c, V v) { c.tail.n_max = parse_int<std::size_t>(v); }},
      {"tail.sample_size", [](const C& c) { return std::to_string(c.tail.sample_size); },
       [](C& c, V v) { c.tail.sample_size = parse_int<std::size_t>(v); }},
      {"tail.profile_file", [](const C& c) { return c.tail.profile_file; },
       [](C& c, V v) { c.tail.profile_file = std::string(v); }},
      {"smb.n", [](const C& c) { return std::to_string(c.smb.n); }, [](C& c, V v) { c.smb.n = parse_int<std::size_t>(v); }},
      {"smb.seeds", [](const C& c) { return std::to_string(c.smb.seeds); },
       [](C& c, V v) { c.smb.seeds = parse_int<std::size_t>(v); }},
      {"probe.B", [](const C& c) { return real(c.probe.B); }, [](C& c, V v) { c.probe.B = parse_real(v); }},
      {"probe.beta", [](const C& c) { return real(c.probe.beta); }, [](C& c, V v) { c.probe.beta = parse_real(v); }},
      {"probe.samples", [](const C& c) { return std::to_string(c.probe.samples); },
       [](C& c, V v) { c.probe.samples = parse_int<std::size_t>(v); }},
      {"rng.seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, V v) { c.seed = parse_int<std::uint64_t>(v); }},
      {"output.dir", [](const C& c) { return c.output_dir; }, [](C& c, V v) { c.output_dir = std::string(v); }},
  };
  return keys;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  if (sweep.steps < 2) throw ConfigError("sweep.steps must be >= 2");
  positive(ulam.tol, "ulam.tol");
  positive(induce.tol, "induce.tol");
  positive(tail.lambda, "tail.lambda");
  positive(tail.delta, "tail.delta");
  positive(tail.epsilon, "tail.epsilon");
  positive(probe.B, "probe.B");
  positive(probe.beta, "probe.beta");
  if (orbit.n_iters < 1 || orbit.sample_size < 1) throw ConfigError("orbit.n_iters and orbit.sample_size must be >= 1");
  if (ulam.bins < 1 || ulam.ambient_bins < 1 || ulam.plane_bins < 1) throw ConfigError("ulam bin counts must be >= 1");
  if (induce.tau_max < 1) throw ConfigError("induce.tau_max must be >= 1");
  if (tail.n_max < 1 || tail.sample_size < 1) throw ConfigError("tail.n_max and tail.sample_size must be >= 1");
  if (smb.n < 1 || smb.seeds < 1) throw ConfigError("smb.n and smb.seeds must be >= 1");
  if (induce.delta_left.has_value() != induce.delta_right.has_value())
    throw ConfigError("induce.delta_left and induce.delta_right must be set together");
  if (induce.delta_left && !(*induce.delta_right > *induce.delta_left))
    throw ConfigError("induce.delta_right must exceed induce.delta_left");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& keys = table();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == key; });
    if (it == keys.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    try {
      it->set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + " (" + std::string(key) + "): " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : table()) {
    const std::string head = k.name.substr(0, k.name.find('.'));
    if (head != section) {
      if (!section.empty()) out += '\n';
      section = head;
    }
    out += k.name + " = " + k.get(config) + '\n';
  }
  return out;
}

MapSpec with_parameter(MapSpec spec, std::string_view param, double value) {
  if (param == "d") spec.d = static_cast<int>(std::lround(value));
  else if (param == "slope") spec.slope = value;
  else if (param == "a") spec.a = value;
  else if (param == "t") spec.t = value;
  else if (param == "a0") spec.a0 = value;
  else if (param == "alpha") spec.alpha = value;
  else throw ConfigError("unknown sweep parameter '" + std::string(param) + "'");
  return spec;
}

MapSystem build_map(const MapSpec& spec) {
  switch (spec.family) {
    case MapFamily::doubling: return MapSystem::doubling();
    case MapFamily::linear_circle: return MapSystem::linear_circle(spec.d.value_or(2));
    case MapFamily::tent: return MapSystem::tent(spec.slope);
    case MapFamily::quadratic: return MapSystem::quadratic(spec.a);
    case MapFamily::perturbed_circle: return MapSystem::perturbed_circle(spec.t);
    case MapFamily::viana: return MapSystem::viana({spec.a0, spec.alpha, spec.d.value_or(16), spec.half_width});
  }
  throw ConfigError("unsupported map family");
}

}  // namespace srblab::experiment
