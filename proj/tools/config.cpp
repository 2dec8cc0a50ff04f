#include "config.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace parapuzzle::cli {

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw UsageError("config key " + key + ": not a number: '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw UsageError("config key " + key + ": not an integer: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw UsageError("config key " + key + ": out of range");
  return static_cast<int>(x);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"rays.land_threshold", [](RunConfig& c, auto& k, auto& v) { c.land_threshold = to_double(k, v); }},
      {"rays.tail_tolerance", [](RunConfig& c, auto& k, auto& v) { c.tail_tolerance = to_double(k, v); }},
      {"rays.steps_per_halving", [](RunConfig& c, auto& k, auto& v) { c.steps_per_halving = to_int(k, v); }},
      {"nest.iterate_cap",
       [](RunConfig& c, auto& k, auto& v) {
         const long long x = to_integer(k, v);
         if (x <= 0) throw UsageError("config key " + k + ": must be positive");
         c.iterate_cap = static_cast<std::uint64_t>(x);
       }},
      {"nest.max_cascade", [](RunConfig& c, auto& k, auto& v) { c.max_cascade = to_int(k, v); }},
      {"nest.resolution_floor", [](RunConfig& c, auto& k, auto& v) { c.resolution_floor = to_double(k, v); }},
      {"puzzle.truncation",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "power") c.truncation = TruncationReading::Root;
         else if (v == "literal") c.truncation = TruncationReading::Literal;
         else throw UsageError("config key " + k + ": expected power or literal, got '" + v + "'");
       }},
      {"tile.resolution", [](RunConfig& c, auto& k, auto& v) { c.tile_resolution = to_int(k, v); }},
      {"modulus.resolution", [](RunConfig& c, auto& k, auto& v) { c.modulus_resolution = to_int(k, v); }},
      {"run.seed",
       [](RunConfig& c, auto& k, auto& v) {
         const long long x = to_integer(k, v);
         if (x < 0) throw UsageError("config key " + k + ": must be nonnegative");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"run.threads", [](RunConfig& c, auto& k, auto& v) { c.threads = to_int(k, v); }},
      {"run.output_dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RayConfig RunConfig::rays() const {
  RayConfig r;
  r.land_threshold = land_threshold;
  r.tail_tolerance = tail_tolerance;
  r.steps_per_halving = steps_per_halving;
  return r;
}

RealNestConfig RunConfig::nest(int max_level) const {
  RealNestConfig n;
  n.max_level = max_level;
  n.max_cascade = max_cascade;
  n.iterate_cap = iterate_cap;
  n.resolution_floor = resolution_floor;
  return n;
}

PuzzleConfig RunConfig::puzzle() const {
  PuzzleConfig p;
  p.rays = rays();
  p.truncation = truncation;
  return p;
}

ParamTileConfig RunConfig::tiles() const {
  ParamTileConfig t;
  t.puzzle.truncation = truncation;
  t.threads = threads;
  t.max_cascade = max_cascade;
  return t;
}

MeasureConfig RunConfig::measure() const {
  MeasureConfig m;
  m.nest = nest(8);
  m.threads = threads;
  return m;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const Setter* match = nullptr;
  for (const auto& [name, setter] : setters()) {
    const bool bare = key.find('.') == std::string::npos && name.substr(name.find('.') + 1) == key;
    if (name == key || bare) {
      if (match) throw UsageError("ambiguous config key '" + key + "'");
      match = &setter;
    }
  }
  if (!match) throw UsageError("unknown config key '" + key + "'");
  (*match)(config, key, value);
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string line, section;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(path + ":" + std::to_string(number) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!section.empty()) key = section + "." + key;
    try {
      set_config_value(config, key, value);
    } catch (const UsageError& e) {
      throw UsageError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
  };
  require(c.land_threshold > 0, "land_threshold must be positive");
  require(c.tail_tolerance > 0, "tail_tolerance must be positive");
  require(c.steps_per_halving > 0, "steps_per_halving must be positive");
  require(c.iterate_cap > 0, "iterate_cap must be positive");
  require(c.max_cascade > 0, "max_cascade must be positive");
  require(c.resolution_floor > 0, "resolution_floor must be positive");
  require(c.tile_resolution > 0, "tile resolution must be positive");
  require(c.modulus_resolution > 0, "modulus resolution must be positive");
  require(c.threads >= 0, "threads must be nonnegative");
}

}  // namespace parapuzzle::cli
