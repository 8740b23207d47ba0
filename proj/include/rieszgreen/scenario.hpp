#pragma once

// JSON scenario configs: geometry, region predicates, charges, task options.
// Parsing is total (unknown keys are rejected with their JSON path) and
// happens before any file is written.

#include "rieszgreen/balayage.hpp"
#include "rieszgreen/core.hpp"
#include "rieszgreen/gauss.hpp"
#include "rieszgreen/geometry.hpp"
#include "rieszgreen/green.hpp"
#include "rieszgreen/io.hpp"
#include "rieszgreen/riesz.hpp"
#include "rieszgreen/verify.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rieszgreen::scenario {

using json = nlohmann::ordered_json;

inline constexpr int report_version = 1;

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"kernel", "capacity",   "equilibrium", "sweep",   "green",
                                              "gauss",  "truncation", "exhaustion",  "support", "verify-all"};
  return names;
}

struct Part {
  std::string name;
  Index begin = 0, end = 0;
};

struct Tolerances {
  double kkt = 1e-9;
  double entering = 1e-13;
  double path_warning = 1e-8;
  double invariant = 1e-8;
};

struct ScenarioConfig {
  std::filesystem::path source;
  std::string task;
  int dim = 3;
  double alpha = 2.0;
  double sigma = 1.0;
  std::uint64_t seed = 20260917;
  std::vector<Part> parts;
  std::optional<PointSet> points;      // absent for verify-all
  std::optional<DomainConfig> domain;  // Green-based tasks only
  IndexSet target;                     // F (or the sweep target) as global indices
  Eigen::VectorXd theta;               // global indexing; may be empty
  json options = json::object();
  Tolerances tolerances;
  std::filesystem::path output_dir = "out";
  bool plots = true;
  std::optional<int> filter;
  json echo;  // the parsed document
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& msg) {
  fail(ErrorKind::config, (path.empty() ? std::string("config") : path) + ": " + msg);
}

inline void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) config_error(path + "." + k, "unknown field");
}

inline double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_error(path + "." + key, "missing required number");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(path + "." + key, "expected a number");
  return v.get<double>();
}

inline long long integer(const json& obj, const std::string& path, const char* key,
                         std::optional<long long> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_error(path + "." + key, "missing required integer");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(path + "." + key, "expected an integer");
  return v.get<long long>();
}

inline std::string text(const json& obj, const std::string& path, const char* key,
                        std::optional<std::string> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_error(path + "." + key, "missing required string");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) config_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_error(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

inline Eigen::VectorXd vector(const json& v, const std::string& path, int dim) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    config_error(path, "expected an array of " + std::to_string(dim) + " numbers");
  Eigen::VectorXd out(dim);
  for (int k = 0; k < dim; ++k) {
    if (!v[static_cast<std::size_t>(k)].is_number()) config_error(path, "expected numbers");
    out[k] = v[static_cast<std::size_t>(k)].get<double>();
  }
  return out;
}

inline Eigen::VectorXd vector_or(const json& obj, const std::string& path, const char* key, int dim) {
  if (!obj.contains(key)) return Eigen::VectorXd::Zero(dim);
  return vector(obj.at(key), path + "." + key, dim);
}

struct GeometryBuild {
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<std::optional<std::vector<double>>> radii;
  std::vector<Part> parts;
};

inline void add_part(GeometryBuild& g, const json& entry, const std::string& path, int dim, std::mt19937_64& rng,
                     const std::filesystem::path& base) {
  const std::string gen = text(entry, path, "generator");
  const std::string name = text(entry, path, "name");
  for (const auto& p : g.parts)
    if (p.name == name) config_error(path + ".name", "duplicate part name '" + name + "'");
  Eigen::MatrixXd pts;
  std::optional<std::vector<double>> radii;
  if (gen == "points") {
    allow_keys(entry, path, {"name", "generator", "coords", "radii", "jitter"});
    if (!entry.contains("coords") || !entry.at("coords").is_array() || entry.at("coords").empty())
      config_error(path + ".coords", "expected a nonempty array of points");
    const json& c = entry.at("coords");
    pts.resize(static_cast<Index>(c.size()), dim);
    for (std::size_t i = 0; i < c.size(); ++i)
      pts.row(static_cast<Index>(i)) = vector(c[i], path + ".coords[" + std::to_string(i) + "]", dim).transpose();
    if (entry.contains("radii")) {
      const json& r = entry.at("radii");
      if (!r.is_array() || r.size() != c.size()) config_error(path + ".radii", "expected one radius per point");
      radii.emplace();
      for (const auto& v : r) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) config_error(path + ".radii", "radii must be positive numbers");
        radii->push_back(v.get<double>());
      }
    }
  } else if (gen == "grid") {
    allow_keys(entry, path, {"name", "generator", "lo", "hi", "counts", "jitter"});
    if (!entry.contains("counts") || !entry.at("counts").is_array() || static_cast<int>(entry.at("counts").size()) != dim)
      config_error(path + ".counts", "expected " + std::to_string(dim) + " integers");
    std::vector<int> counts;
    for (const auto& v : entry.at("counts")) {
      if (!v.is_number_integer()) config_error(path + ".counts", "expected integers");
      counts.push_back(v.get<int>());
    }
    if (!entry.contains("lo") || !entry.contains("hi")) config_error(path, "grid needs lo and hi");
    pts = geometry::grid(vector(entry.at("lo"), path + ".lo", dim), vector(entry.at("hi"), path + ".hi", dim), counts);
  } else if (gen == "sphere") {
    allow_keys(entry, path, {"name", "generator", "count", "radius", "center", "jitter"});
    pts = geometry::sphere(integer(entry, path, "count"), number(entry, path, "radius", 1.0),
                           vector_or(entry, path, "center", dim));
  } else if (gen == "ball") {
    allow_keys(entry, path, {"name", "generator", "radius", "spacing", "center", "jitter"});
    pts = geometry::ball(number(entry, path, "radius"), number(entry, path, "spacing"), vector_or(entry, path, "center", dim));
  } else if (gen == "annulus") {
    allow_keys(entry, path, {"name", "generator", "inner", "outer", "spacing", "center", "jitter"});
    pts = geometry::annulus(number(entry, path, "inner"), number(entry, path, "outer"), number(entry, path, "spacing"),
                            vector_or(entry, path, "center", dim));
  } else if (gen == "cone") {
    allow_keys(entry, path, {"name", "generator", "half_angle_deg", "r_min", "r_max", "spacing", "apex", "jitter"});
    pts = geometry::cone(number(entry, path, "half_angle_deg") * std::numbers::pi / 180.0, number(entry, path, "r_min", 0.0),
                         number(entry, path, "r_max"), number(entry, path, "spacing"), vector_or(entry, path, "apex", dim));
  } else if (gen == "plane") {
    allow_keys(entry, path, {"name", "generator", "half_width", "spacing", "height", "jitter"});
    pts = geometry::plane(dim, number(entry, path, "half_width"), number(entry, path, "spacing"),
                          number(entry, path, "height", 0.0));
  } else if (gen == "csv") {
    allow_keys(entry, path, {"name", "generator", "path", "jitter"});
    std::filesystem::path file = text(entry, path, "path");
    if (file.is_relative()) file = base / file;
    geometry::CsvPoints csv = geometry::load_csv(file.string(), dim);
    pts = std::move(csv.coords);
    if (csv.radii) radii = std::vector<double>(csv.radii->data(), csv.radii->data() + csv.radii->size());
  } else {
    config_error(path + ".generator", "unknown generator '" + gen + "'");
  }
  if (pts.rows() == 0) config_error(path, "generator produced no points");
  if (entry.contains("jitter")) pts = geometry::jitter(std::move(pts), number(entry, path, "jitter"), rng);
  const Index begin = g.blocks.empty() ? 0 : g.parts.back().end;
  g.parts.push_back({name, begin, begin + pts.rows()});
  g.blocks.push_back(std::move(pts));
  g.radii.push_back(std::move(radii));
}

/// Evaluates a region predicate to a sorted global index set.
inline IndexSet select(const json& p, const std::string& path, const PointSet& ps, const std::vector<Part>& parts) {
  if (!p.is_object() || p.size() != 1) config_error(path, "a predicate is an object with exactly one key");
  const auto& [key, arg] = *p.items().begin();
  const int dim = ps.dim();
  IndexSet out;
  if (key == "all") {
    if (!arg.is_boolean()) config_error(path + ".all", "expected a boolean");
    if (arg.get<bool>()) out = iota_set(ps.size());
  } else if (key == "part") {
    if (!arg.is_string()) config_error(path + ".part", "expected a part name");
    const std::string name = arg.get<std::string>();
    bool found = false;
    for (const auto& part : parts)
      if (part.name == name) {
        found = true;
        for (Index i = part.begin; i < part.end; ++i) out.push_back(i);
      }
    if (!found) config_error(path + ".part", "unknown part '" + name + "'");
  } else if (key == "indices") {
    if (!arg.is_array()) config_error(path + ".indices", "expected an array of integers");
    for (const auto& v : arg) {
      if (!v.is_number_integer()) config_error(path + ".indices", "expected integers");
      const auto i = v.get<long long>();
      if (i < 0 || i >= ps.size()) config_error(path + ".indices", "index " + std::to_string(i) + " out of range");
      out.push_back(static_cast<Index>(i));
    }
  } else if (key == "radius_band") {
    allow_keys(arg, path + ".radius_band", {"center", "min", "max"});
    const Eigen::VectorXd c = vector_or(arg, path + ".radius_band", "center", dim);
    const double lo = number(arg, path + ".radius_band", "min", -1.0);
    const double hi = number(arg, path + ".radius_band", "max", std::numeric_limits<double>::infinity());
    for (Index i = 0; i < ps.size(); ++i) {
      const double r = (ps.point(i) - c).norm();
      if (r > lo && r <= hi * (1.0 + 1e-12)) out.push_back(i);
    }
  } else if (key == "half_space") {
    allow_keys(arg, path + ".half_space", {"normal", "offset"});
    if (!arg.contains("normal")) config_error(path + ".half_space.normal", "missing required vector");
    const Eigen::VectorXd nrm = vector(arg.at("normal"), path + ".half_space.normal", dim);
    const double off = number(arg, path + ".half_space", "offset", 0.0);
    for (Index i = 0; i < ps.size(); ++i)
      if (nrm.dot(ps.point(i)) >= off) out.push_back(i);
  } else if (key == "all_of" || key == "any_of") {
    if (!arg.is_array() || arg.empty()) config_error(path + "." + key, "expected a nonempty array of predicates");
    for (std::size_t k = 0; k < arg.size(); ++k) {
      const IndexSet s = select(arg[k], path + "." + key + "[" + std::to_string(k) + "]", ps, parts);
      out = (k == 0) ? s : (key == "all_of" ? set_intersection(out, s) : set_union(out, s));
    }
  } else if (key == "not") {
    out = set_difference(iota_set(ps.size()), select(arg, path + ".not", ps, parts));
  } else {
    config_error(path + "." + key, "unknown predicate");
  }
  return normalized(std::move(out));
}

inline const std::map<std::string, std::vector<const char*>>& option_keys() {
  static const std::map<std::string, std::vector<const char*>> keys{
      {"kernel", {"export_matrix"}},
      {"capacity", {}},
      {"equilibrium", {}},
      {"sweep", {"target", "algorithm"}},
      {"green", {"export_matrices"}},
      {"gauss", {"check_uniqueness"}},
      {"truncation", {"center", "radii"}},
      {"exhaustion", {"center", "radii", "window_radius"}},
      {"support", {"adjacency_factor"}},
      {"verify-all", {}},
  };
  return keys;
}

}  // namespace detail

inline ScenarioConfig parse(const json& doc, const std::filesystem::path& source = {}) {
  using namespace detail;
  allow_keys(doc, "config",
             {"version", "task", "dim", "alpha", "sigma", "seed", "geometry", "regions", "theta", "options",
              "tolerances", "output", "filter"});
  ScenarioConfig cfg;
  cfg.source = source;
  cfg.echo = doc;
  if (doc.contains("version") && integer(doc, "config", "version") != report_version)
    config_error("config.version", "unsupported version");
  cfg.task = text(doc, "config", "task");
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), cfg.task) == names.end())
    config_error("config.task", "unknown task '" + cfg.task + "'");
  cfg.seed = static_cast<std::uint64_t>(integer(doc, "config", "seed", 20260917));
  if (doc.contains("filter")) cfg.filter = static_cast<int>(integer(doc, "config", "filter"));

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    allow_keys(t, "config.tolerances", {"kkt", "entering", "path_warning", "invariant"});
    cfg.tolerances.kkt = number(t, "config.tolerances", "kkt", cfg.tolerances.kkt);
    cfg.tolerances.entering = number(t, "config.tolerances", "entering", cfg.tolerances.entering);
    cfg.tolerances.path_warning = number(t, "config.tolerances", "path_warning", cfg.tolerances.path_warning);
    cfg.tolerances.invariant = number(t, "config.tolerances", "invariant", cfg.tolerances.invariant);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    allow_keys(o, "config.output", {"dir", "plots"});
    cfg.output_dir = text(o, "config.output", "dir", "out");
    cfg.plots = boolean(o, "config.output", "plots", true);
  }
  json opts = doc.contains("options") ? doc.at("options") : json::object();
  allow_keys(opts, "config.options", {"kernel", "capacity", "equilibrium", "sweep", "green", "gauss", "truncation",
                                      "exhaustion", "support", "verify-all"});
  for (const auto& [task, keys] : option_keys())
    if (opts.contains(task)) {
      const json& o = opts.at(task);
      if (!o.is_object()) config_error("config.options." + task, "expected an object");
      const std::set<std::string> allowed(keys.begin(), keys.end());
      for (const auto& [k, v] : o.items())
        if (!allowed.count(k)) config_error("config.options." + task + "." + k, "unknown field");
    }
  cfg.options = opts.contains(cfg.task) ? opts.at(cfg.task) : json::object();

  if (cfg.task == "verify-all") {
    for (const char* k : {"geometry", "regions", "theta"})
      if (doc.contains(k)) config_error(std::string("config.") + k, "not used by verify-all");
    return cfg;
  }

  cfg.dim = static_cast<int>(integer(doc, "config", "dim", 3));
  if (cfg.dim < 2) config_error("config.dim", "dimension must be at least 2");
  cfg.alpha = number(doc, "config", "alpha");
  cfg.sigma = number(doc, "config", "sigma", 1.0);
  if (!(cfg.sigma > 0.0 && cfg.sigma <= 1.0)) config_error("config.sigma", "sigma must lie in (0, 1]");

  if (!doc.contains("geometry")) config_error("config.geometry", "missing geometry");
  const json& geo = doc.at("geometry");
  allow_keys(geo, "config.geometry", {"parts"});
  if (!geo.contains("parts") || !geo.at("parts").is_array() || geo.at("parts").empty())
    config_error("config.geometry.parts", "expected a nonempty array");
  std::mt19937_64 rng(cfg.seed);
  GeometryBuild build;
  const std::filesystem::path base = source.empty() ? std::filesystem::path(".") : source.parent_path();
  for (std::size_t k = 0; k < geo.at("parts").size(); ++k)
    add_part(build, geo.at("parts")[k], "config.geometry.parts[" + std::to_string(k) + "]", cfg.dim, rng, base);
  cfg.parts = build.parts;
  const Eigen::MatrixXd coords = verify::detail::stack(build.blocks);
  PointSet ps = [&]() {
    try {
      PointSet defaults(coords);
      bool explicit_radii = false;
      for (const auto& r : build.radii) explicit_radii = explicit_radii || r.has_value();
      if (!explicit_radii) return defaults;
      std::vector<double> radii = defaults.cell_radii();
      for (std::size_t k = 0; k < build.parts.size(); ++k)
        if (build.radii[k])
          for (Index i = build.parts[k].begin; i < build.parts[k].end; ++i)
            radii[static_cast<std::size_t>(i)] = (*build.radii[k])[static_cast<std::size_t>(i - build.parts[k].begin)];
      return PointSet(coords, radii);
    } catch (const Error& e) {
      config_error("config.geometry", e.what());
    }
  }();

  if (!doc.contains("regions")) config_error("config.regions", "missing regions");
  const json& reg = doc.at("regions");
  allow_keys(reg, "config.regions", {"d", "y", "f"});
  const IndexSet y = reg.contains("y") ? select(reg.at("y"), "config.regions.y", ps, cfg.parts) : IndexSet{};
  const IndexSet d = reg.contains("d") ? select(reg.at("d"), "config.regions.d", ps, cfg.parts)
                                       : set_difference(iota_set(ps.size()), y);
  if (!reg.contains("f")) config_error("config.regions.f", "missing predicate for F");
  const IndexSet f = select(reg.at("f"), "config.regions.f", ps, cfg.parts);

  cfg.theta = Eigen::VectorXd::Zero(ps.size());
  if (doc.contains("theta")) {
    const json& th = doc.at("theta");
    if (!th.is_array()) config_error("config.theta", "expected an array of point masses");
    for (std::size_t k = 0; k < th.size(); ++k) {
      const std::string path = "config.theta[" + std::to_string(k) + "]";
      allow_keys(th[k], path, {"index", "at", "mass"});
      const double mass = number(th[k], path, "mass");
      if (!(mass >= 0.0)) config_error(path + ".mass", "mass must be nonnegative");
      Index at = -1;
      if (th[k].contains("index") == th[k].contains("at")) config_error(path, "give exactly one of index or at");
      if (th[k].contains("index")) {
        const auto i = integer(th[k], path, "index");
        if (i < 0 || i >= ps.size()) config_error(path + ".index", "out of range");
        at = static_cast<Index>(i);
      } else {
        const Eigen::VectorXd x = vector(th[k].at("at"), path + ".at", cfg.dim);
        double best = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < ps.size(); ++i) {
          const double dist = (ps.point(i) - x).norm();
          if (dist < best) {
            best = dist;
            at = i;
          }
        }
      }
      cfg.theta[at] += mass;
    }
  }

  if (f.empty()) fail(ErrorKind::validation, "config.regions.f: selects no point");
  cfg.target = f;
  if (cfg.task == "sweep" && cfg.options.contains("target"))
    cfg.target = select(cfg.options.at("target"), "config.options.sweep.target", ps, cfg.parts);
  const bool riesz_only = cfg.task == "kernel" || cfg.task == "capacity" || cfg.task == "equilibrium" || cfg.task == "sweep";
  try {
    DomainConfig::check_alpha(cfg.alpha, cfg.dim);
    if (!riesz_only) cfg.domain.emplace(ps, d, y, f, cfg.alpha);
  } catch (const Error& e) {
    fail(ErrorKind::validation, std::string("config.regions: ") + e.what());
  }
  cfg.points = std::move(ps);
  return cfg;
}

inline ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, path.string() + ": " + e.what());
  }
  return parse(doc, path);
}

/// An invariant claim with the tolerance it was tested against. Soft entries
/// are reported but do not affect the exit status.
struct Claim {
  std::string name;
  double measured = 0.0;
  std::string relation;
  double tolerance = 0.0;
  bool passed = false;
  bool hard = true;
};

struct Outcome {
  json report = json::object();
  std::vector<io::Table> tables;
  std::vector<std::pair<std::string, std::string>> extra_files;  // relative path, contents
  std::vector<Claim> claims;
  std::vector<Hypothesis> hypotheses;

  bool passed() const {
    for (const auto& c : claims)
      if (c.hard && !c.passed) return false;
    return true;
  }
};

namespace detail {

inline Claim at_most(std::string name, double measured, double tolerance, bool hard = true) {
  return {std::move(name), measured, "<=", tolerance, measured <= tolerance, hard};
}
inline Claim at_least(std::string name, double measured, double tolerance, bool hard = true) {
  return {std::move(name), measured, ">=", tolerance, measured >= tolerance, hard};
}

inline json weights_json(const DiscreteMeasure& mu, const std::function<Index(Index)>& label) {
  json out = json::array();
  for (Index i : mu.support()) out.push_back({{"index", label(i)}, {"weight", mu[i]}});
  return out;
}

inline json balayage_json(const BalayageResult& r, const std::function<Index(Index)>& label) {
  return {{"algorithm", r.algorithm},
          {"mass_in", r.mass_in},
          {"mass_out", r.mass_out},
          {"active_set_size", r.active_set_size},
          {"kkt", {{"equality", r.kkt.equality}, {"inequality", r.kkt.inequality}, {"domination", r.kkt.domination}}},
          {"scale", r.scale},
          {"path_discrepancy", r.path_discrepancy},
          {"warning", r.warning},
          {"swept", weights_json(r.swept, label)}};
}

inline QpOptions qp_options(const ScenarioConfig& cfg) {
  QpOptions q;
  q.kkt_tol = cfg.tolerances.kkt;
  q.entering_tol = cfg.tolerances.entering;
  return q;
}

inline GreenOptions green_options(const ScenarioConfig& cfg) {
  GreenOptions g;
  g.sigma = cfg.sigma;
  g.qp = qp_options(cfg);
  g.path_warning = cfg.tolerances.path_warning;
  return g;
}

inline std::vector<double> radii_option(const json& o, const std::string& path) {
  if (!o.contains("radii") || !o.at("radii").is_array() || o.at("radii").empty())
    config_error(path + ".radii", "expected a nonempty array of radii");
  std::vector<double> r;
  for (const auto& v : o.at("radii")) {
    if (!v.is_number()) config_error(path + ".radii", "expected numbers");
    r.push_back(v.get<double>());
  }
  return r;
}

inline std::vector<IndexSet> truncations(const GreenSystem& gs, const Eigen::VectorXd& center,
                                         const std::vector<double>& radii) {
  std::vector<IndexSet> fam;
  for (double r : radii) {
    IndexSet s;
    for (Index row : gs.f_rows())
      if ((gs.d_point(row) - center).norm() <= r * (1.0 + 1e-12)) s.push_back(row);
    if (s.empty()) fail(ErrorKind::validation, "truncation radius " + io::format_double(r) + " selects no F point");
    fam.push_back(s);
  }
  return fam;
}

inline DiscreteMeasure theta_on_d(const ScenarioConfig& cfg, const GreenSystem& gs) {
  const IndexSet& d = cfg.domain->d();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(gs.size());
  for (Index g = 0; g < cfg.theta.size(); ++g) {
    if (cfg.theta[g] == 0.0) continue;
    if (!std::binary_search(d.begin(), d.end(), g))
      fail(ErrorKind::validation, "theta charges point " + std::to_string(g) + " outside D");
    w[gs.d_row(g)] = cfg.theta[g];
  }
  return DiscreteMeasure(std::move(w));
}

inline json hypotheses_json(const std::vector<Hypothesis>& hs) {
  json out = json::array();
  for (const auto& h : hs) out.push_back({{"name", h.name}, {"status", h.status}, {"detail", h.detail}});
  return out;
}

}  // namespace detail

// ------------------------------------------------------------------- tasks

inline Outcome run_kernel(const ScenarioConfig& cfg) {
  Outcome out;
  const PointSet& ps = *cfg.points;
  const KernelMatrix k = assemble_riesz(ps, cfg.alpha, cfg.sigma);
  out.report["results"] = {{"size", k.size()},
                           {"alpha", k.alpha()},
                           {"dim", k.dim()},
                           {"sigma", cfg.sigma},
                           {"min_pivot", k.min_pivot()},
                           {"min_pairwise_distance", ps.min_pairwise_distance()}};
  double asym = 0.0;
  for (Index j = 0; j < k.size(); ++j)
    for (Index i = j + 1; i < k.size(); ++i) asym = std::max(asym, std::abs(k(i, j) - k(j, i)));
  out.claims.push_back(detail::at_most("exact symmetry", asym, 0.0));
  out.claims.push_back(detail::at_least("min Cholesky pivot", k.min_pivot(), 0.0));
  if (detail::boolean(cfg.options, "config.options.kernel", "export_matrix", true))
    out.extra_files.emplace_back("tables/kernel_matrix.csv", io::matrix_csv(k.entries()));
  io::Table pts{"points", {"index", "cell_radius"}, {}};
  for (int c = 0; c < cfg.dim; ++c) pts.header.push_back("x" + std::to_string(c));
  for (Index i = 0; i < ps.size(); ++i) {
    std::vector<io::Cell> row{static_cast<long long>(i), ps.cell_radius(i)};
    for (int c = 0; c < cfg.dim; ++c) row.emplace_back(ps.coords()(i, c));
    pts.add(std::move(row));
  }
  out.tables.push_back(std::move(pts));
  return out;
}

inline Outcome run_capacity(const ScenarioConfig& cfg) {
  Outcome out;
  const PointSet& ps = *cfg.points;
  const KernelMatrix k = assemble_riesz(ps, cfg.alpha, cfg.sigma);
  const QpOptions qp = detail::qp_options(cfg);
  const CapacityResult cap = capacity(k, cfg.target, qp);
  const EquilibriumResult eq = equilibrium_measure(k, cfg.target, qp);
  const auto id = [](Index i) { return i; };
  bool full = true;
  for (Index i : cfg.target) full = full && std::abs(eq.potential[i] - 1.0) <= 1e-9;
  out.report["results"] = {{"set_size", cfg.target.size()},
                           {"capacity", cap.capacity},
                           {"min_energy", cap.min_energy},
                           {"minimizer", detail::weights_json(cap.minimizer, id)},
                           {"equilibrium_mass", eq.mass},
                           {"equilibrium", detail::weights_json(eq.gamma, id)},
                           {"min_potential_on_set", eq.min_potential_on_set},
                           {"complementarity", eq.complementarity},
                           {"potential_one_on_set", full}};
  out.claims.push_back(detail::at_most("capacity KKT stationarity", cap.qp.stationarity, cfg.tolerances.kkt));
  out.claims.push_back(detail::at_most("capacity KKT feasibility", cap.qp.feasibility, cfg.tolerances.kkt));
  out.claims.push_back(detail::at_least("equilibrium min potential on set", eq.min_potential_on_set, 1.0 - 1e-9));
  out.claims.push_back(detail::at_most("equilibrium complementarity", std::abs(eq.complementarity), 1e-9 * std::max(eq.mass, 1.0)));
  const double rel = std::abs(eq.mass - cap.capacity) / cap.capacity;
  out.claims.push_back(detail::at_most("|gamma(a) - c(a)| / c(a)", rel, 1e-8, full));
  io::Table t{"equilibrium", {"index", "gamma", "potential", "capacity_minimizer"}, {}};
  for (Index i : cfg.target) t.add({static_cast<long long>(i), eq.gamma[i], eq.potential[i], cap.minimizer[i]});
  out.tables.push_back(std::move(t));
  return out;
}

inline Outcome run_sweep(const ScenarioConfig& cfg) {
  Outcome out;
  const PointSet& ps = *cfg.points;
  const KernelMatrix k = assemble_riesz(ps, cfg.alpha, cfg.sigma);
  const DiscreteMeasure xi(cfg.theta);
  if (xi.is_zero()) fail(ErrorKind::validation, "sweep: theta (the measure to sweep) is zero");
  const std::string alg = detail::text(cfg.options, "config.options.sweep", "algorithm", "cone");
  if (alg != "cone" && alg != "direct") detail::config_error("config.options.sweep.algorithm", "expected cone or direct");
  const QpOptions qp = detail::qp_options(cfg);
  const BalayageResult r = sweep(k, xi, cfg.target,
                                 alg == "cone" ? SweepAlgorithm::cone_projection : SweepAlgorithm::direct_with_fallback, qp);
  const auto id = [](Index i) { return i; };
  out.report["results"] = detail::balayage_json(r, id);
  json harmonic = json::array();
  for (Index s : xi.support()) {
    if (std::binary_search(cfg.target.begin(), cfg.target.end(), s)) continue;
    harmonic.push_back({{"source", s}, {"harmonic_measure_at_infinity", harmonic_measure_at_infinity(k, s, cfg.target, qp)}});
  }
  out.report["results"]["harmonic_measure_at_infinity"] = harmonic;
  out.claims.push_back(detail::at_most("mass_out - mass_in", r.mass_out - r.mass_in, 1e-10));
  out.claims.push_back(detail::at_most("KKT equality residual", r.kkt.equality, cfg.tolerances.kkt));
  out.claims.push_back(detail::at_most("KKT inequality residual", r.kkt.inequality, cfg.tolerances.kkt));
  out.claims.push_back(detail::at_most("||swept|| - ||xi||", energy_norm(k, r.swept) - energy_norm(k, xi), 1e-10));
  const BalayageResult again = sweep(k, r.swept, cfg.target, SweepAlgorithm::cone_projection, qp);
  out.claims.push_back(detail::at_most("idempotence", (again.swept.weights() - r.swept.weights()).cwiseAbs().maxCoeff(), 1e-10));
  out.claims.push_back(detail::at_most("off-target domination excess (empirical)", r.kkt.domination, cfg.tolerances.invariant, false));
  const SweepMatrix sm = dirac_sweep_matrix(k, xi.support(), cfg.target, qp);
  const double sup = (sm.superpose(xi, k.size()) - r.swept.weights()).cwiseAbs().maxCoeff();
  out.claims.push_back(detail::at_most("superposition defect / mass_in", sup / r.mass_in, 1e-8, false));
  io::Table t{"swept", {"index", "weight", "potential_swept", "potential_xi"}, {}};
  const Eigen::VectorXd us = potential(k, r.swept), ux = potential(k, xi);
  for (Index i : cfg.target) t.add({static_cast<long long>(i), r.swept[i], us[i], ux[i]});
  out.tables.push_back(std::move(t));
  return out;
}

inline void green_metadata(const GreenSystem& gs, const ScenarioConfig& cfg, Outcome& out) {
  out.report["green"] = {{"alpha", cfg.alpha},
                         {"dim", cfg.dim},
                         {"sigma", cfg.sigma},
                         {"d_size", gs.size()},
                         {"y_size", cfg.domain->y().size()},
                         {"f_size", gs.f_rows().size()},
                         {"asymmetry_residual", gs.asymmetry_residual()},
                         {"min_entry", gs.min_entry()},
                         {"max_excess_over_riesz", gs.max_excess_over_riesz()},
                         {"y_sweep_fallback_columns", gs.dirac_sweep_to_y().fallback_columns},
                         {"min_pivot", gs.green().min_pivot()}};
  out.claims.push_back(detail::at_least("min Green entry", gs.min_entry(), -1e-10));
  out.claims.push_back(detail::at_most("max Green excess over Riesz", gs.max_excess_over_riesz(), 1e-10));
}

inline Outcome run_green(const ScenarioConfig& cfg) {
  Outcome out;
  const GreenSystem gs = build_green(*cfg.domain, detail::green_options(cfg));
  green_metadata(gs, cfg, out);
  const GreenEquilibrium eq = green_equilibrium(gs, gs.f_rows());
  const auto label = [&](Index r) { return gs.global(r); };
  json res = {{"green_capacity", eq.capacity}, {"equilibrium_mass", eq.equilibrium.mass},
              {"equilibrium", detail::weights_json(eq.gamma, label)}};
  // Frostman: gamma already has potential <= 1 on its support.
  const MaxPrincipleReport mp = check_maximum_principles(gs, eq.gamma, eq.gamma);
  res["frostman"] = {{"hypothesis", mp.frostman_hypothesis}, {"excess", mp.frostman_excess}};
  out.claims.push_back(detail::at_most("Frostman excess of the Green equilibrium", mp.frostman_excess, 1e-6, false));
  const DiscreteMeasure theta = detail::theta_on_d(cfg, gs);
  if (!theta.is_zero()) {
    const GreenPotential gp = green_potential(gs, theta);
    res["cross_path_residual"] = gp.cross_path_residual;
    out.claims.push_back(detail::at_most("green_potential cross-path residual", gp.cross_path_residual, cfg.tolerances.invariant));
    const BalayageResult sw = green_sweep(gs, theta, gs.f_rows());
    res["sweep"] = detail::balayage_json(sw, label);
    out.claims.push_back(detail::at_most("green sweep mass_out - mass_in", sw.mass_out - sw.mass_in, 1e-10));
    if (!restrict(theta, gs.omega_rows()).is_zero()) {
      const MassEqualityReport me = mass_equality_probe(gs, theta);
      json defs = json::array();
      for (std::size_t s = 0; s < me.sources.size(); ++s)
        defs.push_back({{"source", gs.global(me.sources[s])}, {"deficiency", me.deficiencies[s]}});
      res["mass_equality"] = {{"delta_mass", me.delta_mass}, {"weighted_deficiency", me.weighted_deficiency}, {"deficiencies", defs}};
    }
    const DiscreteMeasure dom = sw.swept;
    const MaxPrincipleReport dp = check_maximum_principles(gs, dom, theta);
    res["domination"] = {{"hypothesis", dp.domination_hypothesis}, {"excess", dp.domination_excess}};
  }
  out.report["results"] = res;
  if (detail::boolean(cfg.options, "config.options.green", "export_matrices", true)) {
    out.extra_files.emplace_back("tables/green_matrix.csv", io::matrix_csv(gs.green().entries()));
    out.extra_files.emplace_back("tables/y_sweep_matrix.csv", io::matrix_csv(gs.dirac_sweep_to_y().weights));
    out.extra_files.emplace_back("green_metadata.json", out.report["green"].dump(2) + "\n");
  }
  return out;
}

inline Outcome run_gauss(const ScenarioConfig& cfg) {
  Outcome out;
  const GreenSystem gs = build_green(*cfg.domain, detail::green_options(cfg));
  green_metadata(gs, cfg, out);
  const DiscreteMeasure theta = detail::theta_on_d(cfg, gs);
  const ExternalField fld = make_external_field(gs, theta);
  const bool uniq = detail::boolean(cfg.options, "config.options.gauss", "check_uniqueness", true);
  const GaussSolution sol = solve_gauss(gs, fld, {}, uniq);
  const auto label = [&](Index r) { return gs.global(r); };
  const double tol = cfg.tolerances.invariant;
  const double swept_mass = fld.theta_swept.total_mass();
  json res = {{"lambda", detail::weights_json(sol.lambda, label)},
              {"w_value", sol.w_value},
              {"c_constant", sol.c_constant},
              {"multiplier", sol.multiplier},
              {"kkt", {{"lower", sol.kkt.lower}, {"upper", sol.kkt.upper}, {"scale", sol.kkt.scale}, {"cc_gap", sol.kkt.cc_gap}}},
              {"rho", fld.rho},
              {"mass_bound", fld.mass_bound},
              {"theta_mass", theta.total_mass()},
              {"theta_swept_mass", swept_mass},
              {"theta_swept", detail::weights_json(fld.theta_swept, label)}};
  out.claims.push_back(detail::at_most("|lambda(F) - 1|", std::abs(sol.lambda.total_mass() - 1.0), 1e-12));
  out.claims.push_back(detail::at_most("KKT lower residual", sol.kkt.lower, tol));
  out.claims.push_back(detail::at_most("KKT upper residual", sol.kkt.upper, tol));
  out.claims.push_back(detail::at_most("|multiplier - c| (relative)", sol.kkt.cc_gap, tol));
  const double swept_energy = mutual_energy(gs.green(), fld.theta_swept, fld.theta_swept);
  out.claims.push_back(detail::at_least("w + ||theta^F||^2", sol.w_value + swept_energy, -tol));
  out.claims.push_back(detail::at_least("w + 2M", sol.w_value + 2.0 * fld.mass_bound, -tol));
  out.claims.push_back(detail::at_most("completed-square identity (relative)", completed_square_gap(gs, fld, sol.lambda), 1e-9));
  out.claims.push_back(detail::at_most("I_g(theta, lambda) - M", mutual_energy(gs.green(), fld.theta, sol.lambda) - fld.mass_bound, tol));
  if (uniq) out.claims.push_back(detail::at_most("uniqueness under reversed order", sol.uniqueness_gap, 1e-10));

  const IndexSet& fr = gs.f_rows();
  const bool swept_full = fld.theta_swept.support().size() == fr.size();
  if (swept_mass <= 1.0) {
    const GaussSolution ex = explicit_solution(gs, fld);
    const bool gamma_full = green_equilibrium(gs, fr).gamma.support().size() == fr.size();
    const double gap = energy_norm(gs.green(), Eigen::VectorXd(sol.lambda.weights() - ex.lambda.weights()));
    const double norm = energy_norm(gs.green(), sol.lambda);
    res["explicit"] = {{"c_constant", ex.c_constant}, {"green_capacity", ex.green_capacity.value_or(0.0)},
                       {"lambda_gap", gap}, {"full_supports", swept_full && gamma_full}};
    out.hypotheses.push_back({"theta^F(F) <= 1", "checked", io::format_double(swept_mass)});
    out.hypotheses.push_back({"full discrete supports of theta^F and gamma_F", swept_full && gamma_full ? "checked" : "violated",
                              "representation is exact only on full supports"});
    out.claims.push_back(detail::at_most("||l_qp - l_formula||_g / ||l_qp||_g", gap / std::max(norm, 1e-300), 1e-6, swept_full && gamma_full));
    out.claims.push_back(detail::at_most("|c_qp - c_formula| / max(1, |c|)",
                                         std::abs(sol.c_constant - ex.c_constant) / std::max(1.0, std::abs(ex.c_constant)), 1e-6,
                                         swept_full && gamma_full));
  } else {
    out.hypotheses.push_back({"theta^F(F) <= 1", "violated", io::format_double(swept_mass)});
  }
  const DualReport dual = dual_check(gs, fld);
  res["dual"] = {{"status", dual.status}, {"w_gap", dual.w_gap}, {"lambda_gap", dual.lambda_gap}, {"c_gap", dual.c_gap}};
  if (dual.status == "ok") {
    out.claims.push_back(detail::at_most("duality |w_f - w_dual|", dual.w_gap, 1e-8, swept_full));
    out.claims.push_back(detail::at_most("duality ||l_f - l_dual||_g", dual.lambda_gap, 1e-8, swept_full));
  }
  // Candidates: lambda itself and lambda plus a bump at every tenth F point.
  std::vector<DiscreteMeasure> cands{sol.lambda};
  for (std::size_t k = 0; k < fr.size(); k += std::max<std::size_t>(1, fr.size() / 10)) {
    DiscreteMeasure bump = sol.lambda;
    bump.set(fr[k], bump[fr[k]] + 0.05);
    cands.push_back(bump);
  }
  const LambdaClassReport lc = lambda_class_characterizations(gs, fld, sol, cands);
  res["lambda_class"] = {{"candidates", cands.size()}, {"minimal_potential", lc.minimal_potential}, {"minimal_norm", lc.minimal_norm}};
  out.claims.push_back({"lambda minimal potential in its class", lc.minimal_potential ? 1.0 : 0.0, "==", 1.0, lc.minimal_potential, true});
  out.claims.push_back({"lambda minimal norm in its class", lc.minimal_norm ? 1.0 : 0.0, "==", 1.0, lc.minimal_norm, true});
  out.report["results"] = res;

  io::Table t{"gauss_solution", {"point", "region", "lambda", "theta_swept", "weighted_potential", "field"}, {}};
  for (Index r = 0; r < gs.size(); ++r) {
    const bool in_f = std::binary_search(fr.begin(), fr.end(), r);
    t.add({static_cast<long long>(gs.global(r)), std::string(in_f ? "F" : "Omega"), sol.lambda[r], fld.theta_swept[r],
           sol.weighted_potential[r], fld.field_values[r]});
  }
  out.tables.push_back(std::move(t));
  if (cfg.plots) {
    Eigen::MatrixXd xy(static_cast<Index>(fr.size()), 2);
    Eigen::VectorXd val(static_cast<Index>(fr.size()));
    for (std::size_t k = 0; k < fr.size(); ++k) {
      const Eigen::VectorXd p = gs.d_point(fr[k]);
      xy.row(static_cast<Index>(k)) << p[0], p[1];
      val[static_cast<Index>(k)] = sol.lambda[fr[k]];
    }
    out.extra_files.emplace_back("plots/lambda_heat_map.svg", io::heat_map_svg("lambda on F (x-y projection)", xy, val));
    // Weighted potential against distance from the charge centroid.
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(cfg.dim);
    for (Index r : theta.support()) centroid += theta[r] * gs.d_point(r);
    centroid /= theta.total_mass();
    std::vector<std::pair<double, double>> pts;
    for (Index r : fr) pts.emplace_back((gs.d_point(r) - centroid).norm(), sol.weighted_potential[r]);
    std::sort(pts.begin(), pts.end());
    io::Series s{"U^lambda_g + f on F", {}, {}}, c{"c", {}, {}};
    for (const auto& [x, y] : pts) {
      s.x.push_back(x);
      s.y.push_back(y);
      c.x.push_back(x);
      c.y.push_back(sol.c_constant);
    }
    out.extra_files.emplace_back("plots/weighted_potential.svg",
                                 io::line_plot_svg("weighted potential on F", "distance from charge centroid", "value", {s, c}));
  }
  out.hypotheses.insert(out.hypotheses.end(), {{"F closed in D", "checked", "finite index set"}});
  return out;
}

inline Outcome run_truncation(const ScenarioConfig& cfg) {
  Outcome out;
  const GreenSystem gs = build_green(*cfg.domain, detail::green_options(cfg));
  green_metadata(gs, cfg, out);
  const ExternalField fld = make_external_field(gs, detail::theta_on_d(cfg, gs));
  const std::string path = "config.options.truncation";
  const Eigen::VectorXd center = detail::vector_or(cfg.options, path, "center", cfg.dim);
  const auto family = detail::truncations(gs, center, detail::radii_option(cfg.options, path));
  const SweepReport rep = truncation_sweep(gs, fld, family);
  out.report["results"] = {{"direction", rep.direction},
                           {"w_monotone", rep.w_monotone},
                           {"c_hypothesis", rep.c_hypothesis},
                           {"c_monotone", rep.c_monotone},
                           {"parallelogram_ok", rep.parallelogram_ok},
                           {"worst_parallelogram_slack", rep.worst_parallelogram_slack},
                           {"cauchy_decreasing", rep.cauchy_decreasing},
                           {"final_gap", rep.final_gap}};
  out.claims.push_back({"w monotone", rep.w_monotone ? 1.0 : 0.0, "==", 1.0, rep.w_monotone, true});
  if (rep.c_hypothesis) out.claims.push_back({"c monotone", rep.c_monotone ? 1.0 : 0.0, "==", 1.0, rep.c_monotone, true});
  out.claims.push_back(detail::at_most("parallelogram slack", rep.worst_parallelogram_slack, rep.tol_parallelogram));
  out.claims.push_back({"Cauchy distances decreasing", rep.cauchy_decreasing ? 1.0 : 0.0, "==", 1.0, rep.cauchy_decreasing, false});
  out.hypotheses.push_back({"theta^F(D) <= 1 for c monotonicity", rep.c_hypothesis ? "checked" : "violated", ""});
  io::Table t{"truncation", {"stage", "size", "w", "c", "theta_swept_mass", "lambda_mass", "cauchy", "probe_gap", "kkt"}, {}};
  io::Series sw{"w", {}, {}}, sc{"c", {}, {}};
  for (std::size_t j = 0; j < rep.stages.size(); ++j) {
    const auto& s = rep.stages[j];
    t.add({static_cast<long long>(j), static_cast<long long>(s.size), s.w, s.c, s.theta_swept_mass, s.lambda_mass,
           s.cauchy_to_reference, s.probe_gap, s.kkt});
    sw.x.push_back(static_cast<double>(s.size));
    sw.y.push_back(s.w);
    sc.x.push_back(static_cast<double>(s.size));
    sc.y.push_back(s.c);
  }
  out.tables.push_back(std::move(t));
  if (cfg.plots)
    out.extra_files.emplace_back("plots/truncation.svg", io::line_plot_svg("truncation sweep", "|F_j|", "value", {sw, sc}));
  return out;
}

inline Outcome run_exhaustion(const ScenarioConfig& cfg) {
  Outcome out;
  const GreenSystem gs = build_green(*cfg.domain, detail::green_options(cfg));
  green_metadata(gs, cfg, out);
  const ExternalField fld = make_external_field(gs, detail::theta_on_d(cfg, gs));
  const std::string path = "config.options.exhaustion";
  const Eigen::VectorXd center = detail::vector_or(cfg.options, path, "center", cfg.dim);
  const std::vector<double> radii = detail::radii_option(cfg.options, path);
  const double window = detail::number(cfg.options, path, "window_radius");
  const auto family = detail::truncations(gs, center, radii);
  const ExhaustionReport rep = exhaustion_mass_probe(gs, fld, family, center, window);
  out.hypotheses = rep.hypotheses;
  out.report["results"] = {{"theta_mass", rep.theta_mass}, {"c_xi_estimate", rep.c_xi_estimate}};
  io::Table t{"exhaustion",
              {"stage", "truncation_radius", "size", "theta_swept_mass", "w", "c", "gap_to_swept", "window_mass", "support_radius"},
              {}};
  io::Series wm{"window mass", {}, {}}, gap{"||lambda_j - theta^F_j||_g", {}, {}};
  for (std::size_t j = 0; j < rep.stages.size(); ++j) {
    const auto& s = rep.stages[j];
    t.add({static_cast<long long>(j), radii[j], static_cast<long long>(s.size), s.theta_swept_mass, s.w, s.c,
           s.gap_to_swept, s.window_mass, s.support_radius});
    wm.x.push_back(radii[j]);
    wm.y.push_back(s.window_mass);
    gap.x.push_back(radii[j]);
    gap.y.push_back(s.gap_to_swept);
  }
  out.tables.push_back(std::move(t));
  if (cfg.plots)
    out.extra_files.emplace_back("plots/exhaustion.svg",
                                 io::line_plot_svg("exhaustion", "truncation radius", "value", {wm, gap}));
  return out;
}

inline Outcome run_support(const ScenarioConfig& cfg) {
  Outcome out;
  const GreenSystem gs = build_green(*cfg.domain, detail::green_options(cfg));
  green_metadata(gs, cfg, out);
  const ExternalField fld = make_external_field(gs, detail::theta_on_d(cfg, gs));
  const GaussSolution sol = solve_gauss(gs, fld, {}, false);
  const double factor = detail::number(cfg.options, "config.options.support", "adjacency_factor", 1.5);
  const SupportReport rep = support_descriptor(gs, sol, factor);
  out.hypotheses = rep.hypotheses;
  out.report["results"] = {{"alpha", cfg.alpha},
                           {"adjacency_factor", rep.adjacency_factor},
                           {"boundary_points", rep.boundary_rows.size()},
                           {"boundary_fraction", rep.boundary_fraction},
                           {"interior_fraction", rep.interior_fraction},
                           {"support_size", rep.support_size},
                           {"f_size", gs.f_rows().size()},
                           {"omega_connected", rep.omega_connected},
                           {"c_constant", sol.c_constant}};
  out.claims.push_back(detail::at_most("KKT lower residual", sol.kkt.lower, cfg.tolerances.invariant));
  out.claims.push_back(detail::at_most("KKT upper residual", sol.kkt.upper, cfg.tolerances.invariant));
  io::Table t{"support", {"point", "lambda", "boundary"}, {}};
  const IndexSet& br = rep.boundary_rows;
  for (Index r : gs.f_rows())
    t.add({static_cast<long long>(gs.global(r)), sol.lambda[r],
           static_cast<long long>(std::binary_search(br.begin(), br.end(), r))});
  out.tables.push_back(std::move(t));
  if (cfg.plots) {
    // Slice |z| <= half the minimal spacing through the first two coordinates.
    const double h = cfg.domain->points().min_pairwise_distance();
    std::vector<Index> slice;
    for (Index r : gs.f_rows())
      if (cfg.dim < 3 || std::abs(gs.d_point(r)[2]) <= 0.5 * h) slice.push_back(r);
    if (!slice.empty()) {
      Eigen::MatrixXd xy(static_cast<Index>(slice.size()), 2);
      Eigen::VectorXd val(static_cast<Index>(slice.size()));
      for (std::size_t k = 0; k < slice.size(); ++k) {
        const Eigen::VectorXd p = gs.d_point(slice[k]);
        xy.row(static_cast<Index>(k)) << p[0], p[1];
        val[static_cast<Index>(k)] = sol.lambda[slice[k]];
      }
      out.extra_files.emplace_back("plots/support_slice.svg", io::heat_map_svg("lambda, central slice", xy, val));
    }
  }
  return out;
}

inline Outcome run_verify_all(const ScenarioConfig& cfg, std::ostream* progress) {
  Outcome out;
  verify::Options opt;
  opt.seed = cfg.seed;
  opt.filter = cfg.filter;
  const auto results = verify::run_all(opt, [&](const verify::Criterion& c) {
    if (progress) *progress << "criterion " << c.id << " " << (c.passed() ? "pass" : "FAIL") << "\n" << std::flush;
  });
  json rows = json::array();
  for (const auto& c : results) {
    json checks = json::array();
    for (const auto& k : c.checks)
      checks.push_back({{"check", k.label}, {"measured", k.measured}, {"relation", k.relation}, {"tolerance", k.threshold},
                        {"passed", k.passed}});
    rows.push_back({{"criterion", c.id}, {"name", c.name}, {"passed", c.passed()}, {"seconds", c.seconds},
                    {"runtime_limit", c.runtime_limit}, {"note", c.note}, {"checks", checks}});
    out.claims.push_back({"criterion " + std::to_string(c.id) + ": " + c.name, c.headline().measured, c.headline().relation,
                          c.headline().threshold, c.passed(), true});
  }
  out.report["results"] = {{"seed", cfg.seed}, {"criteria", rows}};
  for (auto& f : verify::csv_files(results)) out.extra_files.emplace_back("tables/" + f.first, f.second);
  return out;
}

/// Runs the configured task; files are written only after the task finishes.
inline Outcome execute(const ScenarioConfig& cfg, std::ostream* progress = nullptr) {
  if (cfg.task == "kernel") return run_kernel(cfg);
  if (cfg.task == "capacity" || cfg.task == "equilibrium") return run_capacity(cfg);
  if (cfg.task == "sweep") return run_sweep(cfg);
  if (cfg.task == "green") return run_green(cfg);
  if (cfg.task == "gauss") return run_gauss(cfg);
  if (cfg.task == "truncation") return run_truncation(cfg);
  if (cfg.task == "exhaustion") return run_exhaustion(cfg);
  if (cfg.task == "support") return run_support(cfg);
  return run_verify_all(cfg, progress);
}

inline json claims_json(const std::vector<Claim>& claims) {
  json out = json::array();
  for (const auto& c : claims)
    out.push_back({{"name", c.name}, {"measured", c.measured}, {"relation", c.relation}, {"tolerance", c.tolerance},
                   {"passed", c.passed}, {"hard", c.hard}});
  return out;
}

inline json full_report(const ScenarioConfig& cfg, const Outcome& out) {
  json r;
  r["version"] = report_version;
  r["task"] = cfg.task;
  r["seed"] = cfg.seed;
  r["passed"] = out.passed();
  for (const auto& [k, v] : out.report.items()) r[k] = v;
  r["invariants"] = claims_json(out.claims);
  r["hypotheses"] = detail::hypotheses_json(out.hypotheses);
  r["config"] = cfg.echo;
  return r;
}

inline void write_outputs(const ScenarioConfig& cfg, const Outcome& out) {
  const std::filesystem::path dir = cfg.output_dir;
  io::write_text(dir / "report.json", full_report(cfg, out).dump(2) + "\n");
  for (const auto& t : out.tables) io::write_text(dir / "tables" / (t.name + ".csv"), t.to_csv());
  for (const auto& [rel, text] : out.extra_files) {
    if (!cfg.plots && rel.rfind("plots/", 0) == 0) continue;
    io::write_text(dir / rel, text);
  }
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::validation: return 3;
    case ErrorKind::solver: return 4;
    case ErrorKind::invariant: return 5;
  }
  return 1;
}

}  // namespace rieszgreen::scenario
