#include "lwb/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lwb/census/census.hpp"
#include "lwb/error.hpp"
#include "lwb/excursion/excursion.hpp"
#include "lwb/harness/verify.hpp"
#include "lwb/harnack/harnack.hpp"
#include "lwb/history/history.hpp"
#include "lwb/localtime/local_time.hpp"
#include "lwb/potential/estimates.hpp"
#include "lwb/potential/green.hpp"
#include "lwb/potential/potential_kernel.hpp"
#include "lwb/walk/presets.hpp"

#ifndef LWB_VERSION
#define LWB_VERSION "dev"
#endif

namespace lwb::harness {

using nlohmann::json;
using walk::Point;

// ---- config -----------------------------------------------------------------

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> k{"potential", "green",     "hitprob", "skip",    "harnack", "excursions",
                                          "histories", "localtime", "census",  "etratio", "timeexp", "verify"};
  return k;
}

bool is_stochastic(const std::string& kind) {
  return kind == "excursions" || kind == "localtime" || kind == "census" || kind == "etratio" || kind == "timeexp";
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["law"] = c.law;
  j["law_file"] = c.law_file;
  j["kind"] = c.kind;
  j["params"] = c.params;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["replicas"] = c.replicas;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["format"] = c.format;
  j["tolerances"] = c.tolerances;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  static const std::vector<std::string> fields{"schema", "law",    "law_file", "kind",   "params",    "seed",
                                               "replicas", "threads", "out",   "format", "tolerances"};
  for (const auto& [k, v] : j.items())
    if (std::find(fields.begin(), fields.end(), k) == fields.end())
      throw Error(ErrorCode::ConfigInvalid, "unknown config field '" + k + "'");
  ExperimentConfig c;
  try {
    c.schema = j.value("schema", kSchemaVersion);
    c.law = j.value("law", c.law);
    c.law_file = j.value("law_file", false);
    c.kind = j.at("kind").get<std::string>();
    c.params = j.value("params", json::object());
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    c.replicas = j.value("replicas", std::uint64_t{0});
    c.threads = j.value("threads", 1);
    c.out = j.value("out", std::string());
    c.format = j.value("format", c.format);
    c.tolerances = j.value("tolerances", std::map<std::string, double>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  if (c.schema != kSchemaVersion) throw Error(ErrorCode::ConfigInvalid, "unsupported schema version");
  if (!c.params.is_object()) throw Error(ErrorCode::ConfigInvalid, "params must be an object");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + path);
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

void validate(const ExperimentConfig& c) {
  const auto& k = known_kinds();
  if (std::find(k.begin(), k.end(), c.kind) == k.end())
    throw Error(ErrorCode::ConfigInvalid, "unknown experiment kind '" + c.kind + "'");
  if (c.format != "csv" && c.format != "json") throw Error(ErrorCode::ConfigInvalid, "format must be csv or json");
  if (c.threads < 1) throw Error(ErrorCode::ConfigInvalid, "threads must be at least 1");
  if (is_stochastic(c.kind) && !c.seed) throw Error(ErrorCode::ConfigInvalid, "a seed is required for " + c.kind);
}

walk::JumpLaw resolve_law(const ExperimentConfig& c) {
  return c.law_file ? walk::load_law_file(c.law) : walk::preset(c.law);
}

// ---- tables -----------------------------------------------------------------

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw Error(ErrorCode::ConfigInvalid, "row width does not match the columns");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  std::ostringstream o;
  for (std::size_t i = 0; i < columns.size(); ++i) o << (i ? "," : "") << cell(columns[i]);
  o << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << cell(r[i]);
    o << "\n";
  }
  return o.str();
}

json Table::to_json() const {
  json j;
  j["columns"] = columns;
  j["rows"] = rows;
  return j;
}

std::string version_tag() { return LWB_VERSION; }

json ResultEnvelope::to_json() const {
  json j;
  j["config"] = harness::to_json(config);
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["metadata"] = metadata;
  j["payload"] = payload.to_json();
  return j;
}

std::string ResultEnvelope::render() const {
  return config.format == "json" ? to_json().dump(2) + "\n" : payload.to_csv();
}

// ---- kinds ------------------------------------------------------------------

namespace {

template <class T>
T param(const json& p, const char* key, T fallback) {
  try {
    return p.contains(key) ? p.at(key).get<T>() : fallback;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("parameter '") + key + "': " + e.what());
  }
}

Point point_param(const json& p, const char* key, Point fallback) {
  const auto v = param<std::vector<std::int64_t>>(p, key, {fallback.x, fallback.y});
  if (v.size() != 2) throw Error(ErrorCode::ConfigInvalid, std::string("parameter '") + key + "' needs two coordinates");
  return {v[0], v[1]};
}

std::uint64_t reps(const ExperimentConfig& c, std::uint64_t fallback) { return c.replicas ? c.replicas : fallback; }

void run_potential(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const auto box = param<std::int64_t>(c.params, "box", 128);
  potential::PotentialKernelOptions o;
  o.n_cut = param<int>(c.params, "n_cut", 0);
  o.log_coefficient = param<double>(c.params, "log_coefficient", 0.0);
  const auto pk = potential::potential_kernel(law, box, o);
  env.metadata["k_hat"] = pk.k_hat;
  env.metadata["log_coefficient"] = pk.log_coefficient;
  env.metadata["shell_max_deviation"] = pk.shell_max_deviation;
  env.metadata["shell_free_slope"] = pk.shell_free_slope;
  env.metadata["harmonicity_residual"] = pk.harmonicity_residual(law, static_cast<double>(box) - law.range());
  env.metadata["truncation"] = {{"n_cut", pk.truncation.n_cut},
                                {"grid_half", pk.truncation.grid_half},
                                {"mass_loss", pk.truncation.mass_loss},
                                {"tail_method", pk.truncation.tail_method}};
  env.payload.columns = {"x", "y", "a"};
  const auto step = std::max<std::int64_t>(1, param<std::int64_t>(c.params, "stride", 1));
  for (std::int64_t x = 0; x <= box; x += step) env.payload.add({fmt(x), fmt(std::int64_t{0}), fmt(pk({x, 0}))});
}

void run_green(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  env.payload.columns = {"radius", "G00", "residual", "method"};
  for (double n : param<std::vector<double>>(c.params, "radii", {50, 100, 200})) {
    potential::SolveReport rep;
    const double g = potential::green_at_origin(law, n, &rep);
    env.payload.add({fmt(n), fmt(g), fmt(rep.residual), rep.method});
  }
}

void run_hitprob(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const double r = param<double>(c.params, "r", 10), R = param<double>(c.params, "R", 100);
  const auto dir = param<std::string>(c.params, "direction", "outward") == "inward" ? potential::Crossing::Inward
                                                                                    : potential::Crossing::Outward;
  const auto prof = potential::crossing_profile(law, r, R, dir);
  env.metadata["residual"] = prof.report.residual;
  env.metadata["method"] = prof.report.method;
  env.payload.columns = {"x", "y", "probability", "formula"};
  for (std::int64_t x = static_cast<std::int64_t>(std::ceil(r)); static_cast<double>(x) < R; ++x) {
    const Point p{x, 0};
    env.payload.add({fmt(x), fmt(std::int64_t{0}), fmt(prof.at(p)), fmt(potential::crossing_formula(r, R, p, dir))});
  }
}

void run_skip(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const double n = param<double>(c.params, "n", 20), s = param<double>(c.params, "band", 2);
  const auto side =
      param<std::string>(c.params, "side", "interior") == "exterior" ? potential::Side::Exterior : potential::Side::Interior;
  potential::SkipOptions o;
  o.truncation_factor = param<double>(c.params, "truncation_factor", o.truncation_factor);
  o.truncation_budget = param<double>(c.params, "truncation_budget", o.truncation_budget);
  const auto res = potential::band_skip_probability(law, n, s, side, o);
  env.metadata["residual"] = res.report.residual;
  env.payload.columns = {"n", "band", "probability", "argmax_x", "argmax_y", "lower", "gap", "truncation_radius"};
  env.payload.add({fmt(n), fmt(s), fmt(res.probability), fmt(res.argmax.x), fmt(res.argmax.y), fmt(res.lower),
                   fmt(res.gap), fmt(res.truncation_radius)});
}

void run_harnack(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const double r = param<double>(c.params, "r", 5), R = param<double>(c.params, "R", 100);
  const double band = param<double>(c.params, "band", 2);
  const bool exterior = param<std::string>(c.params, "side", "interior") == "exterior";
  const auto rep = exterior ? harnack::exterior_harnack_ratio(law, r, R, band, param<double>(c.params, "K", 2 * R))
                            : harnack::interior_harnack_ratio(law, r, R, band);
  env.metadata["grid"] = rep.grid;
  env.metadata["gap"] = rep.gap;
  env.payload.columns = {"side", "r", "R", "band", "max_ratio", "min_ratio"};
  env.payload.add({rep.side, fmt(r), fmt(R), fmt(band), fmt(rep.max_ratio), fmt(rep.min_ratio)});
}

void run_excursions(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const auto ladder = excursion::geometric_ladder(param<double>(c.params, "r0", 100), param<double>(c.params, "lambda", 5),
                                                  param<int>(c.params, "n", 2), param<double>(c.params, "band", 2));
  const double a = param<double>(c.params, "a", 0.5);
  const auto s = excursion::simulate_excursions(law, ladder, excursion::band_start(ladder), reps(c, 1000), *c.seed,
                                                excursion::success_predicate(a, ladder.n()));
  env.metadata["seed"] = *c.seed;
  env.metadata["success_rate"] = s.success_rate;
  env.metadata["skip_rate"] = s.skip_rate;
  env.payload.columns = {"replica", "skipped", "success"};
  for (int k = 1; k <= ladder.n(); ++k) env.payload.columns.push_back("N" + std::to_string(k));
  for (std::size_t i = 0; i < s.replicas.size(); ++i) {
    const auto& r = s.replicas[i];
    std::vector<std::string> row{fmt(std::uint64_t{i}), fmt(int(r.skipped)), fmt(int(r.success))};
    for (int k = 1; k <= ladder.n(); ++k) row.push_back(fmt(r.counts[static_cast<std::size_t>(k)]));
    env.payload.add(std::move(row));
  }
}

void run_histories(const ExperimentConfig& c, ResultEnvelope& env) {
  const double a = param<double>(c.params, "a", 0.5);
  const auto what = param<std::string>(c.params, "what", "ladder");
  if (what == "count") {
    const auto m = param<std::vector<std::uint64_t>>(c.params, "m", {1});
    const auto spec = history::history_spec(static_cast<int>(m.size()) + 1, m);
    env.payload.columns = {"n", "length", "count"};
    env.payload.add({fmt(spec.n), fmt(spec.length()), history::count_histories(spec).str()});
  } else if (what == "stirling") {
    const auto s = history::stirling_sweep(a, param<int>(c.params, "k_lo", 10), param<int>(c.params, "k_hi", 200));
    env.payload.columns = {"a", "min_ratio", "argmin_k", "max_ratio", "argmax_k", "C", "points"};
    env.payload.add({fmt(a), fmt(s.min_ratio), fmt(s.argmin_k), fmt(s.max_ratio), fmt(s.argmax_k), fmt(s.C),
                     fmt(s.points)});
  } else if (what == "ladder") {
    env.payload.columns = {"a", "n", "value", "log_value", "delta1", "delta2", "relative_width", "bits"};
    for (int n : param<std::vector<int>>(c.params, "n", {3, 5, 10, 20})) {
      const auto r = history::ladder_sum(a, n);
      env.payload.add({fmt(a), fmt(n), r.value, fmt(r.log_value), fmt(r.delta1), fmt(r.delta2), fmt(r.relative_width),
                       fmt(r.precision_bits)});
    }
  } else {
    throw Error(ErrorCode::ConfigInvalid, "histories 'what' must be count, stirling or ladder");
  }
}

void run_localtime(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  const double R = param<double>(c.params, "radius", 30);
  const Point x0 = point_param(c.params, "x0", {5, 0});
  const auto lt = localtime::local_time_law(law, R, x0);
  const auto samples = localtime::simulate_local_times(law, R, x0, reps(c, 100000), *c.seed);
  const auto cs = localtime::chi_square_test(lt, samples);
  env.metadata["seed"] = *c.seed;
  env.metadata["h"] = lt.h;
  env.metadata["g"] = lt.g;
  env.metadata["chi_square"] = {{"statistic", cs.statistic}, {"dof", cs.dof}, {"p_value", cs.p_value}};
  env.payload.columns = {"bin_lo", "observed", "expected"};
  for (std::size_t i = 0; i < cs.bin_lo.size(); ++i)
    env.payload.add({fmt(cs.bin_lo[i]), fmt(cs.observed[i]), fmt(cs.expected[i])});
}

void run_census_kind(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  census::CensusConfig cc;
  cc.mode = param<std::string>(c.params, "mode", "exit") == "time" ? census::Mode::FixedTime : census::Mode::ExitDisk;
  cc.n = param<double>(c.params, "n", param<double>(c.params, "radius", 1000));
  cc.thresholds = param<std::vector<double>>(c.params, "thresholds", {param<double>(c.params, "a", 0.5)});
  cc.replicas = reps(c, 1);
  cc.seed = *c.seed;
  cc.threads = c.threads;
  env.metadata["seed"] = *c.seed;
  env.payload.columns = {"replica", "threshold", "count", "l_star", "top_x", "top_y", "distinct_sites", "steps"};
  for (const auto& r : census::run_census(law, cc))
    env.payload.add({fmt(r.replica), fmt(r.threshold), fmt(r.count), fmt(std::uint64_t{r.l_star}), fmt(r.top_site.x),
                     fmt(r.top_site.y), fmt(r.distinct_sites), fmt(r.steps)});
}

void run_etratio(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  std::vector<std::uint64_t> cps;
  for (double v : param<std::vector<double>>(c.params, "checkpoints", {1e4, 1e5, 1e6}))
    cps.push_back(static_cast<std::uint64_t>(std::llround(v)));
  const auto s = census::et_ratio_series(law, cps, reps(c, 50), *c.seed, c.threads);
  env.metadata["seed"] = *c.seed;
  env.payload.columns = {"n", "median", "q1", "q3"};
  for (std::size_t j = 0; j < cps.size(); ++j)
    env.payload.add({fmt(cps[j]), fmt(s.median[j]), fmt(s.q1[j]), fmt(s.q3[j])});
}

void run_timeexp(const ExperimentConfig& c, ResultEnvelope& env) {
  const auto law = resolve_law(c);
  env.metadata["seed"] = *c.seed;
  env.payload.columns = {"radius", "median"};
  for (const auto& t :
       census::time_exponent(law, param<std::vector<double>>(c.params, "radii", {50, 500}), reps(c, 200), *c.seed, c.threads))
    env.payload.add({fmt(t.radius), fmt(t.median)});
}

void run_verify(const ExperimentConfig& c, ResultEnvelope& env, std::ostream* log) {
  VerifyOptions o;
  o.progress = log;
  o.profile = parse_profile(param<std::string>(c.params, "profile", "quick"));
  o.threads = c.threads;
  o.only = param<std::vector<int>>(c.params, "only", {});
  const auto rep = verify_all(o);
  // timings go to the metadata so the table is reproducible
  env.payload.columns = {"id", "name", "verdict", "measured", "band", "note"};
  for (const auto& r : rep.criteria) {
    env.payload.add(
        {fmt(r.id), r.name, r.passed ? "PASS" : r.known_failure ? "FAIL-known" : "FAIL", r.measured, r.band, r.note});
    env.metadata["seconds"][std::to_string(r.id)] = r.seconds;
  }
  env.passed = rep.all_passed();
  env.metadata["only_known_failures"] = rep.only_known_failures();
}

}  // namespace

ResultEnvelope run_experiment(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  ResultEnvelope env;
  env.config = c;
  env.version = version_tag();
  if (c.kind == "potential") run_potential(c, env);
  else if (c.kind == "green") run_green(c, env);
  else if (c.kind == "hitprob") run_hitprob(c, env);
  else if (c.kind == "skip") run_skip(c, env);
  else if (c.kind == "harnack") run_harnack(c, env);
  else if (c.kind == "excursions") run_excursions(c, env);
  else if (c.kind == "histories") run_histories(c, env);
  else if (c.kind == "localtime") run_localtime(c, env);
  else if (c.kind == "census") run_census_kind(c, env);
  else if (c.kind == "etratio") run_etratio(c, env);
  else if (c.kind == "timeexp") run_timeexp(c, env);
  else run_verify(c, env, log);
  env.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return env;
}

}  // namespace lwb::harness
