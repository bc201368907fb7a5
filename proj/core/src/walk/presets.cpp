#include "lwb/walk/presets.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "lwb/error.hpp"

namespace lwb::walk {

const PowerSums& power_sums(double exponent, double r_max) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, PowerSums> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({exponent, r_max});
  if (it != cache.end()) return it->second;

  PowerSums ps;
  const auto m = static_cast<std::int64_t>(std::floor(r_max));
  const double rmax2 = r_max * r_max;
  ps.ring_mass.assign(static_cast<std::size_t>(m) + 1, 0.0);
  // One quadrant with multiplicities; long double keeps the 1e8-term sums tight.
  long double se = 0.0L, se2 = 0.0L;
  for (std::int64_t x = 0; x <= m; ++x) {
    for (std::int64_t y = 0; y <= m; ++y) {
      const auto r2 = static_cast<double>(x * x + y * y);
      if (r2 > rmax2) break;
      if (r2 < 1.0) continue;
      const int mult = (x > 0 && y > 0) ? 4 : 2;
      const double w = exponent == 6.0 ? 1.0 / (r2 * r2 * r2) : std::pow(r2, -exponent / 2.0);
      se += mult * static_cast<long double>(w);
      se2 += mult * static_cast<long double>(w * r2);
      ps.ring_mass[static_cast<std::size_t>(std::floor(std::sqrt(r2)))] += mult * w;
    }
  }
  ps.s_e = static_cast<double>(se);
  ps.s_e2 = static_cast<double>(se2);
  return cache.emplace(std::make_pair(exponent, r_max), std::move(ps)).first->second;
}

JumpLaw id_a() {
  std::vector<JumpEntry> e{{{0, 0}, 0.2}};
  for (std::int64_t k : {1, 2})
    for (Point d : {Point{k, 0}, Point{-k, 0}, Point{0, k}, Point{0, -k}}) e.push_back({d, 0.1});
  return JumpLaw(std::move(e), std::nullopt, "id-a");
}

JumpLaw srw() {
  return JumpLaw({{{1, 0}, 0.25}, {{-1, 0}, 0.25}, {{0, 1}, 0.25}, {{0, -1}, 0.25}}, std::nullopt,
                 "srw");
}

JumpLaw lazy_srw(double hold) {
  if (!(hold > 0.0 && hold < 1.0)) throw Error(ErrorCode::ConfigInvalid, "lazy hold must be in (0,1)");
  const double q = (1.0 - hold) / 4.0;
  return JumpLaw({{{0, 0}, hold}, {{1, 0}, q}, {{-1, 0}, q}, {{0, 1}, q}, {{0, -1}, q}}, std::nullopt,
                 "lazy-srw");
}

JumpLaw heavy(double beta, double w) {
  if (!(beta > 0.0 && beta < 0.5))
    throw Error(ErrorCode::ConfigInvalid, "heavy preset needs beta in (0, 1/2)");
  const PowerTail shape{1.0, 6.0, 1.0, 1e4};
  const auto& ps = power_sums(shape.exponent, shape.r_max);
  const double c = 1.0 / ps.s_e;
  const double tail_var = w * c * ps.s_e2 / 2.0;
  // Core: hold h and (1-w-h)/8 on each of the eight ID-A offsets, whose
  // per-coordinate variance is 5(1-w-h)/4.
  const double h = 1.0 - w - 4.0 * (1.0 - tail_var) / 5.0;
  if (!(h > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tail weight too large for unit covariance");
  const double q = (1.0 - w - h) / 8.0;
  std::vector<JumpEntry> e{{{0, 0}, h}};
  for (std::int64_t k : {1, 2})
    for (Point d : {Point{k, 0}, Point{-k, 0}, Point{0, k}, Point{0, -k}}) e.push_back({d, q});
  PowerTail tail = shape;
  tail.coef = w * c;
  char name[64];
  std::snprintf(name, sizeof name, "heavy-beta%g", beta);
  return JumpLaw(std::move(e), tail, name);
}

JumpLaw preset(std::string_view name) {
  if (name == "id-a") return id_a();
  if (name == "srw") return srw();
  if (name == "lazy-srw") return lazy_srw();
  constexpr std::string_view heavy_tag = "heavy-beta";
  if (name.substr(0, heavy_tag.size()) == heavy_tag) {
    const std::string rest(name.substr(heavy_tag.size()));
    try {
      std::size_t used = 0;
      const double beta = std::stod(rest, &used);
      if (used == rest.size()) return heavy(beta);
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown preset '" + std::string(name) + "'");
}

JumpLaw law_from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("preset")) return preset(j.at("preset").get<std::string>());
  if (!j.is_array()) throw Error(ErrorCode::ConfigInvalid, "law file must be a JSON array");
  std::vector<JumpEntry> raw;
  std::string preset_name;
  for (const auto& item : j) {
    if (item.contains("preset")) {
      preset_name = item.at("preset").get<std::string>();
      continue;
    }
    raw.push_back({{item.at("dx").get<std::int64_t>(), item.at("dy").get<std::int64_t>()},
                   item.at("p").get<double>()});
  }
  if (raw.empty() && !preset_name.empty()) return preset(preset_name);
  return make_law(raw);
}

JumpLaw load_law_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open law file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return law_from_json(j);
}

nlohmann::json law_to_json(const JumpLaw& law) {
  nlohmann::json j = nlohmann::json::array();
  if (law.tail()) {
    j.push_back({{"preset", law.preset()}});
    return j;
  }
  for (const auto& e : law.core()) j.push_back({{"dx", e.offset.x}, {"dy", e.offset.y}, {"p", e.p}});
  return j;
}

}  // namespace lwb::walk
