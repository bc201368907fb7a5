#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lwb/walk/jump_law.hpp"

namespace lwb::harness {

inline constexpr int kSchemaVersion = 1;

// Known kinds: potential, green, hitprob, skip, harnack, excursions,
// histories, localtime, census, etratio, timeexp, verify.
struct ExperimentConfig {
  int schema = kSchemaVersion;
  // Preset name, or a path to a law file when law_file is set.
  std::string law = "id-a";
  bool law_file = false;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::uint64_t replicas = 0;  // 0: the kind's default
  int threads = 1;
  std::string out;  // empty: stdout
  std::string format = "csv";
  std::map<std::string, double> tolerances;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& c);
// Throws ConfigInvalid on unknown fields, wrong types or a schema mismatch.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

bool is_stochastic(const std::string& kind);
const std::vector<std::string>& known_kinds();

// Throws ConfigInvalid: unknown kind or format, threads < 1, missing seed for
// a stochastic kind.
void validate(const ExperimentConfig& c);

walk::JumpLaw resolve_law(const ExperimentConfig& c);

// Columns of strings; numbers are printed with %.17g so equal runs give
// byte-identical tables.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

std::string fmt(double v);
std::string fmt(std::uint64_t v);
std::string fmt(std::int64_t v);
std::string fmt(int v);

struct ResultEnvelope {
  ExperimentConfig config;
  std::string version;
  double wall_seconds = 0.0;
  nlohmann::json metadata = nlohmann::json::object();  // residuals, truncation reports, seeds
  Table payload;
  bool passed = true;  // verify only

  nlohmann::json to_json() const;
  // Payload in the configured format.
  std::string render() const;
};

std::string version_tag();

// Dispatches to the module operations. Deterministic given the seed.
// `log` receives the per-criterion lines of a verify run as they finish.
ResultEnvelope run_experiment(const ExperimentConfig& c, std::ostream* log = nullptr);

}  // namespace lwb::harness
