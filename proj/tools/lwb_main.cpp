// lwb: command line front end over run_experiment.
// Exit codes: 0 ok, 1 module error, 2 config error, 3 acceptance failure.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lwb/error.hpp"
#include "lwb/harness/experiment.hpp"

namespace {

using lwb::harness::ExperimentConfig;
using nlohmann::json;

constexpr int kConfigError = 2;
constexpr int kAcceptanceFailure = 3;

// key=value; the value is read as JSON when it parses, else as a string.
void put_param(json& params, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "parameter '" + kv + "' is not key=value");
  const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
  auto parsed = json::parse(val, nullptr, false);
  params[key] = parsed.is_discarded() ? json(val) : parsed;
}

void write_output(const ExperimentConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  // outputs are never overwritten
  if (std::filesystem::exists(c.out))
    throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "output file " + c.out + " already exists");
  std::ofstream f(c.out);
  f << text;
  if (!f) throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "cannot write " + c.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice walk experiments"};
  app.require_subcommand(1);

  std::string config_path, law, law_file, out, format, profile;
  std::uint64_t seed = 0, replicas = 0;
  int threads = 0;
  std::vector<std::string> params, tolerances;
  std::vector<int> only;
  bool envelope = false, print_config = false;

  app.add_option("--config", config_path, "JSON config file; flags given here override it")->check(CLI::ExistingFile);
  app.add_option("--law", law, "preset jump law (id-a, srw, lazy-srw, ...)");
  app.add_option("--law-file", law_file, "jump law file")->check(CLI::ExistingFile)->excludes("--law");
  auto* seed_opt = app.add_option("--seed", seed);
  app.add_option("--replicas", replicas);
  app.add_option("--threads", threads)->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output file (must not exist); default stdout");
  app.add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-p,--param", params, "experiment parameter key=value (value may be JSON)");
  app.add_option("--tolerance", tolerances, "tolerance override key=value");
  app.add_flag("--envelope", envelope, "json output carries config, version, timing and metadata");
  app.add_flag("--print-config", print_config, "print the resolved config as JSON and exit");
  app.fallthrough();

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"potential", "potential kernel on a box"},
      {"green", "Green's function at the origin for disks"},
      {"hitprob", "annulus crossing probabilities against the log formula"},
      {"skip", "band-skip probability"},
      {"harnack", "interior or exterior Harnack ratio"},
      {"excursions", "excursion counts on a ladder of circles"},
      {"histories", "history counts, Stirling sweep, ladder sums"},
      {"localtime", "local-time law and chi-square test"},
      {"census", "frequent-point census"},
      {"etratio", "maximal local time ratio series"},
      {"timeexp", "exit-time exponents"},
      {"verify", "acceptance criteria"},
      {"run", "run the config file as given"},
  };
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "verify") {
      sub->add_option("--profile", profile)->check(CLI::IsMember({"quick", "full"}));
      sub->add_option("--only", only, "criterion ids")->delimiter(',');
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  ExperimentConfig c;
  try {
    if (!config_path.empty()) c = lwb::harness::load_config(config_path);
    if (verb == "run") {
      if (config_path.empty()) throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "run needs --config");
    } else if (!config_path.empty() && c.kind != verb) {
      throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "config kind '" + c.kind + "' does not match verb '" + verb + "'");
    } else {
      c.kind = verb;
    }
    if (!law.empty()) c.law = law, c.law_file = false;
    if (!law_file.empty()) c.law = law_file, c.law_file = true;
    if (*seed_opt) c.seed = seed;
    if (replicas) c.replicas = replicas;
    if (threads) c.threads = threads;
    if (!out.empty()) c.out = out;
    if (!format.empty()) c.format = format;
    for (const auto& kv : params) put_param(c.params, kv);
    for (const auto& kv : tolerances) {
      json t;
      put_param(t, kv);
      const auto& [k, v] = *t.items().begin();
      if (!v.is_number()) throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "tolerance " + k + " must be a number");
      c.tolerances[k] = v.get<double>();
    }
    if (!profile.empty()) c.params["profile"] = profile;
    if (!only.empty()) c.params["only"] = only;
    if (print_config) {
      std::cout << lwb::harness::to_json(c).dump(2) << "\n";
      return 0;
    }
    lwb::harness::validate(c);
    if (!c.out.empty() && std::filesystem::exists(c.out))
      throw lwb::Error(lwb::ErrorCode::ConfigInvalid, "output file " + c.out + " already exists");
  } catch (const std::exception& e) {
    std::cerr << "lwb: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto env = lwb::harness::run_experiment(c, c.kind == "verify" ? &std::cerr : nullptr);
    write_output(c, envelope && c.format == "json" ? env.to_json().dump(2) + "\n" : env.render());
    return env.passed ? 0 : kAcceptanceFailure;
  } catch (const lwb::Error& e) {
    std::cerr << "lwb: " << e.what() << "\n";
    return e.code() == lwb::ErrorCode::ConfigInvalid ? kConfigError : 1;
  } catch (const std::exception& e) {
    std::cerr << "lwb: " << e.what() << "\n";
    return 1;
  }
}
