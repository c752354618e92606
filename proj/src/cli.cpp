#include "scolab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "scolab/errors.hpp"
#include "scolab/instance_spec.hpp"

namespace scolab::cli {

namespace {

// Values exactly as given on the command line, before merging with --config.
struct RawFlags {
  std::string instance;
  std::vector<double> eta;
  std::vector<long long> T;
  std::vector<long long> n;
  long long replicates = 0;
  std::uint64_t seed = 0;
  long long trials = 0;
  double C = 0.0;
  std::string algorithm;
  std::string conditioning;
  std::string event;
  std::string swept;
  std::string envelope;
  std::string output;
  std::string format;
  std::string config;
  std::string input;
  int jobs = 0;
  bool deterministic = false;
  bool assert_realizable = false;
  bool final_iterate = false;
};

const std::map<std::string, std::set<std::string>>& subcommand_flags() {
  static const std::map<std::string, std::set<std::string>> flags = {
      {"list-instances", {"format", "output", "deterministic"}},
      {"run",
       {"instance", "eta", "T", "n", "seed", "C", "algorithm", "conditioning", "output", "format",
        "config", "deterministic"}},
      {"sweep",
       {"instance", "eta", "T", "n", "replicates", "seed", "C", "algorithm", "conditioning",
        "output", "format", "config", "deterministic", "jobs", "final-iterate", "envelope"}},
      {"fit",
       {"instance", "eta", "T", "n", "replicates", "seed", "C", "algorithm", "conditioning",
        "output", "format", "config", "deterministic", "jobs", "final-iterate", "swept", "input"}},
      {"check",
       {"instance", "eta", "T", "n", "seed", "C", "trials", "assert-realizable", "output", "format",
        "config", "deterministic"}},
      {"event-prob",
       {"instance", "event", "n", "trials", "seed", "output", "format", "config", "deterministic",
        "jobs"}},
  };
  return flags;
}

const std::set<std::string> kConfigKeys = {
    "instance", "algorithm", "eta",     "T",      "n",      "replicates",    "base_seed",
    "seed",     "conditioning", "output", "format", "trials", "C",           "event",
    "swept",    "envelope", "jobs",    "final_iterate", "input", "deterministic",
    "assert_realizable"};

void add_flag(CLI::App& sub, const std::string& name, RawFlags& raw) {
  if (name == "instance") {
    sub.add_option("--instance", raw.instance, "instance spec, e.g. coupled{n=256,C=1}");
  } else if (name == "eta") {
    sub.add_option("--eta", raw.eta, "step size(s); comma-separated list for sweeps")->delimiter(',');
  } else if (name == "T") {
    sub.add_option("--T", raw.T, "number of iterates; comma-separated list for sweeps")->delimiter(',');
  } else if (name == "n") {
    sub.add_option("--n", raw.n, "dataset size(s); comma-separated list for sweeps")->delimiter(',');
  } else if (name == "replicates") {
    sub.add_option("--replicates", raw.replicates, "replicates per cell");
  } else if (name == "seed") {
    sub.add_option("--seed", raw.seed, "seed (base seed for sweeps)");
  } else if (name == "trials") {
    sub.add_option("--trials", raw.trials, "random trials");
  } else if (name == "C") {
    sub.add_option("--C", raw.C, "coupling constant in (0, 1] for coupled/multicopy");
  } else if (name == "algorithm") {
    sub.add_option("--algorithm", raw.algorithm, "GD or SGD");
  } else if (name == "conditioning") {
    sub.add_option("--conditioning", raw.conditioning,
                   "none | anti_concentration | permutation, optionally ':forced' or ':rejection'");
  } else if (name == "event") {
    sub.add_option("--event", raw.event, "anti_concentration or permutation");
  } else if (name == "swept") {
    sub.add_option("--swept", raw.swept, "variable to fit against: eta, T or n");
  } else if (name == "envelope") {
    sub.add_option("--envelope", raw.envelope,
                   "compare cells with a bound envelope: nonrealizable, realizable_small_horizon, "
                   "realizable_large_horizon, gd_upper_realizable");
  } else if (name == "output") {
    sub.add_option("--output", raw.output, "output file (default: stdout or $" +
                                               std::string(kOutputDirEnv) + "/<subcommand>.<ext>)");
  } else if (name == "format") {
    sub.add_option("--format", raw.format, "table, csv or json");
  } else if (name == "config") {
    sub.add_option("--config", raw.config, "JSON config file; explicit flags win");
  } else if (name == "input") {
    sub.add_option("--input", raw.input, "sweep JSON to fit instead of running a sweep");
  } else if (name == "jobs") {
    sub.add_option("--jobs", raw.jobs, "worker threads (default: all available)");
  } else if (name == "deterministic") {
    sub.add_flag("--deterministic", raw.deterministic, "omit timestamps and runtimes");
  } else if (name == "assert-realizable") {
    sub.add_flag("--assert-realizable", raw.assert_realizable,
                 "fail (exit 3) when the instance is not realizable");
  } else if (name == "final-iterate") {
    sub.add_flag("--final-iterate", raw.final_iterate, "measure the final instead of the averaged iterate");
  }
}

std::string catalog_help() {
  std::string out = "Instance families:\n";
  for (const auto& f : instance_catalog()) {
    out += fmt::format("  {:<14} {}\n  {:<14} {}\n", f.family, f.parameters, "", f.role);
  }
  return out;
}

template <class T>
std::vector<T> json_list(const nlohmann::json& j, const std::string& key) {
  try {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
  } catch (const nlohmann::json::exception&) {
    throw UsageError(fmt::format("config: '{}' has the wrong type", key));
  }
}

template <class T>
T json_scalar(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(fmt::format("config: '{}' has the wrong type", key));
  }
}

std::vector<std::int64_t> checked_T(const std::vector<long long>& v) {
  std::vector<std::int64_t> out;
  for (long long t : v) {
    if (t < 2) throw UsageError(fmt::format("--T: T must be at least 2, got {}", t));
    out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> checked_n(const std::vector<long long>& v) {
  std::vector<std::size_t> out;
  for (long long x : v) {
    if (x < 1) throw UsageError(fmt::format("--n: n must be at least 1, got {}", x));
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<double> checked_eta(const std::vector<double>& v) {
  for (double e : v) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw UsageError(fmt::format("--eta: step size must be positive, got {}", e));
    }
  }
  return v;
}

template <class F>
auto as_usage(const std::string& flag, F&& f) {
  try {
    return f();
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate_instance(const std::string& text) {
  const InstanceSpec spec = as_usage("--instance", [&] { return parse_instance_spec(text); });
  for (const auto& f : instance_catalog()) {
    if (f.family == spec.family) return;
  }
  std::vector<std::string> names;
  for (const auto& f : instance_catalog()) names.push_back(f.family);
  throw UsageError(fmt::format("--instance: unknown instance family '{}' (valid: {})", spec.family,
                               fmt::join(names, ", ")));
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

InstanceSpec CliConfig::instance_spec() const {
  InstanceSpec spec = parse_instance_spec(instance);
  if (C) spec.params["C"] = *C;
  return spec;
}

SweepGrid CliConfig::grid() const {
  SweepGrid g;
  g.instance = instance_spec();
  g.algorithm = algorithm;
  g.etas = eta;
  g.Ts = T;
  g.ns = n;
  g.replicates = replicates;
  g.base_seed = seed;
  g.conditioning = conditioning;
  g.final_iterate = final_iterate;
  return g;
}

CliConfig parse_args(const std::vector<std::string>& args) {
  RawFlags raw;
  CLI::App app{"Monte-Carlo lab for excess-risk behaviour of GD and SGD on smooth convex instances",
               "scolab"};
  app.require_subcommand(1, 1);
  app.footer(catalog_help());
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> descriptions = {
      {"list-instances", "list the instance families"},
      {"run", "run GD or SGD once and report averaged and final iterates"},
      {"sweep", "estimate mean excess risk over an (eta, T, n) grid"},
      {"fit", "fit a log-log rate of mean excess risk against one swept variable"},
      {"check", "run the randomized smoothness/convexity/realizability/weak-growth suites"},
      {"event-prob", "estimate the probability of a conditioning event"},
  };
  for (const auto& [name, flags] : subcommand_flags()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    if (flags.contains("instance")) sub->footer(catalog_help());
    for (const auto& flag : flags) add_flag(*sub, flag, raw);
    subs[name] = sub;
  }

  CliConfig cfg;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cfg.help = app.help();
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    cfg.help = app.help("", CLI::AppFormatMode::All);
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  auto given = [&](const std::string& flag) {
    return subcommand_flags().at(cfg.subcommand).contains(flag) && sub->count("--" + flag) > 0;
  };

  nlohmann::json file;
  if (given("config")) {
    try {
      file = nlohmann::json::parse(read_text(raw.config));
    } catch (const IoError& e) {
      throw UsageError(fmt::format("--config: {}", e.what()));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(fmt::format("--config: invalid JSON: {}", e.what()));
    }
    require(file.is_object(), "--config: top level must be an object");
    for (const auto& [key, value] : file.items()) {
      require(kConfigKeys.contains(key), fmt::format("--config: unknown key '{}'", key));
    }
  }
  auto from_file = [&](const char* key) { return file.is_object() && file.contains(key); };

  // Each setting: explicit flag, else config file, else default.
  if (given("instance")) {
    cfg.instance = raw.instance;
  } else if (from_file("instance")) {
    cfg.instance = json_scalar<std::string>(file["instance"], "instance");
  }
  if (given("eta")) {
    cfg.eta = checked_eta(raw.eta);
  } else if (from_file("eta")) {
    cfg.eta = checked_eta(json_list<double>(file["eta"], "eta"));
  }
  if (given("T")) {
    cfg.T = checked_T(raw.T);
  } else if (from_file("T")) {
    cfg.T = checked_T(json_list<long long>(file["T"], "T"));
  }
  if (given("n")) {
    cfg.n = checked_n(raw.n);
  } else if (from_file("n")) {
    cfg.n = checked_n(json_list<long long>(file["n"], "n"));
  }
  long long replicates = 1;
  if (given("replicates")) {
    replicates = raw.replicates;
  } else if (from_file("replicates")) {
    replicates = json_scalar<long long>(file["replicates"], "replicates");
  }
  require(replicates >= 1, "--replicates: must be at least 1");
  cfg.replicates = static_cast<std::size_t>(replicates);
  if (given("seed")) {
    cfg.seed = raw.seed;
  } else if (from_file("base_seed")) {
    cfg.seed = json_scalar<std::uint64_t>(file["base_seed"], "base_seed");
  } else if (from_file("seed")) {
    cfg.seed = json_scalar<std::uint64_t>(file["seed"], "seed");
  }
  long long trials = 1000;
  if (given("trials")) {
    trials = raw.trials;
  } else if (from_file("trials")) {
    trials = json_scalar<long long>(file["trials"], "trials");
  }
  require(trials >= 1, "--trials: must be at least 1");
  cfg.trials = static_cast<std::uint64_t>(trials);
  if (given("C")) {
    cfg.C = raw.C;
  } else if (from_file("C")) {
    cfg.C = json_scalar<double>(file["C"], "C");
  }
  if (cfg.C) require(*cfg.C > 0.0 && *cfg.C <= 1.0, "--C: must lie in (0, 1]");

  std::string text;
  auto pick = [&](const char* flag, const char* key, std::string& raw_value) -> bool {
    if (given(flag)) {
      text = raw_value;
      return true;
    }
    if (from_file(key)) {
      text = json_scalar<std::string>(file[key], key);
      return true;
    }
    return false;
  };
  if (pick("algorithm", "algorithm", raw.algorithm)) {
    cfg.algorithm = as_usage("--algorithm", [&] { return parse_algorithm(text); });
  }
  if (pick("conditioning", "conditioning", raw.conditioning)) {
    cfg.conditioning = as_usage("--conditioning", [&] { return parse_conditioning(text); });
  } else if (from_file("conditioning") && file["conditioning"].is_null()) {
    cfg.conditioning.reset();
  }
  if (pick("event", "event", raw.event)) {
    cfg.event = as_usage("--event", [&] { return parse_event(text); });
  }
  if (pick("swept", "swept", raw.swept)) {
    cfg.swept = as_usage("--swept", [&] { return parse_swept(text); });
  }
  if (pick("envelope", "envelope", raw.envelope)) {
    try {
      cfg.envelope = parse_regime(text);
    } catch (const LabError& e) {
      throw UsageError(fmt::format("--envelope: {}", e.what()));
    }
  }
  if (pick("format", "format", raw.format)) {
    cfg.format = as_usage("--format", [&] { return parse_format(text); });
  }
  if (pick("output", "output", raw.output)) cfg.output = text;
  if (pick("input", "input", raw.input)) cfg.input = text;
  if (given("jobs")) {
    cfg.jobs = raw.jobs;
  } else if (from_file("jobs")) {
    cfg.jobs = json_scalar<int>(file["jobs"], "jobs");
  }
  require(cfg.jobs >= 0, "--jobs: must be non-negative");
  cfg.deterministic = raw.deterministic || (from_file("deterministic") &&
                                            json_scalar<bool>(file["deterministic"], "deterministic"));
  cfg.assert_realizable =
      raw.assert_realizable ||
      (from_file("assert_realizable") && json_scalar<bool>(file["assert_realizable"], "assert_realizable"));
  cfg.final_iterate = raw.final_iterate || (from_file("final_iterate") &&
                                            json_scalar<bool>(file["final_iterate"], "final_iterate"));

  // Per-subcommand requirements.
  const std::string& s = cfg.subcommand;
  if (!cfg.instance.empty()) validate_instance(cfg.instance);
  if (s == "run") {
    require(!cfg.instance.empty(), "--instance is required");
    require(cfg.eta.size() == 1, "--eta: run takes exactly one step size");
    require(cfg.T.size() == 1, "--T: run takes exactly one value");
    require(cfg.n.size() <= 1, "--n: run takes at most one value");
  } else if (s == "sweep" || (s == "fit" && cfg.input.empty())) {
    require(!cfg.instance.empty(), "--instance is required");
    require(!cfg.eta.empty(), "--eta is required");
    require(!cfg.T.empty(), "--T is required");
  } else if (s == "check") {
    require(!cfg.instance.empty(), "--instance is required");
    require(cfg.eta.size() <= 1 && cfg.T.size() <= 1 && cfg.n.size() <= 1,
            "check takes at most one value of --eta, --T and --n");
  } else if (s == "event-prob") {
    require(cfg.event.has_value(), "--event is required");
    require(cfg.n.size() == 1, "--n: event-prob takes exactly one dataset size");
  }
  if (s == "sweep" && cfg.envelope) {
    require(cfg.format != Format::Csv, "--envelope: the envelope report needs table or json format");
  }
  if (s == "fit" && cfg.input.empty()) {
    if (!cfg.swept) {
      const int multi = (cfg.eta.size() > 1) + (cfg.T.size() > 1) + (cfg.n.size() > 1);
      require(multi == 1, "--swept: give the variable to fit (eta, T or n)");
      cfg.swept = cfg.eta.size() > 1 ? SweptVariable::Eta
                  : cfg.T.size() > 1 ? SweptVariable::T
                                     : SweptVariable::N;
    }
    const std::size_t points = *cfg.swept == SweptVariable::Eta ? cfg.eta.size()
                               : *cfg.swept == SweptVariable::T ? cfg.T.size()
                                                                : cfg.n.size();
    require(points >= kMinFitPoints,
            fmt::format("fit: need ≥ {} points, got {} values of {}", kMinFitPoints, points,
                        to_string(*cfg.swept)));
    for (auto other : {SweptVariable::Eta, SweptVariable::T, SweptVariable::N}) {
      if (other == *cfg.swept) continue;
      const std::size_t k = other == SweptVariable::Eta ? cfg.eta.size()
                            : other == SweptVariable::T ? cfg.T.size()
                                                        : cfg.n.size();
      require(k <= 1, fmt::format("fit: --{} must have a single value when fitting against {}",
                                  to_string(other), to_string(*cfg.swept)));
    }
  }
  return cfg;
}

namespace {

struct Emitted {
  std::string table;
  std::string csv;
  Json json;
};

// Fills n from the instance spec when no --n was given.
std::vector<std::size_t> dataset_sizes(const CliConfig& cfg) {
  if (!cfg.n.empty()) return cfg.n;
  if (auto v = cfg.instance_spec().get("n")) return {static_cast<std::size_t>(*v)};
  return {1};
}

Emitted do_run(const CliConfig& cfg, std::ostream& err) {
  const double eta = cfg.eta.front();
  const std::int64_t T = cfg.T.front();
  const std::size_t n = dataset_sizes(cfg).front();
  const auto instance =
      make_instance(cfg.instance_spec(), {eta, static_cast<double>(T), n});
  Rng rng(cfg.seed);
  const Dataset data = cfg.conditioning
                           ? condition_dataset(*instance, n, cfg.conditioning->event,
                                               cfg.conditioning->mode, rng, cfg.seed)
                           : instance->draw_dataset(n, rng, cfg.seed);
  OptimizerConfig oc;
  oc.eta = eta;
  oc.T = T;
  oc.algorithm = cfg.algorithm;
  oc.init = instance->init_for(data);
  RunResult r = run_optimizer(*instance, data, oc, rng);
  r.seed = cfg.seed;
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  return {run_table(r), run_csv(r), run_json(r)};
}

SweepResult sweep_for(const CliConfig& cfg) {
  SweepGrid g = cfg.grid();
  g.ns = dataset_sizes(cfg);
  return run_sweep(g, cfg.jobs);
}

int report_cell_errors(const SweepResult& sweep, std::ostream& err) {
  int failed = 0;
  for (const auto& c : sweep.cells) {
    if (c.error.empty()) continue;
    ++failed;
    err << fmt::format("error: cell eta={} T={} n={}: {}\n", c.key.eta, c.key.T, c.key.n, c.error);
  }
  return failed;
}

void emit(const CliConfig& cfg, Emitted e, double runtime, std::ostream& out, std::ostream& err) {
  std::string text;
  switch (cfg.format) {
    case Format::Csv:
      text = std::move(e.csv);
      break;
    case Format::Json:
      if (!cfg.deterministic) {
        e.json["generated_at"] = utc_timestamp();
        e.json["runtime_seconds"] = runtime;
      }
      text = dump(e.json);
      break;
    case Format::Table:
      text = std::move(e.table);
      if (!cfg.deterministic) {
        text += fmt::format("# generated_at {} runtime_seconds {:.3f}\n", utc_timestamp(), runtime);
      }
      break;
  }
  std::string path = cfg.output;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      path = (std::filesystem::path(dir) /
              fmt::format("{}.{}", cfg.subcommand, extension(cfg.format)))
                 .string();
    }
  }
  if (path.empty()) {
    out << text;
    out.flush();
    return;
  }
  write_text(path, text);
  err << "wrote " << path << '\n';
}

}  // namespace

int dispatch(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.help) {
    out << *cfg.help;
    return kExitOk;
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const std::string& s = cfg.subcommand;
  int code = kExitOk;
  Emitted e;

  if (s == "list-instances") {
    e = {catalog_table(), catalog_csv(), catalog_json()};
  } else if (s == "run") {
    e = do_run(cfg, err);
  } else if (s == "sweep") {
    const SweepResult sweep = sweep_for(cfg);
    if (report_cell_errors(sweep, err) > 0) code = kExitComputation;
    e = {sweep_table(sweep), sweep_csv(sweep), sweep_json(sweep, {cfg.deterministic})};
    if (cfg.envelope) {
      const EnvelopeReport report = compare_to_envelope(sweep, *cfg.envelope);
      e.table += envelope_table(report);
      e.json["envelope"] = envelope_json(report);
    }
  } else if (s == "fit") {
    SweepResult sweep;
    SweptVariable swept;
    if (!cfg.input.empty()) {
      sweep = sweep_from_json(Json::parse(read_text(cfg.input), nullptr, false));
      if (cfg.swept) {
        swept = *cfg.swept;
      } else {
        const auto& g = sweep.grid;
        const int multi = (g.etas.size() > 1) + (g.Ts.size() > 1) + (g.ns.size() > 1);
        if (multi != 1) throw UsageError("--swept: give the variable to fit (eta, T or n)");
        swept = g.etas.size() > 1 ? SweptVariable::Eta
                : g.Ts.size() > 1 ? SweptVariable::T
                                  : SweptVariable::N;
      }
    } else {
      sweep = sweep_for(cfg);
      swept = *cfg.swept;
    }
    report_cell_errors(sweep, err);
    const RateFit fit = fit_rate(sweep, swept);
    e = {fit_table(fit), fit_csv(fit), fit_json(fit)};
  } else if (s == "check") {
    InstanceContext ctx;
    if (!cfg.eta.empty()) ctx.eta = cfg.eta.front();
    if (!cfg.T.empty()) ctx.T = static_cast<double>(cfg.T.front());
    if (!cfg.n.empty()) ctx.n = cfg.n.front();
    const auto instance = make_instance(cfg.instance_spec(), ctx);
    Rng rng(cfg.seed);
    const PropertyReport report = check_properties(*instance, cfg.trials, rng);
    e = {property_table(report), property_csv(report), property_json(report)};
    if (!report.passed()) code = kExitViolation;
    if (cfg.assert_realizable && !instance->realizable()) {
      err << fmt::format("assertion failed: {} is not realizable\n", report.instance);
      code = kExitViolation;
    }
  } else if (s == "event-prob") {
    const Event event = *cfg.event;
    const std::size_t n = cfg.n.front();
    const std::string spec_text =
        !cfg.instance.empty() ? cfg.instance
        : event == Event::AntiConcentration ? std::string("nonrealizable")
                                            : fmt::format("coupled{{n={}}}", n);
    const auto instance = make_instance(parse_instance_spec(spec_text), {std::nullopt, std::nullopt, n});
    const EventStats stats =
        estimate_event_probability(*instance, n, event, cfg.trials, cfg.seed, cfg.jobs);
    e = {event_table(stats, n), event_csv(stats, n), event_json(stats, n)};
  } else {
    throw UsageError(fmt::format("unknown subcommand '{}'", s));
  }
  emit(cfg, std::move(e), elapsed(), out, err);
  return code;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(parse_args(args), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LabError& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace scolab::cli
