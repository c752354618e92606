#include "scolab/results_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "scolab/errors.hpp"

namespace scolab {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Table: return "table";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw UsageError(fmt::format("--format: unknown format '{}' (expected table, csv or json)", name));
}

std::string_view extension(Format f) {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::Table: break;
  }
  return "txt";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Json conditioning_json(const std::optional<Conditioning>& c) {
  if (!c) return nullptr;
  return to_string(c);
}

std::optional<Conditioning> conditioning_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_conditioning(j.get<std::string>());
}

std::string fmt_short(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return fmt::format("{:.6g}", v);
}

}  // namespace

// -- sweep ----------------------------------------------------------------------------

std::string sweep_csv(const SweepResult& sweep) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  const std::string instance = csv_field(sweep.grid.instance.to_string());
  const std::string_view algorithm = to_string(sweep.grid.algorithm);
  const std::string conditioning = to_string(sweep.grid.conditioning);
  for (const auto& c : sweep.cells) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", instance, algorithm,
                       format_number(c.key.eta), c.key.T, c.key.n, conditioning, c.replicates,
                       format_number(c.mean_excess), format_number(c.stderr_excess),
                       c.divergences, sweep.grid.base_seed);
  }
  return out;
}

Json sweep_json(const SweepResult& sweep, const WriteOptions& opts) {
  const SweepGrid& g = sweep.grid;
  Json grid;
  grid["instance"] = g.instance.to_string();
  grid["algorithm"] = to_string(g.algorithm);
  grid["eta"] = g.etas;
  grid["T"] = g.Ts;
  grid["n"] = g.ns;
  grid["replicates"] = g.replicates;
  grid["base_seed"] = g.base_seed;
  grid["conditioning"] = conditioning_json(g.conditioning);
  grid["final_iterate"] = g.final_iterate;

  Json cells = Json::array();
  for (const auto& c : sweep.cells) {
    Json cell;
    cell["instance"] = g.instance.to_string();
    cell["algorithm"] = to_string(g.algorithm);
    cell["eta"] = c.key.eta;
    cell["T"] = c.key.T;
    cell["n"] = c.key.n;
    cell["conditioning"] = conditioning_json(g.conditioning);
    cell["replicates"] = c.replicates;
    cell["mean_excess"] = number_or_null(c.mean_excess);
    cell["stderr"] = number_or_null(c.stderr_excess);
    cell["divergences"] = c.divergences;
    cell["seed"] = g.base_seed;
    if (!c.error.empty()) cell["error"] = c.error;
    cells.push_back(std::move(cell));
  }

  Json j;
  j["grid"] = std::move(grid);
  j["cells"] = std::move(cells);
  if (!opts.deterministic && sweep.runtime_seconds) j["runtime_seconds"] = *sweep.runtime_seconds;
  return j;
}

SweepResult sweep_from_json(const Json& j) {
  try {
    SweepResult s;
    const Json& g = j.at("grid");
    s.grid.instance = parse_instance_spec(g.at("instance").get<std::string>());
    s.grid.algorithm = parse_algorithm(g.at("algorithm").get<std::string>());
    s.grid.etas = g.at("eta").get<std::vector<double>>();
    s.grid.Ts = g.at("T").get<std::vector<std::int64_t>>();
    s.grid.ns = g.at("n").get<std::vector<std::size_t>>();
    s.grid.replicates = g.at("replicates").get<std::size_t>();
    s.grid.base_seed = g.at("base_seed").get<std::uint64_t>();
    s.grid.conditioning = conditioning_from(g.at("conditioning"));
    s.grid.final_iterate = g.value("final_iterate", false);
    for (const Json& c : j.at("cells")) {
      CellStats cell;
      cell.key = {c.at("eta").get<double>(), c.at("T").get<std::int64_t>(),
                  c.at("n").get<std::size_t>()};
      cell.replicates = c.at("replicates").get<std::size_t>();
      cell.mean_excess = number_from(c.at("mean_excess"));
      cell.stderr_excess = number_from(c.at("stderr"));
      cell.divergences = c.at("divergences").get<std::size_t>();
      cell.error = c.value("error", std::string());
      s.cells.push_back(std::move(cell));
    }
    if (j.contains("runtime_seconds")) s.runtime_seconds = j.at("runtime_seconds").get<double>();
    return s;
  } catch (const Json::exception& e) {
    throw IoError(fmt::format("malformed sweep JSON: {}", e.what()));
  }
}

std::string sweep_table(const SweepResult& sweep) {
  std::string out = fmt::format("instance {}  algorithm {}  conditioning {}  replicates {}  seed {}\n",
                                sweep.grid.instance.to_string(), to_string(sweep.grid.algorithm),
                                to_string(sweep.grid.conditioning), sweep.grid.replicates,
                                sweep.grid.base_seed);
  out += fmt::format("{:>12} {:>10} {:>8} {:>14} {:>12} {:>6}  {}\n", "eta", "T", "n",
                     "mean_excess", "stderr", "div", "error");
  for (const auto& c : sweep.cells) {
    out += fmt::format("{:>12} {:>10} {:>8} {:>14} {:>12} {:>6}  {}\n", fmt_short(c.key.eta),
                       c.key.T, c.key.n, fmt_short(c.mean_excess), fmt_short(c.stderr_excess),
                       c.divergences, c.error);
  }
  return out;
}

// -- fit --------------------------------------------------------------------------------

std::string fit_csv(const RateFit& fit) {
  return fmt::format("swept,slope,intercept,r_squared,points\n{},{},{},{},{}\n", fit.swept,
                     format_number(fit.slope), format_number(fit.intercept),
                     format_number(fit.r_squared), fit.points);
}

Json fit_json(const RateFit& fit) {
  Json j;
  j["swept"] = fit.swept;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["points"] = fit.points;
  j["warnings"] = fit.warnings;
  return j;
}

std::string fit_table(const RateFit& fit) {
  std::string out = fmt::format("swept      {}\nslope      {}\nintercept  {}\nr_squared  {}\npoints     {}\n",
                                fit.swept, format_number(fit.slope), format_number(fit.intercept),
                                format_number(fit.r_squared), fit.points);
  for (const auto& w : fit.warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

// -- envelope ---------------------------------------------------------------------------

std::string envelope_csv(const EnvelopeReport& report) {
  std::string out = "instance,regime,eta,T,n,mean_excess,envelope,ratio,floor,floored_value,floor_ok\n";
  const std::string instance = csv_field(report.instance);
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", instance, to_string(report.regime),
                       format_number(r.key.eta), r.key.T, r.key.n, format_number(r.mean_excess),
                       format_number(r.envelope), format_number(r.ratio),
                       r.floor ? format_number(*r.floor) : "",
                       r.floored_value ? format_number(*r.floored_value) : "",
                       r.floor_ok ? "true" : "false");
  }
  return out;
}

Json envelope_json(const EnvelopeReport& report) {
  Json j;
  j["instance"] = report.instance;
  j["regime"] = to_string(report.regime);
  j["fitted_constant"] = number_or_null(report.fitted_constant);
  j["floor_violations"] = report.floor_violations;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["eta"] = r.key.eta;
    row["T"] = r.key.T;
    row["n"] = r.key.n;
    row["mean_excess"] = number_or_null(r.mean_excess);
    row["envelope"] = r.envelope;
    row["ratio"] = number_or_null(r.ratio);
    row["floor"] = r.floor ? Json(*r.floor) : Json(nullptr);
    row["floored_value"] = r.floored_value ? number_or_null(*r.floored_value) : Json(nullptr);
    row["floor_ok"] = r.floor_ok;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string envelope_table(const EnvelopeReport& report) {
  std::string out = fmt::format("envelope {}  fitted constant {}  floor violations {}\n",
                                to_string(report.regime), fmt_short(report.fitted_constant),
                                report.floor_violations);
  out += fmt::format("{:>12} {:>10} {:>8} {:>14} {:>12} {:>12} {:>12}  {}\n", "eta", "T", "n",
                     "mean_excess", "envelope", "ratio", "floor", "floor_ok");
  for (const auto& r : report.rows) {
    out += fmt::format("{:>12} {:>10} {:>8} {:>14} {:>12} {:>12} {:>12}  {}\n", fmt_short(r.key.eta),
                       r.key.T, r.key.n, fmt_short(r.mean_excess), fmt_short(r.envelope),
                       fmt_short(r.ratio), r.floor ? fmt_short(*r.floor) : "-",
                       r.floor ? (r.floor_ok ? "yes" : "NO") : "-");
  }
  return out;
}

// -- run --------------------------------------------------------------------------------

Json run_json(const RunResult& run) {
  Json j;
  j["averaged_iterate"] = run.averaged_iterate;
  j["final_iterate"] = run.final_iterate;
  j["excess_risk_avg"] = number_or_null(run.excess_risk_avg);
  j["excess_risk_final"] = number_or_null(run.excess_risk_final);
  j["seed"] = run.seed;
  j["eta"] = run.config.eta;
  j["T"] = run.config.T;
  j["algorithm"] = to_string(run.config.algorithm);
  j["instance"] = run.instance;
  return j;
}

std::string run_csv(const RunResult& run) {
  return fmt::format("instance,algorithm,eta,T,seed,excess_risk_avg,excess_risk_final\n{},{},{},{},{},{},{}\n",
                     csv_field(run.instance), to_string(run.config.algorithm),
                     format_number(run.config.eta), run.config.T, run.seed,
                     format_number(run.excess_risk_avg), format_number(run.excess_risk_final));
}

std::string run_table(const RunResult& run) {
  auto vec = [](const Vector& v) {
    std::vector<std::string> parts;
    const std::size_t shown = std::min<std::size_t>(v.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) parts.push_back(fmt_short(v[i]));
    if (v.size() > shown) parts.push_back(fmt::format("... ({} coordinates)", v.size()));
    return fmt::format("({})", fmt::join(parts, ", "));
  };
  std::string out = fmt::format(
      "instance           {}\nalgorithm          {}\neta                {}\nT                  {}\n"
      "seed               {}\naveraged_iterate   {}\nfinal_iterate      {}\n"
      "excess_risk_avg    {}\nexcess_risk_final  {}\n",
      run.instance, to_string(run.config.algorithm), format_number(run.config.eta), run.config.T,
      run.seed, vec(run.averaged_iterate), vec(run.final_iterate),
      format_number(run.excess_risk_avg), format_number(run.excess_risk_final));
  for (const auto& w : run.warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

// -- check -------------------------------------------------------------------------------

Json property_json(const PropertyReport& report) {
  Json j;
  j["instance"] = report.instance;
  j["passed"] = report.passed();
  Json rows = Json::array();
  for (const auto& o : report.outcomes) {
    Json row;
    row["property"] = o.property;
    row["trials"] = o.trials;
    row["violations"] = o.violations;
    row["worst_violation"] = number_or_null(o.worst_violation);
    row["verdict"] = to_string(o.verdict);
    rows.push_back(std::move(row));
  }
  j["properties"] = std::move(rows);
  return j;
}

std::string property_csv(const PropertyReport& report) {
  std::string out = "instance,property,trials,worst_violation,verdict\n";
  for (const auto& o : report.outcomes) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(report.instance), o.property, o.trials,
                       format_number(o.worst_violation), to_string(o.verdict));
  }
  return out;
}

std::string property_table(const PropertyReport& report) {
  std::size_t width = std::string_view("instance").size();
  width = std::max(width, report.instance.size());
  std::string out = fmt::format("{:<{}}  {:<14} {:>8} {:>16}  {}\n", "instance", width, "property",
                                "trials", "worst violation", "verdict");
  for (const auto& o : report.outcomes) {
    out += fmt::format("{:<{}}  {:<14} {:>8} {:>16}  {}\n", report.instance, width, o.property,
                       o.trials, fmt::format("{:.3e}", o.worst_violation), to_string(o.verdict));
  }
  return out;
}

// -- event-prob ----------------------------------------------------------------------------

Json event_json(const EventStats& stats, std::size_t n) {
  Json j;
  j["event"] = stats.event;
  j["n"] = n;
  j["trials"] = stats.trials;
  j["hits"] = stats.hits;
  j["estimate"] = stats.estimate;
  j["exact"] = stats.exact ? Json(*stats.exact) : Json(nullptr);
  j["z_score"] = stats.z_score ? Json(*stats.z_score) : Json(nullptr);
  return j;
}

std::string event_csv(const EventStats& stats, std::size_t n) {
  return fmt::format("event,n,trials,hits,estimate,exact,z_score\n{},{},{},{},{},{},{}\n",
                     stats.event, n, stats.trials, stats.hits, format_number(stats.estimate),
                     stats.exact ? format_number(*stats.exact) : "",
                     stats.z_score ? format_number(*stats.z_score) : "");
}

std::string event_table(const EventStats& stats, std::size_t n) {
  return fmt::format("event     {}\nn         {}\ntrials    {}\nhits      {}\nestimate  {}\nexact     {}\nz_score   {}\n",
                     stats.event, n, stats.trials, stats.hits, format_number(stats.estimate),
                     stats.exact ? format_number(*stats.exact) : "-",
                     stats.z_score ? fmt::format("{:.4f}", *stats.z_score) : "-");
}

// -- catalog -------------------------------------------------------------------------------

Json catalog_json() {
  Json rows = Json::array();
  for (const auto& f : instance_catalog()) {
    rows.push_back({{"family", f.family}, {"parameters", f.parameters}, {"role", f.role}});
  }
  return Json{{"instances", rows}};
}

std::string catalog_csv() {
  std::string out = "family,parameters,role\n";
  for (const auto& f : instance_catalog()) {
    out += fmt::format("{},{},{}\n", f.family, csv_field(f.parameters), csv_field(f.role));
  }
  return out;
}

std::string catalog_table() {
  std::string out;
  for (const auto& f : instance_catalog()) {
    out += fmt::format("{:<14} {}\n{:<14} {}\n", f.family, f.parameters, "", f.role);
  }
  return out;
}

// -- files ---------------------------------------------------------------------------------

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_results(const SweepResult& sweep, const std::string& path, Format format,
                   const WriteOptions& opts) {
  switch (format) {
    case Format::Csv: return write_text(path, sweep_csv(sweep));
    case Format::Json: return write_text(path, dump(sweep_json(sweep, opts)));
    case Format::Table: return write_text(path, sweep_table(sweep));
  }
}

void write_results(const RateFit& fit, const std::string& path, Format format) {
  switch (format) {
    case Format::Csv: return write_text(path, fit_csv(fit));
    case Format::Json: return write_text(path, dump(fit_json(fit)));
    case Format::Table: return write_text(path, fit_table(fit));
  }
}

void write_results(const EnvelopeReport& report, const std::string& path, Format format) {
  switch (format) {
    case Format::Csv: return write_text(path, envelope_csv(report));
    case Format::Json: return write_text(path, dump(envelope_json(report)));
    case Format::Table: return write_text(path, envelope_table(report));
  }
}

}  // namespace scolab
