#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "scolab/analytics.hpp"
#include "scolab/experiments.hpp"
#include "scolab/instance_spec.hpp"
#include "scolab/optimizers.hpp"

namespace scolab {

using Json = nlohmann::ordered_json;

enum class Format { Table, Csv, Json };

std::string_view to_string(Format f);
Format parse_format(std::string_view name);
/// "csv", "json" or "txt".
std::string_view extension(Format f);

/// Column order of the sweep CSV.
inline constexpr std::string_view kSweepCsvHeader =
    "instance,algorithm,eta,T,n,conditioning,replicates,mean_excess,stderr,divergences,seed";

/// %.17g, with nan/inf spelled out.
std::string format_number(double v);

/// Options shared by every writer.
struct WriteOptions {
  /// Omit generated_at and runtime fields.
  bool deterministic = false;
};

std::string sweep_csv(const SweepResult& sweep);
Json sweep_json(const SweepResult& sweep, const WriteOptions& opts = {});
std::string sweep_table(const SweepResult& sweep);
/// Inverse of sweep_json.
SweepResult sweep_from_json(const Json& j);

std::string fit_csv(const RateFit& fit);
Json fit_json(const RateFit& fit);
std::string fit_table(const RateFit& fit);

std::string envelope_csv(const EnvelopeReport& report);
Json envelope_json(const EnvelopeReport& report);
std::string envelope_table(const EnvelopeReport& report);

Json run_json(const RunResult& run);
std::string run_csv(const RunResult& run);
std::string run_table(const RunResult& run);

Json property_json(const PropertyReport& report);
std::string property_csv(const PropertyReport& report);
/// Columns: instance, property, trials, worst violation, verdict.
std::string property_table(const PropertyReport& report);

Json event_json(const EventStats& stats, std::size_t n);
std::string event_csv(const EventStats& stats, std::size_t n);
std::string event_table(const EventStats& stats, std::size_t n);

Json catalog_json();
std::string catalog_csv();
std::string catalog_table();

/// Serialises `j` with a trailing newline.
std::string dump(const Json& j);

/// Writes `text` to `path`; throws IoError when the file cannot be written.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

void write_results(const SweepResult& sweep, const std::string& path, Format format,
                   const WriteOptions& opts = {});
void write_results(const RateFit& fit, const std::string& path, Format format);
void write_results(const EnvelopeReport& report, const std::string& path, Format format);

}  // namespace scolab
