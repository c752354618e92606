#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scolab/analytics.hpp"
#include "scolab/instance_spec.hpp"
#include "scolab/instances.hpp"
#include "scolab/optimizers.hpp"
#include "scolab/random.hpp"

namespace scolab {

// -- conditioning on proof events ---------------------------------------------

enum class Event {
  /// sum_i z_i <= -sqrt(n)/2 on the non-realizable scalar instance.
  AntiConcentration,
  /// The n labels are pairwise distinct (coupled), or some copy's are (multicopy).
  Permutation,
};

enum class ConditioningMode { Rejection, Forced };

std::string_view to_string(Event e);
Event parse_event(std::string_view name);
std::string_view to_string(ConditioningMode m);
ConditioningMode parse_conditioning_mode(std::string_view name);

struct Conditioning {
  Event event = Event::Permutation;
  ConditioningMode mode = ConditioningMode::Forced;

  friend bool operator==(const Conditioning&, const Conditioning&) = default;
};

/// Parses "event" or "event:mode" (mode defaults to forced); "none" gives nullopt.
std::optional<Conditioning> parse_conditioning(std::string_view text);
std::string to_string(const std::optional<Conditioning>& c);

inline constexpr std::uint64_t kRejectionCap = 1'000'000;

/// Whether `data` satisfies `event` for `instance`.
bool event_holds(const ProblemInstance& instance, const Dataset& data, Event event);

/// Draws a dataset of size n on which `event` holds.
///  - rejection: redraws until the event holds (at most `cap` attempts);
///  - forced: anti-concentration places ceil((n + sqrt(n)/2)/2) minus signs by
///    shuffle; permutation emits z_i = i (on copy 0 for multicopy).
Dataset condition_dataset(const ProblemInstance& instance, std::size_t n, Event event,
                          ConditioningMode mode, Rng& rng, std::uint64_t seed = 0,
                          std::uint64_t cap = kRejectionCap);

struct EventStats {
  std::string event;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  std::optional<double> exact;
  std::optional<double> z_score;
};

/// Exact probability of `event` for datasets of size n, when a closed form exists.
std::optional<double> exact_event_probability(const ProblemInstance& instance, std::size_t n,
                                              Event event);

/// Monte-Carlo estimate from `trials` i.i.d. datasets. Trials are split into
/// fixed chunks with derived seeds, so the result does not depend on `jobs`.
EventStats estimate_event_probability(const ProblemInstance& instance, std::size_t n, Event event,
                                      std::uint64_t trials, std::uint64_t seed, int jobs = 0);

/// Exact probability by enumerating every dataset in support()^n.
double exhaustive_event_probability(const ProblemInstance& instance, std::size_t n, Event event);

// -- excess-risk cells -----------------------------------------------------------

struct CellKey {
  double eta = 1.0;
  std::int64_t T = 2;
  std::size_t n = 1;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellOptions {
  Algorithm algorithm = Algorithm::GD;
  std::size_t replicates = 1;
  std::optional<Conditioning> conditioning;
  std::uint64_t base_seed = 0;
  /// Measure the final iterate instead of the averaged one.
  bool final_iterate = false;
};

/// Outcome of one replicate of one cell.
struct ReplicateOutcome {
  double excess = 0.0;
  /// First coordinate of the averaged iterate.
  double avg_head = 0.0;
  bool diverged = false;
  std::string error;
};

struct CellStats {
  CellKey key;
  double mean_excess = 0.0;
  double stderr_excess = 0.0;
  std::size_t replicates = 0;
  std::size_t divergences = 0;
  std::string error;
  std::vector<double> replicate_excess;
  std::vector<double> replicate_avg_head;
};

/// Runs replicate r of a cell: seed = derive_seed(base, eta, T, n, r); the
/// dataset (possibly conditioned) and then the SGD index stream come from it.
ReplicateOutcome run_replicate(const ProblemInstance& instance, const CellKey& key,
                               const CellOptions& options, std::size_t replicate);

/// Mean and standard error (sample sd / sqrt(count)) over the non-divergent
/// replicates, summed in replicate order.
CellStats aggregate_cell(const CellKey& key, const std::vector<ReplicateOutcome>& outcomes);

/// Builds the instance for (eta, T, n) and aggregates `options.replicates` runs.
CellStats estimate_excess_risk(const InstanceSpec& spec, const CellKey& key,
                               const CellOptions& options, int jobs = 0);

// -- sweeps ---------------------------------------------------------------------------

struct SweepGrid {
  InstanceSpec instance;
  Algorithm algorithm = Algorithm::GD;
  std::vector<double> etas;
  std::vector<std::int64_t> Ts;
  std::vector<std::size_t> ns;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  std::optional<Conditioning> conditioning;
  bool final_iterate = false;

  CellOptions cell_options() const;
  /// Sorted, de-duplicated copy; throws DomainError for empty or invalid lists.
  SweepGrid canonical() const;
};

struct SweepResult {
  SweepGrid grid;
  std::vector<CellStats> cells;
  std::optional<double> runtime_seconds;
};

enum class Execution { Parallel, Serial };

/// Evaluates every cell (eta-major, then T, then n). Per-cell failures are
/// recorded in CellStats::error and never abort the sweep.
SweepResult run_sweep(const SweepGrid& grid, int jobs = 0, Execution exec = Execution::Parallel);

// -- rate fits --------------------------------------------------------------------

enum class SweptVariable { Eta, T, N };

std::string_view to_string(SweptVariable v);
SweptVariable parse_swept(std::string_view name);

struct RateFit {
  std::string swept;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// OLS of ln y on ln x. Needs at least 2 points and strictly positive values.
RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                   std::string swept = "x");

/// Cells whose non-swept coordinates match the given values (unset = any).
struct CellFilter {
  std::optional<double> eta;
  std::optional<std::int64_t> T;
  std::optional<std::size_t> n;
};

inline constexpr std::size_t kMinFitPoints = 4;

/// Fits ln(mean excess) against ln(swept). Cells with errors are skipped; cells
/// with mean exactly 0 are dropped with a warning. Throws DomainError with
/// "need >= 4 points" when fewer remain, or on negative means.
RateFit fit_rate(const SweepResult& sweep, SweptVariable swept, const CellFilter& filter = {});

// -- envelope comparison ----------------------------------------------------------

struct EnvelopeRow {
  CellKey key;
  double mean_excess = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
  /// Proof floor for this cell, when the instance family has one.
  std::optional<double> floor;
  /// The quantity compared against `floor` (excess or averaged iterate).
  std::optional<double> floored_value;
  bool floor_ok = true;
};

struct EnvelopeReport {
  Regime regime;
  std::string instance;
  std::vector<EnvelopeRow> rows;
  /// max ratio over cells; reported, never asserted.
  double fitted_constant = 0.0;
  std::size_t floor_violations = 0;
};

/// Ratio mean/envelope per cell, plus floor checks: twodim cells compare every
/// replicate's excess with 1/(288 eta T); non-realizable cells conditioned on
/// anti-concentration compare every replicate's averaged iterate with
/// eta (T-1)/(16 sqrt n).
EnvelopeReport compare_to_envelope(const SweepResult& sweep, Regime regime);

}  // namespace scolab
