#include "scolab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "scolab/errors.hpp"
#include "scolab/kernels.hpp"

namespace scolab {

// -- names ----------------------------------------------------------------------------

std::string_view to_string(Event e) {
  return e == Event::AntiConcentration ? "anti_concentration" : "permutation";
}

Event parse_event(std::string_view name) {
  if (name == "anti_concentration") return Event::AntiConcentration;
  if (name == "permutation") return Event::Permutation;
  throw UsageError(
      fmt::format("unknown event '{}' (expected anti_concentration or permutation)", name));
}

std::string_view to_string(ConditioningMode m) {
  return m == ConditioningMode::Forced ? "forced" : "rejection";
}

ConditioningMode parse_conditioning_mode(std::string_view name) {
  if (name == "forced") return ConditioningMode::Forced;
  if (name == "rejection") return ConditioningMode::Rejection;
  throw UsageError(fmt::format("unknown conditioning mode '{}' (expected forced or rejection)", name));
}

std::optional<Conditioning> parse_conditioning(std::string_view text) {
  if (text.empty() || text == "none") return std::nullopt;
  const auto colon = text.find(':');
  Conditioning c;
  c.event = parse_event(text.substr(0, colon));
  if (colon != std::string_view::npos) c.mode = parse_conditioning_mode(text.substr(colon + 1));
  return c;
}

std::string to_string(const std::optional<Conditioning>& c) {
  if (!c) return "none";
  return fmt::format("{}:{}", to_string(c->event), to_string(c->mode));
}

// -- events ---------------------------------------------------------------------------

namespace {

bool distinct_labels(const Dataset& data, int n) {
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& z : data.samples) {
    const int v = z.value();
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

void require_event_family(const ProblemInstance& instance, std::size_t n, Event event) {
  if (n == 0) throw DomainError("dataset size n must be at least 1");
  if (event == Event::AntiConcentration) {
    if (instance.family() != "nonrealizable") {
      throw DomainError("the anti-concentration event is defined for the nonrealizable instance");
    }
    return;
  }
  int coords = 0;
  if (const auto* c = dynamic_cast<const CoupledRealizable*>(&instance)) {
    coords = c->n();
  } else if (const auto* m = dynamic_cast<const MultiCopyRealizable*>(&instance)) {
    coords = m->n();
  } else {
    throw DomainError("the permutation event is defined for the coupled and multicopy instances");
  }
  if (static_cast<std::size_t>(coords) != n) {
    throw DomainError(fmt::format(
        "the permutation event needs the dataset size to equal the instance's n ({} != {})", n,
        coords));
  }
}

std::string tag(Event event, ConditioningMode mode) {
  return fmt::format("{}:{}", to_string(event), to_string(mode));
}

}  // namespace

bool event_holds(const ProblemInstance& instance, const Dataset& data, Event event) {
  if (event == Event::AntiConcentration) {
    long long sum = 0;
    for (const auto& z : data.samples) sum += z.value();
    // sum <= -sqrt(n)/2  <=>  sum <= 0 and 4 sum^2 >= n
    const auto n = static_cast<long long>(data.size());
    return sum <= 0 && 4 * sum * sum >= n;
  }
  if (const auto* m = dynamic_cast<const MultiCopyRealizable*>(&instance)) {
    return m->permuted_copy(data).has_value();
  }
  if (const auto* c = dynamic_cast<const CoupledRealizable*>(&instance)) {
    return data.size() == static_cast<std::size_t>(c->n()) && distinct_labels(data, c->n());
  }
  throw DomainError("the permutation event is defined for the coupled and multicopy instances");
}

Dataset condition_dataset(const ProblemInstance& instance, std::size_t n, Event event,
                          ConditioningMode mode, Rng& rng, std::uint64_t seed, std::uint64_t cap) {
  require_event_family(instance, n, event);
  if (mode == ConditioningMode::Rejection) {
    for (std::uint64_t attempt = 1; attempt <= cap; ++attempt) {
      Dataset data = instance.draw_dataset(n, rng, seed);
      if (event_holds(instance, data, event)) {
        data.conditioning = tag(event, mode);
        data.attempts = attempt;
        return data;
      }
    }
    throw ConditioningError(cap, 0.0);
  }

  Dataset data;
  data.instance_name = instance.name();
  data.seed = seed;
  data.conditioning = tag(event, mode);
  data.samples.reserve(n);
  if (event == Event::AntiConcentration) {
    const int ni = static_cast<int>(n);
    const int negatives = anti_concentration_min_negatives(ni);
    for (int i = 0; i < ni; ++i) data.samples.emplace_back(i < negatives ? -1 : 1);
    std::shuffle(data.samples.begin(), data.samples.end(), rng);
  } else if (const auto* m = dynamic_cast<const MultiCopyRealizable*>(&instance)) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> parts(static_cast<std::size_t>(m->copies()));
      parts[0] = static_cast<int>(i) + 1;
      for (std::size_t j = 1; j < parts.size(); ++j) parts[j] = uniform_int(rng, 1, m->n());
      data.samples.emplace_back(std::move(parts));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) data.samples.emplace_back(static_cast<int>(i) + 1);
  }
  return data;
}

std::optional<double> exact_event_probability(const ProblemInstance& instance, std::size_t n,
                                              Event event) {
  require_event_family(instance, n, event);
  const int ni = static_cast<int>(n);
  if (event == Event::AntiConcentration) return anti_concentration_probability(ni);
  if (instance.family() == "coupled") return permutation_event_probability(ni);
  // multicopy: 1 - (1 - p)^m
  const auto& m = dynamic_cast<const MultiCopyRealizable&>(instance);
  const double p = permutation_event_probability(ni);
  return -std::expm1(m.copies() * std::log1p(-p));
}

EventStats estimate_event_probability(const ProblemInstance& instance, std::size_t n, Event event,
                                      std::uint64_t trials, std::uint64_t seed, int jobs) {
  if (trials == 0) throw DomainError("event probability: trials must be at least 1");
  require_event_family(instance, n, event);
  EventStats stats;
  stats.event = std::string(to_string(event));
  stats.trials = trials;
  stats.hits = kernels::count_event_hits_omp(instance, n, event, trials, seed, jobs);
  stats.estimate = static_cast<double>(stats.hits) / static_cast<double>(trials);
  stats.exact = exact_event_probability(instance, n, event);
  if (stats.exact) {
    const double p = *stats.exact;
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    if (sigma > 0.0) stats.z_score = (stats.estimate - p) / sigma;
  }
  return stats;
}

double exhaustive_event_probability(const ProblemInstance& instance, std::size_t n, Event event) {
  require_event_family(instance, n, event);
  const std::vector<Sample> support = instance.support();
  if (support.empty()) throw DomainError("exhaustive enumeration needs a listable support");
  const double total = std::pow(static_cast<double>(support.size()), static_cast<double>(n));
  if (total > 1e8) throw DomainError("exhaustive enumeration: support^n exceeds 1e8 datasets");

  std::vector<std::size_t> digits(n, 0);
  Dataset data;
  data.samples.assign(n, support.front());
  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) data.samples[i] = support[digits[i]];
    hits += event_holds(instance, data, event) ? 1 : 0;
    ++count;
    std::size_t pos = 0;
    while (pos < n && ++digits[pos] == support.size()) digits[pos++] = 0;
    if (pos == n) break;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

// -- cells ------------------------------------------------------------------------------

ReplicateOutcome run_replicate(const ProblemInstance& instance, const CellKey& key,
                               const CellOptions& options, std::size_t replicate) {
  ReplicateOutcome out;
  const std::uint64_t seed = derive_seed(options.base_seed, key.eta, key.T, key.n, replicate);
  Rng rng(seed);
  try {
    Dataset data = options.conditioning
                       ? condition_dataset(instance, key.n, options.conditioning->event,
                                           options.conditioning->mode, rng, seed)
                       : instance.draw_dataset(key.n, rng, seed);
    OptimizerConfig config;
    config.eta = key.eta;
    config.T = key.T;
    config.algorithm = options.algorithm;
    config.init = instance.init_for(data);
    const RunResult r = run_optimizer(instance, data, config, rng);
    out.excess = options.final_iterate ? r.excess_risk_final : r.excess_risk_avg;
    out.avg_head = r.averaged_iterate.front();
  } catch (const DivergenceError&) {
    out.diverged = true;
  } catch (const LabError& e) {
    out.error = e.what();
  }
  return out;
}

CellStats aggregate_cell(const CellKey& key, const std::vector<ReplicateOutcome>& outcomes) {
  CellStats cell;
  cell.key = key;
  cell.replicates = outcomes.size();
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      if (cell.error.empty()) cell.error = o.error;
      continue;
    }
    if (o.diverged) {
      ++cell.divergences;
      continue;
    }
    cell.replicate_excess.push_back(o.excess);
    cell.replicate_avg_head.push_back(o.avg_head);
  }
  const auto& v = cell.replicate_excess;
  if (v.empty()) {
    cell.mean_excess = std::nan("");
    cell.stderr_excess = std::nan("");
    if (cell.error.empty()) cell.error = "all replicates diverged";
    return cell;
  }
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
    cell.mean_excess = v.front();
    cell.stderr_excess = 0.0;
    return cell;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  const double count = static_cast<double>(v.size());
  cell.mean_excess = sum / count;
  double ss = 0.0;
  for (double x : v) ss += (x - cell.mean_excess) * (x - cell.mean_excess);
  cell.stderr_excess = v.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
  return cell;
}

namespace {

InstanceContext context_of(const CellKey& key) {
  return {key.eta, static_cast<double>(key.T), key.n};
}

std::vector<kernels::ReplicateTask> tasks_for(const ProblemInstance& instance, const CellKey& key,
                                              const CellOptions& options) {
  std::vector<kernels::ReplicateTask> tasks;
  tasks.reserve(options.replicates);
  for (std::size_t r = 0; r < options.replicates; ++r) tasks.push_back({&instance, key, &options, r});
  return tasks;
}

}  // namespace

CellStats estimate_excess_risk(const InstanceSpec& spec, const CellKey& key,
                               const CellOptions& options, int jobs) {
  if (options.replicates == 0) throw DomainError("replicates must be at least 1");
  const auto instance = make_instance(spec, context_of(key));
  CellStats cell =
      aggregate_cell(key, kernels::run_replicates_omp(tasks_for(*instance, key, options), jobs));
  if (!cell.error.empty()) throw LabError(fmt::format("cell (eta={}, T={}, n={}): {}", key.eta, key.T, key.n, cell.error));
  return cell;
}

// -- sweeps --------------------------------------------------------------------------------

CellOptions SweepGrid::cell_options() const {
  CellOptions o;
  o.algorithm = algorithm;
  o.replicates = replicates;
  o.conditioning = conditioning;
  o.base_seed = base_seed;
  o.final_iterate = final_iterate;
  return o;
}

namespace {

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

SweepGrid SweepGrid::canonical() const {
  if (etas.empty() || Ts.empty() || ns.empty()) {
    throw DomainError("sweep grid: eta, T and n lists must be non-empty");
  }
  if (replicates == 0) throw DomainError("sweep grid: replicates must be at least 1");
  for (double e : etas) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("sweep grid: eta values must be positive");
  }
  for (auto t : Ts) {
    if (t < 2) throw DomainError("sweep grid: T values must be at least 2");
  }
  for (auto n : ns) {
    if (n == 0) throw DomainError("sweep grid: n values must be at least 1");
  }
  SweepGrid g = *this;
  g.etas = sorted_unique(etas);
  g.Ts = sorted_unique(Ts);
  g.ns = sorted_unique(ns);
  return g;
}

SweepResult run_sweep(const SweepGrid& grid, int jobs, Execution exec) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult result;
  result.grid = grid.canonical();
  const CellOptions options = result.grid.cell_options();

  std::vector<CellKey> keys;
  for (double eta : result.grid.etas) {
    for (auto T : result.grid.Ts) {
      for (auto n : result.grid.ns) keys.push_back({eta, T, n});
    }
  }

  std::vector<std::unique_ptr<ProblemInstance>> instances(keys.size());
  std::vector<std::string> build_errors(keys.size());
  std::vector<kernels::ReplicateTask> tasks;
  for (std::size_t c = 0; c < keys.size(); ++c) {
    try {
      instances[c] = make_instance(result.grid.instance, context_of(keys[c]));
    } catch (const LabError& e) {
      build_errors[c] = e.what();
      continue;
    }
    auto cell_tasks = tasks_for(*instances[c], keys[c], options);
    tasks.insert(tasks.end(), cell_tasks.begin(), cell_tasks.end());
  }

  const auto outcomes = exec == Execution::Parallel ? kernels::run_replicates_omp(tasks, jobs)
                                                    : kernels::run_replicates_serial(tasks);

  std::size_t offset = 0;
  for (std::size_t c = 0; c < keys.size(); ++c) {
    if (!build_errors[c].empty()) {
      CellStats cell;
      cell.key = keys[c];
      cell.replicates = options.replicates;
      cell.mean_excess = std::nan("");
      cell.stderr_excess = std::nan("");
      cell.error = build_errors[c];
      result.cells.push_back(std::move(cell));
      continue;
    }
    std::vector<ReplicateOutcome> cell_outcomes(
        outcomes.begin() + static_cast<std::ptrdiff_t>(offset),
        outcomes.begin() + static_cast<std::ptrdiff_t>(offset + options.replicates));
    offset += options.replicates;
    result.cells.push_back(aggregate_cell(keys[c], cell_outcomes));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// -- fits ---------------------------------------------------------------------------------

std::string_view to_string(SweptVariable v) {
  switch (v) {
    case SweptVariable::Eta: return "eta";
    case SweptVariable::T: return "T";
    case SweptVariable::N: return "n";
  }
  return "?";
}

SweptVariable parse_swept(std::string_view name) {
  if (name == "eta") return SweptVariable::Eta;
  if (name == "T") return SweptVariable::T;
  if (name == "n") return SweptVariable::N;
  throw UsageError(fmt::format("unknown swept variable '{}' (expected eta, T or n)", name));
}

RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys, std::string swept) {
  if (xs.size() != ys.size()) throw DomainError("fit: x and y lengths differ");
  if (xs.size() < 2) throw DomainError("fit: need at least 2 points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit: values must be strictly positive");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double k = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit: swept values are all equal");
  RateFit fit;
  fit.swept = std::move(swept);
  fit.points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

RateFit fit_rate(const SweepResult& sweep, SweptVariable swept, const CellFilter& filter) {
  std::map<double, double> points;
  std::vector<std::string> warnings;
  for (const auto& cell : sweep.cells) {
    if (!cell.error.empty()) continue;
    const auto& k = cell.key;
    if (swept != SweptVariable::Eta && filter.eta && k.eta != *filter.eta) continue;
    if (swept != SweptVariable::T && filter.T && k.T != *filter.T) continue;
    if (swept != SweptVariable::N && filter.n && k.n != *filter.n) continue;
    const double x = swept == SweptVariable::Eta ? k.eta
                     : swept == SweptVariable::T ? static_cast<double>(k.T)
                                                 : static_cast<double>(k.n);
    if (cell.mean_excess < 0.0) {
      throw DomainError(fmt::format("fit: negative mean excess {} at {}={}", cell.mean_excess,
                                    to_string(swept), x));
    }
    if (cell.mean_excess == 0.0) {
      warnings.push_back(fmt::format("dropped cell {}={} with mean excess exactly 0", to_string(swept), x));
      continue;
    }
    if (!points.emplace(x, cell.mean_excess).second) {
      throw DomainError(fmt::format(
          "fit: several cells share {}={}; fix the other grid variables with a filter",
          to_string(swept), x));
    }
  }
  if (points.size() < kMinFitPoints) {
    throw DomainError(fmt::format("fit: need ≥ {} points, got {}", kMinFitPoints, points.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  RateFit fit = fit_loglog(xs, ys, std::string(to_string(swept)));
  fit.warnings = std::move(warnings);
  return fit;
}

// -- envelopes -----------------------------------------------------------------------------

EnvelopeReport compare_to_envelope(const SweepResult& sweep, Regime regime) {
  EnvelopeReport report;
  report.regime = regime;
  report.instance = sweep.grid.instance.to_string();
  const std::string& family = sweep.grid.instance.family;
  const bool anti = sweep.grid.conditioning &&
                    sweep.grid.conditioning->event == Event::AntiConcentration;
  for (const auto& cell : sweep.cells) {
    if (!cell.error.empty()) continue;
    const auto& k = cell.key;
    EnvelopeRow row;
    row.key = k;
    row.mean_excess = cell.mean_excess;
    row.envelope = envelope(regime, k.eta, static_cast<double>(k.T), static_cast<double>(k.n)).value;
    row.ratio = row.mean_excess / row.envelope;
    if (family == "twodim" && !cell.replicate_excess.empty()) {
      row.floor = twodim_floor(k.eta, static_cast<double>(k.T));
      row.floored_value =
          *std::min_element(cell.replicate_excess.begin(), cell.replicate_excess.end());
    } else if (family == "nonrealizable" && anti && !cell.replicate_avg_head.empty()) {
      row.floor = nonrealizable_conditional_floor(static_cast<int>(k.n), k.eta, k.T);
      row.floored_value =
          *std::min_element(cell.replicate_avg_head.begin(), cell.replicate_avg_head.end());
    }
    if (row.floor) {
      row.floor_ok = *row.floored_value >= *row.floor;
      if (!row.floor_ok) ++report.floor_violations;
    }
    report.fitted_constant = std::max(report.fitted_constant, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace scolab
