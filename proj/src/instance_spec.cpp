#include "scolab/instance_spec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "scolab/analytics.hpp"
#include "scolab/errors.hpp"

namespace scolab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_decimal(std::string_view text, std::string_view key) {
  static const std::regex decimal(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
  const std::string s(text);
  if (!std::regex_match(s, decimal)) {
    throw UsageError(fmt::format("parameter '{}': '{}' is not a decimal number", key, text));
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(fmt::format("parameter '{}': cannot parse '{}'", key, text));
  }
  return v;
}

std::string valid_families() {
  std::string out;
  for (const auto& f : instance_catalog()) {
    if (!out.empty()) out += ", ";
    out += f.family;
  }
  return out;
}

void allow_only(const InstanceSpec& spec, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : spec.params) {
    if (!allowed.contains(k)) {
      throw UsageError(fmt::format("{}: unknown parameter '{}' (allowed: {})", spec.family, k,
                                   fmt::join(allowed, ", ")));
    }
  }
}

int as_int(const InstanceSpec& spec, const std::string& key, double v) {
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw UsageError(fmt::format("{}: parameter '{}' must be an integer, got {}", spec.family, key, v));
  }
  return static_cast<int>(v);
}

int dataset_size(const InstanceSpec& spec, const InstanceContext& ctx) {
  if (auto v = spec.get("n")) return as_int(spec, "n", *v);
  if (ctx.n) return static_cast<int>(*ctx.n);
  throw UsageError(fmt::format("{}: parameter 'n' is required", spec.family));
}

double coupling(const InstanceSpec& spec, const InstanceContext& ctx) {
  if (auto a = spec.get("alpha")) return *a;
  const double C = spec.get("C").value_or(1.0);
  if (!(C > 0.0) || C > 1.0) throw DomainError(fmt::format("{}: C must lie in (0, 1]", spec.family));
  return C / ctx.horizon();
}

}  // namespace

std::optional<double> InstanceSpec::get(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::string InstanceSpec::to_string() const {
  std::vector<std::string> parts;
  for (const auto& [k, v] : params) parts.push_back(fmt::format("{}={}", k, v));
  return fmt::format("{}{{{}}}", family, fmt::join(parts, ","));
}

InstanceSpec parse_instance_spec(std::string_view text) {
  text = trim(text);
  const auto brace = text.find('{');
  InstanceSpec spec;
  spec.family = std::string(trim(text.substr(0, brace)));
  if (spec.family.empty()) throw UsageError("instance spec: missing family name");
  for (char c : spec.family) {
    if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) {
      throw UsageError(fmt::format("instance spec: bad family name '{}'", spec.family));
    }
  }
  if (brace == std::string_view::npos) return spec;
  if (text.back() != '}') throw UsageError("instance spec: missing closing '}'");
  std::string_view body = text.substr(brace + 1, text.size() - brace - 2);
  if (trim(body).empty()) return spec;
  while (true) {
    const auto comma = body.find(',');
    const std::string_view item = trim(body.substr(0, comma));
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(fmt::format("instance spec: expected key=value, got '{}'", item));
    }
    const std::string key(trim(item.substr(0, eq)));
    if (key.empty()) throw UsageError("instance spec: empty parameter name");
    const double value = parse_decimal(trim(item.substr(eq + 1)), key);
    if (!spec.params.emplace(key, value).second) {
      throw UsageError(fmt::format("instance spec: duplicate parameter '{}'", key));
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return spec;
}

double InstanceContext::horizon() const {
  if (eta && T) return *eta * *T;
  return 1.0;
}

std::unique_ptr<ProblemInstance> make_instance(const InstanceSpec& spec,
                                               const InstanceContext& ctx) {
  const std::string& f = spec.family;
  if (f == "nonrealizable") {
    allow_only(spec, {"eta_T"});
    return std::make_unique<NonRealizableScalar>(spec.get("eta_T").value_or(ctx.horizon()));
  }
  if (f == "coupled") {
    allow_only(spec, {"n", "C", "alpha"});
    return std::make_unique<CoupledRealizable>(dataset_size(spec, ctx), coupling(spec, ctx));
  }
  if (f == "multicopy") {
    allow_only(spec, {"n", "C", "alpha", "m", "budget"});
    const int n = dataset_size(spec, ctx);
    int m = 0;
    if (auto v = spec.get("m")) {
      m = as_int(spec, "m", *v);
    } else {
      // Smallest m with m * n!/n^n >= 1.
      const double inv_p = 1.0 / permutation_event_probability(n);
      if (inv_p > 2e9) throw DomainError("multicopy: default m = n^n/n! is too large; pass m");
      m = static_cast<int>(std::ceil(inv_p - 1e-9));
    }
    const auto budget = static_cast<std::size_t>(
        spec.get("budget").value_or(static_cast<double>(MultiCopyRealizable::kDefaultMemoryBudget)));
    return std::make_unique<MultiCopyRealizable>(n, coupling(spec, ctx), m, budget);
  }
  if (f == "hiding") {
    allow_only(spec, {"n"});
    return std::make_unique<CoordinateHiding>(dataset_size(spec, ctx));
  }
  if (f == "twodim") {
    allow_only(spec, {"lambda"});
    return std::make_unique<TwoDimQuadratic>(spec.get("lambda").value_or(1.0 / ctx.horizon()));
  }
  if (f == "scalar") {
    allow_only(spec, {"a", "levels", "wstar"});
    const double w_star = spec.get("wstar").value_or(0.0);
    if (auto a = spec.get("a")) {
      if (spec.get("levels")) throw UsageError("scalar: give either 'a' or 'levels', not both");
      return std::make_unique<ScalarRealizable>(std::vector<double>{*a}, w_star);
    }
    const int K = as_int(spec, "levels", spec.get("levels").value_or(4.0));
    auto inst = ScalarRealizable::with_levels(K, w_star);
    return std::make_unique<ScalarRealizable>(inst.levels(), w_star);
  }
  if (f == "regression") {
    allow_only(spec, {"d", "seed", "support"});
    const int d = as_int(spec, "d", spec.get("d").value_or(20.0));
    const double seed = spec.get("seed").value_or(0.0);
    if (seed < 0 || seed != std::floor(seed)) throw UsageError("regression: seed must be a non-negative integer");
    const int factor = as_int(spec, "support", spec.get("support").value_or(4.0));
    return std::make_unique<NoiselessRegression>(d, static_cast<std::uint64_t>(seed), factor);
  }
  throw UsageError(fmt::format("unknown instance family '{}' (valid: {})", f, valid_families()));
}

const std::vector<FamilyInfo>& instance_catalog() {
  static const std::vector<FamilyInfo> catalog = {
      {"nonrealizable", "eta_T (default eta*T)",
       "non-realizable 1-D quadratic with a +/-1 linear term; GD/SGD overfit at rate eta*T/n"},
      {"coupled", "n (default: dataset size), C=1 | alpha (default C/(eta*T))",
       "realizable coupled quadratic (x, y(1..n)); GD/SGD pay eta*T/n^2 before eta*T ~ n"},
      {"multicopy", "n, m (default ceil(n^n/n!)), C=1 | alpha, budget=1e8",
       "m independent coupled copies; one copy sees each y-coordinate exactly once"},
      {"hiding", "n (dimension 2n)",
       "coordinate-hiding quadratic; unobserved coordinates give an Omega(1/n) floor"},
      {"twodim", "lambda (default 1/(eta*T))",
       "deterministic 2-D quadratic; optimisation floor 1/(288 eta T)"},
      {"scalar", "a (constant) | levels=4, wstar=0",
       "1-D realizable quadratic family; iterates contract towards w* every step"},
      {"regression", "d=20, seed=0, support=4 (support*d unit feature vectors)",
       "noiseless linear regression; long horizons do not overfit"},
  };
  return catalog;
}

}  // namespace scolab
