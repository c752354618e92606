#include "scolab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "scolab/errors.hpp"

namespace scolab {

namespace {

std::string fmt_num(double v) { return fmt::format("{}", v); }

int label_of(const Sample& z) {
  if (z.size() != 1) {
    throw DomainError(fmt::format("expected a single-label sample, got {} labels", z.size()));
  }
  return z.value();
}

std::vector<Sample> labels(int lo, int hi) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int i = lo; i <= hi; ++i) out.emplace_back(i);
  return out;
}

}  // namespace

// -- shared vector helpers ---------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// -- ProblemInstance ---------------------------------------------------------

/// Generic F_S: loops over the samples in dataset order.
class SampleLoopObjective final : public EmpiricalObjective {
 public:
  SampleLoopObjective(const ProblemInstance& instance, const Dataset& data)
      : instance_(instance), samples_(data.samples) {}

  void gradient(std::span<const double> w, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const double scale = 1.0 / static_cast<double>(samples_.size());
    for (const auto& z : samples_) instance_.accumulate_grad_impl(w, z, scale, out);
  }

  double risk(std::span<const double> w) const override {
    double s = 0.0;
    for (const auto& z : samples_) s += instance_.loss_impl(w, z);
    return s / static_cast<double>(samples_.size());
  }

 private:
  const ProblemInstance& instance_;
  std::vector<Sample> samples_;
};

ProblemInstance::ProblemInstance(std::string family, std::string name, std::size_t dim,
                                 double smoothness, bool realizable)
    : family_(std::move(family)),
      name_(std::move(name)),
      dim_(dim),
      smoothness_(smoothness),
      realizable_(realizable),
      minimizer_(dim, 0.0) {}

std::vector<Sample> ProblemInstance::support() const { return {}; }

Vector ProblemInstance::canonical_init() const { return Vector(dim_, 0.0); }

Vector ProblemInstance::init_for(const Dataset&) const { return canonical_init(); }

void ProblemInstance::check_dim(std::span<const double> w) const {
  if (w.size() != dim_) throw DimensionError(dim_, w.size());
}

void ProblemInstance::check_sample(const Sample& z) const {
  if (z.size() == 0 || !in_support(z)) {
    throw DomainError(fmt::format("sample outside the sample space of {} ({})", name_,
                                  sample_space()));
  }
}

void ProblemInstance::check_dataset(const Dataset& data) const {
  if (data.samples.empty()) throw DomainError("empty dataset");
  for (const auto& z : data.samples) check_sample(z);
}

double ProblemInstance::loss(std::span<const double> w, const Sample& z) const {
  check_dim(w);
  check_sample(z);
  return loss_impl(w, z);
}

Vector ProblemInstance::grad(std::span<const double> w, const Sample& z) const {
  Vector out(dim_, 0.0);
  accumulate_grad(w, z, 1.0, out);
  return out;
}

void ProblemInstance::accumulate_grad(std::span<const double> w, const Sample& z, double scale,
                                      std::span<double> out) const {
  check_dim(w);
  check_dim(out);
  check_sample(z);
  accumulate_grad_impl(w, z, scale, out);
}

double ProblemInstance::population_risk(std::span<const double> w) const {
  check_dim(w);
  return population_risk_impl(w);
}

double ProblemInstance::excess_risk(std::span<const double> w) const {
  check_dim(w);
  return population_risk_impl(w) - population_risk_impl(minimizer_);
}

Dataset ProblemInstance::draw_dataset(std::size_t n, Rng& rng, std::uint64_t seed) const {
  if (n == 0) throw DomainError("dataset size n must be at least 1");
  Dataset data;
  data.instance_name = name_;
  data.seed = seed;
  data.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) data.samples.push_back(sample(rng));
  return data;
}

double ProblemInstance::empirical_risk(std::span<const double> w, const Dataset& data) const {
  check_dim(w);
  return bind(data)->risk(w);
}

Vector ProblemInstance::empirical_grad(std::span<const double> w, const Dataset& data) const {
  check_dim(w);
  Vector out(dim_, 0.0);
  bind(data)->gradient(w, out);
  return out;
}

std::unique_ptr<EmpiricalObjective> ProblemInstance::bind(const Dataset& data) const {
  check_dataset(data);
  return std::make_unique<SampleLoopObjective>(*this, data);
}

// -- NonRealizableScalar -----------------------------------------------------

NonRealizableScalar::NonRealizableScalar(double eta_T)
    : ProblemInstance("nonrealizable", fmt::format("nonrealizable{{eta_T={}}}", fmt_num(eta_T)), 1,
                      1.0 / eta_T, false),
      eta_T_(eta_T) {
  if (!(eta_T > 0.0) || !std::isfinite(eta_T)) {
    throw DomainError("nonrealizable: eta_T must be positive and finite");
  }
}

std::string NonRealizableScalar::sample_space() const { return "{-1, +1}"; }

bool NonRealizableScalar::in_support(const Sample& z) const {
  return z.size() == 1 && (z.value() == 1 || z.value() == -1);
}

Sample NonRealizableScalar::sample(Rng& rng) const {
  return Sample(uniform_int(rng, 0, 1) == 0 ? -1 : 1);
}

std::vector<Sample> NonRealizableScalar::support() const { return {Sample(-1), Sample(1)}; }

namespace {

class SignSumObjective final : public EmpiricalObjective {
 public:
  SignSumObjective(double eta_T, const Dataset& data) : eta_T_(eta_T) {
    long long sum = 0;
    for (const auto& z : data.samples) sum += z.value();
    mean_z_ = static_cast<double>(sum) / static_cast<double>(data.size());
  }

  void gradient(std::span<const double> w, std::span<double> out) const override {
    out[0] = w[0] / eta_T_ + mean_z_;
  }

  double risk(std::span<const double> w) const override {
    return w[0] * w[0] / (2.0 * eta_T_) + mean_z_ * w[0];
  }

 private:
  double eta_T_;
  double mean_z_ = 0.0;
};

}  // namespace

std::unique_ptr<EmpiricalObjective> NonRealizableScalar::bind(const Dataset& data) const {
  check_dataset(data);
  return std::make_unique<SignSumObjective>(eta_T_, data);
}

double NonRealizableScalar::loss_impl(std::span<const double> w, const Sample& z) const {
  return w[0] * w[0] / (2.0 * eta_T_) + label_of(z) * w[0];
}

void NonRealizableScalar::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                               double scale, std::span<double> out) const {
  out[0] += scale * (w[0] / eta_T_ + label_of(z));
}

double NonRealizableScalar::population_risk_impl(std::span<const double> w) const {
  return w[0] * w[0] / (2.0 * eta_T_);
}

// -- CoupledRealizable -------------------------------------------------------

CoupledRealizable::CoupledRealizable(int n, double alpha)
    : ProblemInstance("coupled", fmt::format("coupled{{n={},alpha={}}}", n, fmt_num(alpha)),
                      static_cast<std::size_t>(std::max(n, 0)) + 1, 1.0 + alpha, true),
      n_(n),
      alpha_(alpha),
      sqrt_alpha_(std::sqrt(alpha)) {
  if (n < 1) throw DomainError("coupled: n must be at least 1");
  if (!(alpha > 0.0) || alpha > 1.0) throw DomainError("coupled: alpha must lie in (0, 1]");
}

CoupledRealizable CoupledRealizable::from_horizon(int n, double C, double eta, double T) {
  if (!(C > 0.0) || C > 1.0) throw DomainError("coupled: C must lie in (0, 1]");
  if (!(eta > 0.0) || !(T > 0.0)) throw DomainError("coupled: eta and T must be positive");
  return CoupledRealizable(n, C / (eta * T));
}

std::string CoupledRealizable::sample_space() const { return fmt::format("{{1, ..., {}}}", n_); }

bool CoupledRealizable::in_support(const Sample& z) const {
  return z.size() == 1 && z.value() >= 1 && z.value() <= n_;
}

Sample CoupledRealizable::sample(Rng& rng) const { return Sample(uniform_int(rng, 1, n_)); }

std::vector<Sample> CoupledRealizable::support() const { return labels(1, n_); }

Vector CoupledRealizable::canonical_init() const {
  Vector w(dim(), 0.0);
  w[0] = 1.0;
  return w;
}

double CoupledRealizable::loss_impl(std::span<const double> w, const Sample& z) const {
  const double r = sqrt_alpha_ * w[0] - w[static_cast<std::size_t>(label_of(z))];
  return 0.5 * r * r;
}

void CoupledRealizable::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                             double scale, std::span<double> out) const {
  const auto i = static_cast<std::size_t>(label_of(z));
  // grad_x = alpha x - sqrt(alpha) y(i); grad_y = (y(i) - sqrt(alpha) x) e_i
  out[0] += scale * (alpha_ * w[0] - sqrt_alpha_ * w[i]);
  out[i] += scale * (w[i] - sqrt_alpha_ * w[0]);
}

double CoupledRealizable::population_risk_impl(std::span<const double> w) const {
  const double shift = sqrt_alpha_ * w[0];
  double s = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double r = w[i] - shift;
    s += r * r;
  }
  return s / (2.0 * n_);
}

// -- MultiCopyRealizable -----------------------------------------------------

namespace {

std::size_t multicopy_dim(int n, int m, std::size_t budget) {
  if (n < 1) throw DomainError("multicopy: n must be at least 1");
  if (m < 1) throw DomainError("multicopy: m must be at least 1");
  const double scalars = (static_cast<double>(n) + 1.0) * static_cast<double>(m);
  if (scalars > static_cast<double>(budget)) {
    throw DomainError(fmt::format(
        "multicopy: (n+1)*m = {} scalars exceeds the memory budget of {}; use the single-copy "
        "conditional mode (coupled + permutation conditioning) instead",
        scalars, budget));
  }
  return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(m);
}

}  // namespace

MultiCopyRealizable::MultiCopyRealizable(int n, double alpha, int m, std::size_t memory_budget)
    : ProblemInstance("multicopy",
                      fmt::format("multicopy{{n={},alpha={},m={}}}", n, fmt_num(alpha), m),
                      multicopy_dim(n, m, memory_budget), 1.0 + alpha, true),
      n_(n),
      m_(m),
      base_(n, alpha) {}

std::string MultiCopyRealizable::sample_space() const {
  return fmt::format("{{1, ..., {}}}^{}", n_, m_);
}

bool MultiCopyRealizable::in_support(const Sample& z) const {
  if (z.size() != static_cast<std::size_t>(m_)) return false;
  return std::all_of(z.parts().begin(), z.parts().end(),
                     [this](int v) { return v >= 1 && v <= n_; });
}

Sample MultiCopyRealizable::sample(Rng& rng) const {
  std::vector<int> parts(static_cast<std::size_t>(m_));
  for (auto& p : parts) p = uniform_int(rng, 1, n_);
  return Sample(std::move(parts));
}

Vector MultiCopyRealizable::canonical_init() const {
  Vector w(dim(), 0.0);
  w[0] = 1.0;
  return w;
}

std::optional<int> MultiCopyRealizable::permuted_copy(const Dataset& data) const {
  if (data.size() != static_cast<std::size_t>(n_)) return std::nullopt;
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1);
  for (int j = 0; j < m_; ++j) {
    std::fill(seen.begin(), seen.end(), 0);
    bool distinct = true;
    for (const auto& z : data.samples) {
      const int v = z.parts()[static_cast<std::size_t>(j)];
      if (seen[static_cast<std::size_t>(v)]) {
        distinct = false;
        break;
      }
      seen[static_cast<std::size_t>(v)] = 1;
    }
    if (distinct) return j;
  }
  return std::nullopt;
}

Vector MultiCopyRealizable::init_for(const Dataset& data) const {
  Vector w(dim(), 0.0);
  const int j = permuted_copy(data).value_or(0);
  w[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1)] = 1.0;
  return w;
}

std::span<const double> MultiCopyRealizable::copy_of(std::span<const double> w, int j) const {
  const auto block = static_cast<std::size_t>(n_ + 1);
  return w.subspan(static_cast<std::size_t>(j) * block, block);
}

double MultiCopyRealizable::loss_impl(std::span<const double> w, const Sample& z) const {
  const auto block = static_cast<std::size_t>(n_ + 1);
  const double sa = std::sqrt(base_.alpha());
  double s = 0.0;
  for (int j = 0; j < m_; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * block;
    const double r = sa * w[off] - w[off + static_cast<std::size_t>(z.parts()[static_cast<std::size_t>(j)])];
    s += 0.5 * r * r;
  }
  return s;
}

void MultiCopyRealizable::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                               double scale, std::span<double> out) const {
  const auto block = static_cast<std::size_t>(n_ + 1);
  const double a = base_.alpha();
  const double sa = std::sqrt(a);
  for (int j = 0; j < m_; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * block;
    const std::size_t i = off + static_cast<std::size_t>(z.parts()[static_cast<std::size_t>(j)]);
    out[off] += scale * (a * w[off] - sa * w[i]);
    out[i] += scale * (w[i] - sa * w[off]);
  }
}

double MultiCopyRealizable::population_risk_impl(std::span<const double> w) const {
  double s = 0.0;
  for (int j = 0; j < m_; ++j) s += base_.population_risk(copy_of(w, j));
  return s;
}

// -- CoordinateHiding --------------------------------------------------------

CoordinateHiding::CoordinateHiding(int n)
    : ProblemInstance("hiding", fmt::format("hiding{{n={}}}", n),
                      2 * static_cast<std::size_t>(std::max(n, 0)), 1.0, true),
      n_(n) {
  if (n < 1) throw DomainError("hiding: n must be at least 1");
}

std::string CoordinateHiding::sample_space() const { return fmt::format("{{1, ..., {}}}", 2 * n_); }

bool CoordinateHiding::in_support(const Sample& z) const {
  return z.size() == 1 && z.value() >= 1 && z.value() <= 2 * n_;
}

Sample CoordinateHiding::sample(Rng& rng) const { return Sample(uniform_int(rng, 1, 2 * n_)); }

std::vector<Sample> CoordinateHiding::support() const { return labels(1, 2 * n_); }

Vector CoordinateHiding::canonical_init() const {
  return Vector(dim(), 1.0 / std::sqrt(2.0 * n_));
}

double CoordinateHiding::loss_impl(std::span<const double> w, const Sample& z) const {
  const double v = w[static_cast<std::size_t>(label_of(z) - 1)];
  return 0.5 * v * v;
}

void CoordinateHiding::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                            double scale, std::span<double> out) const {
  const auto i = static_cast<std::size_t>(label_of(z) - 1);
  out[i] += scale * w[i];
}

double CoordinateHiding::population_risk_impl(std::span<const double> w) const {
  return dot(w, w) / (4.0 * n_);
}

// -- TwoDimQuadratic ---------------------------------------------------------

TwoDimQuadratic::TwoDimQuadratic(double lambda)
    : ProblemInstance("twodim", fmt::format("twodim{{lambda={}}}", fmt_num(lambda)), 2,
                      std::max(1.0, lambda), true),
      lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("twodim: lambda must be positive and finite");
  }
}

std::string TwoDimQuadratic::sample_space() const { return "{0} (deterministic)"; }

bool TwoDimQuadratic::in_support(const Sample& z) const { return z.size() == 1 && z.value() == 0; }

Sample TwoDimQuadratic::sample(Rng&) const { return Sample(0); }

std::vector<Sample> TwoDimQuadratic::support() const { return {Sample(0)}; }

Vector TwoDimQuadratic::canonical_init() const { return {1.0, 1.0}; }

double TwoDimQuadratic::loss_impl(std::span<const double> w, const Sample&) const {
  return 0.5 * w[0] * w[0] + 0.5 * lambda_ * w[1] * w[1];
}

void TwoDimQuadratic::accumulate_grad_impl(std::span<const double> w, const Sample&, double scale,
                                           std::span<double> out) const {
  out[0] += scale * w[0];
  out[1] += scale * lambda_ * w[1];
}

double TwoDimQuadratic::population_risk_impl(std::span<const double> w) const {
  return loss_impl(w, Sample(0));
}

// -- ScalarRealizable --------------------------------------------------------

namespace {

std::string scalar_name(const std::vector<double>& levels, double w_star) {
  if (levels.size() == 1) {
    return fmt::format("scalar{{a={},wstar={}}}", fmt_num(levels[0]), fmt_num(w_star));
  }
  bool arithmetic = true;
  const auto K = levels.size();
  for (std::size_t k = 0; k < K; ++k) {
    arithmetic = arithmetic && levels[k] == static_cast<double>(k + 1) / static_cast<double>(K);
  }
  if (arithmetic) return fmt::format("scalar{{levels={},wstar={}}}", K, fmt_num(w_star));
  return fmt::format("scalar{{a=[{}],wstar={}}}", fmt::join(levels, ";"), fmt_num(w_star));
}

}  // namespace

ScalarRealizable::ScalarRealizable(std::vector<double> levels, double w_star)
    : ProblemInstance("scalar", scalar_name(levels, w_star), 1, 1.0, true),
      levels_(std::move(levels)),
      w_star_(w_star),
      mean_curvature_(0.0) {
  if (levels_.empty()) throw DomainError("scalar: curvature law needs at least one level");
  for (double a : levels_) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("scalar: curvature levels must lie in [0, 1]");
  }
  if (!std::isfinite(w_star)) throw DomainError("scalar: w* must be finite");
  mean_curvature_ = std::accumulate(levels_.begin(), levels_.end(), 0.0) /
                    static_cast<double>(levels_.size());
  set_minimizer({w_star});
}

ScalarRealizable ScalarRealizable::with_levels(int K, double w_star) {
  if (K < 1) throw DomainError("scalar: levels must be at least 1");
  std::vector<double> levels(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) levels[static_cast<std::size_t>(k)] = (k + 1.0) / K;
  return ScalarRealizable(std::move(levels), w_star);
}

std::string ScalarRealizable::sample_space() const {
  return fmt::format("{{1, ..., {}}} -> a(z) in {{{}}}", levels_.size(), fmt::join(levels_, ", "));
}

bool ScalarRealizable::in_support(const Sample& z) const {
  return z.size() == 1 && z.value() >= 1 && z.value() <= static_cast<int>(levels_.size());
}

Sample ScalarRealizable::sample(Rng& rng) const {
  return Sample(uniform_int(rng, 1, static_cast<int>(levels_.size())));
}

std::vector<Sample> ScalarRealizable::support() const {
  return labels(1, static_cast<int>(levels_.size()));
}

Vector ScalarRealizable::canonical_init() const { return {w_star_ + 1.0}; }

double ScalarRealizable::loss_impl(std::span<const double> w, const Sample& z) const {
  const double r = w[0] - w_star_;
  return 0.5 * curvature(z) * r * r;
}

void ScalarRealizable::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                            double scale, std::span<double> out) const {
  out[0] += scale * curvature(z) * (w[0] - w_star_);
}

double ScalarRealizable::population_risk_impl(std::span<const double> w) const {
  const double r = w[0] - w_star_;
  return 0.5 * mean_curvature_ * r * r;
}

// -- NoiselessRegression -----------------------------------------------------

namespace {

Vector unit_gaussian(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(static_cast<std::size_t>(d));
  double s = 0.0;
  do {
    for (auto& x : v) x = normal(rng);
    s = norm(v);
  } while (s == 0.0);
  for (auto& x : v) x /= s;
  return v;
}

std::pair<std::vector<Vector>, Vector> generate_law(int d, std::uint64_t seed, int support_factor) {
  if (d < 1) throw DomainError("regression: d must be at least 1");
  if (support_factor < 1) throw DomainError("regression: support factor must be at least 1");
  Rng rng(seed);
  std::vector<Vector> features;
  const int K = support_factor * d;
  features.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) features.push_back(unit_gaussian(d, rng));
  Vector w_star = unit_gaussian(d, rng);
  return {std::move(features), std::move(w_star)};
}

double max_sq_norm(const std::vector<Vector>& xs) {
  double m = 0.0;
  for (const auto& x : xs) m = std::max(m, dot(x, x));
  return m;
}

/// F_S for least squares: grad = H (w - w*) with H = (2/n) sum x x^T.
class GramObjective final : public EmpiricalObjective {
 public:
  GramObjective(const std::vector<Vector>& features, const Dataset& data, const Vector& w_star)
      : d_(w_star.size()), gram_(d_ * d_, 0.0), w_star_(w_star) {
    const double scale = 2.0 / static_cast<double>(data.size());
    for (const auto& z : data.samples) {
      const Vector& x = features[static_cast<std::size_t>(z.value() - 1)];
      for (std::size_t r = 0; r < d_; ++r) {
        for (std::size_t c = 0; c < d_; ++c) gram_[r * d_ + c] += scale * x[r] * x[c];
      }
    }
  }

  void gradient(std::span<const double> w, std::span<double> out) const override {
    thread_local Vector e;
    e.resize(d_);
    for (std::size_t k = 0; k < d_; ++k) e[k] = w[k] - w_star_[k];
    for (std::size_t r = 0; r < d_; ++r) {
      double s = 0.0;
      const double* row = &gram_[r * d_];
      for (std::size_t c = 0; c < d_; ++c) s += row[c] * e[c];
      out[r] = s;
    }
  }

  double risk(std::span<const double> w) const override {
    // F_S(w) = (1/2) e^T H e
    double s = 0.0;
    for (std::size_t r = 0; r < d_; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < d_; ++c) row += gram_[r * d_ + c] * (w[c] - w_star_[c]);
      s += (w[r] - w_star_[r]) * row;
    }
    return 0.5 * s;
  }

 private:
  std::size_t d_;
  Vector gram_;
  Vector w_star_;
};

}  // namespace

NoiselessRegression::NoiselessRegression(int d, std::uint64_t seed, int support_factor)
    : NoiselessRegression(generate_law(d, seed, support_factor),
                          fmt::format("regression{{d={},seed={},support={}}}", d, seed,
                                      support_factor)) {}

NoiselessRegression::NoiselessRegression(Law law, std::string name)
    : NoiselessRegression(std::move(law.first), std::move(law.second), std::move(name)) {}

NoiselessRegression::NoiselessRegression(std::vector<Vector> features, Vector w_star)
    : NoiselessRegression(std::move(features), std::move(w_star), std::string()) {}

NoiselessRegression::NoiselessRegression(std::vector<Vector> features, Vector w_star,
                                         std::string name)
    : ProblemInstance("regression",
                      name.empty() ? fmt::format("regression{{d={},support={}}}", w_star.size(),
                                                 features.size())
                                   : std::move(name),
                      w_star.size(), 2.0 * max_sq_norm(features), true),
      features_(std::move(features)) {
  if (features_.empty()) throw DomainError("regression: feature law needs at least one vector");
  for (const auto& x : features_) {
    if (x.size() != w_star.size()) throw DimensionError(w_star.size(), x.size());
    if (dot(x, x) > 1.0 + 1e-12) throw DomainError("regression: features must lie in the unit ball");
  }
  set_minimizer(std::move(w_star));
}

std::string NoiselessRegression::sample_space() const {
  return fmt::format("{{1, ..., {}}} -> (x_k, x_k^T w*)", features_.size());
}

bool NoiselessRegression::in_support(const Sample& z) const {
  return z.size() == 1 && z.value() >= 1 && z.value() <= static_cast<int>(features_.size());
}

Sample NoiselessRegression::sample(Rng& rng) const {
  return Sample(uniform_int(rng, 1, static_cast<int>(features_.size())));
}

std::vector<Sample> NoiselessRegression::support() const {
  return labels(1, static_cast<int>(features_.size()));
}

Vector NoiselessRegression::canonical_init() const { return Vector(dim(), 0.0); }

double NoiselessRegression::residual(std::span<const double> w, std::size_t k) const {
  const Vector& x = features_[k];
  // y - x^T w = x^T (w* - w)
  double r = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) r += x[k] * (minimizer()[k] - w[k]);
  return r;
}

double NoiselessRegression::loss_impl(std::span<const double> w, const Sample& z) const {
  const double r = residual(w, static_cast<std::size_t>(z.value() - 1));
  return r * r;
}

void NoiselessRegression::accumulate_grad_impl(std::span<const double> w, const Sample& z,
                                               double scale, std::span<double> out) const {
  const Vector& x = features_[static_cast<std::size_t>(z.value() - 1)];
  const double r = residual(w, static_cast<std::size_t>(z.value() - 1));
  for (std::size_t k = 0; k < x.size(); ++k) out[k] += scale * (-2.0 * r * x[k]);
}

double NoiselessRegression::population_risk_impl(std::span<const double> w) const {
  double s = 0.0;
  for (std::size_t k = 0; k < features_.size(); ++k) {
    const double r = residual(w, k);
    s += r * r;
  }
  return s / static_cast<double>(features_.size());
}

std::unique_ptr<EmpiricalObjective> NoiselessRegression::bind(const Dataset& data) const {
  check_dataset(data);
  return std::make_unique<GramObjective>(features_, data, minimizer());
}

}  // namespace scolab
