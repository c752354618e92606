#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scolab/random.hpp"
#include "scolab/types.hpp"

namespace scolab {

/// An instance bound to a fixed dataset: the empirical risk F_S and its gradient.
class EmpiricalObjective {
 public:
  virtual ~EmpiricalObjective() = default;

  /// Overwrites `out` with (1/n) sum_i grad f(w, z_i).
  virtual void gradient(std::span<const double> w, std::span<double> out) const = 0;
  virtual double risk(std::span<const double> w) const = 0;
};

/// A loss family f(w, z) with its sampling law, closed-form population risk
/// and canonical minimizer w*.
///
/// Instances are immutable after construction; every method is safe to call
/// concurrently. Randomness always comes from a caller-owned stream.
class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  ProblemInstance(const ProblemInstance&) = delete;
  ProblemInstance& operator=(const ProblemInstance&) = delete;

  /// Family identifier, e.g. "coupled".
  std::string_view family() const { return family_; }
  /// Canonical spec string, e.g. "coupled{n=2,alpha=0.25}".
  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  /// Declared Lipschitz constant of grad f(., z), uniform in z.
  double smoothness() const { return smoothness_; }
  bool realizable() const { return realizable_; }
  const Vector& minimizer() const { return minimizer_; }

  virtual std::string sample_space() const = 0;
  virtual bool in_support(const Sample& z) const = 0;
  virtual Sample sample(Rng& rng) const = 0;
  /// Every point of the support (uniform law), or empty if it is too large to list.
  virtual std::vector<Sample> support() const;

  /// Default starting point w_1 used by experiments.
  virtual Vector canonical_init() const;
  /// Starting point for a run on `data`. Defaults to `canonical_init()`.
  virtual Vector init_for(const Dataset& data) const;

  double loss(std::span<const double> w, const Sample& z) const;
  Vector grad(std::span<const double> w, const Sample& z) const;
  /// out += scale * grad f(w, z).
  void accumulate_grad(std::span<const double> w, const Sample& z, double scale,
                       std::span<double> out) const;

  double population_risk(std::span<const double> w) const;
  /// F(w) - F(w*).
  double excess_risk(std::span<const double> w) const;

  Dataset draw_dataset(std::size_t n, Rng& rng, std::uint64_t seed = 0) const;
  double empirical_risk(std::span<const double> w, const Dataset& data) const;
  Vector empirical_grad(std::span<const double> w, const Dataset& data) const;

  /// Validates `data` once and returns a fast evaluator of F_S.
  virtual std::unique_ptr<EmpiricalObjective> bind(const Dataset& data) const;

 protected:
  ProblemInstance(std::string family, std::string name, std::size_t dim, double smoothness,
                  bool realizable);

  void set_minimizer(Vector w) { minimizer_ = std::move(w); }

  virtual double loss_impl(std::span<const double> w, const Sample& z) const = 0;
  virtual void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                                    std::span<double> out) const = 0;
  virtual double population_risk_impl(std::span<const double> w) const = 0;

  void check_dim(std::span<const double> w) const;
  void check_sample(const Sample& z) const;
  void check_dataset(const Dataset& data) const;

 private:
  friend class SampleLoopObjective;

  std::string family_;
  std::string name_;
  std::size_t dim_;
  double smoothness_;
  bool realizable_;
  Vector minimizer_;
};

/// f(w, z) = w^2 / (2 eta_T) + z w with z uniform on {-1, +1}.
class NonRealizableScalar final : public ProblemInstance {
 public:
  explicit NonRealizableScalar(double eta_T);

  double eta_T() const { return eta_T_; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;

  /// grad F_S(w) = w / eta_T + (sum_i z_i) / n with the label sum taken exactly,
  /// so the result does not depend on the order of the samples.
  std::unique_ptr<EmpiricalObjective> bind(const Dataset& data) const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  double eta_T_;
};

/// w = (x, y) with y in R^n; f(w, z = i) = (1/2)(sqrt(alpha) x - y(i))^2, z uniform on {1..n}.
class CoupledRealizable final : public ProblemInstance {
 public:
  CoupledRealizable(int n, double alpha);
  /// alpha = C / (eta T).
  static CoupledRealizable from_horizon(int n, double C, double eta, double T);

  int n() const { return n_; }
  double alpha() const { return alpha_; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;
  /// x_1 = 1, y_1 = 0.
  Vector canonical_init() const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  int n_;
  double alpha_;
  double sqrt_alpha_;
};

/// m independent copies of CoupledRealizable summed: F(W, Z) = sum_j g(w^(j), z^(j)).
/// Copy j occupies coordinates [j (n+1), (j+1)(n+1)) laid out as (x, y(1..n)).
class MultiCopyRealizable final : public ProblemInstance {
 public:
  static constexpr std::size_t kDefaultMemoryBudget = 100'000'000;

  MultiCopyRealizable(int n, double alpha, int m,
                      std::size_t memory_budget = kDefaultMemoryBudget);

  int n() const { return n_; }
  int copies() const { return m_; }
  double alpha() const { return base_.alpha(); }
  const CoupledRealizable& base() const { return base_; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  /// x = 1 on copy 0, everything else zero.
  Vector canonical_init() const override;
  /// x = 1 on the first copy whose labels in `data` are pairwise distinct.
  Vector init_for(const Dataset& data) const override;

  /// First copy j whose n labels in `data` form a permutation of {1..n}.
  std::optional<int> permuted_copy(const Dataset& data) const;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  std::span<const double> copy_of(std::span<const double> w, int j) const;

  int n_;
  int m_;
  CoupledRealizable base_;
};

/// f(w, z = i) = (1/2) w(i)^2 on R^{2n}, z uniform on {1..2n}.
class CoordinateHiding final : public ProblemInstance {
 public:
  explicit CoordinateHiding(int n);

  int n() const { return n_; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;
  /// (1 / sqrt(2n)) * ones.
  Vector canonical_init() const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  int n_;
};

/// Deterministic f(w) = (1/2) w(1)^2 + (lambda/2) w(2)^2. The sample space is the
/// single point {0}.
class TwoDimQuadratic final : public ProblemInstance {
 public:
  explicit TwoDimQuadratic(double lambda);

  double lambda() const { return lambda_; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;
  /// (1, 1).
  Vector canonical_init() const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  double lambda_;
};

/// f(w, z) = (1/2) a(z) (w - w*)^2 with z uniform over the curvature levels,
/// each in [0, 1]. Labels are 1-based indices into `levels()`.
class ScalarRealizable final : public ProblemInstance {
 public:
  ScalarRealizable(std::vector<double> levels, double w_star);
  /// Uniform law over {1/K, 2/K, ..., 1}.
  static ScalarRealizable with_levels(int K, double w_star);

  const std::vector<double>& levels() const { return levels_; }
  double w_star() const { return w_star_; }
  double mean_curvature() const { return mean_curvature_; }
  double curvature(const Sample& z) const { return levels_[static_cast<std::size_t>(z.value() - 1)]; }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;
  /// w* + 1.
  Vector canonical_init() const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  std::vector<double> levels_;
  double w_star_;
  double mean_curvature_;
};

/// f(w, z = k) = (y_k - x_k^T w)^2 with y_k = x_k^T w*, z uniform over a finite
/// set of unit-norm feature vectors x_1..x_K generated from `seed`.
class NoiselessRegression final : public ProblemInstance {
 public:
  NoiselessRegression(int d, std::uint64_t seed, int support_factor = 4);
  NoiselessRegression(std::vector<Vector> features, Vector w_star);
  NoiselessRegression(std::vector<Vector> features, Vector w_star, std::string name);

  int d() const { return static_cast<int>(dim()); }
  const std::vector<Vector>& features() const { return features_; }
  const Vector& w_star() const { return minimizer(); }

  std::string sample_space() const override;
  bool in_support(const Sample& z) const override;
  Sample sample(Rng& rng) const override;
  std::vector<Sample> support() const override;
  /// The zero vector.
  Vector canonical_init() const override;

  /// Precomputes the empirical Gram matrix so each gradient costs O(d^2).
  std::unique_ptr<EmpiricalObjective> bind(const Dataset& data) const override;

 protected:
  double loss_impl(std::span<const double> w, const Sample& z) const override;
  void accumulate_grad_impl(std::span<const double> w, const Sample& z, double scale,
                            std::span<double> out) const override;
  double population_risk_impl(std::span<const double> w) const override;

 private:
  using Law = std::pair<std::vector<Vector>, Vector>;
  NoiselessRegression(Law law, std::string name);

  double residual(std::span<const double> w, std::size_t k) const;

  std::vector<Vector> features_;
};

}  // namespace scolab
