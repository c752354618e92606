#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scolab {

using Vector = std::vector<double>;

/// One draw z from an instance's distribution. Every family in the lab has a
/// finite, integer-labelled support; multi-copy samples carry one label per copy.
class Sample {
 public:
  Sample() = default;
  explicit Sample(int value) : parts_{value} {}
  explicit Sample(std::vector<int> parts) : parts_(std::move(parts)) {}

  int value() const { return parts_.front(); }
  std::span<const int> parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  std::vector<int> parts_;
};

/// Ordered multiset S = {z_1, ..., z_n}.
struct Dataset {
  std::vector<Sample> samples;
  std::string instance_name;
  std::uint64_t seed = 0;
  /// Name of the event the dataset was conditioned on, if any.
  std::optional<std::string> conditioning;
  /// Draws consumed to produce this dataset (1 unless rejection-sampled).
  std::uint64_t attempts = 1;

  std::size_t size() const { return samples.size(); }
};

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace scolab
