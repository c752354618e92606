#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scolab/instances.hpp"

namespace scolab {

/// Parsed `name{key=value,...}`; values are plain decimal numbers.
struct InstanceSpec {
  std::string family;
  std::map<std::string, double> params;

  std::optional<double> get(const std::string& key) const;
  std::string to_string() const;

  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

InstanceSpec parse_instance_spec(std::string_view text);

/// Run parameters that some families derive their constants from
/// (alpha = C/(eta T), lambda = 1/(eta T), eta_T = eta T, coupled n = dataset size).
struct InstanceContext {
  std::optional<double> eta;
  std::optional<double> T;
  std::optional<std::size_t> n;

  /// eta * T when both are known, else 1.
  double horizon() const;
};

std::unique_ptr<ProblemInstance> make_instance(const InstanceSpec& spec,
                                               const InstanceContext& context = {});

struct FamilyInfo {
  std::string family;
  std::string parameters;
  std::string role;
};

/// Every family accepted by `make_instance`, in a fixed order.
const std::vector<FamilyInfo>& instance_catalog();

}  // namespace scolab
