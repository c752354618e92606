#pragma once

#include <initializer_list>
#include <vector>

#include "scolab/types.hpp"

namespace scolab::testing {

inline Dataset dataset_of(std::initializer_list<int> labels) {
  Dataset d;
  for (int v : labels) d.samples.emplace_back(v);
  return d;
}

inline Dataset identity_dataset(int n) {
  Dataset d;
  for (int i = 1; i <= n; ++i) d.samples.emplace_back(i);
  return d;
}

}  // namespace scolab::testing
