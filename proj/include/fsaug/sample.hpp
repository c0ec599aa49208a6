#pragma once

#include <cstdint>
#include <optional>

#include "fsaug/matrix.hpp"

namespace fsaug {

// A variable-length real-valued time series. values is time x features;
// static inputs travel through the same pipeline as length-1 sequences.
struct SequenceSample {
  NumericMatrix values;
  std::optional<int> label;
  std::int64_t id = 0;

  int length() const { return static_cast<int>(values.rows()); }
  int feature_dim() const { return static_cast<int>(values.cols()); }
};

}  // namespace fsaug
