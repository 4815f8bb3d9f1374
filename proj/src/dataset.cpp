#include "hiermc/dataset.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hiermc/errors.hpp"

namespace hiermc {

Dataset::Dataset(std::vector<double> y, std::vector<double> x1,
                 std::vector<double> x2, std::vector<double> x3)
    : y_(std::move(y)), x1_(std::move(x1)), x2_(std::move(x2)), x3_(std::move(x3)) {
  const std::size_t n = y_.size();
  if (x1_.size() != n || x2_.size() != n || x3_.size() != n) {
    throw DataError("dataset: y, x1, x2, x3 must all have the same length");
  }
  if (n < 2) {
    throw DataError("dataset: need at least 2 observations, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y_[i]) || !(y_[i] > 0.0)) {
      throw DataError("dataset: y must be strictly positive (row " +
                      std::to_string(i + 1) + ")");
    }
    if (!std::isfinite(x1_[i]) || !(x1_[i] > 0.0)) {
      throw DataError("dataset: x1 must be strictly positive (row " +
                      std::to_string(i + 1) + ")");
    }
    if (!std::isfinite(x2_[i])) {
      throw DataError("dataset: x2 must be finite (row " + std::to_string(i + 1) + ")");
    }
    if (x3_[i] != 0.0 && x3_[i] != 1.0) {
      throw DataError("dataset: x3 must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace hiermc
