#pragma once

#include <cstddef>
#include <vector>

namespace hiermc {

// One observed cohort: FFQ energy intake outcome (kcal/day) with DLW energy
// expenditure, social desirability score and a college-degree indicator.
// Validated on construction; immutable afterwards.
class Dataset {
 public:
  Dataset(std::vector<double> y, std::vector<double> x1, std::vector<double> x2,
          std::vector<double> x3);

  std::size_t n() const { return y_.size(); }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& x1() const { return x1_; }
  const std::vector<double>& x2() const { return x2_; }
  const std::vector<double>& x3() const { return x3_; }

 private:
  std::vector<double> y_;
  std::vector<double> x1_;
  std::vector<double> x2_;
  std::vector<double> x3_;
};

}  // namespace hiermc
