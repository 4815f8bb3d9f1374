#pragma once

#include <string>
#include <vector>

#include "hiermc/dataset.hpp"
#include "hiermc/diagnostics.hpp"
#include "hiermc/sampler.hpp"

namespace hiermc {

// Input schema: header "ffq,dlw,socdes,edu", UTF-8, period decimal separator.
// Errors carry row/column locations and raise DataError.
Dataset load_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

// One row per retained draw per chain:
// chain,iter,beta0..beta4,var_y,var_eps,r_y,alpha1,alpha2,deviance[,eps_0..]
// Inactive fields are written as nan. 17 significant digits, so values
// round-trip exactly.
void write_samples_csv(const std::string& path, const ModelSpec& spec,
                       const std::vector<PosteriorSamples>& chains,
                       const SamplerConfig& config, bool dump_effects);

struct SampleTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws DataError
};

SampleTable read_samples_csv(const std::string& path);

// Two-column "quantile,residual" file, sorted by quantile; undefined
// residuals are omitted.
void write_residuals_csv(const std::string& path, const std::vector<double>& residuals);
std::vector<std::pair<double, double>> read_residuals_csv(const std::string& path);

void write_convergence_txt(const std::string& path, const ConvergenceReport& report,
                           bool available);

}  // namespace hiermc
