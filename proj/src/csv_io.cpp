#include "hiermc/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "hiermc/distributions.hpp"
#include "hiermc/errors.hpp"

namespace hiermc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& raw, std::size_t row, const std::string& column) {
  const std::string text = trim(raw);
  if (text.empty()) {
    throw DataError("csv row " + std::to_string(row) + ", column '" + column +
                    "': empty cell");
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw DataError("csv row " + std::to_string(row) + ", column '" + column +
                    "': not a number: '" + text + "'");
  }
  return value;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path);
  return in;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  const std::vector<std::string> expected = {"ffq", "dlw", "socdes", "edu"};
  for (const std::string& name : expected) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError(path + ": missing column '" + name +
                      "' (expected header ffq,dlw,socdes,edu)");
    }
  }
  std::size_t idx[4];
  for (int k = 0; k < 4; ++k) {
    idx[k] = static_cast<std::size_t>(
        std::find(header.begin(), header.end(), expected[k]) - header.begin());
  }

  std::vector<double> y, x1, x2, x3;
  std::size_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() < header.size()) {
      throw DataError(path + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    const double ffq = parse_number(fields[idx[0]], row, "ffq");
    const double dlw = parse_number(fields[idx[1]], row, "dlw");
    const double socdes = parse_number(fields[idx[2]], row, "socdes");
    const double edu = parse_number(fields[idx[3]], row, "edu");
    if (!(ffq > 0.0)) {
      throw DataError(path + ": row " + std::to_string(row) +
                      ": ffq must be > 0, got " + fields[idx[0]]);
    }
    if (!(dlw > 0.0)) {
      throw DataError(path + ": row " + std::to_string(row) +
                      ": dlw must be > 0, got " + fields[idx[1]]);
    }
    if (edu != 0.0 && edu != 1.0) {
      throw DataError(path + ": row " + std::to_string(row) +
                      ": edu must be 0 or 1, got " + fields[idx[3]]);
    }
    y.push_back(ffq);
    x1.push_back(dlw);
    x2.push_back(socdes);
    x3.push_back(edu);
  }
  if (y.size() < 2) {
    throw DataError(path + ": need at least 2 data rows, got " +
                    std::to_string(y.size()));
  }
  return Dataset(std::move(y), std::move(x1), std::move(x2), std::move(x3));
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "ffq,dlw,socdes,edu\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_full(data.y()[i]) << ',' << format_full(data.x1()[i]) << ','
        << format_full(data.x2()[i]) << ',' << format_full(data.x3()[i]) << '\n';
  }
}

void write_samples_csv(const std::string& path, const ModelSpec& spec,
                       const std::vector<PosteriorSamples>& chains,
                       const SamplerConfig& config, bool dump_effects) {
  std::ofstream out = open_out(path);
  out << "chain,iter,beta0,beta1,beta2,beta3,beta4,var_y,var_eps,r_y,alpha1,"
         "alpha2,deviance";
  std::size_t n_eps = 0;
  if (dump_effects && spec.has_effects()) {
    for (const auto& chain : chains) {
      if (!chain.draws.empty()) {
        n_eps = chain.draws.front().eps.size();
        break;
      }
    }
    for (std::size_t i = 0; i < n_eps; ++i) out << ",eps_" << i;
  }
  out << '\n';

  for (const PosteriorSamples& chain : chains) {
    for (std::size_t d = 0; d < chain.draws.size(); ++d) {
      const ParameterState& ps = chain.draws[d];
      const std::size_t iter = config.burn_in + (d + 1) * config.thin;
      out << chain.chain_id << ',' << iter;
      for (std::size_t k = 0; k < 5; ++k) {
        out << ',' << format_full(k < ps.beta.size() ? ps.beta[k] : kNaN);
      }
      out << ',' << format_full(spec.has_var_y() ? ps.var_y : kNaN);
      out << ',' << format_full(spec.has_effects() ? ps.var_eps : kNaN);
      out << ',' << format_full(spec.has_r_y() ? ps.r_y : kNaN);
      const bool od = spec.has_overdispersed_hyper();
      out << ',' << format_full(od ? ps.alpha1 : kNaN);
      out << ',' << format_full(od ? ps.alpha2 : kNaN);
      out << ',' << format_full(chain.deviance_trace[d]);
      for (std::size_t i = 0; i < n_eps; ++i) out << ',' << format_full(ps.eps[i]);
      out << '\n';
    }
  }
}

std::size_t SampleTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DataError("samples table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

SampleTable read_samples_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  SampleTable table;
  table.columns = split_line(trim(line));
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.columns.size()) {
      throw DataError(path + ": row " + std::to_string(row) +
                      " has wrong field count");
    }
    std::vector<double> values(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      values[k] = parse_number(fields[k], row, table.columns[k]);
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

void write_residuals_csv(const std::string& path, const std::vector<double>& residuals) {
  std::vector<double> defined;
  for (double r : residuals) {
    if (!std::isnan(r)) defined.push_back(r);
  }
  std::sort(defined.begin(), defined.end());
  std::ofstream out = open_out(path);
  out << "quantile,residual\n";
  const std::size_t m = defined.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double q =
        normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
    out << format_full(q) << ',' << format_full(defined[i]) << '\n';
  }
}

std::vector<std::pair<double, double>> read_residuals_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::pair<double, double>> pairs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != 2) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected 2 fields");
    }
    pairs.emplace_back(parse_number(fields[0], row, "quantile"),
                       parse_number(fields[1], row, "residual"));
  }
  return pairs;
}

void write_convergence_txt(const std::string& path, const ConvergenceReport& report,
                           bool available) {
  std::ofstream out = open_out(path);
  if (!available) {
    out << "convergence: unavailable (need at least 2 chains for BGR)\n";
    return;
  }
  char line[128];
  std::snprintf(line, sizeof(line), "%-12s %-10s %s\n", "name", "R_hat", "status");
  out << line;
  for (const ConvergenceEntry& e : report.entries) {
    if (e.degenerate) {
      std::snprintf(line, sizeof(line), "%-12s %-10s %s\n", e.name.c_str(), "-",
                    "degenerate");
    } else {
      std::snprintf(line, sizeof(line), "%-12s %-10.4f %s\n", e.name.c_str(), e.r_hat,
                    e.pass ? "pass" : "FAIL");
    }
    out << line;
  }
  std::snprintf(line, sizeof(line), "overall: %s (threshold %.3f)\n",
                report.pass ? "pass" : "FAIL", report.threshold);
  out << line;
}

}  // namespace hiermc
