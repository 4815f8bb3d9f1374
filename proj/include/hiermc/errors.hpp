#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hiermc {

// Bad input data: malformed files, invalid dataset contents. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The slice/Gibbs machinery failed to produce a usable draw. CLI exit code 3.
class SamplerFault : public std::runtime_error {
 public:
  SamplerFault(std::string coordinate, std::size_t iteration, const std::string& what)
      : std::runtime_error(what), coordinate_(std::move(coordinate)), iteration_(iteration) {}

  const std::string& coordinate() const { return coordinate_; }
  std::size_t iteration() const { return iteration_; }

 private:
  std::string coordinate_;
  std::size_t iteration_;
};

}  // namespace hiermc
