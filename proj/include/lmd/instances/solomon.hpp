#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lmd/core/model.hpp"

namespace lmd::instances {

class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct SolomonOptions {
  // Fleet overrides; the file header is used when unset.
  std::optional<int> vehicles;
  std::optional<int> capacity;
  double epsilon = 0.0;
};

// Reads the Solomon VRPTW layout: a name line, a VEHICLE section with
// "NUMBER CAPACITY", then CUSTOMER rows `id x y demand ready due service`.
// Row id 0 is the depot; the remaining rows become customers 1..n in file
// order. Durations are Euclidean distances at one distance unit per second.
Instance parse_solomon(std::string_view text, const SolomonOptions& options = {});

}  // namespace lmd::instances
