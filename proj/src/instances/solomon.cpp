#include "lmd/instances/solomon.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <vector>

#include <fmt/format.h>

namespace lmd::instances {

ParseError::ParseError(int line, const std::string& what)
    : InputError(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_number(std::string_view token) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool looks_numeric(std::string_view token) {
  return !token.empty() && (std::isdigit(static_cast<unsigned char>(token[0])) ||
                            token[0] == '-' || token[0] == '+' || token[0] == '.');
}

struct Row {
  int line;
  int id;
  double x, y, demand, ready, due, service;
};

}  // namespace

Instance parse_solomon(std::string_view text, const SolomonOptions& options) {
  enum class Section { kPreamble, kVehicle, kCustomer };
  Section section = Section::kPreamble;
  std::string name;
  std::optional<int> header_vehicles;
  std::optional<int> header_capacity;
  std::vector<Row> rows;
  std::set<int> ids;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = split(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }

    if (!looks_numeric(tokens[0])) {
      if (tokens[0] == "VEHICLE") {
        section = Section::kVehicle;
      } else if (tokens[0] == "CUSTOMER") {
        section = Section::kCustomer;
      } else if (section == Section::kPreamble && name.empty()) {
        name = std::string(tokens[0]);
      }
      if (end == text.size()) break;
      continue;
    }

    if (section == Section::kVehicle) {
      if (tokens.size() != 2) throw ParseError(line_no, "expected `NUMBER CAPACITY`");
      const auto v = to_number(tokens[0]);
      const auto c = to_number(tokens[1]);
      if (!v || !c || *v < 1 || *c < 1 || std::floor(*v) != *v || std::floor(*c) != *c) {
        throw ParseError(line_no, "vehicle number and capacity must be positive integers");
      }
      header_vehicles = static_cast<int>(*v);
      header_capacity = static_cast<int>(*c);
      section = Section::kPreamble;
    } else if (section == Section::kCustomer) {
      if (tokens.size() != 7) {
        throw ParseError(line_no, fmt::format("expected 7 fields, found {}", tokens.size()));
      }
      double f[7];
      for (int i = 0; i < 7; ++i) {
        const auto v = to_number(tokens[i]);
        if (!v) throw ParseError(line_no, fmt::format("field {} is not a number", i + 1));
        f[i] = *v;
      }
      if (f[0] < 0 || std::floor(f[0]) != f[0]) {
        throw ParseError(line_no, "customer id must be a non-negative integer");
      }
      const int id = static_cast<int>(f[0]);
      if (!ids.insert(id).second) throw ParseError(line_no, fmt::format("duplicate id {}", id));
      if (f[5] < f[4]) {
        throw ParseError(line_no, fmt::format("due date {} precedes ready time {}", f[5], f[4]));
      }
      if (f[6] < 0) throw ParseError(line_no, "negative service time");
      rows.push_back({line_no, id, f[1], f[2], f[3], f[4], f[5], f[6]});
    } else {
      throw ParseError(line_no, "numeric data outside the VEHICLE or CUSTOMER section");
    }
    if (end == text.size()) break;
  }

  if (rows.empty() || rows.front().id != 0) {
    throw ParseError(rows.empty() ? line_no : rows.front().line,
                     "missing depot: the first customer row must have id 0");
  }
  const int vehicles = options.vehicles.value_or(header_vehicles.value_or(0));
  const int capacity = options.capacity.value_or(header_capacity.value_or(0));
  if (vehicles < 1 || capacity < 1) {
    throw ParseError(line_no, "fleet size unknown: no VEHICLE header and no override");
  }

  Instance inst;
  inst.name = name;
  inst.epsilon = options.epsilon;
  const int nodes = static_cast<int>(rows.size());
  inst.nominal = DurationMatrix(nodes);
  for (const Row& r : rows) {
    inst.coords.push_back({r.x, r.y});
    inst.windows.push_back({r.ready, r.due});
    inst.service_times.push_back(r.service);
  }
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i != j) {
        inst.nominal(i, j) = std::hypot(inst.coords[i].x - inst.coords[j].x,
                                        inst.coords[i].y - inst.coords[j].y);
      }
    }
  }
  inst.fleet.assign(vehicles, capacity);
  inst.validate();
  return inst;
}

}  // namespace lmd::instances
