#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lmd/core/model.hpp"

namespace lmd::instances {

// Native text formats. Numbers are written in shortest round-trip form so
// load(save(x)) == x bit for bit. Lines starting with '#' are comments.
//
//   lmd-instance 1
//   name <rest of line>
//   customers <n>
//   epsilon <e>
//   fleet <m> <c_1> ... <c_m>
//   coords <0|1>
//   node <i> <start> <end> <service> [<x> <y>]      (i = 0..n)
//   durations
//   <n+1 rows of n+1 values>
//   end
void save_instance(const Instance& instance, std::ostream& out);
Instance load_instance(std::istream& in);

//   lmd-solution 1
//   objective <value>
//   routes <count>
//   route <vehicle> <stops> <id>...
//   schedule <n>
//   stop <id> <latency> <idle>                     (id = 1..n)
//   end
void save_solution(const Solution& solution, std::ostream& out);
Solution load_solution(std::istream& in);

Instance load_instance_file(const std::filesystem::path& path);
Solution load_solution_file(const std::filesystem::path& path);
void save_instance_file(const Instance& instance, const std::filesystem::path& path);
void save_solution_file(const Solution& solution, const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);

}  // namespace lmd::instances
