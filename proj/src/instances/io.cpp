#include "lmd/instances/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "lmd/instances/solomon.hpp"

namespace lmd::instances {

namespace {

constexpr int kInstanceVersion = 1;
constexpr int kSolutionVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, non-comment line split into tokens.
  std::vector<std::string> next(std::string_view expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;
      last_line_ = line;
      return tokens;
    }
    throw ParseError(line_no_, fmt::format("unexpected end of file, expected {}", expecting));
  }

  // Next line that must start with `keyword` and carry `count` values.
  std::vector<std::string> expect(std::string_view keyword, std::size_t count) {
    auto tokens = next(keyword);
    if (tokens[0] != keyword) {
      fail(fmt::format("expected `{}`, found `{}`", keyword, tokens[0]));
    }
    if (count != kAny && tokens.size() != count + 1) {
      fail(fmt::format("`{}` takes {} value(s), found {}", keyword, count, tokens.size() - 1));
    }
    return tokens;
  }

  const std::string& last_line() const { return last_line_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_no_, msg); }

  double number(const std::string& token) const {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail(fmt::format("`{}` is not a number", token));
    return v;
  }

  int integer(const std::string& token) const {
    int v = 0;
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), last, v);
    if (ec != std::errc{} || ptr != last) fail(fmt::format("`{}` is not an integer", token));
    return v;
  }

  static constexpr std::size_t kAny = static_cast<std::size_t>(-1);

 private:
  std::istream& in_;
  int line_no_ = 0;
  std::string last_line_;
};

void check_header(LineReader& reader, std::string_view magic, int version) {
  const auto tokens = reader.next(magic);
  if (tokens[0] != magic) reader.fail(fmt::format("not a `{}` file", magic));
  if (tokens.size() != 2 || reader.integer(tokens[1]) != version) {
    reader.fail(fmt::format("unsupported {} version `{}` (expected {})", magic,
                            tokens.size() > 1 ? tokens[1] : "", version));
  }
}

}  // namespace

std::string format_exact(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void save_instance(const Instance& instance, std::ostream& out) {
  const int n = instance.customer_count();
  out << "lmd-instance " << kInstanceVersion << '\n';
  out << "name " << instance.name << '\n';
  out << "customers " << n << '\n';
  out << "epsilon " << format_exact(instance.epsilon) << '\n';
  out << "fleet " << instance.vehicle_count();
  for (int c : instance.fleet) out << ' ' << c;
  out << '\n';
  out << "coords " << (instance.has_coords() ? 1 : 0) << '\n';
  for (int i = 0; i <= n; ++i) {
    out << "node " << i << ' ' << format_exact(instance.windows[i].start) << ' '
        << format_exact(instance.windows[i].end) << ' ' << format_exact(instance.service_times[i]);
    if (instance.has_coords()) {
      out << ' ' << format_exact(instance.coords[i].x) << ' ' << format_exact(instance.coords[i].y);
    }
    out << '\n';
  }
  out << "durations\n";
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) out << (j ? " " : "") << format_exact(instance.nominal(i, j));
    out << '\n';
  }
  out << "end\n";
}

Instance load_instance(std::istream& in) {
  LineReader reader(in);
  check_header(reader, "lmd-instance", kInstanceVersion);
  Instance inst;
  {
    reader.expect("name", LineReader::kAny);
    const std::string& line = reader.last_line();
    const auto at = line.find("name");
    std::string rest = line.substr(at + 4);
    const auto first = rest.find_first_not_of(" \t");
    inst.name = first == std::string::npos ? "" : rest.substr(first);
    while (!inst.name.empty() && (inst.name.back() == '\r' || inst.name.back() == ' ')) {
      inst.name.pop_back();
    }
  }
  const int n = reader.integer(reader.expect("customers", 1)[1]);
  if (n < 0) reader.fail("negative customer count");
  inst.epsilon = reader.number(reader.expect("epsilon", 1)[1]);
  {
    const auto tokens = reader.expect("fleet", LineReader::kAny);
    if (tokens.size() < 2) reader.fail("`fleet` needs a vehicle count");
    const int m = reader.integer(tokens[1]);
    if (m < 0 || tokens.size() != static_cast<std::size_t>(m) + 2) {
      reader.fail("fleet size does not match the number of capacities");
    }
    for (int k = 0; k < m; ++k) inst.fleet.push_back(reader.integer(tokens[k + 2]));
  }
  const int coords = reader.integer(reader.expect("coords", 1)[1]);
  if (coords != 0 && coords != 1) reader.fail("`coords` must be 0 or 1");
  for (int i = 0; i <= n; ++i) {
    const auto tokens = reader.expect("node", coords ? 6 : 4);
    if (reader.integer(tokens[1]) != i) reader.fail(fmt::format("expected node {}", i));
    inst.windows.push_back({reader.number(tokens[2]), reader.number(tokens[3])});
    inst.service_times.push_back(reader.number(tokens[4]));
    if (coords) inst.coords.push_back({reader.number(tokens[5]), reader.number(tokens[6])});
  }
  reader.expect("durations", 0);
  inst.nominal = DurationMatrix(n + 1);
  for (int i = 0; i <= n; ++i) {
    const auto tokens = reader.next("a duration row");
    if (tokens.size() != static_cast<std::size_t>(n + 1)) {
      reader.fail(fmt::format("duration row {} has {} values, expected {}", i, tokens.size(),
                              n + 1));
    }
    for (int j = 0; j <= n; ++j) inst.nominal(i, j) = reader.number(tokens[j]);
  }
  reader.expect("end", 0);
  try {
    inst.validate();
  } catch (const InputError& e) {
    reader.fail(fmt::format("schema violation: {}", e.what()));
  }
  return inst;
}

void save_solution(const Solution& solution, std::ostream& out) {
  out << "lmd-solution " << kSolutionVersion << '\n';
  out << "objective " << format_exact(solution.objective) << '\n';
  out << "routes " << solution.routes.size() << '\n';
  for (const Route& r : solution.routes) {
    out << "route " << r.vehicle << ' ' << r.stops.size();
    for (NodeId s : r.stops) out << ' ' << s;
    out << '\n';
  }
  const int n = solution.latency.empty() ? 0 : static_cast<int>(solution.latency.size()) - 1;
  out << "schedule " << n << '\n';
  for (int i = 1; i <= n; ++i) {
    out << "stop " << i << ' ' << format_exact(solution.latency[i]) << ' '
        << format_exact(solution.idle[i]) << '\n';
  }
  out << "end\n";
}

Solution load_solution(std::istream& in) {
  LineReader reader(in);
  check_header(reader, "lmd-solution", kSolutionVersion);
  Solution sol;
  sol.objective = reader.number(reader.expect("objective", 1)[1]);
  const int count = reader.integer(reader.expect("routes", 1)[1]);
  if (count < 0) reader.fail("negative route count");
  for (int r = 0; r < count; ++r) {
    const auto tokens = reader.expect("route", LineReader::kAny);
    if (tokens.size() < 3) reader.fail("`route` needs a vehicle and a stop count");
    Route route;
    route.vehicle = reader.integer(tokens[1]);
    const int stops = reader.integer(tokens[2]);
    if (stops < 0 || tokens.size() != static_cast<std::size_t>(stops) + 3) {
      reader.fail("stop count does not match the listed stops");
    }
    for (int s = 0; s < stops; ++s) route.stops.push_back(reader.integer(tokens[s + 3]));
    sol.routes.push_back(std::move(route));
  }
  const int n = reader.integer(reader.expect("schedule", 1)[1]);
  if (n < 0) reader.fail("negative schedule size");
  sol.latency.assign(n + 1, 0.0);
  sol.idle.assign(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    const auto tokens = reader.expect("stop", 3);
    if (reader.integer(tokens[1]) != i) reader.fail(fmt::format("expected stop {}", i));
    sol.latency[i] = reader.number(tokens[2]);
    sol.idle[i] = reader.number(tokens[3]);
  }
  if (n == 0) {
    sol.latency.clear();
    sol.idle.clear();
  }
  reader.expect("end", 0);
  return sol;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return load_instance(in);
}

Solution load_solution_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return load_solution(in);
}

void save_instance_file(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  save_instance(instance, out);
}

void save_solution_file(const Solution& solution, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  save_solution(solution, out);
}

}  // namespace lmd::instances
