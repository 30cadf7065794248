#include "lmd/exact/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "lmd/milp/lp.hpp"

// Bound validity. Let R be the customers not yet routed at a node, k the open
// vehicle with tail node t at latency T, and V the vehicles not yet opened.
// In every completion each j in R is reached either from t along vehicle k or
// from the depot along some vehicle in V, so
//   l_j >= max(s_j, min(T + sp(t, j), sp(0, j)))
// with sp the shortest-path closure of the arc times (waiting only delays).
// Summing gives the first bound. For the second, the predecessor of j in any
// completion lies in R, is t, or is the depot, so the arc into j costs at
// least a_j = min over those predecessors. The customer in position p of a
// vehicle starting at time S has latency >= S + (sum of p distinct a_j)
// >= S + A_p, A_p the sum of the p smallest a_j. Every completion fills |R|
// distinct (vehicle, position) slots, so the total is at least the sum of
// the |R| smallest slot values. Both bounds ignore the remaining equality and
// integrality structure, hence are relaxations of the model restricted to
// the node's fixings.
//
// Symmetry. Consecutive vehicles with equal capacity are interchangeable, so
// only solutions in which such a block lists its non-empty routes first,
// ordered by first customer, are enumerated.
//
// Dominance. Two nodes with the same open vehicle, tail, load, symmetry
// constraint and routed set have identical completion sets; the one with
// larger accumulated latency and later tail latency cannot be better.

namespace lmd::exact {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleAtLimit: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kLimitNoSolution: return "timeout";
  }
  return "unknown";
}

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxCustomers = 63;
constexpr std::int16_t kCloseStep = -1;

struct SearchNode {
  std::int32_t parent = -1;
  std::int16_t step = kCloseStep;  // customer appended by this branch
  std::int16_t vehicle = 0;
  std::int16_t tail = 0;
  std::int16_t used = 0;
  // First customer of the open vehicle once used, otherwise the lower limit
  // imposed on it by the previous identical vehicle (n+1 blocks it).
  std::int16_t sym = 0;
  std::int16_t depth = 0;
  bool stale = false;
  std::uint64_t visited = 0;
  double time = 0.0;
  double cost = 0.0;
  double bound = 0.0;
};

struct StateKey {
  std::uint64_t visited;
  std::int16_t vehicle;
  std::int16_t tail;
  std::int16_t used;
  std::int16_t sym;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = k.visited * 0x9E3779B97F4A7C15ull;
    h ^= (static_cast<std::uint64_t>(static_cast<std::uint16_t>(k.vehicle)) << 48) ^
         (static_cast<std::uint64_t>(static_cast<std::uint16_t>(k.tail)) << 32) ^
         (static_cast<std::uint64_t>(static_cast<std::uint16_t>(k.used)) << 16) ^
         static_cast<std::uint64_t>(static_cast<std::uint16_t>(k.sym));
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 32;
    return static_cast<std::size_t>(h);
  }
};

struct ParetoEntry {
  double cost;
  double time;
  std::int32_t node;
};

struct QueueEntry {
  double bound;
  std::int16_t depth;
  std::int32_t id;
};

struct QueueOrder {
  // std::priority_queue pops the "largest"; we want the smallest bound,
  // then the deepest node, then the oldest.
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

Solution schedule(const milp::RoutingData& data, std::vector<Route> routes) {
  const int n = data.customers;
  Solution sol;
  sol.latency.assign(n + 1, 0.0);
  sol.idle.assign(n + 1, 0.0);
  for (const Route& route : routes) {
    int prev = 0;
    double latency = 0.0;
    for (int stop : route.stops) {
      const double arrival = latency + data.arc(prev, stop);
      latency = std::max(data.windows[stop].start, arrival);
      sol.latency[stop] = latency;
      sol.idle[stop] = latency - arrival;
      sol.objective += latency;
      prev = stop;
    }
  }
  sol.routes = std::move(routes);
  return sol;
}

// Feasibility of externally supplied routes under the model's data.
bool routes_feasible(const milp::RoutingData& data, const std::vector<Route>& routes) {
  const int n = data.customers;
  std::vector<int> seen(n + 1, 0);
  std::vector<bool> vehicle_used(data.vehicles, false);
  for (const Route& route : routes) {
    if (route.vehicle < 0 || route.vehicle >= data.vehicles || vehicle_used[route.vehicle]) {
      return false;
    }
    vehicle_used[route.vehicle] = true;
    if (static_cast<int>(route.stops.size()) > data.capacities[route.vehicle]) return false;
    int prev = 0;
    double latency = 0.0;
    for (int stop : route.stops) {
      if (stop < 1 || stop > n || seen[stop]++) return false;
      latency = std::max(data.windows[stop].start, latency + data.arc(prev, stop));
      if (latency > data.windows[stop].end + kTol) return false;
      prev = stop;
    }
  }
  return std::all_of(seen.begin() + 1, seen.end(), [](int c) { return c == 1; });
}

class BranchAndBound {
 public:
  BranchAndBound(const milp::MilpModel& model, const ExactOptions& options)
      : model_(model), data_(model.data), options_(options) {
    n_ = data_.customers;
    m_ = data_.vehicles;
    full_ = n_ == 64 ? ~0ull : ((1ull << n_) - 1ull);
    sp_ = DurationMatrix(n_ + 1);
    for (int i = 0; i <= n_; ++i) {
      for (int j = 0; j <= n_; ++j) sp_(i, j) = i == j ? 0.0 : data_.arc(i, j);
    }
    for (int via = 0; via <= n_; ++via) {
      for (int i = 0; i <= n_; ++i) {
        for (int j = 0; j <= n_; ++j) {
          sp_(i, j) = std::min(sp_(i, j), sp_(i, via) + sp_(via, j));
        }
      }
    }
    suffix_cap_.assign(m_ + 1, 0);
    for (int k = m_ - 1; k >= 0; --k) suffix_cap_[k] = suffix_cap_[k + 1] + data_.capacities[k];
  }

  ExactResult run() {
    const auto start = std::chrono::steady_clock::now();
    ExactResult result;

    if (options_.root_lp_variable_limit > 0 && n_ > 0 &&
        model_.variables.size() <= options_.root_lp_variable_limit) {
      const milp::LpResult lp = milp::solve_relaxation(model_);
      if (lp.status == milp::LpStatus::kOptimal) result.root_lp_bound = lp.objective;
    }

    if (options_.warm_start && routes_feasible(data_, *options_.warm_start)) {
      Solution s = schedule(data_, *options_.warm_start);
      incumbent_cost_ = s.objective;
      incumbent_routes_ = s.routes;
      has_incumbent_ = true;
    }

    bool exhausted = true;
    if (n_ == 0) {
      incumbent_cost_ = 0.0;
      incumbent_routes_.clear();
      has_incumbent_ = true;
    } else if (m_ > 0) {
      exhausted = search(start);
    }

    result.nodes_expanded = expanded_;
    result.nodes_dominated = dominated_;
    if (has_incumbent_) {
      result.solution = schedule(data_, incumbent_routes_);
      result.objective = result.solution.objective;
      if (n_ > 0) {
        const std::vector<double> values = model_.encode(result.solution.routes);
        if (!model_.violations(values).empty()) {
          throw std::logic_error("incumbent violates the model rows");
        }
      }
    }
    if (exhausted) {
      result.status = has_incumbent_ ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
      result.lower_bound = has_incumbent_ ? result.objective : kInf;
    } else {
      result.status = has_incumbent_ ? SolveStatus::kFeasibleAtLimit : SolveStatus::kLimitNoSolution;
      double lb = open_bound_;
      if (std::isfinite(result.root_lp_bound)) lb = std::max(lb, result.root_lp_bound);
      result.lower_bound = has_incumbent_ ? std::min(lb, result.objective) : lb;
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  // Returns true when the tree was exhausted, false on a limit.
  bool search(std::chrono::steady_clock::time_point start) {
    SearchNode root;
    root.bound = bound(root);
    if (root.bound == kInf) return true;
    nodes_.push_back(root);
    queue_.push({root.bound, 0, 0});
    register_state(0);

    while (!queue_.empty()) {
      const QueueEntry top = queue_.top();
      if (nodes_[top.id].stale) {
        queue_.pop();
        continue;
      }
      if (has_incumbent_ && top.bound >= incumbent_cost_ - kTol) return true;
      if ((expanded_ & 1023u) == 0) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > options_.time_limit || nodes_.size() > options_.node_limit) {
          open_bound_ = top.bound;
          return false;
        }
      }
      queue_.pop();
      ++expanded_;
      expand(top.id);
    }
    return true;
  }

  void expand(std::int32_t id) {
    const SearchNode node = nodes_[id];
    const int k = node.vehicle;
    const int cap = data_.capacities[k];
    if (node.used < cap) {
      for (int j = 1; j <= n_; ++j) {
        const std::uint64_t bit = 1ull << (j - 1);
        if (node.visited & bit) continue;
        if (node.used == 0 && j <= node.sym) continue;
        const double latency =
            std::max(data_.windows[j].start, node.time + data_.arc(node.tail, j));
        if (latency > data_.windows[j].end + kTol) continue;
        SearchNode child;
        child.parent = id;
        child.step = static_cast<std::int16_t>(j);
        child.vehicle = node.vehicle;
        child.tail = static_cast<std::int16_t>(j);
        child.used = static_cast<std::int16_t>(node.used + 1);
        child.sym = node.used == 0 ? static_cast<std::int16_t>(j) : node.sym;
        child.depth = static_cast<std::int16_t>(node.depth + 1);
        child.visited = node.visited | bit;
        child.time = latency;
        child.cost = node.cost + latency;
        offer(child);
      }
    }
    if (k + 1 < m_) {
      SearchNode child;
      child.parent = id;
      child.step = kCloseStep;
      child.vehicle = static_cast<std::int16_t>(k + 1);
      child.depth = node.depth;
      child.visited = node.visited;
      child.cost = node.cost;
      if (data_.capacities[k + 1] == cap) {
        child.sym = node.used == 0 ? static_cast<std::int16_t>(n_ + 1) : node.sym;
      }
      offer(child);
    }
  }

  void offer(SearchNode child) {
    if (child.visited == full_) {
      if (!has_incumbent_ || child.cost < incumbent_cost_ - kTol) {
        nodes_.push_back(child);
        incumbent_cost_ = child.cost;
        incumbent_routes_ = reconstruct(static_cast<std::int32_t>(nodes_.size() - 1));
        has_incumbent_ = true;
      }
      return;
    }
    child.bound = bound(child);
    if (child.bound == kInf) return;
    if (has_incumbent_ && child.bound >= incumbent_cost_ - kTol) return;
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(child);
    if (!register_state(id)) {
      nodes_.pop_back();
      ++dominated_;
      return;
    }
    queue_.push({child.bound, child.depth, id});
  }

  // Records the node in the dominance table; false if an existing state
  // dominates it. Entries it dominates are marked stale.
  bool register_state(std::int32_t id) {
    const SearchNode& node = nodes_[id];
    const StateKey key{node.visited, node.vehicle, node.tail, node.used, node.sym};
    auto& entries = states_[key];
    for (const ParetoEntry& e : entries) {
      if (e.cost <= node.cost + kTol && e.time <= node.time + kTol) return false;
    }
    std::erase_if(entries, [&](const ParetoEntry& e) {
      if (node.cost <= e.cost + kTol && node.time <= e.time + kTol) {
        nodes_[e.node].stale = true;
        return true;
      }
      return false;
    });
    entries.push_back({node.cost, node.time, id});
    return true;
  }

  double bound(const SearchNode& node) {
    const std::uint64_t remaining = full_ & ~node.visited;
    const int r = std::popcount(remaining);
    if (r == 0) return node.cost;
    const int k = node.vehicle;
    const int cur_cap = node.used == 0 && node.sym > n_ ? 0 : data_.capacities[k] - node.used;
    const int future_cap = suffix_cap_[k + 1];
    if (cur_cap + future_cap < r) return kInf;
    const bool cur_open = cur_cap > 0;
    const bool future = future_cap > 0;

    double per_customer = 0.0;
    min_arc_.clear();
    for (int j = 1; j <= n_; ++j) {
      if (!(remaining & (1ull << (j - 1)))) continue;
      double reach = kInf;
      double arc_in = kInf;
      if (cur_open) {
        reach = node.time + sp_(node.tail, j);
        arc_in = data_.arc(node.tail, j);
      }
      if (future) {
        reach = std::min(reach, sp_(0, j));
        arc_in = std::min(arc_in, data_.arc(0, j));
      }
      const double lb = std::max(data_.windows[j].start, reach);
      if (lb > data_.windows[j].end + kTol) return kInf;
      per_customer += lb;
      for (int p = 1; p <= n_; ++p) {
        if (p != j && (remaining & (1ull << (p - 1)))) arc_in = std::min(arc_in, data_.arc(p, j));
      }
      min_arc_.push_back(arc_in);
    }

    std::sort(min_arc_.begin(), min_arc_.end());
    prefix_.assign(r + 1, 0.0);
    for (int p = 0; p < r; ++p) prefix_[p + 1] = prefix_[p] + min_arc_[p];
    slots_.clear();
    for (int p = 1; p <= std::min(cur_cap, r); ++p) slots_.push_back(node.time + prefix_[p]);
    for (int v = k + 1; v < m_; ++v) {
      for (int p = 1; p <= std::min(data_.capacities[v], r); ++p) slots_.push_back(prefix_[p]);
    }
    std::nth_element(slots_.begin(), slots_.begin() + (r - 1), slots_.end());
    double slot_total = 0.0;
    for (int i = 0; i < r; ++i) slot_total += slots_[i];

    return node.cost + std::max(per_customer, slot_total);
  }

  std::vector<Route> reconstruct(std::int32_t id) const {
    std::vector<std::vector<int>> stops(m_);
    for (std::int32_t at = id; at >= 0; at = nodes_[at].parent) {
      const SearchNode& node = nodes_[at];
      if (node.step != kCloseStep) stops[node.vehicle].push_back(node.step);
    }
    std::vector<Route> routes;
    for (int k = 0; k < m_; ++k) {
      if (stops[k].empty()) continue;
      std::reverse(stops[k].begin(), stops[k].end());
      routes.push_back({k, std::move(stops[k])});
    }
    return routes;
  }

  const milp::MilpModel& model_;
  const milp::RoutingData& data_;
  const ExactOptions& options_;
  int n_ = 0;
  int m_ = 0;
  std::uint64_t full_ = 0;
  DurationMatrix sp_;
  std::vector<int> suffix_cap_;

  std::vector<SearchNode> nodes_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue_;
  std::unordered_map<StateKey, std::vector<ParetoEntry>, StateKeyHash> states_;
  std::size_t expanded_ = 0;
  std::size_t dominated_ = 0;
  double open_bound_ = 0.0;

  bool has_incumbent_ = false;
  double incumbent_cost_ = kInf;
  std::vector<Route> incumbent_routes_;

  std::vector<double> min_arc_;
  std::vector<double> prefix_;
  std::vector<double> slots_;
};

}  // namespace

ExactResult solve_exact(const milp::MilpModel& model, const ExactOptions& options) {
  if (model.data.customers > kMaxCustomers) {
    throw InputError(fmt::format("exact solver supports at most {} customers, got {}",
                                 kMaxCustomers, model.data.customers));
  }
  BranchAndBound bnb(model, options);
  return bnb.run();
}

}  // namespace lmd::exact
