#include "lmd/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lmd::milp {

int MilpModel::arc_var(int vehicle, int from, int to) const {
  const int nodes = node_count();
  const int per_vehicle = nodes * (nodes - 1);
  return vehicle * per_vehicle + from * (nodes - 1) + (to < from ? to : to - 1);
}

int MilpModel::latency_var(int node) const {
  const int nodes = node_count();
  return data.vehicles * nodes * (nodes - 1) + node;
}

RowCensus MilpModel::census() const {
  RowCensus c;
  for (const auto& row : rows) {
    switch (row.family) {
      case RowFamily::kAssignment: ++c.assignment; break;
      case RowFamily::kFlowConservation: ++c.flow; break;
      case RowFamily::kDepartOnce:
      case RowFamily::kArriveOnce: ++c.trip; break;
      case RowFamily::kNoLeaveTerminal:
      case RowFamily::kNoEnterDepot: ++c.dummy_flow; break;
      case RowFamily::kCapacity: ++c.capacity; break;
      case RowFamily::kPrecedence:
      case RowFamily::kDepotPrecedence:
      case RowFamily::kTerminalPrecedence: ++c.precedence; break;
    }
  }
  return c;
}

std::vector<std::size_t> MilpModel::violations(std::span<const double> values, double tol) const {
  std::vector<std::size_t> bad;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * values[t.var];
    const double scale = 1.0 + std::abs(row.rhs);
    bool ok = true;
    switch (row.sense) {
      case Sense::kLessEqual: ok = lhs <= row.rhs + tol * scale; break;
      case Sense::kGreaterEqual: ok = lhs >= row.rhs - tol * scale; break;
      case Sense::kEqual: ok = std::abs(lhs - row.rhs) <= tol * scale; break;
    }
    if (!ok) bad.push_back(r);
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const Variable& var = variables[v];
    const double x = values[v];
    bool ok = x >= var.lower - tol * (1.0 + std::abs(var.lower)) &&
              x <= var.upper + tol * (1.0 + std::abs(var.upper));
    if (var.binary) ok = ok && std::abs(x - std::round(x)) <= tol;
    if (!ok) bad.push_back(rows.size() + v);
  }
  return bad;
}

double MilpModel::evaluate_objective(std::span<const double> values) const {
  double total = 0.0;
  for (std::size_t v = 0; v < objective.size(); ++v) total += objective[v] * values[v];
  return total;
}

std::vector<double> MilpModel::encode(std::span<const Route> routes) const {
  std::vector<double> values(variables.size(), 0.0);
  if (variables.empty()) return values;
  const int terminal = data.customers + 1;
  double last = 0.0;
  for (const Route& route : routes) {
    if (route.stops.empty()) continue;
    int prev = 0;
    double latency = 0.0;
    for (int stop : route.stops) {
      values[arc_var(route.vehicle, prev, stop)] = 1.0;
      latency = std::max(data.windows[stop].start, latency + data.arc(prev, stop));
      values[latency_var(stop)] = latency;
      prev = stop;
    }
    values[arc_var(route.vehicle, prev, terminal)] = 1.0;
    last = std::max(last, latency);
  }
  values[latency_var(terminal)] = last;
  return values;
}

std::vector<Route> MilpModel::decode(std::span<const double> values) const {
  const int n = data.customers;
  const int terminal = n + 1;
  std::vector<Route> routes;
  for (int k = 0; k < data.vehicles; ++k) {
    Route route{k, {}};
    int at = 0;
    std::vector<bool> seen(n + 2, false);
    while (true) {
      int next = -1;
      for (int j = 1; j <= terminal; ++j) {
        if (j != at && values[arc_var(k, at, j)] > 0.5) {
          next = j;
          break;
        }
      }
      if (next < 0 || next == terminal || seen[next]) break;
      seen[next] = true;
      route.stops.push_back(next);
      at = next;
    }
    if (!route.stops.empty()) routes.push_back(std::move(route));
  }
  return routes;
}

MilpModel build_model(const Instance& instance, bool robust) {
  instance.validate(/*allow_empty_windows=*/true);
  MilpModel model;
  const int n = instance.customer_count();
  const int m = instance.vehicle_count();
  const int terminal = n + 1;
  const int nodes = n + 2;

  RoutingData& data = model.data;
  data.customers = n;
  data.vehicles = m;
  data.capacities = instance.fleet;
  data.windows = instance.windows;
  data.robust = robust;
  const DurationMatrix d = planning_durations(instance, robust);
  data.arc_time = DurationMatrix(n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i != j) data.arc_time(i, j) = instance.service_times[i] + d(i, j);
    }
  }
  // Earliest-start latencies along any route never exceed the latest window
  // opening plus the longest possible arc into every customer.
  double horizon = 0.0;
  for (int i = 1; i <= n; ++i) {
    horizon = std::max(horizon, instance.windows[i].start);
  }
  for (int j = 1; j <= n; ++j) {
    double longest = 0.0;
    for (int i = 0; i <= n; ++i) {
      if (i != j) longest = std::max(longest, data.arc_time(i, j));
    }
    horizon += longest;
  }
  data.horizon = horizon;

  if (n == 0) return model;

  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        if (i == j) continue;
        model.variables.push_back({fmt::format("x_{}_{}_{}", k, i, j), 0.0, 1.0, true});
      }
    }
  }
  for (int i = 0; i < nodes; ++i) {
    Variable l{fmt::format("l_{}", i), 0.0, kInfinity, false};
    if (i == 0) {
      l.upper = 0.0;
    } else if (i <= n) {
      l.lower = instance.windows[i].start;
      l.upper = instance.windows[i].end;
    }
    model.variables.push_back(std::move(l));
  }
  model.objective.assign(model.variables.size(), 0.0);
  for (int i = 1; i <= n; ++i) model.objective[model.latency_var(i)] = 1.0;

  auto add = [&model](std::string name, RowFamily family, std::vector<Term> terms, Sense sense,
                      double rhs) {
    model.rows.push_back({std::move(name), family, std::move(terms), sense, rhs});
  };

  for (int i = 1; i <= n; ++i) {
    std::vector<Term> terms;
    for (int k = 0; k < m; ++k) {
      for (int j = 1; j < nodes; ++j) {
        if (j != i) terms.push_back({model.arc_var(k, i, j), 1.0});
      }
    }
    add(fmt::format("assign_{}", i), RowFamily::kAssignment, std::move(terms), Sense::kEqual, 1.0);
  }
  for (int k = 0; k < m; ++k) {
    for (int i = 1; i <= n; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < nodes; ++j) {
        if (j == i) continue;
        terms.push_back({model.arc_var(k, j, i), 1.0});
        terms.push_back({model.arc_var(k, i, j), -1.0});
      }
      add(fmt::format("flow_{}_{}", k, i), RowFamily::kFlowConservation, std::move(terms),
          Sense::kEqual, 0.0);
    }
  }
  for (int k = 0; k < m; ++k) {
    std::vector<Term> terms;
    for (int j = 1; j <= n; ++j) terms.push_back({model.arc_var(k, 0, j), 1.0});
    add(fmt::format("depart_{}", k), RowFamily::kDepartOnce, std::move(terms), Sense::kLessEqual,
        1.0);
  }
  for (int k = 0; k < m; ++k) {
    std::vector<Term> terms;
    for (int i = 1; i <= n; ++i) terms.push_back({model.arc_var(k, i, terminal), 1.0});
    add(fmt::format("arrive_{}", k), RowFamily::kArriveOnce, std::move(terms), Sense::kLessEqual,
        1.0);
  }
  {
    std::vector<Term> out_of_terminal;
    std::vector<Term> into_depot;
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < nodes; ++j) {
        if (j == terminal) continue;
        out_of_terminal.push_back({model.arc_var(k, terminal, j), 1.0});
      }
      for (int i = 1; i < nodes; ++i) into_depot.push_back({model.arc_var(k, i, 0), 1.0});
    }
    add("terminal_closed", RowFamily::kNoLeaveTerminal, std::move(out_of_terminal), Sense::kEqual,
        0.0);
    add("depot_closed", RowFamily::kNoEnterDepot, std::move(into_depot), Sense::kEqual, 0.0);
  }
  // Counts arcs whose head is a customer, i.e. packages delivered.
  for (int k = 0; k < m; ++k) {
    std::vector<Term> terms;
    for (int i = 0; i < nodes; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) terms.push_back({model.arc_var(k, i, j), 1.0});
      }
    }
    add(fmt::format("capacity_{}", k), RowFamily::kCapacity, std::move(terms), Sense::kLessEqual,
        static_cast<double>(instance.fleet[k]));
  }

  auto latest = [&](int i) { return std::min(instance.windows[i].end, horizon); };
  for (int k = 0; k < m; ++k) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const double arc = data.arc(i, j);
        const double big_m = latest(i) + arc;
        model.big_m = std::max(model.big_m, big_m);
        add(fmt::format("prec_{}_{}_{}", k, i, j), RowFamily::kPrecedence,
            {{model.latency_var(i), 1.0}, {model.latency_var(j), -1.0},
             {model.arc_var(k, i, j), big_m}},
            Sense::kLessEqual, big_m - arc);
      }
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int j = 1; j <= n; ++j) {
      const double arc = data.arc(0, j);
      model.big_m = std::max(model.big_m, arc);
      add(fmt::format("prec_{}_0_{}", k, j), RowFamily::kDepotPrecedence,
          {{model.latency_var(0), 1.0}, {model.latency_var(j), -1.0},
           {model.arc_var(k, 0, j), arc}},
          Sense::kLessEqual, 0.0);
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int i = 1; i <= n; ++i) {
      const double big_m = latest(i);
      model.big_m = std::max(model.big_m, big_m);
      add(fmt::format("prec_{}_{}_{}", k, i, terminal), RowFamily::kTerminalPrecedence,
          {{model.latency_var(i), 1.0}, {model.latency_var(terminal), -1.0},
           {model.arc_var(k, i, terminal), big_m}},
          Sense::kLessEqual, big_m);
    }
  }
  return model;
}

namespace {

std::string format_number(double v) {
  if (v == kInfinity) return "+inf";
  if (v == -kInfinity) return "-inf";
  return fmt::format("{}", v);
}

void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<Variable>& vars) {
  std::string expr;
  for (const Term& t : terms) {
    if (t.coef == 0.0) continue;
    const double mag = std::abs(t.coef);
    const std::string coef = mag == 1.0 ? "" : format_number(mag) + " ";
    if (expr.empty()) {
      expr = (t.coef < 0.0 ? "- " : "") + coef + vars[t.var].name;
    } else {
      expr += (t.coef < 0.0 ? " - " : " + ") + coef + vars[t.var].name;
    }
  }
  if (expr.empty()) expr = "0 " + vars.front().name;
  out << expr;
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  fmt::print(out, "\\ cumulative vehicle routing with time windows ({} model)\n",
             model.data.robust ? "robust" : "nominal");
  fmt::print(out, "Minimize\n obj: ");
  std::vector<Term> obj;
  for (std::size_t v = 0; v < model.objective.size(); ++v) {
    if (model.objective[v] != 0.0) obj.push_back({static_cast<int>(v), model.objective[v]});
  }
  if (obj.empty()) {
    fmt::print(out, "0\n");
  } else {
    write_terms(out, obj, model.variables);
    fmt::print(out, "\n");
  }
  fmt::print(out, "Subject To\n");
  for (const Row& row : model.rows) {
    fmt::print(out, " {}: ", row.name);
    write_terms(out, row.terms, model.variables);
    const char* op = row.sense == Sense::kLessEqual ? "<=" : row.sense == Sense::kEqual ? "=" : ">=";
    fmt::print(out, " {} {}\n", op, format_number(row.rhs));
  }
  fmt::print(out, "Bounds\n");
  for (const Variable& v : model.variables) {
    if (v.binary) continue;
    if (v.lower == v.upper) {
      fmt::print(out, " {} = {}\n", v.name, format_number(v.lower));
    } else {
      fmt::print(out, " {} <= {} <= {}\n", format_number(v.lower), v.name, format_number(v.upper));
    }
  }
  fmt::print(out, "Binaries\n");
  int on_line = 0;
  for (const Variable& v : model.variables) {
    if (!v.binary) continue;
    fmt::print(out, " {}", v.name);
    if (++on_line == 10) {
      fmt::print(out, "\n");
      on_line = 0;
    }
  }
  if (on_line != 0) fmt::print(out, "\n");
  fmt::print(out, "End\n");
}

}  // namespace lmd::milp
