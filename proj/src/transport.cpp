#include "ideanet/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ideanet/errors.hpp"

namespace ideanet {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Simplex {
  int ns, nd;
  const std::vector<double>& supply;
  const std::vector<double>& demand;
  const std::vector<std::vector<double>>& cost;
  std::vector<std::vector<double>> flow;
  std::vector<std::vector<char>> basis;
  double tol;

  Simplex(const std::vector<double>& s, const std::vector<double>& d,
          const std::vector<std::vector<double>>& c)
      : ns(int(s.size())),
        nd(int(d.size())),
        supply(s),
        demand(d),
        cost(c),
        flow(ns, std::vector<double>(nd, 0.0)),
        basis(ns, std::vector<char>(nd, 0)) {
    double max_cost = 1.0;
    for (const auto& row : cost)
      for (double v : row) max_cost = std::max(max_cost, std::fabs(v));
    tol = 1e-12 * max_cost;
  }

  // Northwest-corner start: exactly ns+nd-1 basic cells, possibly degenerate.
  void initial_solution() {
    std::vector<double> a = supply, b = demand;
    int i = 0, j = 0;
    while (true) {
      double q = std::min(a[i], b[j]);
      flow[i][j] = q;
      basis[i][j] = 1;
      a[i] -= q;
      b[j] -= q;
      if (i == ns - 1 && j == nd - 1) break;
      if (i == ns - 1)
        ++j;
      else if (j == nd - 1)
        ++i;
      else if (a[i] <= b[j])
        ++i;
      else
        ++j;
    }
  }

  // Duals from the basis spanning tree (u[0] = 0).
  void compute_duals(std::vector<double>& u, std::vector<double>& v) const {
    u.assign(ns, kUnset);
    v.assign(nd, kUnset);
    u[0] = 0.0;
    bool progress = true;
    int remaining = ns + nd - 1;
    while (progress && remaining > 0) {
      progress = false;
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nd; ++j) {
          if (!basis[i][j]) continue;
          if (!std::isnan(u[i]) && std::isnan(v[j])) {
            v[j] = cost[i][j] - u[i];
            progress = true;
            --remaining;
          } else if (std::isnan(u[i]) && !std::isnan(v[j])) {
            u[i] = cost[i][j] - v[j];
            progress = true;
            --remaining;
          }
        }
    }
    for (int i = 0; i < ns; ++i)
      if (std::isnan(u[i])) throw std::logic_error("transport basis not a spanning tree");
    for (int j = 0; j < nd; ++j)
      if (std::isnan(v[j])) throw std::logic_error("transport basis not a spanning tree");
  }

  // Unique path in the basis tree from row `si` to column `tj`.
  // Nodes: rows 0..ns-1, columns ns..ns+nd-1.
  std::vector<int> tree_path(int si, int tj) const {
    const int total = ns + nd;
    std::vector<std::vector<int>> adj(total);
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < nd; ++j)
        if (basis[i][j]) {
          adj[i].push_back(ns + j);
          adj[ns + j].push_back(i);
        }
    std::vector<int> parent(total, -2);
    std::vector<int> stack = {si};
    parent[si] = -1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (u == ns + tj) break;
      for (int w : adj[u])
        if (parent[w] == -2) {
          parent[w] = u;
          stack.push_back(w);
        }
    }
    std::vector<int> path;
    for (int u = ns + tj; u != -1; u = parent[u]) path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;  // si, col, row, ..., ns+tj
  }

  double solve() {
    initial_solution();
    std::vector<double> u, v;
    const long max_iter = 1000L * (ns + nd) + 10000;
    for (long iter = 0; iter < max_iter; ++iter) {
      compute_duals(u, v);
      // Entering variable: most negative reduced cost; Bland-style first
      // negative after many iterations to rule out cycling.
      const bool bland = iter > max_iter / 2;
      int ei = -1, ej = -1;
      double best = -tol;
      for (int i = 0; i < ns && !(bland && ei >= 0); ++i)
        for (int j = 0; j < nd; ++j) {
          if (basis[i][j]) continue;
          double r = cost[i][j] - u[i] - v[j];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
            if (bland) break;
          }
        }
      if (ei < 0) {
        double obj = 0.0;
        for (int i = 0; i < ns; ++i)
          for (int j = 0; j < nd; ++j) obj += flow[i][j] * cost[i][j];
        return obj;
      }

      auto path = tree_path(ei, ej);
      // Cycle cells: entering (+), then path edges with alternating signs.
      // Edge t joins path[t] and path[t+1]; rows sit at even positions.
      struct Cell {
        int i, j;
        bool plus;
      };
      std::vector<Cell> cycle;
      cycle.push_back({ei, ej, true});
      for (std::size_t t = 0; t + 1 < path.size(); ++t) {
        int r = (t % 2 == 0) ? path[t] : path[t + 1];
        int c = (t % 2 == 0) ? path[t + 1] - ns : path[t] - ns;
        // Sign alternates around the cycle; the edge leaving the entering
        // row (t = 0) must be negative.
        cycle.push_back({r, c, t % 2 == 1});
      }
      double theta = std::numeric_limits<double>::infinity();
      int leave = -1;
      for (std::size_t t = 1; t < cycle.size(); ++t)
        if (!cycle[t].plus && flow[cycle[t].i][cycle[t].j] < theta) {
          theta = flow[cycle[t].i][cycle[t].j];
          leave = int(t);
        }
      if (leave < 0) throw std::logic_error("transport pivot without leaving cell");
      for (const auto& cell : cycle) {
        if (cell.plus)
          flow[cell.i][cell.j] += theta;
        else
          flow[cell.i][cell.j] -= theta;
        if (flow[cell.i][cell.j] < 0) flow[cell.i][cell.j] = 0.0;
      }
      basis[ei][ej] = 1;
      basis[cycle[leave].i][cycle[leave].j] = 0;
      flow[cycle[leave].i][cycle[leave].j] = 0.0;
    }
    throw std::logic_error("transportation simplex failed to converge");
  }
};

}  // namespace

double solve_transport(const std::vector<double>& supply,
                       const std::vector<double>& demand,
                       const std::vector<std::vector<double>>& cost,
                       std::vector<std::vector<double>>* plan) {
  if (supply.empty() || demand.empty())
    throw DomainError("transport problem needs non-empty supply and demand");
  if (cost.size() != supply.size())
    throw DomainError("cost matrix row count mismatch");
  for (const auto& row : cost)
    if (row.size() != demand.size())
      throw DomainError("cost matrix column count mismatch");
  double ssum = 0.0, dsum = 0.0;
  for (double s : supply) {
    if (s < 0) throw DomainError("negative supply");
    ssum += s;
  }
  for (double d : demand) {
    if (d < 0) throw DomainError("negative demand");
    dsum += d;
  }
  if (std::fabs(ssum - dsum) > 1e-9 * std::max(1.0, ssum))
    throw DomainError("unbalanced transport problem");

  Simplex s(supply, demand, cost);
  double obj = s.solve();
  if (plan) *plan = s.flow;
  return obj;
}

}  // namespace ideanet
