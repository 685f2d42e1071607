#include "eventbn/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace eventbn {

bool NetworkSkeleton::has_node(int v) const {
  return std::binary_search(nodes.begin(), nodes.end(), v);
}

NetworkSkeleton predefined_skeleton() {
  NetworkSkeleton skeleton;
  skeleton.nodes.resize(kVariableCount);
  for (int v = 0; v < kVariableCount; ++v) skeleton.nodes[v] = v;

  auto add_bipartite = [&](Slice from_slice, EventKind from_group,
                           Slice to_slice, EventKind to_group) {
    for (int i = 0; i < kEventTypeCount; ++i) {
      auto from_type = static_cast<EventType>(i);
      if (kind_of(from_type) != from_group) continue;
      for (int j = 0; j < kEventTypeCount; ++j) {
        auto to_type = static_cast<EventType>(j);
        if (kind_of(to_type) != to_group) continue;
        skeleton.edges.push_back({var_index({from_slice, from_type}),
                                  var_index({to_slice, to_type})});
      }
    }
  };
  add_bipartite(Slice::former, EventKind::weather, Slice::former, EventKind::traffic);
  add_bipartite(Slice::latter, EventKind::weather, Slice::latter, EventKind::traffic);
  add_bipartite(Slice::former, EventKind::weather, Slice::latter, EventKind::weather);
  add_bipartite(Slice::former, EventKind::traffic, Slice::latter, EventKind::traffic);

  std::sort(skeleton.edges.begin(), skeleton.edges.end(),
            [](const Edge& a, const Edge& b) {
              return std::pair(a.from, a.to) < std::pair(b.from, b.to);
            });
  return skeleton;
}

bool is_acyclic(const NetworkSkeleton& skeleton) {
  std::map<int, std::vector<int>> adjacency;
  std::map<int, int> in_degree;
  for (int v : skeleton.nodes) in_degree[v] = 0;
  for (const auto& e : skeleton.edges) {
    adjacency[e.from].push_back(e.to);
    ++in_degree[e.to];
  }
  std::vector<int> frontier;
  for (const auto& [v, deg] : in_degree)
    if (deg == 0) frontier.push_back(v);
  std::size_t visited = 0;
  while (!frontier.empty()) {
    int v = frontier.back();
    frontier.pop_back();
    ++visited;
    for (int next : adjacency[v])
      if (--in_degree[next] == 0) frontier.push_back(next);
  }
  return visited == in_degree.size();
}

ContingencyTable2x2 contingency(const Dataset& ds, VariableId a, VariableId b) {
  if (ds.rows() == 0)
    throw std::invalid_argument("contingency: empty dataset");
  ContingencyTable2x2 table;
  const int ca = var_index(a), cb = var_index(b);
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    ++table.counts[ds.values(i, ca)][ds.values(i, cb)];
  return table;
}

double chi2_pvalue_df1(double chi2) {
  if (chi2 <= 0) return 1.0;
  return std::erfc(std::sqrt(chi2 / 2.0));
}

Chi2Result chi2_test(const ContingencyTable2x2& table) {
  const double total = static_cast<double>(table.total());
  if (total <= 0)
    throw std::invalid_argument("chi2_test: empty contingency table");

  Chi2Result result;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double expected =
          static_cast<double>(table.row_margin(a)) * table.col_margin(b) / total;
      if (expected <= 0) {
        result.degenerate = true;
        continue;
      }
      const double diff = static_cast<double>(table.counts[a][b]) - expected;
      result.chi2 += diff * diff / expected;
    }
  }
  if (result.degenerate) result.chi2 = 0.0;
  result.p = chi2_pvalue_df1(result.chi2);
  return result;
}

NetworkSkeleton prune(const NetworkSkeleton& skeleton, const Dataset& ds,
                      double alpha, int jobs) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("prune: alpha must be in (0, 1]");
  if (ds.rows() == 0) throw std::invalid_argument("prune: empty dataset");

  std::vector<Chi2Result> tests(skeleton.edges.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Edge& e = skeleton.edges[i];
      tests[i] = chi2_test(
          contingency(ds, variable_at(e.from), variable_at(e.to)));
    }
  };
  const int workers = std::max(
      1, std::min<int>(jobs, static_cast<int>(skeleton.edges.size())));
  if (workers <= 1) {
    run(0, skeleton.edges.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (skeleton.edges.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(begin + chunk, skeleton.edges.size());
      if (begin < end) threads.emplace_back(run, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  NetworkSkeleton pruned;
  pruned.nodes = skeleton.nodes;
  for (std::size_t i = 0; i < skeleton.edges.size(); ++i) {
    if (tests[i].p > alpha) continue;
    Edge e = skeleton.edges[i];
    e.chi2 = tests[i].chi2;
    e.p_value = tests[i].p;
    pruned.edges.push_back(e);
  }
  return pruned;
}

int group_strengths(std::vector<Edge>& edges, int k) {
  if (k < 1) throw std::invalid_argument("group_strengths: k must be >= 1");
  if (edges.empty()) return 0;
  for (const auto& e : edges)
    if (!e.chi2)
      throw std::invalid_argument("group_strengths: unannotated edge; prune first");

  const int effective_k = std::min<int>(k, static_cast<int>(edges.size()));
  std::vector<double> sorted_values;
  sorted_values.reserve(edges.size());
  for (const auto& e : edges) sorted_values.push_back(*e.chi2);
  std::sort(sorted_values.begin(), sorted_values.end());

  // Interpolated quantiles at (j + 1/2) / k.
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted_values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
  };
  std::vector<double> centroids(effective_k);
  for (int j = 0; j < effective_k; ++j)
    centroids[j] = quantile((j + 0.5) / effective_k);

  std::vector<int> assignment(edges.size(), 0);
  for (int iteration = 0; iteration < 100; ++iteration) {
    bool changed = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int best = 0;
      double best_distance = std::abs(*edges[i].chi2 - centroids[0]);
      for (int j = 1; j < effective_k; ++j) {
        double d = std::abs(*edges[i].chi2 - centroids[j]);
        if (d < best_distance) {
          best = j;
          best_distance = d;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iteration > 0) break;
    std::vector<double> sums(effective_k, 0.0);
    std::vector<int> sizes(effective_k, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      sums[assignment[i]] += *edges[i].chi2;
      ++sizes[assignment[i]];
    }
    for (int j = 0; j < effective_k; ++j)
      if (sizes[j] > 0) centroids[j] = sums[j] / sizes[j];
  }

  // Relabel classes in ascending centroid order.
  std::vector<int> order(effective_k);
  for (int j = 0; j < effective_k; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::pair(centroids[a], a) < std::pair(centroids[b], b);
  });
  std::vector<int> rank(effective_k);
  for (int r = 0; r < effective_k; ++r) rank[order[r]] = r;
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i].strength_class = rank[assignment[i]];
  return effective_k;
}

}  // namespace eventbn
