#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "eventbn/dataset.hpp"

namespace eventbn {

struct Edge {
  int from = 0;  // variable indices
  int to = 0;
  std::optional<double> chi2;
  std::optional<double> p_value;
  std::optional<int> strength_class;
};

// Directed acyclic skeleton over dataset variables. Nodes are variable
// indices, kept sorted; edges are kept sorted by (from, to).
struct NetworkSkeleton {
  std::vector<int> nodes;
  std::vector<Edge> edges;

  bool has_node(int v) const;
};

/// The fixed two-slice structure: full bipartite edge sets for the four
/// group relations (former weather -> former traffic, latter weather ->
/// latter traffic, former weather -> latter weather, former traffic ->
/// latter traffic). 28 nodes, 196 edges, acyclic by construction.
NetworkSkeleton predefined_skeleton();

/// True when edges form a DAG over the node set.
bool is_acyclic(const NetworkSkeleton& skeleton);

struct ContingencyTable2x2 {
  // counts[a][b], value 0 = NO and 1 = YES
  std::array<std::array<std::int64_t, 2>, 2> counts{};

  std::int64_t row_margin(int a) const { return counts[a][0] + counts[a][1]; }
  std::int64_t col_margin(int b) const { return counts[0][b] + counts[1][b]; }
  std::int64_t total() const { return row_margin(0) + row_margin(1); }
};

ContingencyTable2x2 contingency(const Dataset& ds, VariableId a, VariableId b);

struct Chi2Result {
  double chi2 = 0.0;
  double p = 1.0;
  int df = 1;
  bool degenerate = false;  // some expected frequency was zero
};

/// Pearson chi-squared statistic for a 2x2 table: sum of (O-E)^2/E with
/// E_ij = row_i * col_j / total. Cells with E = 0 contribute nothing and
/// mark the result degenerate (chi2 0, p 1).
Chi2Result chi2_test(const ContingencyTable2x2& table);

/// Upper-tail p for df = 1 via p = erfc(sqrt(x/2)).
double chi2_pvalue_df1(double chi2);

/// Marginal (empty conditioning set) chi-squared independence test on every
/// edge; edges with p > alpha are removed, survivors carry their statistics.
/// The node set is unchanged. Edge tests are independent and run on up to
/// `jobs` threads; output does not depend on the thread count.
NetworkSkeleton prune(const NetworkSkeleton& skeleton, const Dataset& ds,
                      double alpha, int jobs = 1);

/// 1-D centroid clustering of edge chi2 values into k ascending strength
/// classes, seeded at k evenly spaced quantiles. Returns the effective k
/// (reduced when there are fewer edges than k). Requires annotated edges.
int group_strengths(std::vector<Edge>& edges, int k);

}  // namespace eventbn
