#pragma once

#include <map>
#include <string>

#include "eventbn/network.hpp"

namespace eventbn {

/// Subgraph of every node with a directed path to `sink` (plus the sink)
/// and exactly the edges lying on such paths.
NetworkSkeleton ancestor_subgraph(const NetworkSkeleton& skeleton, int sink);

/// Edges with chi2 >= min_chi2 and their endpoint nodes. Requires
/// annotated edges.
NetworkSkeleton filter_strong(const NetworkSkeleton& skeleton, double min_chi2);

/// Node label abbreviations used in rendered figures (traffic types
/// shortened, weather types spelled out). Latter-slice labels carry a
/// prime suffix.
std::map<int, std::string> default_dot_labels();

/// Deterministic DOT text: nodes sorted into a former and a latter rank
/// cluster, edge penwidth = 1 + strength class (default class 0).
std::string to_dot(const NetworkSkeleton& skeleton,
                   const std::map<int, std::string>& labels = default_dot_labels());

}  // namespace eventbn
