#include "eventbn/viz.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

namespace eventbn {

NetworkSkeleton ancestor_subgraph(const NetworkSkeleton& skeleton, int sink) {
  if (!skeleton.has_node(sink))
    throw std::invalid_argument("ancestor_subgraph: unknown sink " +
                                std::to_string(sink));

  // Reverse reachability from the sink.
  std::map<int, std::vector<int>> reverse;
  for (const auto& e : skeleton.edges) reverse[e.to].push_back(e.from);
  std::set<int> reaches{sink};
  std::vector<int> frontier{sink};
  while (!frontier.empty()) {
    int v = frontier.back();
    frontier.pop_back();
    for (int u : reverse[v])
      if (reaches.insert(u).second) frontier.push_back(u);
  }

  NetworkSkeleton out;
  out.nodes.assign(reaches.begin(), reaches.end());
  for (const auto& e : skeleton.edges)
    if (reaches.count(e.to)) out.edges.push_back(e);
  return out;
}

NetworkSkeleton filter_strong(const NetworkSkeleton& skeleton, double min_chi2) {
  std::set<int> kept_nodes;
  NetworkSkeleton out;
  for (const auto& e : skeleton.edges) {
    if (!e.chi2)
      throw std::invalid_argument("filter_strong: unannotated edge; prune first");
    if (*e.chi2 >= min_chi2) {
      out.edges.push_back(e);
      kept_nodes.insert(e.from);
      kept_nodes.insert(e.to);
    }
  }
  out.nodes.assign(kept_nodes.begin(), kept_nodes.end());
  return out;
}

std::map<int, std::string> default_dot_labels() {
  static const std::map<EventType, std::string> abbreviations = {
      {EventType::accident, "Acci"},       {EventType::congestion, "Cong"},
      {EventType::flow_incident, "Flow"},  {EventType::construction, "Cons"},
      {EventType::lane_blocked, "Lane"},   {EventType::broken_vehicle, "Bro"},
      {EventType::precipitation, "Pre"},   {EventType::event, "Event"},
  };
  std::map<int, std::string> labels;
  for (int v = 0; v < kVariableCount; ++v) {
    VariableId id = variable_at(v);
    auto it = abbreviations.find(id.type);
    std::string label =
        it != abbreviations.end() ? it->second : std::string(to_string(id.type));
    if (id.slice == Slice::latter) label += "'";
    labels[v] = std::move(label);
  }
  return labels;
}

std::string to_dot(const NetworkSkeleton& skeleton,
                   const std::map<int, std::string>& labels) {
  std::string out = "digraph {\n";
  if (skeleton.nodes.empty() && skeleton.edges.empty()) {
    out += "}\n";
    return out;
  }
  out += "  rankdir=LR;\n";

  auto label_of = [&](int v) {
    auto it = labels.find(v);
    return it != labels.end() ? it->second : variable_name(v);
  };

  std::vector<int> nodes = skeleton.nodes;
  std::sort(nodes.begin(), nodes.end());
  for (Slice slice : {Slice::former, Slice::latter}) {
    std::vector<int> members;
    for (int v : nodes)
      if (variable_at(v).slice == slice) members.push_back(v);
    if (members.empty()) continue;
    out += slice == Slice::former ? "  subgraph cluster_former {\n"
                                  : "  subgraph cluster_latter {\n";
    out += slice == Slice::former ? "    label=\"T\";\n" : "    label=\"T'\";\n";
    for (int v : members)
      out += "    " + variable_name(v) + " [label=\"" + label_of(v) + "\"];\n";
    out += "  }\n";
  }

  std::vector<Edge> edges = skeleton.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  for (const auto& e : edges) {
    const int penwidth = 1 + e.strength_class.value_or(0);
    out += "  " + variable_name(e.from) + " -> " + variable_name(e.to) +
           " [penwidth=" + std::to_string(penwidth) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace eventbn
