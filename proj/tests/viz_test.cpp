#include <doctest.h>

#include <set>
#include <sstream>

#include "eventbn/viz.hpp"
#include "testutil.hpp"

using namespace eventbn;

namespace {

int idx(const char* name) { return var_index(*parse_variable_name(name)); }

NetworkSkeleton annotated_chain() {
  // Rain -> Accident -> Accident_L plus an isolated strong edge elsewhere.
  NetworkSkeleton s;
  s.nodes = {idx("Rain"), idx("Accident"), idx("Accident_L"), idx("Snow"),
             idx("Snow_L")};
  std::sort(s.nodes.begin(), s.nodes.end());
  auto edge = [](int from, int to, double chi2) {
    Edge e{from, to};
    e.chi2 = chi2;
    e.p_value = chi2_pvalue_df1(chi2);
    return e;
  };
  s.edges = {edge(idx("Rain"), idx("Accident"), 120.0),
             edge(idx("Accident"), idx("Accident_L"), 15000.0),
             edge(idx("Snow"), idx("Snow_L"), 9.0)};
  return s;
}

}  // namespace

TEST_CASE("ancestor subgraph keeps exactly the paths into the sink") {
  auto s = annotated_chain();
  auto sub = ancestor_subgraph(s, idx("Accident_L"));
  CHECK(sub.nodes == std::vector<int>{idx("Rain"), idx("Accident"),
                                      idx("Accident_L")});
  CHECK(sub.edges.size() == 2);

  SUBCASE("isolated nodes are excluded") {
    for (int v : sub.nodes) CHECK(v != idx("Snow"));
  }
  SUBCASE("idempotent") {
    auto twice = ancestor_subgraph(sub, idx("Accident_L"));
    CHECK(twice.nodes == sub.nodes);
    CHECK(twice.edges.size() == sub.edges.size());
  }
  SUBCASE("unknown sink is an error") {
    CHECK_THROWS_AS(ancestor_subgraph(s, 999), std::invalid_argument);
  }
  SUBCASE("whole chain for a chain graph") {
    NetworkSkeleton chain;
    chain.nodes = {0, 7, 21};  // former weather, former traffic, latter traffic
    chain.edges = {{0, 7}, {7, 21}};
    auto result = ancestor_subgraph(chain, 21);
    CHECK(result.nodes == chain.nodes);
    CHECK(result.edges.size() == 2);
  }
}

TEST_CASE("every node of a pruned ancestor view reaches the sink") {
  auto planted = testutil::make_planted_model();
  auto ds = testutil::sample_dataset(planted.model, 4000, 15);
  auto pruned = prune(predefined_skeleton(), ds, 0.05);
  const int sink = idx("Accident_L");
  auto sub = ancestor_subgraph(pruned, sink);

  // reverse-BFS oracle over the subgraph itself
  for (int node : sub.nodes) {
    if (node == sink) continue;
    std::set<int> visited{node};
    std::vector<int> frontier{node};
    bool reached = false;
    while (!frontier.empty() && !reached) {
      int v = frontier.back();
      frontier.pop_back();
      for (const auto& e : sub.edges) {
        if (e.from != v) continue;
        if (e.to == sink) reached = true;
        if (visited.insert(e.to).second) frontier.push_back(e.to);
      }
    }
    CHECK(reached);
  }
}

TEST_CASE("strong-edge filter") {
  auto s = annotated_chain();
  SUBCASE("threshold zero keeps everything") {
    CHECK(filter_strong(s, 0.0).edges.size() == s.edges.size());
  }
  SUBCASE("infinite threshold keeps nothing") {
    auto empty = filter_strong(s, std::numeric_limits<double>::infinity());
    CHECK(empty.edges.empty());
    CHECK(empty.nodes.empty());
  }
  SUBCASE("the documented 10000 cut keeps the strong edge") {
    auto strong = filter_strong(s, 10000.0);
    REQUIRE(strong.edges.size() == 1);
    CHECK(strong.edges[0].from == idx("Accident"));
    CHECK(strong.nodes == std::vector<int>{idx("Accident"), idx("Accident_L")});
  }
  SUBCASE("unannotated edges are an error") {
    NetworkSkeleton raw;
    raw.nodes = {0, 7};
    raw.edges = {{0, 7}};
    CHECK_THROWS_WITH_AS(filter_strong(raw, 1.0), doctest::Contains("prune"),
                         std::invalid_argument);
  }
}

TEST_CASE("DOT export") {
  SUBCASE("empty skeleton renders the bare shell") {
    CHECK(to_dot(NetworkSkeleton{}) == "digraph {\n}\n");
  }
  SUBCASE("penwidth is one plus the strength class") {
    NetworkSkeleton s;
    s.nodes = {idx("Rain"), idx("Accident_L")};
    Edge e{idx("Rain"), idx("Accident_L")};
    e.chi2 = 50.0;
    e.strength_class = 2;
    s.edges = {e};
    auto dot = to_dot(s);
    CHECK(dot.find("Rain -> Accident_L [penwidth=3];") != std::string::npos);
    CHECK(dot.find("label=\"Acci'\"") != std::string::npos);
  }
  SUBCASE("byte-identical output and edges only among emitted nodes") {
    auto planted = testutil::make_planted_model();
    auto ds = testutil::sample_dataset(planted.model, 3000, 33);
    auto pruned = prune(predefined_skeleton(), ds, 0.05);
    group_strengths(pruned.edges, 4);
    auto first = to_dot(pruned);
    CHECK(first == to_dot(pruned));

    std::size_t edge_lines = 0;
    std::istringstream lines(first);
    std::string line;
    std::set<std::string> declared;
    while (std::getline(lines, line)) {
      auto arrow = line.find(" -> ");
      if (arrow == std::string::npos) {
        auto bracket = line.find(" [label=");
        if (bracket != std::string::npos) {
          auto name = line.substr(0, bracket);
          declared.insert(name.substr(name.find_first_not_of(' ')));
        }
        continue;
      }
      ++edge_lines;
      std::string from = line.substr(line.find_first_not_of(' '),
                                     arrow - line.find_first_not_of(' '));
      std::string to = line.substr(arrow + 4, line.find(" [", arrow + 4) - arrow - 4);
      CHECK(declared.count(from) == 1);
      CHECK(declared.count(to) == 1);
    }
    CHECK(edge_lines == pruned.edges.size());
  }
  SUBCASE("abbreviation map covers the documented scheme") {
    auto labels = default_dot_labels();
    CHECK(labels.at(idx("Accident")) == "Acci");
    CHECK(labels.at(idx("Congestion")) == "Cong");
    CHECK(labels.at(idx("FlowIncident")) == "Flow");
    CHECK(labels.at(idx("Construction")) == "Cons");
    CHECK(labels.at(idx("LaneBlocked")) == "Lane");
    CHECK(labels.at(idx("BrokenVehicle")) == "Bro");
    CHECK(labels.at(idx("Precipitation")) == "Pre");
    CHECK(labels.at(idx("Rain")) == "Rain");
    CHECK(labels.at(idx("Rain_L")) == "Rain'");
  }
}
