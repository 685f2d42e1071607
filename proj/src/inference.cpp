#include "eventbn/inference.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace eventbn {

namespace {

// Table over a sorted set of binary variables; entry index bit j carries the
// value of vars[j].
struct Factor {
  std::vector<int> vars;
  Eigen::VectorXd values;
};

constexpr std::size_t kMaxFactorBits = 26;

Factor factor_from_cpd(const Cpd& cpd) {
  Factor f;
  f.vars = cpd.parents;
  f.vars.push_back(cpd.node);
  std::sort(f.vars.begin(), f.vars.end());

  const std::size_t node_pos = static_cast<std::size_t>(
      std::lower_bound(f.vars.begin(), f.vars.end(), cpd.node) - f.vars.begin());
  std::vector<std::size_t> parent_pos(cpd.parents.size());
  for (std::size_t j = 0; j < cpd.parents.size(); ++j)
    parent_pos[j] = static_cast<std::size_t>(
        std::lower_bound(f.vars.begin(), f.vars.end(), cpd.parents[j]) -
        f.vars.begin());

  f.values.resize(1LL << f.vars.size());
  for (std::uint32_t index = 0; index < f.values.size(); ++index) {
    std::uint32_t config = 0;
    for (std::size_t j = 0; j < cpd.parents.size(); ++j)
      config |= ((index >> parent_pos[j]) & 1u) << j;
    const std::uint8_t value = (index >> node_pos) & 1u;
    f.values[index] = cpd.p(value, config);
  }
  return f;
}

Factor restrict_factor(const Factor& f, int var, std::uint8_t value) {
  auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end() || *it != var) return f;
  const std::size_t pos = static_cast<std::size_t>(it - f.vars.begin());

  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
  out.values.resize(1LL << out.vars.size());
  const std::uint64_t low_mask = (1ull << pos) - 1;
  for (std::uint64_t index = 0;
       index < static_cast<std::uint64_t>(out.values.size()); ++index) {
    const std::uint64_t source = (index & low_mask) |
                                 (static_cast<std::uint64_t>(value) << pos) |
                                 ((index & ~low_mask) << 1);
    out.values[static_cast<Eigen::Index>(index)] =
        f.values[static_cast<Eigen::Index>(source)];
  }
  return out;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  if (out.vars.size() > kMaxFactorBits)
    throw std::runtime_error("inference: elimination factor too large");

  // Bit of the result index feeding each operand index.
  auto positions = [&](const std::vector<int>& vars) {
    std::vector<std::size_t> pos;
    pos.reserve(vars.size());
    for (int v : vars)
      pos.push_back(static_cast<std::size_t>(
          std::lower_bound(out.vars.begin(), out.vars.end(), v) -
          out.vars.begin()));
    return pos;
  };
  const auto a_pos = positions(a.vars);
  const auto b_pos = positions(b.vars);

  out.values.resize(1LL << out.vars.size());
  for (std::uint64_t index = 0;
       index < static_cast<std::uint64_t>(out.values.size()); ++index) {
    std::uint64_t ia = 0, ib = 0;
    for (std::size_t j = 0; j < a_pos.size(); ++j)
      ia |= ((index >> a_pos[j]) & 1u) << j;
    for (std::size_t j = 0; j < b_pos.size(); ++j)
      ib |= ((index >> b_pos[j]) & 1u) << j;
    out.values[static_cast<Eigen::Index>(index)] =
        a.values[static_cast<Eigen::Index>(ia)] *
        b.values[static_cast<Eigen::Index>(ib)];
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end() || *it != var) return f;
  const std::size_t pos = static_cast<std::size_t>(it - f.vars.begin());

  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
  out.values.resize(1LL << out.vars.size());
  const std::uint64_t low_mask = (1ull << pos) - 1;
  for (std::uint64_t index = 0;
       index < static_cast<std::uint64_t>(out.values.size()); ++index) {
    const std::uint64_t base = (index & low_mask) | ((index & ~low_mask) << 1);
    out.values[static_cast<Eigen::Index>(index)] =
        f.values[static_cast<Eigen::Index>(base)] +
        f.values[static_cast<Eigen::Index>(base | (1ull << pos))];
  }
  return out;
}

void validate_evidence(const NetworkModel& model, const Evidence& evidence) {
  for (const auto& [node, value] : evidence.assignments) {
    if (!model.skeleton.has_node(node))
      throw std::invalid_argument("evidence on unknown node " +
                                  std::to_string(node));
    if (value > 1)
      throw std::invalid_argument("evidence values must be 0 or 1");
  }
}

}  // namespace

double joint_probability(const NetworkModel& model,
                         const std::map<int, std::uint8_t>& assignment) {
  double product = 1.0;
  for (const auto& cpd : model.cpds) {
    auto self = assignment.find(cpd.node);
    if (self == assignment.end())
      throw std::invalid_argument("joint_probability: node " +
                                  std::to_string(cpd.node) + " unassigned");
    std::uint32_t config = 0;
    for (std::size_t j = 0; j < cpd.parents.size(); ++j) {
      auto parent = assignment.find(cpd.parents[j]);
      if (parent == assignment.end())
        throw std::invalid_argument("joint_probability: node " +
                                    std::to_string(cpd.parents[j]) +
                                    " unassigned");
      config |= static_cast<std::uint32_t>(parent->second ? 1u : 0u) << j;
    }
    product *= cpd.p(self->second, config);
  }
  return product;
}

PosteriorResult posterior(const NetworkModel& model, int target,
                          const Evidence& evidence) {
  if (!model.skeleton.has_node(target))
    throw std::invalid_argument("posterior: unknown target node " +
                                std::to_string(target));
  if (evidence.assignments.count(target))
    throw std::invalid_argument("posterior: target is part of the evidence");
  validate_evidence(model, evidence);

  std::vector<Factor> factors;
  factors.reserve(model.cpds.size());
  for (const auto& cpd : model.cpds) {
    Factor f = factor_from_cpd(cpd);
    for (const auto& [node, value] : evidence.assignments)
      f = restrict_factor(f, node, value);
    factors.push_back(std::move(f));
  }

  // Min-degree elimination over the interaction graph of factor scopes.
  std::map<int, std::set<int>> neighbors;
  for (int node : model.skeleton.nodes)
    if (node != target && !evidence.assignments.count(node)) neighbors[node];
  for (const auto& f : factors)
    for (int u : f.vars)
      for (int v : f.vars)
        if (u != v && neighbors.count(u)) neighbors[u].insert(v);

  while (!neighbors.empty()) {
    int best = -1;
    std::size_t best_degree = 0;
    for (const auto& [node, adjacent] : neighbors) {
      if (best < 0 || adjacent.size() < best_degree) {
        best = node;
        best_degree = adjacent.size();
      }
    }

    Factor product;
    product.values.resize(1);
    product.values[0] = 1.0;
    std::vector<Factor> rest;
    rest.reserve(factors.size());
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), best))
        product = multiply(product, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(product, best));
    factors = std::move(rest);

    // Connect the eliminated node's neighborhood, then drop it.
    auto adjacent = neighbors[best];
    adjacent.erase(best);
    for (int u : adjacent) {
      if (!neighbors.count(u)) continue;
      neighbors[u].erase(best);
      for (int v : adjacent)
        if (v != u) neighbors[u].insert(v);
    }
    neighbors.erase(best);
  }

  Factor result;
  result.values.resize(1);
  result.values[0] = 1.0;
  for (const auto& f : factors) result = multiply(result, f);

  double p_yes_raw = 0.0, p_no_raw = 0.0;
  if (result.vars.empty()) {
    // Target factor collapsed: only possible when evidence touched it, which
    // validate_evidence rules out.
    throw std::logic_error("posterior: target eliminated");
  }
  p_no_raw = result.values[0];
  p_yes_raw = result.values[1];

  const double p_evidence = p_yes_raw + p_no_raw;
  if (!(p_evidence > 0.0))
    throw std::runtime_error("posterior: impossible evidence");

  PosteriorResult out;
  out.target = target;
  out.evidence = evidence;
  out.p_yes = p_yes_raw / p_evidence;
  out.p_no = p_no_raw / p_evidence;
  return out;
}

Prediction predict(const NetworkModel& model, const Evidence& evidence,
                   int target, double threshold) {
  const auto post = posterior(model, target, evidence);
  return {static_cast<std::uint8_t>(post.p_yes >= threshold ? 1 : 0), post.p_yes};
}

InfluenceReport influence(const NetworkModel& model, int factor, int target) {
  if (factor == target)
    throw std::invalid_argument("influence: factor equals target");

  InfluenceReport report;
  report.factor = factor;
  report.target = target;
  Evidence yes, no;
  yes.assignments[factor] = 1;
  no.assignments[factor] = 0;
  report.p_given_yes = posterior(model, target, yes).p_yes;
  report.p_given_no = posterior(model, target, no).p_yes;
  report.delta = report.p_given_yes - report.p_given_no;
  return report;
}

}  // namespace eventbn
