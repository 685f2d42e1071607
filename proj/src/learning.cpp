#include "eventbn/learning.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace eventbn {

const CpdEntry& Cpd::at(std::uint32_t config) const {
  auto it = table.find(config);
  return it == table.end() ? fallback_entry : it->second;
}

double Cpd::p(std::uint8_t value, std::uint32_t config) const {
  const CpdEntry& entry = at(config);
  return value ? entry.p_yes : entry.p_no;
}

const Cpd& NetworkModel::cpd_of(int node) const {
  for (std::size_t i = 0; i < skeleton.nodes.size(); ++i)
    if (skeleton.nodes[i] == node) return cpds[i];
  throw std::invalid_argument("model has no node " + std::to_string(node));
}

std::uint32_t parent_config(const Cpd& cpd,
                            const Eigen::Ref<const Dataset::ValueMatrix>& values,
                            Eigen::Index row) {
  std::uint32_t config = 0;
  for (std::size_t j = 0; j < cpd.parents.size(); ++j)
    config |= static_cast<std::uint32_t>(values(row, cpd.parents[j]) ? 1u : 0u) << j;
  return config;
}

namespace {

struct ConfigCounts {
  std::int64_t yes = 0;
  std::int64_t no = 0;
};

NetworkModel fit_counts(const NetworkSkeleton& skeleton, const Dataset& ds,
                        const Estimator& estimator) {
  if (ds.rows() == 0) throw std::invalid_argument("fit: empty dataset");
  if (estimator.kind == EstimatorKind::bayes && estimator.pseudo_count <= 0)
    throw std::invalid_argument("fit: pseudo_count must be > 0");

  NetworkModel model;
  model.skeleton = skeleton;
  model.estimator = estimator;
  model.cpds.reserve(skeleton.nodes.size());

  for (int node : skeleton.nodes) {
    Cpd cpd;
    cpd.node = node;
    for (const auto& e : skeleton.edges)
      if (e.to == node) cpd.parents.push_back(e.from);
    std::sort(cpd.parents.begin(), cpd.parents.end());
    if (cpd.parents.size() > 24)
      throw std::runtime_error("fit: node " + std::to_string(node) +
                               " has too many parents");

    std::unordered_map<std::uint32_t, ConfigCounts> counts;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
      auto& c = counts[parent_config(cpd, ds.values, i)];
      if (ds.values(i, node)) ++c.yes;
      else ++c.no;
    }

    for (const auto& [config, c] : counts) {
      CpdEntry entry;
      entry.support = c.yes + c.no;
      if (estimator.kind == EstimatorKind::mle) {
        entry.p_yes = static_cast<double>(c.yes) / entry.support;
      } else {
        entry.p_yes = (static_cast<double>(c.yes) + estimator.pseudo_count) /
                      (static_cast<double>(entry.support) +
                       2.0 * estimator.pseudo_count);
      }
      entry.p_no = 1.0 - entry.p_yes;
      cpd.table.emplace(config, entry);
    }
    model.cpds.push_back(std::move(cpd));
  }
  return model;
}

}  // namespace

NetworkModel fit_mle(const NetworkSkeleton& skeleton, const Dataset& ds) {
  return fit_counts(skeleton, ds, {EstimatorKind::mle, 0.0});
}

NetworkModel fit_bayes(const NetworkSkeleton& skeleton, const Dataset& ds,
                       double pseudo_count) {
  return fit_counts(skeleton, ds, {EstimatorKind::bayes, pseudo_count});
}

namespace {

using nlohmann::json;

json edge_to_json(const Edge& e) {
  json j{{"from", e.from}, {"to", e.to}};
  if (e.chi2) j["chi2"] = *e.chi2;
  if (e.p_value) j["p"] = *e.p_value;
  if (e.strength_class) j["strength_class"] = *e.strength_class;
  return j;
}

Edge edge_from_json(const json& j) {
  Edge e;
  e.from = j.at("from").get<int>();
  e.to = j.at("to").get<int>();
  if (j.contains("chi2")) e.chi2 = j["chi2"].get<double>();
  if (j.contains("p")) e.p_value = j["p"].get<double>();
  if (j.contains("strength_class")) e.strength_class = j["strength_class"].get<int>();
  return e;
}

}  // namespace

void save_model(std::ostream& out, const NetworkModel& model) {
  json j;
  j["format"] = "eventbn-model";
  j["version"] = 1;
  j["estimator"] = {
      {"kind", model.estimator.kind == EstimatorKind::mle ? "mle" : "bayes"},
      {"pseudo_count", model.estimator.pseudo_count}};
  j["nodes"] = model.skeleton.nodes;
  json edges = json::array();
  for (const auto& e : model.skeleton.edges) edges.push_back(edge_to_json(e));
  j["edges"] = std::move(edges);

  json cpds = json::array();
  for (const auto& cpd : model.cpds) {
    json rows = json::array();
    for (std::uint32_t config = 0; config < cpd.config_count(); ++config) {
      const CpdEntry& entry = cpd.at(config);
      rows.push_back({{"config", config},
                      {"p_yes", entry.p_yes},
                      {"p_no", entry.p_no},
                      {"support", entry.support}});
    }
    cpds.push_back(
        {{"node", cpd.node}, {"parents", cpd.parents}, {"table", std::move(rows)}});
  }
  j["cpds"] = std::move(cpds);
  out << j.dump(2) << '\n';
}

NetworkModel load_model(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model file is not valid JSON: ") +
                             e.what());
  }
  if (j.value("format", "") != "eventbn-model")
    throw std::runtime_error("not a model file");

  NetworkModel model;
  const auto& estimator = j.at("estimator");
  model.estimator.kind = estimator.at("kind").get<std::string>() == "mle"
                             ? EstimatorKind::mle
                             : EstimatorKind::bayes;
  model.estimator.pseudo_count = estimator.at("pseudo_count").get<double>();
  model.skeleton.nodes = j.at("nodes").get<std::vector<int>>();
  for (const auto& e : j.at("edges")) model.skeleton.edges.push_back(edge_from_json(e));

  for (const auto& c : j.at("cpds")) {
    Cpd cpd;
    cpd.node = c.at("node").get<int>();
    cpd.parents = c.at("parents").get<std::vector<int>>();
    for (const auto& row : c.at("table")) {
      CpdEntry entry;
      entry.p_yes = row.at("p_yes").get<double>();
      entry.p_no = row.at("p_no").get<double>();
      entry.support = row.at("support").get<std::int64_t>();
      if (entry.support == 0 && entry.p_yes == 0.5 && entry.p_no == 0.5)
        continue;  // implicit fallback entry
      cpd.table.emplace(row.at("config").get<std::uint32_t>(), entry);
    }
    model.cpds.push_back(std::move(cpd));
  }
  if (model.cpds.size() != model.skeleton.nodes.size())
    throw std::runtime_error("model file: cpd/node count mismatch");
  return model;
}

}  // namespace eventbn
