#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "eventbn/dataset.hpp"
#include "eventbn/learning.hpp"

namespace eventbn::testutil {

// --- independent oracles -------------------------------------------------

// Joint probability of one full assignment, computed directly from the CPD
// tables (no shared code with the inference engine).
double oracle_joint(const NetworkModel& model,
                    const std::map<int, std::uint8_t>& assignment);

// Posterior (p_no, p_yes) of `target` by full enumeration of the joint.
std::pair<double, double> oracle_posterior(
    const NetworkModel& model, int target,
    const std::map<int, std::uint8_t>& evidence);

// Closed-form 2x2 chi-squared: n (ad - bc)^2 / (row and column margins).
double oracle_chi2_closed_form(std::int64_t a, std::int64_t b, std::int64_t c,
                               std::int64_t d);

// All correlated pairs by the O(n^2) double loop.
std::vector<std::pair<std::string, std::string>> oracle_pairs(
    std::span<const GeospatialEntity> entities, const PairingConfig& cfg);

// Tomek flags by exhaustive mutual-nearest computation.
std::vector<Eigen::Index> oracle_tomek(const Dataset& ds, VariableId target);

// --- random fixtures ------------------------------------------------------

// Random DAG model over `nodes` binary variables; parent count capped so
// sampled CPDs stay small. Probabilities lie in [0.05, 0.95].
NetworkModel random_model(int nodes, std::mt19937_64& rng);

// Random geospatial entities in a compact space-time box, mixing weather
// (station-coded) and traffic events.
std::vector<GeospatialEntity> random_entities(std::size_t count,
                                              std::mt19937_64& rng);

// Dataset sampled from a generating model by ancestral simulation. The
// model must be topologically ordered by variable index, which the planted
// model below is.
Dataset sample_dataset(const NetworkModel& generating, Eigen::Index rows,
                       std::uint64_t seed);

// --- the planted two-slice model -------------------------------------------

// A hand-specified 28-variable generating model: a few strong causal chains
// across all four structural relations, everything else independent noise.
struct PlantedModel {
  NetworkModel model;
  std::vector<std::pair<int, int>> planted_edges;
  std::map<int, int> true_parent;      // node -> single parent, if any
  std::map<int, double> root_p;        // parentless nodes
  double p_given_yes = 0.9;            // chain strength
  double p_given_no = 0.1;

  // Generating P(node = YES | its true parent's value in `values`).
  double generating_p_yes(int node,
                          const std::array<std::uint8_t, kVariableCount>& values) const;
  // Noise nodes with no planted edges at all.
  std::vector<int> isolated_nodes() const;
};

PlantedModel make_planted_model();

// Dataset row builder for hand fixtures: listed variables are YES.
DatasetRow make_row(std::initializer_list<const char*> yes_variables,
                    const std::string& anchor_id = "a",
                    const std::string& city = "X");

GeospatialEntity make_entity(const std::string& id, EventType type,
                             std::int64_t start, std::int64_t end, double lat,
                             double lon, const std::string& airport = "",
                             const std::string& city = "X");

}  // namespace eventbn::testutil
