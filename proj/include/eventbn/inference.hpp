#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "eventbn/learning.hpp"

namespace eventbn {

struct Evidence {
  std::map<int, std::uint8_t> assignments;  // node -> value, 1 = YES
};

struct PosteriorResult {
  int target = 0;
  double p_yes = 0.0;
  double p_no = 1.0;
  Evidence evidence;
};

struct InfluenceReport {
  int factor = 0;
  int target = 0;
  double p_given_yes = 0.0;
  double p_given_no = 0.0;
  double delta = 0.0;  // p_given_yes - p_given_no
};

/// Probability of one full assignment: the product of each node's CPD row.
/// The assignment must cover every model node.
double joint_probability(const NetworkModel& model,
                         const std::map<int, std::uint8_t>& assignment);

/// Exact posterior of `target` given the evidence, by variable elimination
/// (min-degree ordering). Throws on impossible evidence.
PosteriorResult posterior(const NetworkModel& model, int target,
                          const Evidence& evidence);

struct Prediction {
  std::uint8_t label = 0;  // 1 = YES
  double p_yes = 0.0;
};

/// YES iff the posterior p_yes reaches the threshold (ties predict YES).
Prediction predict(const NetworkModel& model, const Evidence& evidence,
                   int target, double threshold = 0.5);

/// Posterior of the target under factor=YES and factor=NO, all other
/// variables marginalized.
InfluenceReport influence(const NetworkModel& model, int factor, int target);

}  // namespace eventbn
