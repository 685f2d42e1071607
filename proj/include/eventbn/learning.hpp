#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "eventbn/network.hpp"

namespace eventbn {

struct CpdEntry {
  double p_yes = 0.5;
  double p_no = 0.5;
  std::int64_t support = 0;     // observations of this parent configuration
  bool fallback = false;        // unobserved configuration
};

// Conditional distribution of one binary node given its parents. The table
// is sparse over observed parent configurations; unobserved ones resolve to
// the fallback entry (uniform for MLE, the prior mean for the Bayesian
// estimator; both are 1/2 for binary nodes).
struct Cpd {
  int node = 0;
  std::vector<int> parents;  // ascending variable indices

  const CpdEntry& at(std::uint32_t config) const;
  double p(std::uint8_t value, std::uint32_t config) const;
  std::uint32_t config_count() const { return 1u << parents.size(); }

  std::unordered_map<std::uint32_t, CpdEntry> table;
  CpdEntry fallback_entry{0.5, 0.5, 0, true};
};

enum class EstimatorKind { mle, bayes };

struct Estimator {
  EstimatorKind kind = EstimatorKind::bayes;
  double pseudo_count = 1.0;  // bayes only
};

struct NetworkModel {
  NetworkSkeleton skeleton;
  std::vector<Cpd> cpds;  // parallel to skeleton.nodes
  Estimator estimator;

  const Cpd& cpd_of(int node) const;
};

/// Count-ratio estimate P(v|pa) = N(v,pa)/N(pa); unobserved parent
/// configurations fall back to (1/2, 1/2) and are flagged.
NetworkModel fit_mle(const NetworkSkeleton& skeleton, const Dataset& ds);

/// Posterior mean under a symmetric per-configuration Dirichlet prior:
/// P(v|pa) = (N(v,pa) + pseudo) / (N(pa) + 2*pseudo).
NetworkModel fit_bayes(const NetworkSkeleton& skeleton, const Dataset& ds,
                       double pseudo_count);

/// Parent bit pattern of `row` for this CPD; bit j is parents[j]'s value.
std::uint32_t parent_config(const Cpd& cpd,
                            const Eigen::Ref<const Dataset::ValueMatrix>& values,
                            Eigen::Index row);

// Structured-text model files. Dense per-configuration tables are written;
// loading reconstructs the sparse form losslessly.
void save_model(std::ostream& out, const NetworkModel& model);
NetworkModel load_model(std::istream& in);

}  // namespace eventbn
