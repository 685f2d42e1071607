#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eventbn/inference.hpp"

namespace eventbn {

struct Metrics {
  double acc_yes = 0.0;  // accuracy on truly-YES rows (recall of YES)
  double acc_no = 0.0;   // accuracy on truly-NO rows
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double weighted_f1 = 0.0;  // support-weighted mean of per-class F1
  bool degenerate = false;   // some denominator was zero
};

struct SplitSpec {
  Eigen::Index test_pos = 1000;
  Eigen::Index test_neg = 1000;
  std::uint64_t seed = 0;
};

/// Seeded sampling of a class-exact test set; train is the remainder.
/// Throws (naming the deficit) when a class is too small.
std::pair<Dataset, Dataset> split(const Dataset& ds, VariableId target,
                                  const SplitSpec& spec);

/// Confusion metrics over (predicted label, truth) pairs, YES positive.
Metrics compute_metrics(
    std::span<const std::pair<std::uint8_t, std::uint8_t>> predictions);

/// Predicts every test row with evidence on all non-target variables.
Metrics evaluate_model(const NetworkModel& model, const Dataset& test,
                       VariableId target, double threshold = 0.5, int jobs = 1);

// Gradient-descent logistic regression over the 27 non-target variables.
// Training is full-batch from a zero start, so it is deterministic.
struct LogisticModel {
  int target = 0;
  std::vector<int> feature_vars;
  Eigen::VectorXd weights;
  double bias = 0.0;
};

LogisticModel fit_logistic(const Dataset& train, VariableId target,
                           double learning_rate = 0.1, int epochs = 500);

// Hamming-distance k-nearest-neighbour vote; ties predict YES.
struct KnnModel {
  int target = 0;
  int k = 5;
  std::vector<int> feature_vars;
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      features;
  std::vector<std::uint8_t> labels;
};

KnnModel fit_knn(const Dataset& train, VariableId target, int k = 5);

std::uint8_t predict_baseline(const LogisticModel& model,
                              std::span<const std::uint8_t, kVariableCount> row);
std::uint8_t predict_baseline(const KnnModel& model,
                              std::span<const std::uint8_t, kVariableCount> row);

Metrics evaluate_baseline(const LogisticModel& model, const Dataset& test);
Metrics evaluate_baseline(const KnnModel& model, const Dataset& test);

// Full-scale benchmark results on the source data, kept for report
// comparison; not reproducible from desk-scale fixtures.
struct ReferenceScore {
  const char* model;
  const char* city;
  double acc_yes;
  double acc_no;
  double weighted_f1;
};

std::span<const ReferenceScore> reference_scores();

struct MetricsRow {
  std::string model;
  std::string city;
  Metrics metrics;
};

/// Plain-text model x metric x city table.
std::string format_metrics_table(std::span<const MetricsRow> rows);

}  // namespace eventbn
