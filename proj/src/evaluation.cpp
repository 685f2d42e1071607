#include "eventbn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace eventbn {

std::pair<Dataset, Dataset> split(const Dataset& ds, VariableId target,
                                  const SplitSpec& spec) {
  const int t = var_index(target);
  std::vector<Eigen::Index> yes, no;
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    (ds.values(i, t) ? yes : no).push_back(i);

  if (std::cmp_less(yes.size(), spec.test_pos))
    throw std::runtime_error(
        "split: need " + std::to_string(spec.test_pos) + " positive rows of " +
        variable_name(target) + ", have " + std::to_string(yes.size()));
  if (std::cmp_less(no.size(), spec.test_neg))
    throw std::runtime_error(
        "split: need " + std::to_string(spec.test_neg) + " negative rows of " +
        variable_name(target) + ", have " + std::to_string(no.size()));

  std::mt19937_64 rng(spec.seed);
  std::shuffle(yes.begin(), yes.end(), rng);
  std::shuffle(no.begin(), no.end(), rng);

  std::vector<Eigen::Index> test_rows(yes.begin(), yes.begin() + spec.test_pos);
  test_rows.insert(test_rows.end(), no.begin(), no.begin() + spec.test_neg);
  std::sort(test_rows.begin(), test_rows.end());

  std::set<Eigen::Index> in_test(test_rows.begin(), test_rows.end());
  std::vector<Eigen::Index> train_rows;
  train_rows.reserve(ds.rows() - test_rows.size());
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    if (!in_test.count(i)) train_rows.push_back(i);

  return {ds.select(train_rows), ds.select(test_rows)};
}

Metrics compute_metrics(
    std::span<const std::pair<std::uint8_t, std::uint8_t>> predictions) {
  if (predictions.empty())
    throw std::invalid_argument("compute_metrics: no predictions");

  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& [label, truth] : predictions) {
    if (label && truth) ++tp;
    else if (label && !truth) ++fp;
    else if (!label && truth) ++fn;
    else ++tn;
  }

  Metrics m;
  auto ratio = [&](double num, double den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2 * m.precision * m.recall, m.precision + m.recall);
  m.acc_yes = m.recall;
  m.acc_no = ratio(tn, tn + fp);

  const double precision_no = ratio(tn, tn + fn);
  const double f1_no = ratio(2 * precision_no * m.acc_no, precision_no + m.acc_no);
  const double support_yes = tp + fn, support_no = tn + fp;
  m.weighted_f1 =
      ratio(support_yes * m.f1 + support_no * f1_no, support_yes + support_no);
  return m;
}

Metrics evaluate_model(const NetworkModel& model, const Dataset& test,
                       VariableId target, double threshold, int jobs) {
  const int t = var_index(target);
  std::vector<std::pair<std::uint8_t, std::uint8_t>> predictions(test.rows());

  auto run = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index i = begin; i < end; ++i) {
      Evidence evidence;
      for (int node : model.skeleton.nodes)
        if (node != t) evidence.assignments[node] = test.values(i, node);
      predictions[i] = {predict(model, evidence, t, threshold).label,
                        test.values(i, t)};
    }
  };
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(test.rows())));
  if (workers <= 1) {
    run(0, test.rows());
  } else {
    std::vector<std::thread> threads;
    const Eigen::Index chunk = (test.rows() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      Eigen::Index begin = w * chunk;
      Eigen::Index end = std::min(begin + chunk, test.rows());
      if (begin < end) threads.emplace_back(run, begin, end);
    }
    for (auto& th : threads) th.join();
  }
  return compute_metrics(predictions);
}

namespace {

std::vector<int> non_target_vars(int target) {
  std::vector<int> vars;
  vars.reserve(kVariableCount - 1);
  for (int v = 0; v < kVariableCount; ++v)
    if (v != target) vars.push_back(v);
  return vars;
}

}  // namespace

LogisticModel fit_logistic(const Dataset& train, VariableId target,
                           double learning_rate, int epochs) {
  if (train.rows() == 0) throw std::invalid_argument("fit_logistic: empty train set");
  LogisticModel model;
  model.target = var_index(target);
  model.feature_vars = non_target_vars(model.target);

  const Eigen::Index n = train.rows();
  const Eigen::Index d = static_cast<Eigen::Index>(model.feature_vars.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      x(i, j) = train.values(i, model.feature_vars[j]);
    y(i) = train.values(i, model.target);
  }

  model.weights = Eigen::VectorXd::Zero(d);
  model.bias = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Eigen::VectorXd z = x * model.weights;
    z.array() += model.bias;
    Eigen::VectorXd p = (1.0 / (1.0 + (-z.array()).exp())).matrix();
    Eigen::VectorXd residual = p - y;
    model.weights -= learning_rate * (x.transpose() * residual) / double(n);
    model.bias -= learning_rate * residual.mean();
  }
  return model;
}

KnnModel fit_knn(const Dataset& train, VariableId target, int k) {
  if (k < 1) throw std::invalid_argument("fit_knn: k must be >= 1");
  if (std::cmp_greater(k, train.rows()))
    throw std::invalid_argument("fit_knn: k exceeds training rows");

  KnnModel model;
  model.target = var_index(target);
  model.k = k;
  model.feature_vars = non_target_vars(model.target);
  model.features.resize(train.rows(),
                        static_cast<Eigen::Index>(model.feature_vars.size()));
  model.labels.resize(train.rows());
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < model.feature_vars.size(); ++j)
      model.features(i, static_cast<Eigen::Index>(j)) =
          train.values(i, model.feature_vars[j]);
    model.labels[i] = train.values(i, model.target);
  }
  return model;
}

std::uint8_t predict_baseline(const LogisticModel& model,
                              std::span<const std::uint8_t, kVariableCount> row) {
  double z = model.bias;
  for (std::size_t j = 0; j < model.feature_vars.size(); ++j)
    z += model.weights(static_cast<Eigen::Index>(j)) * row[model.feature_vars[j]];
  const double p = 1.0 / (1.0 + std::exp(-z));
  return p >= 0.5 ? 1 : 0;
}

std::uint8_t predict_baseline(const KnnModel& model,
                              std::span<const std::uint8_t, kVariableCount> row) {
  Eigen::Array<std::uint8_t, 1, Eigen::Dynamic> query(
      1, static_cast<Eigen::Index>(model.feature_vars.size()));
  for (std::size_t j = 0; j < model.feature_vars.size(); ++j)
    query(0, static_cast<Eigen::Index>(j)) = row[model.feature_vars[j]];

  // (distance, train index); index breaks distance ties deterministically.
  std::vector<std::pair<int, Eigen::Index>> order(model.features.rows());
  for (Eigen::Index i = 0; i < model.features.rows(); ++i)
    order[i] = {static_cast<int>((model.features.row(i) != query).count()), i};
  std::nth_element(order.begin(), order.begin() + (model.k - 1), order.end());
  std::sort(order.begin(), order.begin() + model.k);

  int votes_yes = 0;
  for (int j = 0; j < model.k; ++j) votes_yes += model.labels[order[j].second];
  return 2 * votes_yes >= model.k ? 1 : 0;
}

namespace {

template <typename Model>
Metrics evaluate_rows(const Model& model, const Dataset& test) {
  std::vector<std::pair<std::uint8_t, std::uint8_t>> predictions;
  predictions.reserve(test.rows());
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    std::array<std::uint8_t, kVariableCount> row;
    for (int v = 0; v < kVariableCount; ++v) row[v] = test.values(i, v);
    predictions.emplace_back(predict_baseline(model, row),
                             test.values(i, model.target));
  }
  return compute_metrics(predictions);
}

}  // namespace

Metrics evaluate_baseline(const LogisticModel& model, const Dataset& test) {
  return evaluate_rows(model, test);
}

Metrics evaluate_baseline(const KnnModel& model, const Dataset& test) {
  return evaluate_rows(model, test);
}

std::span<const ReferenceScore> reference_scores() {
  static constexpr ReferenceScore kScores[] = {
      {"LR", "AT", 0.54, 0.91, 0.83},  {"LR", "AU", 0.58, 0.93, 0.87},
      {"LR", "CH", 0.56, 0.91, 0.83},  {"LR", "DA", 0.30, 0.94, 0.87},
      {"DNN", "AT", 0.62, 0.89, 0.83}, {"DNN", "AU", 0.62, 0.92, 0.87},
      {"DNN", "CH", 0.61, 0.87, 0.82}, {"DNN", "DA", 0.36, 0.94, 0.87},
      {"SVM", "AT", 0.75, 0.96, 0.47}, {"SVM", "AU", 0.80, 0.95, 0.62},
      {"SVM", "CH", 0.69, 0.97, 0.27}, {"SVM", "DA", 0.75, 0.97, 0.47},
      {"KNN", "AT", 0.50, 0.43, 0.46}, {"KNN", "AU", 0.78, 0.90, 0.73},
      {"KNN", "CH", 0.61, 0.59, 0.53}, {"KNN", "DA", 0.72, 0.89, 0.48},
      {"BN", "AT", 0.65, 0.76, 0.61},  {"BN", "AU", 0.73, 0.90, 0.67},
      {"BN", "CH", 0.60, 0.31, 0.69},  {"BN", "DA", 0.65, 0.78, 0.59},
  };
  return kScores;
}

std::string format_metrics_table(std::span<const MetricsRow> rows) {
  std::vector<std::string> cities;
  std::vector<std::string> models;
  for (const auto& row : rows) {
    if (std::find(cities.begin(), cities.end(), row.city) == cities.end())
      cities.push_back(row.city);
    if (std::find(models.begin(), models.end(), row.model) == models.end())
      models.push_back(row.model);
  }
  auto lookup = [&](const std::string& model,
                    const std::string& city) -> const Metrics* {
    for (const auto& row : rows)
      if (row.model == model && row.city == city) return &row.metrics;
    return nullptr;
  };

  std::string out = "Model  Metric ";
  char buf[64];
  for (const auto& city : cities) {
    std::snprintf(buf, sizeof(buf), " %6s", city.c_str());
    out += buf;
  }
  out += '\n';
  const char* metric_names[3] = {"Acc", "Non-Acc", "W-Ave"};
  for (const auto& model : models) {
    for (int metric = 0; metric < 3; ++metric) {
      std::snprintf(buf, sizeof(buf), "%-6s %-7s", model.c_str(),
                    metric_names[metric]);
      out += buf;
      for (const auto& city : cities) {
        const Metrics* m = lookup(model, city);
        if (!m) {
          out += "      -";
          continue;
        }
        const double value = metric == 0   ? m->acc_yes
                             : metric == 1 ? m->acc_no
                                           : m->weighted_f1;
        std::snprintf(buf, sizeof(buf), " %6.3f", value);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace eventbn
