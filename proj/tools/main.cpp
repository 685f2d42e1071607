// Command-line pipeline: ingest -> pair -> build-dataset -> learn ->
// predict / evaluate / analyze / visualize.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eventbn/evaluation.hpp"
#include "eventbn/text.hpp"
#include "eventbn/viz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eventbn;

namespace {

constexpr const char* kVersion = "0.1.0";

std::ifstream open_input(const fs::path& path, const std::string& hint) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("missing artifact: " + path.string() +
                                " (" + hint + ")");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_manifest(const fs::path& directory, const std::string& command,
                    const json& inputs, const json& config,
                    std::uint64_t seed) {
  json manifest;
  manifest["command"] = command;
  manifest["inputs"] = inputs;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["version"] = kVersion;
  manifest["generated_at"] = format_timestamp_utc(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  auto out = open_output(directory / (command + ".manifest.json"));
  out << manifest.dump(2) << '\n';
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out.empty() ? std::string("_") : out;
}

VariableId parse_target(const std::string& name) {
  auto target = parse_variable_name(name);
  if (!target)
    throw std::invalid_argument("unknown variable: " + name);
  return *target;
}

std::vector<GeospatialEntity> load_entities(const fs::path& directory) {
  std::vector<GeospatialEntity> entities;
  for (auto [kind, file] : {std::pair{EventKind::weather, "weather.csv"},
                            std::pair{EventKind::traffic, "traffic.csv"}}) {
    auto in = open_input(directory / file, "run ingest first");
    auto parsed = parse_events(in, kind);
    for (auto& e : parsed.entities) entities.push_back(std::move(e));
  }
  return entities;
}

NetworkModel load_model_file(const fs::path& path) {
  auto in = open_input(path, "run learn first");
  return load_model(in);
}

Dataset load_dataset_file(const fs::path& path, const std::string& hint) {
  auto in = open_input(path, hint);
  return read_dataset(in);
}

// ---- subcommand payloads ---------------------------------------------------

struct IngestArgs {
  std::string weather, traffic, out;
};

int run_ingest(const IngestArgs& args) {
  fs::create_directories(args.out);
  json inputs, counts;

  for (auto [kind, in_path, name] :
       {std::tuple{EventKind::weather, args.weather, "weather"},
        std::tuple{EventKind::traffic, args.traffic, "traffic"}}) {
    auto in = open_input(in_path, "input event file");
    auto parsed = parse_events(in, kind);
    auto entities = deduplicate(std::move(parsed.entities));

    auto out = open_output(fs::path(args.out) / (std::string(name) + ".csv"));
    write_entities(out, entities, kind);
    auto rejects = open_output(fs::path(args.out) /
                               ("rejects_" + std::string(name) + ".csv"));
    write_rejects(rejects, parsed.rejects, parsed.source_header);

    inputs[name] = in_path;
    counts[name] = entities.size();
    counts[std::string(name) + "_rejects"] = parsed.rejects.size();
    std::cout << name << ": " << entities.size() << " entities, "
              << parsed.rejects.size() << " rejects\n";
    if (entities.empty())
      std::cerr << "warning: no " << name << " entities survived parsing\n";
  }

  write_manifest(args.out, "ingest", inputs, counts, 0);
  return 0;
}

struct PairArgs {
  std::string entities, out;
  PairingConfig cfg;
};

int run_pair(const PairArgs& args) {
  args.cfg.validate();
  auto entities = load_entities(args.entities);
  std::size_t filled = fill_missing_airport_codes(entities, args.cfg.earth_radius_km);
  if (filled)
    std::cout << "assigned nearest stations to " << filled
              << " traffic entities\n";

  auto links = derive_links(entities, args.cfg);
  auto out = open_output(args.out);
  write_links(out, links);
  std::cout << "entities: " << entities.size() << ", links: " << links.size()
            << "\n";

  write_manifest(fs::path(args.out).parent_path().empty()
                     ? "."
                     : fs::path(args.out).parent_path(),
                 "pair", {{"entities", args.entities}},
                 {{"t_thresh_s", args.cfg.t_thresh_s},
                  {"d_thresh_km", args.cfg.d_thresh_km},
                  {"earth_radius_km", args.cfg.earth_radius_km},
                  {"links", links.size()}},
                 0);
  return 0;
}

struct BuildDatasetArgs {
  std::string entities, pairs, out;
  std::string mode = "binary";
  std::string target = "Accident_L";
  bool by_city = false;
  bool do_balance = false;
  bool do_tomek = false;
  bool tomek_after_balance = false;
  bool no_weather_anchors = false;
  std::uint64_t seed = 0;
};

int run_build_dataset(const BuildDatasetArgs& args) {
  const SeverityMode mode =
      args.mode == "leveled" ? SeverityMode::leveled : SeverityMode::binary;
  const VariableId target = parse_target(args.target);

  auto entities = load_entities(args.entities);
  auto links_in = open_input(args.pairs, "run pair first");
  auto links = read_links(links_in);

  // Severity handling drops out-of-band weather events in binary mode.
  std::vector<GeospatialEntity> kept;
  kept.reserve(entities.size());
  for (auto& e : entities) {
    if (e.kind == EventKind::weather) {
      if (auto collapsed = collapse_severity(e, mode))
        kept.push_back(std::move(*collapsed));
    } else {
      kept.push_back(std::move(e));
    }
  }

  auto ds = build_dataset(kept, links, mode, !args.no_weather_anchors);
  fs::create_directories(args.out);

  auto finalize = [&](Dataset subset) {
    if (args.do_tomek && !args.tomek_after_balance)
      subset = remove_rows(subset, tomek_links(subset, target));
    if (args.do_balance) subset = balance(subset, target, args.seed);
    if (args.do_tomek && args.tomek_after_balance)
      subset = remove_rows(subset, tomek_links(subset, target));
    return subset;
  };

  json written;
  if (args.by_city) {
    for (auto& [city, subset] : partition_by_city(ds)) {
      auto final_subset = finalize(std::move(subset));
      auto name = sanitize_filename(city) + ".csv";
      auto out = open_output(fs::path(args.out) / name);
      write_dataset(out, final_subset);
      written[city] = final_subset.rows();
      std::cout << city << ": " << final_subset.rows() << " rows\n";
    }
  } else {
    auto final_ds = finalize(std::move(ds));
    auto out = open_output(fs::path(args.out) / "dataset.csv");
    write_dataset(out, final_ds);
    written["dataset"] = final_ds.rows();
    std::cout << "dataset: " << final_ds.rows() << " rows\n";
  }

  write_manifest(args.out, "build-dataset",
                 {{"entities", args.entities}, {"pairs", args.pairs}},
                 {{"mode", args.mode},
                  {"target", args.target},
                  {"by_city", args.by_city},
                  {"balance", args.do_balance},
                  {"tomek", args.do_tomek},
                  {"tomek_after_balance", args.tomek_after_balance},
                  {"weather_anchors", !args.no_weather_anchors},
                  {"rows", written}},
                 args.seed);
  return 0;
}

struct LearnArgs {
  std::string dataset, out;
  std::string estimator = "bayes";
  double pseudo_count = 1.0;
  double alpha = 0.05;
  bool no_prune = false;
  int jobs = 1;
};

int run_learn(const LearnArgs& args) {
  if (args.estimator != "mle" && args.estimator != "bayes")
    throw std::invalid_argument("estimator must be mle or bayes");
  auto ds = load_dataset_file(args.dataset, "run build-dataset first");

  auto skeleton = predefined_skeleton();
  NetworkSkeleton structure =
      args.no_prune ? skeleton : prune(skeleton, ds, args.alpha, args.jobs);
  std::cout << "edges: " << structure.edges.size() << " of "
            << skeleton.edges.size() << " retained\n";

  NetworkModel model = args.estimator == "mle"
                           ? fit_mle(structure, ds)
                           : fit_bayes(structure, ds, args.pseudo_count);
  auto out = open_output(args.out);
  save_model(out, model);

  write_manifest(fs::path(args.out).parent_path().empty()
                     ? "."
                     : fs::path(args.out).parent_path(),
                 "learn", {{"dataset", args.dataset}},
                 {{"estimator", args.estimator},
                  {"pseudo_count", args.pseudo_count},
                  {"alpha", args.alpha},
                  {"pruned", !args.no_prune},
                  {"edges", structure.edges.size()}},
                 0);
  return 0;
}

struct PredictArgs {
  std::string model, test, out;
  std::string target = "Accident_L";
  std::string evidence_mode = "all";  // all | neighbors (ablation)
  double threshold = 0.5;
  int jobs = 1;
};

int run_predict(const PredictArgs& args) {
  auto model = load_model_file(args.model);
  auto test = load_dataset_file(args.test, "run build-dataset first");
  const int target = var_index(parse_target(args.target));

  std::vector<int> evidence_nodes;
  if (args.evidence_mode == "neighbors") {
    std::set<int> adjacent;
    for (const auto& e : model.skeleton.edges) {
      if (e.to == target) adjacent.insert(e.from);
      if (e.from == target) adjacent.insert(e.to);
    }
    evidence_nodes.assign(adjacent.begin(), adjacent.end());
  } else {
    for (int node : model.skeleton.nodes)
      if (node != target) evidence_nodes.push_back(node);
  }

  std::ostringstream rows;
  std::vector<std::pair<std::uint8_t, std::uint8_t>> outcomes;
  rows << "AnchorId,Target,PYes,Label,Truth\n";
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    Evidence evidence;
    for (int node : evidence_nodes)
      evidence.assignments[node] = test.values(i, node);
    auto prediction = predict(model, evidence, target, args.threshold);
    outcomes.push_back({prediction.label, test.values(i, target)});
    rows << join_csv({test.anchor_ids[i], args.target,
                      format_double(prediction.p_yes),
                      prediction.label ? "YES" : "NO",
                      test.values(i, target) ? "YES" : "NO"})
         << '\n';
  }

  if (!args.out.empty()) {
    auto out = open_output(args.out);
    out << rows.str();
    write_manifest(fs::path(args.out).parent_path().empty()
                       ? "."
                       : fs::path(args.out).parent_path(),
                   "predict", {{"model", args.model}, {"test", args.test}},
                   {{"target", args.target},
                    {"threshold", args.threshold},
                    {"evidence", args.evidence_mode}},
                   0);
  } else {
    std::cout << rows.str();
  }

  if (!outcomes.empty()) {
    auto metrics = compute_metrics(outcomes);
    std::cout << "rows: " << outcomes.size()
              << "  acc_yes: " << metrics.acc_yes
              << "  acc_no: " << metrics.acc_no
              << "  weighted_f1: " << metrics.weighted_f1 << "\n";
  }
  return 0;
}

struct EvaluateArgs {
  std::string model, dataset, out;
  std::string cities;
  std::string baselines;
  std::string target = "Accident_L";
  std::string spec = "1000,1000";
  double threshold = 0.5;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int knn_k = 5;
  double lr_rate = 0.1;
  int lr_epochs = 500;
  int jobs = 1;
};

int run_evaluate(const EvaluateArgs& args) {
  auto reference = load_model_file(args.model);
  const VariableId target = parse_target(args.target);

  auto spec_fields = split_csv_line(args.spec);
  if (spec_fields.size() != 2)
    throw std::invalid_argument("--spec expects POS,NEG");
  SplitSpec spec;
  auto pos = parse_int(spec_fields[0]);
  auto neg = parse_int(spec_fields[1]);
  if (!pos || !neg || *pos <= 0 || *neg <= 0)
    throw std::invalid_argument("--spec expects positive counts");
  spec.test_pos = *pos;
  spec.test_neg = *neg;
  spec.seed = args.seed;

  std::vector<std::string> baselines;
  for (auto& b : split_csv_line(args.baselines))
    if (!trim(b).empty()) baselines.push_back(trim(b));
  for (const auto& b : baselines)
    if (b != "lr" && b != "knn")
      throw std::invalid_argument("unknown baseline: " + b);

  std::vector<std::string> cities;
  for (auto& c : split_csv_line(args.cities))
    if (!trim(c).empty()) cities.push_back(trim(c));
  if (cities.empty()) throw std::invalid_argument("--cities is required");

  std::vector<MetricsRow> table;
  for (const auto& city : cities) {
    auto path = fs::path(args.dataset) / (sanitize_filename(city) + ".csv");
    auto ds = load_dataset_file(path, "run build-dataset --by-city first");
    auto [train, test] = split(ds, target, spec);

    // The model file supplies the estimator; structure and parameters are
    // re-learned on the train remainder so the test rows stay unseen.
    auto structure = prune(predefined_skeleton(), train, args.alpha, args.jobs);
    NetworkModel model =
        reference.estimator.kind == EstimatorKind::mle
            ? fit_mle(structure, train)
            : fit_bayes(structure, train, reference.estimator.pseudo_count);
    table.push_back(
        {"BN", city, evaluate_model(model, test, target, args.threshold, args.jobs)});

    for (const auto& baseline : baselines) {
      if (baseline == "lr") {
        auto lr = fit_logistic(train, target, args.lr_rate, args.lr_epochs);
        table.push_back({"LR", city, evaluate_baseline(lr, test)});
      } else {
        auto knn = fit_knn(train, target, args.knn_k);
        table.push_back({"KNN", city, evaluate_baseline(knn, test)});
      }
    }
  }

  auto text = format_metrics_table(table);
  std::cout << text;

  if (!args.out.empty()) {
    fs::create_directories(args.out);
    auto txt = open_output(fs::path(args.out) / "metrics.txt");
    txt << text;
    json rows = json::array();
    for (const auto& row : table)
      rows.push_back({{"model", row.model},
                      {"city", row.city},
                      {"acc_yes", row.metrics.acc_yes},
                      {"acc_no", row.metrics.acc_no},
                      {"precision", row.metrics.precision},
                      {"recall", row.metrics.recall},
                      {"f1", row.metrics.f1},
                      {"weighted_f1", row.metrics.weighted_f1}});
    json reference_rows = json::array();
    for (const auto& score : reference_scores())
      reference_rows.push_back({{"model", score.model},
                                {"city", score.city},
                                {"acc_yes", score.acc_yes},
                                {"acc_no", score.acc_no},
                                {"weighted_f1", score.weighted_f1}});
    auto out = open_output(fs::path(args.out) / "metrics.json");
    out << json{{"results", rows}, {"reference", reference_rows}}.dump(2)
        << '\n';
    write_manifest(args.out, "evaluate",
                   {{"model", args.model}, {"dataset", args.dataset}},
                   {{"cities", args.cities},
                    {"spec", args.spec},
                    {"baselines", args.baselines},
                    {"alpha", args.alpha},
                    {"target", args.target}},
                   args.seed);
  }
  return 0;
}

struct AnalyzeArgs {
  std::string model, out;
  std::string target = "Accident_L";
  std::string factors;
};

int run_analyze(const AnalyzeArgs& args) {
  auto model = load_model_file(args.model);
  const int target = var_index(parse_target(args.target));

  std::vector<int> factors;
  if (!args.factors.empty()) {
    for (auto& name : split_csv_line(args.factors)) {
      int factor = var_index(parse_target(trim(name)));
      if (factor == target)
        throw std::invalid_argument("factor equals target: " + trim(name));
      factors.push_back(factor);
    }
  } else {
    // default: variables with an edge directly connected to the target
    std::set<int> adjacent;
    for (const auto& e : model.skeleton.edges) {
      if (e.to == target) adjacent.insert(e.from);
      if (e.from == target) adjacent.insert(e.to);
    }
    factors.assign(adjacent.begin(), adjacent.end());
    if (factors.empty())
      std::cerr << "warning: no variables are directly connected to "
                << args.target << "\n";
  }

  std::ostringstream rows;
  rows << "Factor,Target,PGivenYes,PGivenNo,Delta\n";
  for (int factor : factors) {
    auto report = influence(model, factor, target);
    rows << variable_name(factor) << ',' << args.target << ','
         << format_double(report.p_given_yes) << ','
         << format_double(report.p_given_no) << ','
         << format_double(report.delta) << '\n';
  }

  if (!args.out.empty()) {
    auto out = open_output(args.out);
    out << rows.str();
    write_manifest(fs::path(args.out).parent_path().empty()
                       ? "."
                       : fs::path(args.out).parent_path(),
                   "analyze", {{"model", args.model}},
                   {{"target", args.target}, {"factors", args.factors}}, 0);
  } else {
    std::cout << rows.str();
  }
  return 0;
}

struct VisualizeArgs {
  std::string model, out;
  std::string filter = "strong";
  std::vector<std::string> label_overrides;  // Variable=Text
  double min_chi2 = 10000.0;
  int k = 4;
};

int run_visualize(const VisualizeArgs& args) {
  auto model = load_model_file(args.model);

  auto labels = default_dot_labels();
  for (const auto& override_text : args.label_overrides) {
    auto eq = override_text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--label expects Variable=Text");
    labels[var_index(parse_target(override_text.substr(0, eq)))] =
        override_text.substr(eq + 1);
  }

  NetworkSkeleton view;
  if (args.filter == "strong") {
    view = filter_strong(model.skeleton, args.min_chi2);
  } else if (args.filter.rfind("to:", 0) == 0) {
    view = ancestor_subgraph(model.skeleton,
                             var_index(parse_target(args.filter.substr(3))));
  } else {
    throw std::invalid_argument("--filter must be strong or to:<Variable>");
  }

  if (!view.edges.empty()) {
    int effective = group_strengths(view.edges, args.k);
    if (effective < args.k)
      std::cerr << "warning: only " << effective
                << " strength classes (fewer edges than k)\n";
  }

  auto dot = to_dot(view, labels);
  if (!args.out.empty()) {
    auto out = open_output(args.out);
    out << dot;
    write_manifest(fs::path(args.out).parent_path().empty()
                       ? "."
                       : fs::path(args.out).parent_path(),
                   "visualize", {{"model", args.model}},
                   {{"filter", args.filter},
                    {"min_chi2", args.min_chi2},
                    {"k", args.k},
                    {"edges", view.edges.size()}},
                   0);
  } else {
    std::cout << dot;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-causality Bayesian network toolkit"};
  app.set_version_flag("--version", kVersion);
  const char* config_env = std::getenv("EVENTBN_CONFIG");
  app.set_config("--config", config_env ? config_env : "",
                 "configuration file (key=value); flags override it");
  app.require_subcommand(1);

  int jobs = 1;
  app.add_option("--jobs", jobs, "worker thread cap")->capture_default_str();

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "parse and deduplicate raw events");
  ingest->add_option("--weather", ingest_args.weather, "weather CSV")->required();
  ingest->add_option("--traffic", ingest_args.traffic, "traffic CSV")->required();
  ingest->add_option("--out", ingest_args.out, "output directory")->required();

  PairArgs pair_args;
  auto* pair = app.add_subcommand("pair", "derive causal links");
  pair->add_option("--entities", pair_args.entities, "ingest output directory")
      ->required();
  pair->add_option("--t-thresh", pair_args.cfg.t_thresh_s, "seconds")
      ->capture_default_str();
  pair->add_option("--d-thresh", pair_args.cfg.d_thresh_km, "kilometers")
      ->capture_default_str();
  pair->add_option("--earth-radius", pair_args.cfg.earth_radius_km, "kilometers")
      ->capture_default_str();
  pair->add_option("--out", pair_args.out, "links CSV")->required();

  BuildDatasetArgs build_args;
  auto* build = app.add_subcommand("build-dataset", "assemble the two-slice dataset");
  build->add_option("--entities", build_args.entities, "ingest output directory")
      ->required();
  build->add_option("--pairs", build_args.pairs, "links CSV")->required();
  build->add_option("--mode", build_args.mode, "binary|leveled")
      ->check(CLI::IsMember({"binary", "leveled"}))
      ->capture_default_str();
  build->add_flag("--by-city", build_args.by_city, "one dataset per city");
  build->add_flag("--balance", build_args.do_balance, "undersample to class balance");
  build->add_flag("--tomek", build_args.do_tomek, "drop Tomek-linked majority rows");
  build->add_flag("--tomek-after-balance", build_args.tomek_after_balance,
                  "apply the Tomek step after balancing");
  build->add_flag("--no-weather-anchors", build_args.no_weather_anchors,
                  "rows for traffic anchors only");
  build->add_option("--seed", build_args.seed, "sampling seed")->capture_default_str();
  build->add_option("--target", build_args.target, "balancing target variable")
      ->capture_default_str();
  build->add_option("--out", build_args.out, "output directory")->required();

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "prune the skeleton and fit CPDs");
  learn->add_option("--dataset", learn_args.dataset, "dataset CSV")->required();
  learn->add_option("--estimator", learn_args.estimator, "mle|bayes")
      ->check(CLI::IsMember({"mle", "bayes"}))
      ->capture_default_str();
  learn->add_option("--pseudo-count", learn_args.pseudo_count,
                    "Dirichlet pseudo-count")
      ->capture_default_str();
  learn->add_option("--alpha", learn_args.alpha, "independence level")
      ->capture_default_str();
  learn->add_flag("--no-prune", learn_args.no_prune,
                  "fit on the raw skeleton without independence tests");
  learn->add_option("--out", learn_args.out, "model file")->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "posterior prediction per row");
  predict_cmd->add_option("--model", predict_args.model, "model file")->required();
  predict_cmd->add_option("--test", predict_args.test, "dataset CSV")->required();
  predict_cmd->add_option("--target", predict_args.target, "target variable")
      ->capture_default_str();
  predict_cmd->add_option("--threshold", predict_args.threshold, "YES threshold")
      ->capture_default_str();
  predict_cmd
      ->add_option("--evidence", predict_args.evidence_mode,
                   "all | neighbors (restrict evidence to direct neighbours)")
      ->check(CLI::IsMember({"all", "neighbors"}))
      ->capture_default_str();
  predict_cmd->add_option("--out", predict_args.out, "predictions CSV");

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "train/test protocol with baselines");
  evaluate->add_option("--model", evaluate_args.model, "model file")->required();
  evaluate->add_option("--dataset", evaluate_args.dataset,
                       "directory of per-city datasets")
      ->required();
  evaluate->add_option("--cities", evaluate_args.cities, "comma-separated cities")
      ->required();
  evaluate->add_option("--spec", evaluate_args.spec, "test POS,NEG counts")
      ->capture_default_str();
  evaluate->add_option("--baselines", evaluate_args.baselines, "subset of lr,knn");
  evaluate->add_option("--target", evaluate_args.target, "target variable")
      ->capture_default_str();
  evaluate->add_option("--threshold", evaluate_args.threshold, "YES threshold")
      ->capture_default_str();
  evaluate->add_option("--alpha", evaluate_args.alpha, "independence level")
      ->capture_default_str();
  evaluate->add_option("--seed", evaluate_args.seed, "split seed")
      ->capture_default_str();
  evaluate->add_option("--knn-k", evaluate_args.knn_k, "KNN neighbours")
      ->capture_default_str();
  evaluate->add_option("--lr-rate", evaluate_args.lr_rate, "LR learning rate")
      ->capture_default_str();
  evaluate->add_option("--lr-epochs", evaluate_args.lr_epochs, "LR epochs")
      ->capture_default_str();
  evaluate->add_option("--out", evaluate_args.out, "metrics output directory");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "single-factor influence reports");
  analyze->add_option("--model", analyze_args.model, "model file")->required();
  analyze->add_option("--target", analyze_args.target, "target variable")
      ->capture_default_str();
  analyze->add_option("--factors", analyze_args.factors,
                      "comma-separated factors (default: direct neighbours)");
  analyze->add_option("--out", analyze_args.out, "influence CSV");

  VisualizeArgs viz_args;
  auto* visualize = app.add_subcommand("visualize", "DOT export of the network");
  visualize->add_option("--model", viz_args.model, "model file")->required();
  visualize->add_option("--filter", viz_args.filter,
                        "strong | to:<Variable>")
      ->capture_default_str();
  visualize->add_option("--min-chi2", viz_args.min_chi2,
                        "chi2 cut for --filter strong")
      ->capture_default_str();
  visualize->add_option("--k", viz_args.k, "strength classes")
      ->capture_default_str();
  visualize->add_option("--label", viz_args.label_overrides,
                        "abbreviation override, Variable=Text (repeatable)");
  visualize->add_option("--out", viz_args.out, "DOT file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    learn_args.jobs = jobs;
    predict_args.jobs = jobs;
    evaluate_args.jobs = jobs;
    if (ingest->parsed()) return run_ingest(ingest_args);
    if (pair->parsed()) return run_pair(pair_args);
    if (build->parsed()) return run_build_dataset(build_args);
    if (learn->parsed()) return run_learn(learn_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
    if (evaluate->parsed()) return run_evaluate(evaluate_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (visualize->parsed()) return run_visualize(viz_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
