#include "eventbn/dataset.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "eventbn/text.hpp"

namespace eventbn {

std::string variable_name(VariableId v) {
  std::string name(to_string(v.type));
  if (v.slice == Slice::latter) name += "_L";
  return name;
}

std::string variable_name(int index) { return variable_name(variable_at(index)); }

std::optional<VariableId> parse_variable_name(std::string_view name) {
  Slice slice = Slice::former;
  if (name.size() > 2 && name.substr(name.size() - 2) == "_L") {
    slice = Slice::latter;
    name = name.substr(0, name.size() - 2);
  }
  auto type = parse_event_type(name);
  if (!type) return std::nullopt;
  return VariableId{slice, *type};
}

DatasetRow Dataset::row(Eigen::Index i) const {
  DatasetRow r;
  for (int v = 0; v < kVariableCount; ++v) r.values[v] = values(i, v);
  r.anchor_id = anchor_ids[i];
  r.city = cities[i];
  if (mode == SeverityMode::leveled) r.severities = severities[i];
  return r;
}

Dataset Dataset::select(std::span<const Eigen::Index> indices) const {
  Dataset out;
  out.mode = mode;
  out.values.resize(static_cast<Eigen::Index>(indices.size()), kVariableCount);
  out.anchor_ids.reserve(indices.size());
  out.cities.reserve(indices.size());
  if (mode == SeverityMode::leveled) out.severities.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    Eigen::Index i = indices[k];
    out.values.row(static_cast<Eigen::Index>(k)) = values.row(i);
    out.anchor_ids.push_back(anchor_ids[i]);
    out.cities.push_back(cities[i]);
    if (mode == SeverityMode::leveled) out.severities.push_back(severities[i]);
  }
  return out;
}

Dataset make_dataset(std::span<const DatasetRow> rows, SeverityMode mode) {
  Dataset ds;
  ds.mode = mode;
  ds.values.resize(static_cast<Eigen::Index>(rows.size()), kVariableCount);
  ds.anchor_ids.reserve(rows.size());
  ds.cities.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int v = 0; v < kVariableCount; ++v)
      ds.values(static_cast<Eigen::Index>(i), v) = rows[i].values[v];
    ds.anchor_ids.push_back(rows[i].anchor_id);
    ds.cities.push_back(rows[i].city);
    if (mode == SeverityMode::leveled) ds.severities.push_back(rows[i].severities);
  }
  return ds;
}

LinkIndex::LinkIndex(std::span<const GeospatialEntity> entities,
                     std::span<const CausalLink> links) {
  for (const auto& e : entities) entities_.emplace(e.id, &e);
  for (const auto& link : links) {
    causes_[link.effect_id].push_back(link.cause_id);
    results_[link.cause_id].push_back(link.effect_id);
  }
}

const GeospatialEntity* LinkIndex::find(const std::string& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : it->second;
}

std::span<const std::string> LinkIndex::causes_of(const std::string& id) const {
  auto it = causes_.find(id);
  if (it == causes_.end()) return {};
  return it->second;
}

std::span<const std::string> LinkIndex::results_of(const std::string& id) const {
  auto it = results_.find(id);
  if (it == results_.end()) return {};
  return it->second;
}

namespace {

void mark(DatasetRow& row, const GeospatialEntity& e, Slice slice,
          SeverityMode mode) {
  int index = var_index({slice, e.event_type});
  row.values[index] = 1;
  if (mode == SeverityMode::leveled) {
    auto [it, inserted] = row.severities.emplace(index, e.severity.label);
    if (!inserted && e.severity.label > it->second) it->second = e.severity.label;
  }
}

}  // namespace

DatasetRow build_row(const GeospatialEntity& anchor, const LinkIndex& links,
                     SeverityMode mode) {
  DatasetRow row;
  row.anchor_id = anchor.id;
  row.city = anchor.loc.city;

  if (anchor.kind == EventKind::traffic) {
    mark(row, anchor, Slice::latter, mode);
    for (const auto& cause_id : links.causes_of(anchor.id)) {
      const auto* cause = links.find(cause_id);
      if (!cause) continue;
      if (cause->kind == EventKind::weather) {
        mark(row, *cause, Slice::latter, mode);
      } else {
        mark(row, *cause, Slice::former, mode);
        for (const auto& grand_id : links.causes_of(cause_id)) {
          const auto* grand = links.find(grand_id);
          if (grand && grand->kind == EventKind::weather)
            mark(row, *grand, Slice::former, mode);
        }
      }
    }
  } else {
    mark(row, anchor, Slice::former, mode);
    for (const auto& result_id : links.results_of(anchor.id)) {
      const auto* result = links.find(result_id);
      if (!result || result->kind != EventKind::traffic) continue;
      mark(row, *result, Slice::former, mode);
      for (const auto& grand_id : links.results_of(result_id)) {
        const auto* grand = links.find(grand_id);
        if (grand && grand->kind == EventKind::traffic)
          mark(row, *grand, Slice::latter, mode);
      }
    }
  }
  return row;
}

Dataset build_dataset(std::span<const GeospatialEntity> entities,
                      std::span<const CausalLink> links, SeverityMode mode,
                      bool include_weather_anchors) {
  LinkIndex index(entities, links);

  std::vector<const GeospatialEntity*> anchors;
  anchors.reserve(entities.size());
  for (const auto& e : entities) {
    if (!include_weather_anchors && e.kind == EventKind::weather) continue;
    anchors.push_back(&e);
  }
  std::sort(anchors.begin(), anchors.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  std::vector<DatasetRow> rows;
  rows.reserve(anchors.size());
  for (const auto* anchor : anchors) rows.push_back(build_row(*anchor, index, mode));
  return make_dataset(rows, mode);
}

std::map<std::string, Dataset> partition_by_city(const Dataset& ds) {
  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < ds.rows(); ++i) groups[ds.cities[i]].push_back(i);
  std::map<std::string, Dataset> out;
  for (const auto& [city, indices] : groups) out.emplace(city, ds.select(indices));
  return out;
}

Dataset balance(const Dataset& ds, VariableId target, std::uint64_t seed) {
  const int t = var_index(target);
  std::vector<Eigen::Index> yes, no;
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    (ds.values(i, t) ? yes : no).push_back(i);
  if (yes.empty() || no.empty())
    throw std::runtime_error("degenerate class distribution for " +
                             variable_name(target));
  if (yes.size() == no.size()) return ds;

  auto& majority = yes.size() > no.size() ? yes : no;
  const std::size_t keep = std::min(yes.size(), no.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<Eigen::Index> selected;
  selected.reserve(2 * keep);
  selected.insert(selected.end(), yes.begin(), yes.end());
  selected.insert(selected.end(), no.begin(), no.end());
  std::sort(selected.begin(), selected.end());
  return ds.select(selected);
}

std::vector<Eigen::Index> tomek_links(const Dataset& ds, VariableId target) {
  const int t = var_index(target);
  const Eigen::Index n = ds.rows();
  if (n < 2) return {};

  std::vector<Eigen::Index> yes, no;
  for (Eigen::Index i = 0; i < n; ++i) (ds.values(i, t) ? yes : no).push_back(i);
  if (yes.empty() || no.empty()) return {};
  const bool yes_is_majority = yes.size() >= no.size();

  // Feature view without the target column.
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      features(n, kVariableCount - 1);
  for (int v = 0, c = 0; v < kVariableCount; ++v) {
    if (v == t) continue;
    features.col(c++) = ds.values.col(v);
  }

  auto hamming = [&](Eigen::Index a, Eigen::Index b) {
    return static_cast<int>((features.row(a) != features.row(b)).count());
  };

  std::vector<int> nearest(n, kVariableCount);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      int d = hamming(i, j);
      if (d < nearest[i]) nearest[i] = d;
      if (d < nearest[j]) nearest[j] = d;
    }

  const auto& majority = yes_is_majority ? yes : no;
  const auto& minority = yes_is_majority ? no : yes;
  std::vector<Eigen::Index> flagged;
  for (Eigen::Index i : majority) {
    for (Eigen::Index j : minority) {
      int d = hamming(i, j);
      if (d == nearest[i] && d == nearest[j]) {
        flagged.push_back(i);
        break;
      }
    }
  }
  std::sort(flagged.begin(), flagged.end());
  return flagged;
}

Dataset remove_rows(const Dataset& ds, std::span<const Eigen::Index> indices) {
  std::vector<char> drop(ds.rows(), 0);
  for (Eigen::Index i : indices) drop[i] = 1;
  std::vector<Eigen::Index> keep;
  keep.reserve(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    if (!drop[i]) keep.push_back(i);
  return ds.select(keep);
}

namespace {

std::string severities_cell(const std::map<int, SeverityLabel>& severities) {
  std::string out;
  for (const auto& [index, label] : severities) {
    if (!out.empty()) out.push_back(';');
    out += variable_name(index);
    out.push_back('=');
    out += to_string(label);
  }
  return out;
}

std::map<int, SeverityLabel> parse_severities_cell(const std::string& cell,
                                                   std::size_t row) {
  std::map<int, SeverityLabel> out;
  std::size_t pos = 0;
  while (pos < cell.size()) {
    std::size_t end = cell.find(';', pos);
    if (end == std::string::npos) end = cell.size();
    std::string_view item(cell.data() + pos, end - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("dataset row " + std::to_string(row) +
                               ": bad severity annotation");
    auto var = parse_variable_name(item.substr(0, eq));
    auto label = parse_severity_label(item.substr(eq + 1));
    if (!var || !label)
      throw std::runtime_error("dataset row " + std::to_string(row) +
                               ": bad severity annotation");
    out[var_index(*var)] = *label;
    pos = end + 1;
  }
  return out;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& ds) {
  std::vector<std::string> header;
  header.reserve(kVariableCount + 3);
  for (int v = 0; v < kVariableCount; ++v) header.push_back(variable_name(v));
  header.push_back("AnchorId");
  header.push_back("City");
  if (ds.mode == SeverityMode::leveled) header.push_back("Severities");
  out << join_csv(header) << '\n';

  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    std::vector<std::string> fields;
    fields.reserve(header.size());
    for (int v = 0; v < kVariableCount; ++v)
      fields.emplace_back(ds.values(i, v) ? "YES" : "NO");
    fields.push_back(ds.anchor_ids[i]);
    fields.push_back(ds.cities[i]);
    if (ds.mode == SeverityMode::leveled)
      fields.push_back(severities_cell(ds.severities[i]));
    out << join_csv(fields) << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("dataset stream is empty: header row required");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::array<std::size_t, kVariableCount> var_columns{};
  for (int v = 0; v < kVariableCount; ++v) {
    auto it = std::find(header.begin(), header.end(), variable_name(v));
    if (it == header.end())
      throw std::invalid_argument("dataset missing variable column: " +
                                  variable_name(v));
    var_columns[v] = static_cast<std::size_t>(it - header.begin());
  }
  auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto anchor_col = column_of("AnchorId");
  auto city_col = column_of("City");
  auto severities_col = column_of("Severities");
  if (!anchor_col || !city_col)
    throw std::invalid_argument("dataset missing AnchorId/City columns");

  std::vector<DatasetRow> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < header.size())
      throw std::runtime_error("dataset row " + std::to_string(row_number) +
                               ": too few fields");
    DatasetRow row;
    for (int v = 0; v < kVariableCount; ++v) {
      const std::string& cell = fields[var_columns[v]];
      if (cell == "YES") row.values[v] = 1;
      else if (cell == "NO") row.values[v] = 0;
      else
        throw std::runtime_error("dataset row " + std::to_string(row_number) +
                                 ": value must be YES or NO");
    }
    row.anchor_id = fields[*anchor_col];
    row.city = fields[*city_col];
    if (severities_col)
      row.severities = parse_severities_cell(fields[*severities_col], row_number);
    rows.push_back(std::move(row));
  }
  return make_dataset(rows, severities_col ? SeverityMode::leveled
                                           : SeverityMode::binary);
}

}  // namespace eventbn
