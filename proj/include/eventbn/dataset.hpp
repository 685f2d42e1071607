#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eventbn/events.hpp"
#include "eventbn/pairing.hpp"

namespace eventbn {

// The learning dataset has one binary variable per (slice, event type):
// a "former" and a "latter" copy of each of the 14 taxonomy types.
enum class Slice { former, latter };

struct VariableId {
  Slice slice = Slice::former;
  EventType type = EventType::accident;

  auto operator<=>(const VariableId&) const = default;
};

inline constexpr int kVariableCount = 2 * kEventTypeCount;

// Column layout: former weather, former traffic, latter weather, latter
// traffic, 7 + 7 + 7 + 7.
inline int var_index(VariableId v) {
  return (v.slice == Slice::latter ? kEventTypeCount : 0) +
         static_cast<int>(v.type);
}
inline VariableId variable_at(int index) {
  return {index < kEventTypeCount ? Slice::former : Slice::latter,
          static_cast<EventType>(index % kEventTypeCount)};
}
inline EventKind group_of(VariableId v) { return kind_of(v.type); }

// "Rain" for the former slice, "Rain_L" for the latter.
std::string variable_name(VariableId v);
std::string variable_name(int index);
std::optional<VariableId> parse_variable_name(std::string_view name);

struct DatasetRow {
  std::array<std::uint8_t, kVariableCount> values{};  // 1 = YES
  std::string anchor_id;
  std::string city;
  // Highest severity label among the events behind each YES variable;
  // populated in leveled mode only.
  std::map<int, SeverityLabel> severities;
};

struct Dataset {
  using ValueMatrix =
      Eigen::Array<std::uint8_t, Eigen::Dynamic, kVariableCount, Eigen::RowMajor>;

  SeverityMode mode = SeverityMode::binary;
  ValueMatrix values;  // rows x 28
  std::vector<std::string> anchor_ids;
  std::vector<std::string> cities;
  std::vector<std::map<int, SeverityLabel>> severities;  // leveled mode only

  Eigen::Index rows() const { return values.rows(); }
  DatasetRow row(Eigen::Index i) const;
  // Keeps the listed rows, in the given order.
  Dataset select(std::span<const Eigen::Index> indices) const;
};

Dataset make_dataset(std::span<const DatasetRow> rows, SeverityMode mode);

// Cause/effect adjacency over entity ids, plus id -> entity lookup.
class LinkIndex {
 public:
  LinkIndex(std::span<const GeospatialEntity> entities,
            std::span<const CausalLink> links);

  const GeospatialEntity* find(const std::string& id) const;
  std::span<const std::string> causes_of(const std::string& id) const;
  std::span<const std::string> results_of(const std::string& id) const;

 private:
  std::map<std::string, const GeospatialEntity*> entities_;
  std::map<std::string, std::vector<std::string>> causes_;
  std::map<std::string, std::vector<std::string>> results_;
};

/// One dataset entry per anchor entity. A traffic anchor marks its own
/// type in the latter traffic slice, weather causes in the latter weather
/// slice, traffic causes in the former traffic slice, and the weather
/// causes of those traffic causes in the former weather slice. A weather
/// anchor marks itself in the former weather slice, its traffic results in
/// the former traffic slice, and their traffic results in the latter
/// traffic slice. Everything else stays NO.
DatasetRow build_row(const GeospatialEntity& anchor, const LinkIndex& links,
                     SeverityMode mode = SeverityMode::binary);

/// Rows for every anchor, ordered by anchor id.
Dataset build_dataset(std::span<const GeospatialEntity> entities,
                      std::span<const CausalLink> links,
                      SeverityMode mode = SeverityMode::binary,
                      bool include_weather_anchors = true);

std::map<std::string, Dataset> partition_by_city(const Dataset& ds);

/// Random undersampling of the majority class of `target` down to exact
/// class balance. Surviving rows keep their input order.
Dataset balance(const Dataset& ds, VariableId target, std::uint64_t seed);

/// Majority-class rows that form a Tomek link: mutual nearest neighbors
/// (Hamming distance over the 27 non-target variables, ties allowed) with
/// a minority-class row. Returned indices are ascending.
std::vector<Eigen::Index> tomek_links(const Dataset& ds, VariableId target);

/// Drops the given row indices.
Dataset remove_rows(const Dataset& ds, std::span<const Eigen::Index> indices);

void write_dataset(std::ostream& out, const Dataset& ds);
Dataset read_dataset(std::istream& in);

}  // namespace eventbn
