#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eventbn {

enum class EventKind { weather, traffic };

// Closed taxonomies. Weather types occupy [0, 7) and traffic types [7, 14)
// so the enum value doubles as the per-group offset used by the dataset
// variable indexing.
enum class EventType : int {
  severe_cold = 0,
  fog,
  hail,
  rain,
  snow,
  storm,
  precipitation,
  accident = 7,
  broken_vehicle,
  congestion,
  construction,
  event,
  lane_blocked,
  flow_incident,
};

inline constexpr int kWeatherTypeCount = 7;
inline constexpr int kTrafficTypeCount = 7;
inline constexpr int kEventTypeCount = kWeatherTypeCount + kTrafficTypeCount;

EventKind kind_of(EventType t);
std::string_view to_string(EventType t);
// Accepts canonical names plus common spellings ("Broken-Vehicle",
// "lane blocked", "Cold"). Unknown labels yield nullopt.
std::optional<EventType> parse_event_type(std::string_view label);

// Ordinal severity, ascending. `unk` also serves as the presence marker
// left behind by the binary severity collapse.
enum class SeverityLabel { unk = 0, other, light, moderate, heavy, severe };

std::string_view to_string(SeverityLabel label);
std::optional<SeverityLabel> parse_severity_label(std::string_view text);

struct SeverityLevel {
  SeverityLabel label = SeverityLabel::unk;
  // Cluster center the source data attached to the event (mm, km/h or
  // degrees C depending on the type). Must be one of severity_centers().
  std::optional<double> numeric_center;

  bool operator==(const SeverityLevel&) const = default;
};

// Published severity cluster centers per event type; empty for types whose
// severity is label-only.
std::span<const double> severity_centers(EventType t);
// Label associated with each center, parallel to severity_centers().
std::span<const SeverityLabel> severity_center_labels(EventType t);

// Wind speeds below this are not considered an extreme storm event.
inline constexpr double kExtremeWindKmh = 60.0;
// The only temperature cluster retained by the binary dataset.
inline constexpr double kSevereColdCenterC = -23.7;

struct Location {
  double lat = 0.0;
  double lon = 0.0;
  std::optional<std::string> airport_code;
  std::optional<std::string> street;
  std::optional<std::string> zipcode;
  std::string city;
  std::string state;

  bool operator==(const Location&) const = default;
};

struct TimeInterval {
  std::int64_t start = 0;  // unix seconds, UTC
  std::int64_t end = 0;

  bool operator==(const TimeInterval&) const = default;
};

struct GeospatialEntity {
  std::string id;
  EventKind kind = EventKind::traffic;
  EventType event_type = EventType::accident;
  SeverityLevel severity;
  Location loc;
  TimeInterval time;

  bool operator==(const GeospatialEntity&) const = default;
};

struct RejectedRow {
  std::size_t row = 0;  // 1-based data row number (header excluded)
  std::string reason;
  std::vector<std::string> fields;
};

struct ParseResult {
  std::vector<GeospatialEntity> entities;
  std::vector<RejectedRow> rejects;
  std::vector<std::string> source_header;  // rejects echo the input layout
};

// Column layouts for the two input files. Header row required; columns are
// located by name, so column order is free.
std::vector<std::string> entity_columns(EventKind kind);

/// Parses a CSV event stream. Malformed rows land in the rejects report
/// with their row number and reason; a missing required column throws.
ParseResult parse_events(std::istream& in, EventKind kind);

/// Drops exact duplicates: same id, or same (type, interval, coordinates).
/// First occurrence wins; survivor order is input order.
std::vector<GeospatialEntity> deduplicate(std::vector<GeospatialEntity> entities);

enum class SeverityMode { binary, leveled };

/// Severity handling for weather entities. In leveled mode the entity is
/// returned unchanged. In binary mode severity is reduced to a presence
/// marker, and events below the retained intensity band (storms under the
/// extreme-wind threshold, temperature clusters other than severe-cold)
/// are dropped entirely (nullopt). Traffic input throws.
std::optional<GeospatialEntity> collapse_severity(const GeospatialEntity& entity,
                                                  SeverityMode mode);

void write_entities(std::ostream& out, std::span<const GeospatialEntity> entities,
                    EventKind kind);
void write_rejects(std::ostream& out, std::span<const RejectedRow> rejects,
                   std::span<const std::string> source_header);

}  // namespace eventbn
