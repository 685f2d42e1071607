#include "eventbn/events.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "eventbn/text.hpp"

namespace eventbn {

namespace {

constexpr std::string_view kTypeNames[kEventTypeCount] = {
    "SevereCold",    "Fog",   "Hail",         "Rain",  "Snow",
    "Storm",         "Precipitation",
    "Accident",      "BrokenVehicle", "Congestion", "Construction",
    "Event",         "LaneBlocked",   "FlowIncident",
};

constexpr std::string_view kSeverityNames[] = {"UNK",      "Other", "Light",
                                               "Moderate", "Heavy", "Severe"};

std::string canonical_key(std::string_view label) {
  std::string key;
  for (char c : label) {
    if (c == '-' || c == '_' || c == ' ' || c == '\'') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

constexpr double kRainCentersMm[] = {2.5, 7.1, 11.6};
constexpr double kSnowCentersMm[] = {0.6, 1.7, 2.5};
constexpr double kWindCentersKmh[] = {13.2, 36.2, 60.0};
constexpr double kTemperatureCentersC[] = {-23.7, -8.6, 6.7, 21.3, 35.8};

constexpr SeverityLabel kThreeBandLabels[] = {SeverityLabel::light,
                                              SeverityLabel::moderate,
                                              SeverityLabel::heavy};
// Wind bands are calm / moderate / storm conditions.
constexpr SeverityLabel kWindLabels[] = {SeverityLabel::light,
                                         SeverityLabel::moderate,
                                         SeverityLabel::severe};
// Only the coldest temperature cluster counts as severe.
constexpr SeverityLabel kTemperatureLabels[] = {
    SeverityLabel::severe, SeverityLabel::other, SeverityLabel::other,
    SeverityLabel::other, SeverityLabel::other};

}  // namespace

EventKind kind_of(EventType t) {
  return static_cast<int>(t) < kWeatherTypeCount ? EventKind::weather
                                                 : EventKind::traffic;
}

std::string_view to_string(EventType t) {
  return kTypeNames[static_cast<int>(t)];
}

std::optional<EventType> parse_event_type(std::string_view label) {
  static const std::unordered_map<std::string, EventType> table = [] {
    std::unordered_map<std::string, EventType> m;
    for (int i = 0; i < kEventTypeCount; ++i)
      m[canonical_key(kTypeNames[i])] = static_cast<EventType>(i);
    // source-data spellings
    m["cold"] = EventType::severe_cold;
    m["wind"] = EventType::storm;
    return m;
  }();
  auto it = table.find(canonical_key(label));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(SeverityLabel label) {
  return kSeverityNames[static_cast<int>(label)];
}

std::optional<SeverityLabel> parse_severity_label(std::string_view text) {
  std::string key = canonical_key(text);
  for (int i = 0; i < 6; ++i)
    if (key == canonical_key(kSeverityNames[i]))
      return static_cast<SeverityLabel>(i);
  return std::nullopt;
}

std::span<const double> severity_centers(EventType t) {
  switch (t) {
    case EventType::rain: return kRainCentersMm;
    case EventType::snow: return kSnowCentersMm;
    case EventType::storm: return kWindCentersKmh;
    case EventType::severe_cold: return kTemperatureCentersC;
    default: return {};
  }
}

std::span<const SeverityLabel> severity_center_labels(EventType t) {
  switch (t) {
    case EventType::rain:
    case EventType::snow: return kThreeBandLabels;
    case EventType::storm: return kWindLabels;
    case EventType::severe_cold: return kTemperatureLabels;
    default: return {};
  }
}

std::vector<std::string> entity_columns(EventKind kind) {
  if (kind == EventKind::traffic)
    return {"EventId",     "Type",        "Severity", "StartTime(UTC)",
            "EndTime(UTC)", "LocationLat", "LocationLng", "AirportCode",
            "City",        "State",       "ZipCode"};
  return {"EventId",     "Type",        "Severity", "StartTime(UTC)",
          "EndTime(UTC)", "AirportCode", "LocationLat", "LocationLng",
          "City",        "State",       "ZipCode"};
}

namespace {

struct ColumnMap {
  std::unordered_map<std::string, std::size_t> index;

  const std::string& get(const std::vector<std::string>& fields,
                         const std::string& name) const {
    static const std::string empty;
    auto it = index.find(name);
    if (it == index.end() || it->second >= fields.size()) return empty;
    return fields[it->second];
  }
};

std::optional<SeverityLevel> parse_severity(EventType type,
                                            const std::string& text,
                                            std::string& reason) {
  std::string t = trim(text);
  if (t.empty()) return SeverityLevel{SeverityLabel::unk, std::nullopt};
  if (auto label = parse_severity_label(t)) return SeverityLevel{*label, std::nullopt};
  if (auto value = parse_double(t)) {
    auto centers = severity_centers(type);
    auto labels = severity_center_labels(type);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (std::abs(centers[i] - *value) < 1e-9)
        return SeverityLevel{labels[i], centers[i]};
    }
    // numeric values must be one of the published cluster centers
    reason = "unknown severity";
    return std::nullopt;
  }
  // out-of-taxonomy labels count as present but unclassified
  return SeverityLevel{SeverityLabel::unk, std::nullopt};
}

}  // namespace

ParseResult parse_events(std::istream& in, EventKind kind) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("event stream is empty: header row required");

  ParseResult result;
  ColumnMap columns;
  {
    auto header = split_csv_line(line);
    for (auto& name : header) name = trim(name);
    for (std::size_t i = 0; i < header.size(); ++i) columns.index[header[i]] = i;
    for (const auto& required : entity_columns(kind)) {
      if (!columns.index.count(required))
        throw std::invalid_argument("missing required column: " + required);
    }
    result.source_header = std::move(header);
  }

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    auto reject = [&](std::string reason) {
      result.rejects.push_back({row, std::move(reason), fields});
    };

    GeospatialEntity e;
    e.kind = kind;
    e.id = trim(columns.get(fields, "EventId"));
    if (e.id.empty()) {
      reject("empty id");
      continue;
    }

    auto type = parse_event_type(columns.get(fields, "Type"));
    if (!type) {
      reject("unknown event type");
      continue;
    }
    if (kind_of(*type) != kind) {
      reject("event type outside taxonomy for this kind");
      continue;
    }
    e.event_type = *type;

    std::string severity_reason;
    auto severity = parse_severity(*type, columns.get(fields, "Severity"),
                                   severity_reason);
    if (!severity) {
      reject(severity_reason);
      continue;
    }
    e.severity = *severity;

    auto start = parse_timestamp_utc(columns.get(fields, "StartTime(UTC)"));
    auto end = parse_timestamp_utc(columns.get(fields, "EndTime(UTC)"));
    if (!start || !end) {
      reject("bad timestamp");
      continue;
    }
    if (*start > *end) {
      reject("inverted interval");
      continue;
    }
    e.time = {*start, *end};

    auto lat = parse_double(columns.get(fields, "LocationLat"));
    auto lon = parse_double(columns.get(fields, "LocationLng"));
    if (!lat || !lon || std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
      reject("bad coordinate");
      continue;
    }
    e.loc.lat = *lat;
    e.loc.lon = *lon;

    std::string airport = trim(columns.get(fields, "AirportCode"));
    if (!airport.empty()) e.loc.airport_code = airport;
    if (kind == EventKind::weather && !e.loc.airport_code) {
      reject("missing airport code");
      continue;
    }

    std::string zip = trim(columns.get(fields, "ZipCode"));
    if (!zip.empty()) e.loc.zipcode = zip;
    if (columns.index.count("Street")) {
      std::string street = trim(columns.get(fields, "Street"));
      if (!street.empty()) e.loc.street = street;
    }
    e.loc.city = trim(columns.get(fields, "City"));
    e.loc.state = trim(columns.get(fields, "State"));

    result.entities.push_back(std::move(e));
  }
  return result;
}

std::vector<GeospatialEntity> deduplicate(std::vector<GeospatialEntity> entities) {
  std::vector<GeospatialEntity> out;
  out.reserve(entities.size());
  std::unordered_set<std::string> seen_ids;
  std::unordered_set<std::string> seen_content;
  for (auto& e : entities) {
    std::string content = std::string(to_string(e.event_type)) + '|' +
                          std::to_string(e.time.start) + '|' +
                          std::to_string(e.time.end) + '|' +
                          format_double(e.loc.lat) + '|' +
                          format_double(e.loc.lon);
    if (!seen_ids.insert(e.id).second) continue;
    if (!seen_content.insert(content).second) continue;
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<GeospatialEntity> collapse_severity(const GeospatialEntity& entity,
                                                  SeverityMode mode) {
  if (entity.kind != EventKind::weather)
    throw std::invalid_argument("collapse_severity: traffic entity");
  if (mode == SeverityMode::leveled) return entity;

  const auto& center = entity.severity.numeric_center;
  if (entity.event_type == EventType::storm && center &&
      *center < kExtremeWindKmh)
    return std::nullopt;
  if (entity.event_type == EventType::severe_cold && center &&
      std::abs(*center - kSevereColdCenterC) > 1e-9)
    return std::nullopt;

  GeospatialEntity collapsed = entity;
  collapsed.severity = SeverityLevel{SeverityLabel::unk, std::nullopt};
  return collapsed;
}

namespace {

std::vector<std::string> entity_fields(const GeospatialEntity& e, EventKind kind) {
  std::string severity = e.severity.numeric_center
                             ? format_double(*e.severity.numeric_center)
                             : std::string(to_string(e.severity.label));
  std::string airport = e.loc.airport_code.value_or("");
  std::string zip = e.loc.zipcode.value_or("");
  std::string start = format_timestamp_utc(e.time.start);
  std::string end = format_timestamp_utc(e.time.end);
  std::string lat = format_double(e.loc.lat);
  std::string lon = format_double(e.loc.lon);
  std::string type(to_string(e.event_type));
  if (kind == EventKind::traffic)
    return {e.id, type, severity, start, end, lat, lon, airport,
            e.loc.city, e.loc.state, zip};
  return {e.id, type, severity, start, end, airport, lat, lon,
          e.loc.city, e.loc.state, zip};
}

}  // namespace

void write_entities(std::ostream& out, std::span<const GeospatialEntity> entities,
                    EventKind kind) {
  out << join_csv(entity_columns(kind)) << '\n';
  for (const auto& e : entities)
    out << join_csv(entity_fields(e, kind)) << '\n';
}

void write_rejects(std::ostream& out, std::span<const RejectedRow> rejects,
                   std::span<const std::string> source_header) {
  std::vector<std::string> columns(source_header.begin(), source_header.end());
  columns.push_back("RejectReason");
  out << join_csv(columns) << '\n';
  for (const auto& r : rejects) {
    auto fields = r.fields;
    fields.resize(columns.size() - 1);
    fields.push_back(r.reason);
    out << join_csv(fields) << '\n';
  }
}

}  // namespace eventbn
