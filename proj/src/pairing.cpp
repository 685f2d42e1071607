#include "eventbn/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "eventbn/text.hpp"

namespace eventbn {

void PairingConfig::validate() const {
  if (t_thresh_s <= 0 || d_thresh_km <= 0 || earth_radius_km <= 0)
    throw std::invalid_argument("pairing thresholds must be strictly positive");
}

std::string_view to_string(CausalRule rule) {
  return rule == CausalRule::same_kind_earlier_first ? "same-kind-earlier-first"
                                                     : "weather-causes-traffic";
}

std::optional<CausalRule> parse_causal_rule(std::string_view text) {
  if (text == "same-kind-earlier-first") return CausalRule::same_kind_earlier_first;
  if (text == "weather-causes-traffic") return CausalRule::weather_causes_traffic;
  return std::nullopt;
}

double haversine_km(const Location& a, const Location& b, double radius_km) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double lat1 = a.lat * deg, lat2 = b.lat * deg;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s1 = std::sin(dlat / 2), s2 = std::sin(dlon / 2);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * radius_km * std::asin(std::sqrt(h));
}

bool temporally_correlated(const GeospatialEntity& e1, const GeospatialEntity& e2,
                           const PairingConfig& cfg) {
  return std::abs(static_cast<double>(e1.time.start - e2.time.start)) <=
         cfg.t_thresh_s;
}

bool spatially_correlated(const GeospatialEntity& e1, const GeospatialEntity& e2,
                          const PairingConfig& cfg) {
  if (e1.kind == EventKind::traffic && e2.kind == EventKind::traffic)
    return haversine_km(e1.loc, e2.loc, cfg.earth_radius_km) < cfg.d_thresh_km;

  // At least one weather entity: collocation is airport-station equality.
  for (const auto* e : {&e1, &e2}) {
    if (e->kind == EventKind::weather && !e->loc.airport_code)
      throw std::invalid_argument("weather entity without airport code: " + e->id);
  }
  if (!e1.loc.airport_code || !e2.loc.airport_code) return false;
  return *e1.loc.airport_code == *e2.loc.airport_code;
}

std::vector<std::pair<std::string, std::string>> find_correlated_pairs(
    std::span<const GeospatialEntity> entities, const PairingConfig& cfg) {
  cfg.validate();

  // Time-sorted sweep: only entities whose start times fall within the
  // threshold window can pair, so candidates are a contiguous run.
  std::vector<std::size_t> order(entities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entities[a].time.start < entities[b].time.start;
  });

  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = entities[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& b = entities[order[j]];
      if (static_cast<double>(b.time.start - a.time.start) > cfg.t_thresh_s) break;
      if (a.id == b.id) continue;
      if (!spatially_correlated(a, b, cfg)) continue;
      auto p = std::minmax(a.id, b.id);
      pairs.emplace_back(p.first, p.second);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::optional<CausalLink> assign_causality(const GeospatialEntity& a,
                                           const GeospatialEntity& b) {
  if (a.id == b.id) return std::nullopt;
  if (a.kind == b.kind) {
    const GeospatialEntity* cause = &a;
    const GeospatialEntity* effect = &b;
    if (b.time.start < a.time.start ||
        (b.time.start == a.time.start && b.id < a.id))
      std::swap(cause, effect);
    return CausalLink{cause->id, effect->id, CausalRule::same_kind_earlier_first};
  }
  const GeospatialEntity& weather = a.kind == EventKind::weather ? a : b;
  const GeospatialEntity& traffic = a.kind == EventKind::weather ? b : a;
  if (weather.time.start >= traffic.time.start) return std::nullopt;
  return CausalLink{weather.id, traffic.id, CausalRule::weather_causes_traffic};
}

std::vector<CausalLink> derive_links(std::span<const GeospatialEntity> entities,
                                     const PairingConfig& cfg) {
  std::unordered_map<std::string, const GeospatialEntity*> by_id;
  by_id.reserve(entities.size());
  for (const auto& e : entities) by_id.emplace(e.id, &e);

  std::vector<CausalLink> links;
  for (const auto& [first, second] : find_correlated_pairs(entities, cfg)) {
    if (auto link = assign_causality(*by_id.at(first), *by_id.at(second)))
      links.push_back(std::move(*link));
  }
  return links;
}

std::size_t fill_missing_airport_codes(std::vector<GeospatialEntity>& entities,
                                       double radius_km) {
  // Station location = first weather entity seen for that code.
  std::vector<std::pair<std::string, Location>> stations;
  std::unordered_map<std::string, std::size_t> station_index;
  for (const auto& e : entities) {
    if (e.kind != EventKind::weather || !e.loc.airport_code) continue;
    if (station_index.emplace(*e.loc.airport_code, stations.size()).second)
      stations.emplace_back(*e.loc.airport_code, e.loc);
  }
  if (stations.empty()) return 0;

  std::size_t assigned = 0;
  for (auto& e : entities) {
    if (e.kind != EventKind::traffic || e.loc.airport_code) continue;
    const std::string* best = nullptr;
    double best_distance = 0;
    for (const auto& [code, loc] : stations) {
      double d = haversine_km(e.loc, loc, radius_km);
      if (!best || d < best_distance || (d == best_distance && code < *best)) {
        best = &code;
        best_distance = d;
      }
    }
    e.loc.airport_code = *best;
    ++assigned;
  }
  return assigned;
}

void write_links(std::ostream& out, std::span<const CausalLink> links) {
  out << "CauseId,EffectId,Rule\n";
  for (const auto& link : links)
    out << join_csv({link.cause_id, link.effect_id,
                     std::string(to_string(link.rule))})
        << '\n';
}

std::vector<CausalLink> read_links(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("links stream is empty: header row required");
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "CauseId" ||
      trim(header[1]) != "EffectId" || trim(header[2]) != "Rule")
    throw std::invalid_argument("links header must be CauseId,EffectId,Rule");

  std::vector<CausalLink> links;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 3)
      throw std::runtime_error("links row " + std::to_string(row) + ": too few fields");
    auto rule = parse_causal_rule(trim(fields[2]));
    if (!rule)
      throw std::runtime_error("links row " + std::to_string(row) + ": unknown rule");
    links.push_back({trim(fields[0]), trim(fields[1]), *rule});
  }
  return links;
}

}  // namespace eventbn
