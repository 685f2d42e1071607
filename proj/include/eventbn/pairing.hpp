#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eventbn/events.hpp"

namespace eventbn {

struct PairingConfig {
  double t_thresh_s = 3600.0;   // start-time gap tolerated for a pair
  double d_thresh_km = 10.0;    // traffic-traffic great-circle bound
  double earth_radius_km = 6371.0;

  void validate() const;  // all thresholds strictly positive
};

enum class CausalRule { same_kind_earlier_first, weather_causes_traffic };

std::string_view to_string(CausalRule rule);
std::optional<CausalRule> parse_causal_rule(std::string_view text);

struct CausalLink {
  std::string cause_id;
  std::string effect_id;
  CausalRule rule = CausalRule::same_kind_earlier_first;

  bool operator==(const CausalLink&) const = default;
};

/// Great-circle distance between two coordinates on a sphere.
double haversine_km(const Location& a, const Location& b, double radius_km);

/// |start difference| within the time threshold, boundary inclusive.
bool temporally_correlated(const GeospatialEntity& e1, const GeospatialEntity& e2,
                           const PairingConfig& cfg);

/// Traffic-traffic pairs compare haversine distance against d_thresh;
/// any pair involving a weather entity collocates by airport station.
/// A weather entity without a station code is a contract violation.
bool spatially_correlated(const GeospatialEntity& e1, const GeospatialEntity& e2,
                          const PairingConfig& cfg);

/// All unordered entity pairs that are both temporally and spatially
/// correlated. Output pairs are (min id, max id), sorted; equal to the
/// all-pairs double loop on any input.
std::vector<std::pair<std::string, std::string>> find_correlated_pairs(
    std::span<const GeospatialEntity> entities, const PairingConfig& cfg);

/// Causal direction for one correlated pair. Same-kind pairs point from the
/// earlier start (ties broken toward the lexicographically smaller id);
/// mixed pairs only yield a link when the weather entity starts strictly
/// earlier. Self-pairs yield nothing.
std::optional<CausalLink> assign_causality(const GeospatialEntity& a,
                                           const GeospatialEntity& b);

/// find_correlated_pairs followed by assign_causality; link order follows
/// the pair order.
std::vector<CausalLink> derive_links(std::span<const GeospatialEntity> entities,
                                     const PairingConfig& cfg);

/// Fills missing traffic airport codes with the nearest weather station
/// (stations taken from the weather entities present). Returns how many
/// codes were assigned.
std::size_t fill_missing_airport_codes(std::vector<GeospatialEntity>& entities,
                                       double radius_km = 6371.0);

void write_links(std::ostream& out, std::span<const CausalLink> links);
std::vector<CausalLink> read_links(std::istream& in);

}  // namespace eventbn
