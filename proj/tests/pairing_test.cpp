#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "eventbn/pairing.hpp"
#include "testutil.hpp"

using namespace eventbn;
using testutil::make_entity;

TEST_CASE("haversine distance") {
  Location origin{0.0, 0.0};
  SUBCASE("coincident points") {
    CHECK(haversine_km(origin, origin, 6371.0) == doctest::Approx(0.0));
  }
  SUBCASE("antipodal points give pi * R") {
    Location antipode{0.0, 180.0};
    CHECK(haversine_km(origin, antipode, 6371.0) ==
          doctest::Approx(std::numbers::pi * 6371.0).epsilon(1e-9));
  }
  SUBCASE("one-degree meridian arc is pi * R / 180") {
    Location north{1.0, 0.0};
    CHECK(haversine_km(origin, north, 6371.0) ==
          doctest::Approx(std::numbers::pi * 6371.0 / 180.0).epsilon(1e-9));
  }
  SUBCASE("symmetric, non-negative, bounded by pi * R") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 200; ++i) {
      Location a{lat(rng), lon(rng)};
      Location b{lat(rng), lon(rng)};
      double ab = haversine_km(a, b, 6371.0);
      CHECK(ab == doctest::Approx(haversine_km(b, a, 6371.0)).epsilon(1e-12));
      CHECK(ab >= 0.0);
      CHECK(ab <= std::numbers::pi * 6371.0 + 1e-9);
    }
  }
}

TEST_CASE("temporal correlation is boundary inclusive") {
  PairingConfig cfg;
  cfg.t_thresh_s = 3600;
  auto a = make_entity("A", EventType::accident, 10000, 10100, 32.5, -96.8);
  auto b = make_entity("B", EventType::accident, 10600, 10700, 32.5, -96.8);
  CHECK(temporally_correlated(a, b, cfg));  // 10 minutes apart

  b.time.start = a.time.start + 3600;
  CHECK(temporally_correlated(a, b, cfg));  // exactly t_thresh

  b.time.start = a.time.start + 3601;
  CHECK_FALSE(temporally_correlated(a, b, cfg));
}

TEST_CASE("spatial correlation rules") {
  PairingConfig cfg;
  cfg.d_thresh_km = 10.0;
  SUBCASE("traffic pairs use haversine distance") {
    auto a = make_entity("A", EventType::accident, 0, 1, 32.5, -96.8);
    auto b = make_entity("B", EventType::congestion, 0, 1, 32.5 + 3.0 / 111.195,
                         -96.8);
    CHECK(spatially_correlated(a, b, cfg));  // about 3 km apart
    auto far = make_entity("C", EventType::congestion, 0, 1, 33.5, -96.8);
    CHECK_FALSE(spatially_correlated(a, far, cfg));
  }
  SUBCASE("weather pairs collocate by airport station") {
    auto w = make_entity("W", EventType::rain, 0, 1, 33.6, -84.4, "KATL");
    auto t = make_entity("T", EventType::accident, 0, 1, 30.0, -97.0, "KATL");
    CHECK(spatially_correlated(w, t, cfg));
    t.loc.airport_code = "KAUS";
    CHECK_FALSE(spatially_correlated(w, t, cfg));
  }
  SUBCASE("weather entity without a station code is a contract violation") {
    auto w = make_entity("W", EventType::rain, 0, 1, 33.6, -84.4);
    auto t = make_entity("T", EventType::accident, 0, 1, 30.0, -97.0, "KATL");
    CHECK_THROWS_AS(spatially_correlated(w, t, cfg), std::invalid_argument);
  }
}

TEST_CASE("find_correlated_pairs") {
  PairingConfig cfg;
  SUBCASE("empty input") {
    CHECK(find_correlated_pairs({}, cfg).empty());
  }
  SUBCASE("three mutually correlated events form a triangle") {
    std::vector<GeospatialEntity> entities{
        make_entity("A", EventType::accident, 0, 100, 32.50, -96.80),
        make_entity("B", EventType::congestion, 600, 700, 32.51, -96.80),
        make_entity("C", EventType::broken_vehicle, 1200, 1300, 32.52, -96.80),
    };
    CHECK(find_correlated_pairs(entities, cfg).size() == 3);
  }
  SUBCASE("matches the all-pairs double loop on random input") {
    std::mt19937_64 rng(17);
    auto entities = testutil::random_entities(200, rng);
    CHECK(find_correlated_pairs(entities, cfg) ==
          testutil::oracle_pairs(entities, cfg));
  }
  SUBCASE("output is permutation invariant") {
    std::mt19937_64 rng(19);
    auto entities = testutil::random_entities(80, rng);
    auto expected = find_correlated_pairs(entities, cfg);
    std::shuffle(entities.begin(), entities.end(), rng);
    CHECK(find_correlated_pairs(entities, cfg) == expected);
  }
  SUBCASE("thresholds must be positive") {
    PairingConfig bad;
    bad.t_thresh_s = 0;
    CHECK_THROWS_AS(find_correlated_pairs({}, bad), std::invalid_argument);
  }
}

TEST_CASE("causal direction assignment") {
  SUBCASE("same kind: earlier start is the cause") {
    auto congestion = make_entity("C", EventType::congestion, 1000, 1100, 32.5, -96.8);
    auto accident = make_entity("A", EventType::accident, 1300, 1400, 32.5, -96.8);
    auto link = assign_causality(congestion, accident);
    REQUIRE(link.has_value());
    CHECK(link->cause_id == "C");
    CHECK(link->effect_id == "A");
    CHECK(link->rule == CausalRule::same_kind_earlier_first);
  }
  SUBCASE("weather before traffic causes it") {
    auto rain = make_entity("R", EventType::rain, 1000, 1100, 32.5, -96.8, "KDAL");
    auto accident = make_entity("A", EventType::accident, 1300, 1400, 32.5, -96.8);
    auto link = assign_causality(rain, accident);
    REQUIRE(link.has_value());
    CHECK(link->cause_id == "R");
    CHECK(link->rule == CausalRule::weather_causes_traffic);
  }
  SUBCASE("traffic never causes weather") {
    auto accident = make_entity("A", EventType::accident, 1000, 1100, 32.5, -96.8);
    auto rain = make_entity("R", EventType::rain, 1300, 1400, 32.5, -96.8, "KDAL");
    CHECK_FALSE(assign_causality(accident, rain).has_value());
  }
  SUBCASE("same-kind ties break toward the smaller id") {
    auto a = make_entity("A", EventType::accident, 1000, 1100, 32.5, -96.8);
    auto b = make_entity("B", EventType::congestion, 1000, 1200, 32.5, -96.8);
    auto link = assign_causality(b, a);
    REQUIRE(link.has_value());
    CHECK(link->cause_id == "A");
  }
  SUBCASE("an entity is never its own cause") {
    auto a = make_entity("A", EventType::accident, 1000, 1100, 32.5, -96.8);
    CHECK_FALSE(assign_causality(a, a).has_value());
  }
}

TEST_CASE("derived links satisfy the causal invariants") {
  std::mt19937_64 rng(29);
  auto entities = testutil::random_entities(150, rng);
  PairingConfig cfg;
  std::map<std::string, const GeospatialEntity*> by_id;
  for (const auto& e : entities) by_id[e.id] = &e;

  for (const auto& link : derive_links(entities, cfg)) {
    const auto* cause = by_id.at(link.cause_id);
    const auto* effect = by_id.at(link.effect_id);
    CHECK(cause->time.start <= effect->time.start);
    const bool traffic_causes_weather = cause->kind == EventKind::traffic &&
                                        effect->kind == EventKind::weather;
    CHECK_FALSE(traffic_causes_weather);
  }
}

TEST_CASE("missing traffic airport codes fall back to the nearest station") {
  std::vector<GeospatialEntity> entities{
      make_entity("W1", EventType::rain, 0, 1, 33.0, -97.0, "KDAL"),
      make_entity("W2", EventType::rain, 0, 1, 30.0, -97.7, "KAUS"),
      make_entity("T1", EventType::accident, 0, 1, 32.9, -97.1),
      make_entity("T2", EventType::accident, 0, 1, 30.1, -97.6),
  };
  CHECK(fill_missing_airport_codes(entities) == 2);
  CHECK(entities[2].loc.airport_code == "KDAL");
  CHECK(entities[3].loc.airport_code == "KAUS");
}

TEST_CASE("links round-trip through CSV") {
  std::vector<CausalLink> links{
      {"W1", "T1", CausalRule::weather_causes_traffic},
      {"T1", "T2", CausalRule::same_kind_earlier_first},
  };
  std::ostringstream out;
  write_links(out, links);
  std::istringstream in(out.str());
  CHECK(read_links(in) == links);
}
