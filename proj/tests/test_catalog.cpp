#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "wii/catalog.hpp"

using namespace wii;

TEST_CASE("catalog has exactly 15 classes split 10/3/2 by technology") {
  const auto& catalog = class_catalog();
  REQUIRE(catalog.size() == 15);
  int bt = 0, wlan = 0, zb = 0;
  for (const auto& spec : catalog) {
    switch (spec.technology) {
      case Technology::kBt15_1: ++bt; break;
      case Technology::kWlan11bg: ++wlan; break;
      case Technology::kZb15_4: ++zb; break;
    }
  }
  CHECK(bt == 10);
  CHECK(wlan == 3);
  CHECK(zb == 2);
}

TEST_CASE("catalog enumerates 19 distinct modulation variants") {
  CHECK(distinct_variant_count() == 19);
}

TEST_CASE("class ids are contiguous and bijective with (technology, offset)") {
  const auto& catalog = class_catalog();
  std::set<std::pair<int, double>> keys;
  for (int c = 0; c < 15; ++c) {
    CHECK(catalog[static_cast<std::size_t>(c)].class_id == c);
    CHECK(technology_of(c) == catalog[static_cast<std::size_t>(c)].technology);
    keys.insert({static_cast<int>(catalog[static_cast<std::size_t>(c)].technology),
                 catalog[static_cast<std::size_t>(c)].center_offset_hz});
  }
  CHECK(keys.size() == 15);
}

TEST_CASE("channel rasters match the sub-band plan") {
  const auto& catalog = class_catalog();
  for (int c = 0; c <= 9; ++c) {
    const auto& s = catalog[static_cast<std::size_t>(c)];
    CHECK(s.center_offset_hz == doctest::Approx((-4.5 + c) * 1e6));
    CHECK(s.occupied_bandwidth_hz == doctest::Approx(1e6));
    CHECK(std::abs(s.center_offset_hz) <= 5e6);
  }
  CHECK(catalog[10].center_offset_hz == doctest::Approx(-5e6));
  CHECK(catalog[11].center_offset_hz == doctest::Approx(0.0));
  CHECK(catalog[12].center_offset_hz == doctest::Approx(5e6));
  for (int c = 10; c <= 12; ++c) {
    // Wide-band classes exceed the sub-band: partial in-band coverage.
    CHECK(catalog[static_cast<std::size_t>(c)].occupied_bandwidth_hz == doctest::Approx(22e6));
  }
  CHECK(catalog[13].center_offset_hz == doctest::Approx(-2.5e6));
  CHECK(catalog[14].center_offset_hz == doctest::Approx(2.5e6));
  for (const auto& s : catalog) CHECK(s.occupied_bandwidth_hz > 0.0);
}

TEST_CASE("catalog is deterministic") {
  const auto& a = class_catalog();
  const auto& b = class_catalog();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].class_id == b[i].class_id);
    CHECK(a[i].center_offset_hz == b[i].center_offset_hz);
    REQUIRE(a[i].variants.size() == b[i].variants.size());
    for (std::size_t v = 0; v < a[i].variants.size(); ++v)
      CHECK(a[i].variants[v].name == b[i].variants[v].name);
  }
}

TEST_CASE("variant lookup validates the pairing") {
  CHECK(find_variant(0, "gfsk-h032").scheme == Scheme::kGfsk);
  CHECK(find_variant(11, "cck-11").scheme == Scheme::kCck11);
  CHECK(find_variant(13, "oqpsk-250").scheme == Scheme::kOqpskDsss);
  CHECK_THROWS_AS((void)find_variant(0, "cck-11"), std::invalid_argument);
  CHECK_THROWS_AS((void)find_variant(20, "gfsk-h032"), std::invalid_argument);
}

TEST_CASE("per-technology schemes are consistent") {
  for (const auto& spec : class_catalog()) {
    for (const auto& v : spec.variants) {
      switch (spec.technology) {
        case Technology::kBt15_1:
          CHECK(v.scheme == Scheme::kGfsk);
          CHECK(v.symbol_rate_hz == doctest::Approx(1e6));
          CHECK(v.mod_index >= 0.28);
          CHECK(v.mod_index <= 0.35);
          break;
        case Technology::kWlan11bg:
          CHECK(v.chip_rate_hz == doctest::Approx(11e6));
          break;
        case Technology::kZb15_4:
          CHECK(v.scheme == Scheme::kOqpskDsss);
          CHECK(v.chip_rate_hz == doctest::Approx(2e6));
          break;
      }
    }
  }
}
