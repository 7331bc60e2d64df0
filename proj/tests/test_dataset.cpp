#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "wii/dataset.hpp"
#include "wii/io.hpp"
#include "wii/synth.hpp"

using namespace wii;

namespace {

GenConfig desk_config() {
  GenConfig c;
  c.snapshots_per_class_snr = 10;
  c.snr_grid = {0.0, 20.0};
  c.multi_total = 120;
  c.interferer_counts = {1, 2, 3, 4, 5, 6};
  c.sir_mode = SirMode::kPowerPreserving;
  c.master_seed = 99;
  c.train_fraction = 0.8;
  return c;
}

bool records_equal(const DatasetRecord& a, const DatasetRecord& b) {
  if (!(a.labels == b.labels) || a.utilized != b.utilized ||
      a.num_interferers != b.num_interferers || a.seed != b.seed)
    return false;
  const bool snr_same =
      (std::isnan(a.snr_db) && std::isnan(b.snr_db)) || a.snr_db == b.snr_db;
  if (!snr_same) return false;
  for (int k = 0; k < kSnapshotLen; ++k)
    if (a.iq[k] != b.iq[k]) return false;
  return true;
}

DatasetRecord single_record(int class_id, const char* variant,
                            std::uint64_t seed, float snr = 20.0f) {
  DatasetRecord r;
  r.iq = synthesize_burst(class_id, variant, seed).cast<std::complex<float>>();
  r.labels = LabelSet::single(class_id);
  r.snr_db = snr;
  r.seed = seed;
  return r;
}

}  // namespace

TEST_CASE("awgn sentinel, determinism and per-snapshot noise power") {
  const Iq128 x = synthesize_burst(2, "gfsk-h032", 5);

  const Iq128 clean = add_awgn(x, std::numeric_limits<double>::infinity(), 9);
  for (int k = 0; k < kSnapshotLen; ++k) CHECK(clean[k] == x[k]);

  const Iq128 a = add_awgn(x, 3.0, 1234);
  const Iq128 b = add_awgn(x, 3.0, 1234);
  for (int k = 0; k < kSnapshotLen; ++k) CHECK(a[k] == b[k]);

  // At 0 dB on a unit-power signal the added noise has power ~1.
  const Iq128 noisy = add_awgn(x, 0.0, 77);
  const double noise_power = measure_power<double>((noisy - x).eval());
  CHECK(noise_power == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("awgn calibration within 2% over aggregated samples") {
  const Iq128 x = synthesize_burst(7, "gfsk-h035", 3);
  const double snr_db = 3.0;
  const double expected = std::pow(10.0, -snr_db / 10.0);
  double acc = 0.0;
  const int trials = 200;  // 200 * 128 = 25,600 noise samples
  for (int t = 0; t < trials; ++t) {
    const Iq128 noisy = add_awgn(x, snr_db, 5000 + static_cast<std::uint64_t>(t));
    acc += measure_power<double>((noisy - x).eval());
  }
  CHECK(acc / trials == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("single-label generation: counts, labels and metadata") {
  GenConfig c = desk_config();
  const Dataset ds = generate_single_label(c);
  REQUIRE(ds.size() == 15 * 2 * 10);

  std::map<std::pair<int, float>, int> cell_counts;
  for (const auto& r : ds.records) {
    CHECK(r.labels.count() == 1);
    CHECK(r.utilized == kNoUtilized);
    CHECK(r.num_interferers == 0);
    cell_counts[{r.labels.ids()[0], r.snr_db}]++;
  }
  CHECK(cell_counts.size() == 30);
  for (const auto& [key, n] : cell_counts) CHECK(n == 10);
}

TEST_CASE("single-label generation is deterministic and thread-invariant") {
  GenConfig c = desk_config();
  const Dataset a = generate_single_label(c, 1);
  const Dataset b = generate_single_label(c, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(records_equal(a.records[i], b.records[i]));
}

TEST_CASE("paper-config count formula") {
  GenConfig c = desk_config();
  c.snapshots_per_class_snr = 715;
  c.snr_grid.clear();
  for (int s = -20; s <= 20; s += 2) c.snr_grid.push_back(s);
  // 15 * 21 * 715 without generating: validate the arithmetic the generator
  // uses.
  CHECK(15ll * static_cast<long long>(c.snr_grid.size()) *
            c.snapshots_per_class_snr ==
        225225);
}

TEST_CASE("combine: N=1 is a plain sum in either mode") {
  const DatasetRecord us = single_record(3, "gfsk-h028", 1);
  const DatasetRecord is1 = single_record(10, "dsss-1", 2);
  for (SirMode mode : {SirMode::kPowerPreserving, SirMode::kLiteralOneOverN}) {
    const DatasetRecord rec = combine_multi_label(us, {is1}, mode);
    for (int k = 0; k < kSnapshotLen; ++k) {
      const std::complex<double> want =
          std::complex<double>(us.iq[k]) + std::complex<double>(is1.iq[k]);
      CHECK(std::abs(std::complex<double>(rec.iq[k]) - want) < 1e-6);
    }
    CHECK(rec.utilized == 3);
    CHECK(rec.num_interferers == 1);
  }
}

TEST_CASE("combine: label union and metadata") {
  const DatasetRecord us = single_record(3, "gfsk-h028", 1);
  const DatasetRecord i1 = single_record(10, "dsss-2", 2);
  const DatasetRecord i2 = single_record(14, "oqpsk-250", 3);
  const DatasetRecord rec =
      combine_multi_label(us, {i1, i2}, SirMode::kPowerPreserving);
  CHECK(rec.labels == LabelSet::from_bits((1u << 3) | (1u << 10) | (1u << 14)));
  CHECK(rec.labels.count() == 3);
  CHECK(rec.utilized == 3);
  CHECK(rec.num_interferers == 2);
  CHECK(std::isnan(rec.snr_db));
}

TEST_CASE("combine: power-preserving mode keeps SIR near 0 dB at N=4") {
  const DatasetRecord us = single_record(5, "gfsk-h032", 10);
  std::vector<DatasetRecord> interferers = {
      single_record(0, "gfsk-h028", 11), single_record(2, "gfsk-h030", 12),
      single_record(8, "gfsk-h035", 13), single_record(13, "oqpsk-250", 14)};
  const double us_power = measure_power(us.iq);
  const double is_power =
      weighted_interference_power(interferers, SirMode::kPowerPreserving);
  const double sir_db = 10.0 * std::log10(us_power / is_power);
  CHECK(std::abs(sir_db) < 1.0);
}

TEST_CASE("combine rejections") {
  const DatasetRecord us = single_record(3, "gfsk-h028", 1);
  const DatasetRecord dup = single_record(3, "gfsk-h030", 2);
  const DatasetRecord other = single_record(6, "gfsk-h032", 3);
  CHECK_THROWS_AS(
      (void)combine_multi_label(us, {}, SirMode::kPowerPreserving),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)combine_multi_label(us, {dup}, SirMode::kPowerPreserving),
      std::invalid_argument);
  std::vector<DatasetRecord> seven(7, other);
  CHECK_THROWS_AS(
      (void)combine_multi_label(us, seven, SirMode::kPowerPreserving),
      std::invalid_argument);

  DatasetRecord multi = combine_multi_label(us, {other}, SirMode::kPowerPreserving);
  CHECK_THROWS_AS(
      (void)combine_multi_label(multi, {other}, SirMode::kPowerPreserving),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)combine_multi_label(us, {multi}, SirMode::kPowerPreserving),
      std::invalid_argument);
}

TEST_CASE("multi-label generation: counts, label arity, determinism") {
  GenConfig c = desk_config();
  const Dataset single = generate_single_label(c);
  const Dataset multi = generate_multi_label(single, c);
  REQUIRE(multi.size() == 120);

  std::map<int, int> per_n;
  for (const auto& r : multi.records) {
    CHECK(r.labels.count() >= 2);
    CHECK(r.labels.count() <= 7);
    CHECK(r.labels.count() == r.num_interferers + 1);
    CHECK(r.labels.contains(r.utilized));
    per_n[r.num_interferers]++;
  }
  for (int n = 1; n <= 6; ++n) CHECK(per_n[n] == 20);

  const Dataset multi2 = generate_multi_label(single, c, 2);
  for (std::size_t i = 0; i < multi.size(); ++i)
    CHECK(records_equal(multi.records[i], multi2.records[i]));
}

TEST_CASE("multi-label generation requires the 20 dB pool") {
  GenConfig c = desk_config();
  c.snr_grid = {0.0};  // no 20 dB records
  const Dataset single = generate_single_label(c);
  GenConfig cm = desk_config();
  CHECK_THROWS_AS((void)generate_multi_label(single, cm), std::invalid_argument);
}

TEST_CASE("sti/cti evaluation sets are balanced and correctly scoped") {
  GenConfig c = desk_config();
  const Dataset single = generate_single_label(c);

  const Dataset sti = generate_sti_eval(single, 2, 5);
  // Cells: BT 10 utilized x N in 1..6, WLAN 3 x N in 1..2, ZB 2 x N = 1.
  CHECK(sti.size() == static_cast<std::size_t>((10 * 6 + 3 * 2 + 2 * 1) * 2));
  for (const auto& r : sti.records) {
    const Technology t = technology_of(r.utilized);
    for (int c2 : r.labels.ids()) CHECK(technology_of(c2) == t);
  }

  const Dataset cti = generate_cti_eval(single, 2, 5);
  // BT utilized: 5 foreign classes -> N 1..5; WLAN: N 1..6; ZB: N 1..6.
  CHECK(cti.size() == static_cast<std::size_t>((10 * 5 + 3 * 6 + 2 * 6) * 2));
  for (const auto& r : cti.records) {
    const Technology t = technology_of(r.utilized);
    for (int c2 : r.labels.ids())
      if (c2 != r.utilized) CHECK(technology_of(c2) != t);
  }
}

TEST_CASE("split: sizes, disjointness, stratification, exact partition") {
  GenConfig c = desk_config();
  c.multi_total = 600;
  const Dataset single = generate_single_label(c);
  const Dataset multi = generate_multi_label(single, c);
  auto [train, val] = split_train_val(multi, 0.8, 7);
  CHECK(train.size() == 480);
  CHECK(val.size() == 120);

  std::map<int, int> train_n, val_n;
  for (const auto& r : train.records) train_n[r.num_interferers]++;
  for (const auto& r : val.records) val_n[r.num_interferers]++;
  for (int n = 1; n <= 6; ++n) {
    CHECK(train_n[n] == 80);
    CHECK(val_n[n] == 20);
  }

  // Union equals the input multiset (seeds are unique per record).
  std::set<std::uint64_t> seen;
  for (const auto& r : multi.records) seen.insert(r.seed);
  std::set<std::uint64_t> out;
  for (const auto& r : train.records) out.insert(r.seed);
  for (const auto& r : val.records) out.insert(r.seed);
  CHECK(seen == out);
  CHECK(train.size() + val.size() == multi.size());
}

TEST_CASE("split: small cases and rejections") {
  Dataset ten;
  for (int i = 0; i < 10; ++i)
    ten.records.push_back(single_record(i % 15, "gfsk-h028", 100 + static_cast<std::uint64_t>(i)));
  for (auto& r : ten.records) r.labels = LabelSet::single(0);
  auto [a, b] = split_train_val(ten, 0.5, 1);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);

  CHECK_THROWS_AS((void)split_train_val(ten, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)split_train_val(ten, 1.0, 1), std::invalid_argument);
  Dataset one;
  one.records.push_back(ten.records[0]);
  CHECK_THROWS_AS((void)split_train_val(one, 0.5, 1), std::invalid_argument);
}

TEST_CASE("dataset files round-trip bit-exactly") {
  GenConfig c = desk_config();
  c.snapshots_per_class_snr = 2;
  const Dataset single = generate_single_label(c);
  GenConfig cm = c;
  cm.multi_total = 24;
  const Dataset multi = generate_multi_label(single, cm);

  const std::string path = "roundtrip_test.wiid";
  save_dataset(multi, path);
  const Dataset back = load_dataset(path);
  REQUIRE(back.size() == multi.size());
  for (std::size_t i = 0; i < multi.size(); ++i)
    CHECK(records_equal(multi.records[i], back.records[i]));
  CHECK(back.manifest_json == multi.manifest_json);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".manifest.json");
}

TEST_CASE("empty dataset round-trips") {
  Dataset empty;
  empty.manifest_json = "{}";
  const std::string path = "empty_test.wiid";
  save_dataset(empty, path);
  const Dataset back = load_dataset(path);
  CHECK(back.size() == 0);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".manifest.json");
}

TEST_CASE("load rejects bad magic, bad version and truncation distinctly") {
  Dataset tiny;
  tiny.records.push_back(single_record(1, "gfsk-h030", 5));
  const std::string path = "corrupt_test.wiid";
  save_dataset(tiny, path);

  // Corrupt magic.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_WITH_AS((void)load_dataset(path),
                       doctest::Contains("bad magic"), io::FormatError);

  // Bad version.
  save_dataset(tiny, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint16_t v = 0xFFFF;
    f.write(reinterpret_cast<const char*>(&v), 2);
  }
  CHECK_THROWS_WITH_AS((void)load_dataset(path),
                       doctest::Contains("version"), io::FormatError);

  // Truncation.
  save_dataset(tiny, path);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full - 17);
  CHECK_THROWS_WITH_AS((void)load_dataset(path),
                       doctest::Contains("truncated"), io::FormatError);

  std::filesystem::remove(path);
  std::filesystem::remove(path + ".manifest.json");
}

TEST_CASE("gen config validation") {
  GenConfig c = desk_config();
  c.validate();

  GenConfig bad = c;
  bad.snr_grid = {0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.multi_total = 121;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.interferer_counts = {0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.train_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // JSON round trip.
  const GenConfig back = GenConfig::from_json(c.to_json());
  CHECK(back.snapshots_per_class_snr == c.snapshots_per_class_snr);
  CHECK(back.snr_grid == c.snr_grid);
  CHECK(back.multi_total == c.multi_total);
  CHECK(back.interferer_counts == c.interferer_counts);
  CHECK(back.sir_mode == c.sir_mode);
  CHECK(back.master_seed == c.master_seed);
  CHECK(back.train_fraction == c.train_fraction);
}
