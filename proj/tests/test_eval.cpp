#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wii/eval.hpp"
#include "wii/rng.hpp"

using namespace wii;

namespace {

using Scores = Eigen::Matrix<double, kNumClasses, 1>;

Scores flat_scores(double v) { return Scores::Constant(v); }

DatasetRecord truth_record(std::vector<int> labels, int utilized = kNoUtilized,
                           int n = -1) {
  DatasetRecord r;
  for (int c : labels) r.labels.insert(c);
  r.utilized = utilized;
  r.num_interferers = n >= 0 ? n : (utilized == kNoUtilized
                                        ? 0
                                        : r.labels.count() - 1);
  return r;
}

Decision decide(std::vector<int> predicted) {
  Scores s = Scores::Constant(0.1);
  for (int c : predicted) s[c] = 0.9;
  return make_decision(s, 0.5);
}

}  // namespace

TEST_CASE("apply_threshold uses strict greater-than") {
  CHECK(apply_threshold(flat_scores(0.5), 0.5).empty());
  Scores s = flat_scores(0.1);
  s[0] = 0.9;
  const LabelSet one = apply_threshold(s, 0.5);
  CHECK(one.count() == 1);
  CHECK(one.contains(0));
  Scores low = flat_scores(0.2);
  low[3] = 0.99;
  CHECK(apply_threshold(low, 0.99).empty());
}

TEST_CASE("tpr formula: 9 of 10 detections give 0.9") {
  std::vector<DatasetRecord> truths;
  std::vector<Decision> decisions;
  for (int i = 0; i < 10; ++i) {
    truths.push_back(truth_record({5, 7}, 7, 1));  // class 5 interferes
    decisions.push_back(decide(i < 9 ? std::vector<int>{5} : std::vector<int>{}));
  }
  const TprReport report = tpr_per_class(decisions, truths);
  const TprGroup& g5 = report.groups[5];
  CHECK(g5.tp == 9);
  CHECK(g5.fn == 1);
  CHECK(g5.tpr == doctest::Approx(0.9));
}

TEST_CASE("perfect predictor reaches TPR 1 on every non-empty class") {
  Rng rng(1);
  std::vector<DatasetRecord> truths;
  std::vector<Decision> decisions;
  for (int i = 0; i < 200; ++i) {
    const int u = static_cast<int>(rng.uniform_int(15));
    int other = static_cast<int>(rng.uniform_int(15));
    if (other == u) other = (other + 1) % 15;
    truths.push_back(truth_record({u, other}, u, 1));
    decisions.push_back(decide({u, other}));
  }
  const TprReport report = tpr_per_class(decisions, truths);
  for (const auto& g : report.groups)
    if (!g.empty) CHECK(g.tpr == doctest::Approx(1.0));
}

TEST_CASE("a class never present as interferer is marked empty") {
  std::vector<DatasetRecord> truths = {truth_record({1, 2}, 1, 1)};
  std::vector<Decision> decisions = {decide({1, 2})};
  const TprReport report = tpr_per_class(decisions, truths);
  CHECK(report.groups[14].empty);
  CHECK_FALSE(report.groups[2].empty);
  // Class 1 is the utilized signal everywhere it appears: masked out.
  CHECK(report.groups[1].empty);
}

TEST_CASE("masking excludes utilized records from that class's tally") {
  // Class 4 is utilized in one record (prediction misses it there) and an
  // interferer in another (predicted). Masked TPR must be 1.
  std::vector<DatasetRecord> truths = {truth_record({4, 9}, 4, 1),
                                       truth_record({4, 9}, 9, 1)};
  std::vector<Decision> decisions = {decide({9}), decide({4, 9})};
  const TprReport masked = tpr_per_class(decisions, truths, true);
  CHECK(masked.groups[4].tp == 1);
  CHECK(masked.groups[4].fn == 0);
  CHECK(masked.groups[4].tpr == doctest::Approx(1.0));
  const TprReport unmasked = tpr_per_class(decisions, truths, false);
  CHECK(unmasked.groups[4].tp == 1);
  CHECK(unmasked.groups[4].fn == 1);
  CHECK(unmasked.groups[4].tpr == doctest::Approx(0.5));
}

TEST_CASE("tp + fn equals the masked support count") {
  Rng rng(2);
  std::vector<DatasetRecord> truths;
  std::vector<Decision> decisions;
  for (int i = 0; i < 300; ++i) {
    const int u = static_cast<int>(rng.uniform_int(15));
    int a = static_cast<int>(rng.uniform_int(15));
    if (a == u) a = (a + 3) % 15;
    truths.push_back(truth_record({u, a}, u, 1));
    decisions.push_back(decide(rng.bit() ? std::vector<int>{a} : std::vector<int>{}));
  }
  const TprReport report = tpr_per_class(decisions, truths);
  for (int c = 0; c < kNumClasses; ++c) {
    long support = 0;
    for (const auto& r : truths)
      if (r.labels.contains(c) && r.utilized != c) ++support;
    CHECK(report.groups[static_cast<std::size_t>(c)].tp +
              report.groups[static_cast<std::size_t>(c)].fn ==
          support);
  }
}

TEST_CASE("interferer-count grouping: degenerate and two-group aggregates") {
  // Single utilized-class group: mean and percentiles collapse to its TPR.
  std::vector<DatasetRecord> truths;
  std::vector<Decision> decisions;
  for (int i = 0; i < 4; ++i) {
    truths.push_back(truth_record({0, 1}, 0, 1));
    decisions.push_back(decide(i < 3 ? std::vector<int>{1} : std::vector<int>{}));
  }
  TprReport report = tpr_by_interferer_count(decisions, truths);
  REQUIRE(report.aggregates.size() == 1);
  CHECK(report.aggregates[0].mean_tpr == doctest::Approx(0.75));
  CHECK(report.aggregates[0].p10 == doctest::Approx(0.75));
  CHECK(report.aggregates[0].p90 == doctest::Approx(0.75));

  // Two utilized-class groups with TPRs 0.5 and 1.0: mean 0.75.
  truths.clear();
  decisions.clear();
  for (int i = 0; i < 2; ++i) {
    truths.push_back(truth_record({3, 1}, 3, 1));
    decisions.push_back(decide(i == 0 ? std::vector<int>{1} : std::vector<int>{}));
  }
  truths.push_back(truth_record({5, 2}, 5, 1));
  decisions.push_back(decide({2}));
  report = tpr_by_interferer_count(decisions, truths);
  REQUIRE(report.aggregates.size() == 1);
  CHECK(report.aggregates[0].technology == static_cast<int>(Technology::kBt15_1));
  CHECK(report.aggregates[0].num_interferers == 1);
  CHECK(report.aggregates[0].group_count == 2);
  CHECK(report.aggregates[0].mean_tpr == doctest::Approx(0.75));
}

TEST_CASE("interferer-count grouping separates technologies and N") {
  std::vector<DatasetRecord> truths = {
      truth_record({0, 10}, 0, 1),        // WLAN interferer, N=1
      truth_record({0, 1, 2}, 0, 2),      // BT interferers, N=2
      truth_record({13, 14}, 13, 1),      // ZB interferer, N=1
  };
  std::vector<Decision> decisions = {decide({10}), decide({1}), decide({14})};
  const TprReport report = tpr_by_interferer_count(decisions, truths);
  bool saw_wlan = false, saw_bt2 = false, saw_zb = false;
  for (const auto& agg : report.aggregates) {
    if (agg.technology == static_cast<int>(Technology::kWlan11bg) &&
        agg.num_interferers == 1) {
      saw_wlan = true;
      CHECK(agg.mean_tpr == doctest::Approx(1.0));
    }
    if (agg.technology == static_cast<int>(Technology::kBt15_1) &&
        agg.num_interferers == 2) {
      saw_bt2 = true;
      CHECK(agg.mean_tpr == doctest::Approx(0.5));
    }
    if (agg.technology == static_cast<int>(Technology::kZb15_4) &&
        agg.num_interferers == 1) {
      saw_zb = true;
    }
  }
  CHECK(saw_wlan);
  CHECK(saw_bt2);
  CHECK(saw_zb);
  CHECK_THROWS_AS(
      (void)tpr_by_interferer_count({decide({0})}, {truth_record({0})}),
      std::invalid_argument);
}

TEST_CASE("report values are invariant under record permutation") {
  Rng rng(3);
  std::vector<DatasetRecord> truths;
  std::vector<Decision> decisions;
  for (int i = 0; i < 100; ++i) {
    const int u = static_cast<int>(rng.uniform_int(15));
    int a = static_cast<int>(rng.uniform_int(15));
    if (a == u) a = (a + 1) % 15;
    truths.push_back(truth_record({u, a}, u, 1));
    decisions.push_back(decide(rng.bit() ? std::vector<int>{a} : std::vector<int>{}));
  }
  const TprReport base = tpr_by_interferer_count(decisions, truths);

  std::vector<std::size_t> idx(truths.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t k = idx.size(); k > 1; --k)
    std::swap(idx[k - 1], idx[rng.uniform_int(k)]);
  std::vector<DatasetRecord> truths2;
  std::vector<Decision> decisions2;
  for (std::size_t i : idx) {
    truths2.push_back(truths[i]);
    decisions2.push_back(decisions[i]);
  }
  const TprReport shuffled = tpr_by_interferer_count(decisions2, truths2);
  REQUIRE(base.groups.size() == shuffled.groups.size());
  for (std::size_t i = 0; i < base.groups.size(); ++i) {
    CHECK(base.groups[i].tp == shuffled.groups[i].tp);
    CHECK(base.groups[i].fn == shuffled.groups[i].fn);
  }
}

TEST_CASE("raising the threshold never raises any per-class TPR") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DatasetRecord> truths;
    std::vector<Eigen::Matrix<double, kNumClasses, 1>> scores;
    for (int i = 0; i < 20; ++i) {
      const int u = static_cast<int>(rng.uniform_int(15));
      int a = static_cast<int>(rng.uniform_int(15));
      if (a == u) a = (a + 1) % 15;
      truths.push_back(truth_record({u, a}, u, 1));
      Eigen::Matrix<double, kNumClasses, 1> s;
      for (int c = 0; c < 15; ++c) s[c] = rng.uniform();
      scores.push_back(s);
    }
    double prev_thresholds[3] = {0.25, 0.5, 0.75};
    std::vector<double> prev(kNumClasses, 1.1);
    for (double thr : prev_thresholds) {
      std::vector<Decision> decisions;
      for (const auto& s : scores) decisions.push_back(make_decision(s, thr));
      const TprReport report = tpr_per_class(decisions, truths);
      for (int c = 0; c < kNumClasses; ++c) {
        const auto& g = report.groups[static_cast<std::size_t>(c)];
        if (g.empty) continue;
        CHECK(g.tpr <= prev[static_cast<std::size_t>(c)] + 1e-12);
        prev[static_cast<std::size_t>(c)] = g.tpr;
      }
    }
  }
}

TEST_CASE("false positives are tallied alongside TPR") {
  // Always-positive predictor: TPR 1 everywhere, fp = records not
  // containing the class.
  std::vector<DatasetRecord> truths = {truth_record({0, 1}, 0, 1),
                                       truth_record({2, 3}, 2, 1)};
  std::vector<Decision> all = {
      make_decision(flat_scores(0.9), 0.5), make_decision(flat_scores(0.9), 0.5)};
  const TprReport report = tpr_per_class(all, truths);
  CHECK(report.groups[1].tpr == doctest::Approx(1.0));
  CHECK(report.groups[1].fp == 1);   // predicted in the {2,3} record
  CHECK(report.groups[14].fp == 2);  // never present, predicted twice
  CHECK(report.groups[14].empty);
}

TEST_CASE("quantile is the linear-interpolation estimator") {
  CHECK(quantile({1.0}, 0.1) == doctest::Approx(1.0));
  CHECK(quantile({1.0, 2.0}, 0.5) == doctest::Approx(1.5));
  CHECK(quantile({0.0, 1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.0));
  CHECK(quantile({4.0, 0.0, 2.0, 1.0, 3.0}, 0.10) == doctest::Approx(0.4));
  CHECK(quantile({4.0, 0.0, 2.0, 1.0, 3.0}, 0.90) == doctest::Approx(3.6));
  CHECK_THROWS_AS((void)quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("json report round trip and csv shape") {
  std::vector<DatasetRecord> truths = {truth_record({0, 10}, 0, 1),
                                       truth_record({2, 13}, 2, 1)};
  std::vector<Decision> decisions = {decide({10}), decide({})};
  const TprReport report = tpr_by_interferer_count(decisions, truths);

  const std::string json_text = report_to_json(report);
  const TprReport back = report_from_json(json_text);
  REQUIRE(back.groups.size() == report.groups.size());
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    CHECK(back.groups[i].class_id == report.groups[i].class_id);
    CHECK(back.groups[i].technology == report.groups[i].technology);
    CHECK(back.groups[i].num_interferers == report.groups[i].num_interferers);
    CHECK(back.groups[i].utilized == report.groups[i].utilized);
    CHECK(back.groups[i].tp == report.groups[i].tp);
    CHECK(back.groups[i].fn == report.groups[i].fn);
    CHECK(back.groups[i].fp == report.groups[i].fp);
    CHECK(back.groups[i].empty == report.groups[i].empty);
  }
  REQUIRE(back.aggregates.size() == report.aggregates.size());
  for (std::size_t i = 0; i < report.aggregates.size(); ++i) {
    CHECK(back.aggregates[i].mean_tpr ==
          doctest::Approx(report.aggregates[i].mean_tpr));
    CHECK(back.aggregates[i].group_count == report.aggregates[i].group_count);
  }
  CHECK(report_to_json(back) == json_text);

  const std::string csv = report_to_csv(report);
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == static_cast<long>(report.groups.size()) + 1);
}

TEST_CASE("empty report writes a valid file with zero groups") {
  TprReport empty;
  const std::string path = "empty_report.json";
  emit_report(empty, ReportFormat::kJson, path);
  std::ifstream f(path);
  std::string text(std::istreambuf_iterator<char>(f),
                   std::istreambuf_iterator<char>{});
  const TprReport back = report_from_json(text);
  CHECK(back.groups.empty());
  CHECK(back.aggregates.empty());
  std::filesystem::remove(path);
}

TEST_CASE("snr curve: degenerate always-positive predictor and rejections") {
  std::vector<DatasetRecord> truths;
  const std::vector<double> grid = {-20.0, 0.0, 20.0};
  for (double snr : grid)
    for (int c = 0; c < 15; ++c)
      for (int rep = 0; rep < 2; ++rep) {
        DatasetRecord r = truth_record({c});
        r.snr_db = static_cast<float>(snr);
        truths.push_back(r);
      }
  Eigen::MatrixXd ones(truths.size(), kNumClasses);
  ones.setConstant(1.0);
  const SnrCurve curve = snr_tpr_curve(ones, truths, {0.5});
  REQUIRE(curve.snr_db.size() == 3);
  for (Eigen::Index i = 0; i < curve.mean_tpr.rows(); ++i)
    CHECK(curve.mean_tpr(i, 0) == doctest::Approx(1.0));

  // Remove every record of class 3 at one SNR: coverage error.
  std::vector<DatasetRecord> gap;
  for (const auto& r : truths)
    if (!(r.labels.contains(3) && r.snr_db == 0.0f)) gap.push_back(r);
  Eigen::MatrixXd gap_scores(gap.size(), kNumClasses);
  gap_scores.setConstant(1.0);
  CHECK_THROWS_WITH_AS((void)snr_tpr_curve(gap_scores, gap, {0.5}),
                       doctest::Contains("coverage"), std::invalid_argument);

  std::ostringstream os;
  emit_snr_curve_csv(curve, os);
  const std::string text = os.str();
  const auto rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == 4);  // header + 3 SNR points
}
