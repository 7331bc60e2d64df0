#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "wii/dataset.hpp"
#include "wii/labels.hpp"

namespace wii {

// Thresholded multi-label decision for one snapshot.
struct Decision {
  Eigen::Matrix<double, kNumClasses, 1> scores;
  double threshold = 0.5;
  LabelSet predicted;
};

// Strict-greater comparison per class.
LabelSet apply_threshold(const Eigen::Matrix<double, kNumClasses, 1>& scores,
                         double threshold);

Decision make_decision(const Eigen::Matrix<double, kNumClasses, 1>& scores,
                       double threshold);

std::vector<Decision> make_decisions(const Eigen::MatrixXd& scores,
                                     double threshold);

// One tally group; -1 in a key field means "not grouped by this". The
// false-positive count rides along because TPR alone is satisfied by an
// always-positive predictor; acceptance gating still uses TPR only.
struct TprGroup {
  int class_id = -1;
  int technology = -1;  // index into Technology when grouped per technology
  int num_interferers = -1;
  int utilized = -1;
  long tp = 0;
  long fn = 0;
  long fp = 0;
  bool empty = true;   // no records contained the class (tp + fn = 0)
  double tpr = 0.0;    // tp / (tp + fn) when non-empty
};

// Mean and 10th/90th linear-interpolation percentiles over a set of groups
// (one entry per utilized-class group in the interferer-count analyses).
struct TprAggregate {
  int technology = -1;
  int num_interferers = -1;
  double mean_tpr = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  int group_count = 0;
};

struct TprReport {
  std::vector<TprGroup> groups;
  std::vector<TprAggregate> aggregates;
};

// Per-class tally. TP = records where the class is a true interferer label
// and predicted; FN = present but not predicted. With mask_utilized (the
// default) records where the class is the utilized signal do not count
// towards that class.
TprReport tpr_per_class(const std::vector<Decision>& decisions,
                        const std::vector<DatasetRecord>& truths,
                        bool mask_utilized = true);

// Groups per (interferer technology, N, utilized class), aggregated per
// (technology, N) with mean and 10%/90% percentiles across the
// utilized-class groups.
TprReport tpr_by_interferer_count(const std::vector<Decision>& decisions,
                                  const std::vector<DatasetRecord>& truths);

// Pooled interferer tally per utilized class.
TprReport tpr_by_utilized(const std::vector<Decision>& decisions,
                          const std::vector<DatasetRecord>& truths);

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Mean-TPR-vs-SNR curve over a single-label dataset, one column per
// threshold. Every (class, SNR) cell must be populated.
struct SnrCurve {
  std::vector<double> snr_db;
  std::vector<double> thresholds;
  Eigen::MatrixXd mean_tpr;  // [snr index, threshold index]
};

SnrCurve snr_tpr_curve(const Eigen::MatrixXd& scores,
                       const std::vector<DatasetRecord>& truths,
                       const std::vector<double>& thresholds);

enum class ReportFormat { kJson, kCsv };

// Lossless serialization with stable key order; CSV carries one row per
// group plus a header (aggregates are JSON-only).
void emit_report(const TprReport& report, ReportFormat format,
                 const std::string& path);
std::string report_to_json(const TprReport& report);
TprReport report_from_json(const std::string& text);
std::string report_to_csv(const TprReport& report);
void emit_snr_curve_csv(const SnrCurve& curve, std::ostream& out);

}  // namespace wii
