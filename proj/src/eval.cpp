#include "wii/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace wii {

using nlohmann::json;

LabelSet apply_threshold(const Eigen::Matrix<double, kNumClasses, 1>& scores,
                         double threshold) {
  LabelSet out;
  for (int c = 0; c < kNumClasses; ++c)
    if (scores[c] > threshold) out.insert(c);
  return out;
}

Decision make_decision(const Eigen::Matrix<double, kNumClasses, 1>& scores,
                       double threshold) {
  return {scores, threshold, apply_threshold(scores, threshold)};
}

std::vector<Decision> make_decisions(const Eigen::MatrixXd& scores,
                                     double threshold) {
  if (scores.cols() != kNumClasses)
    throw std::invalid_argument("score matrix must have 15 columns");
  std::vector<Decision> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    out.push_back(make_decision(scores.row(i).transpose(), threshold));
  return out;
}

namespace {

void check_aligned(const std::vector<Decision>& decisions,
                   const std::vector<DatasetRecord>& truths) {
  if (decisions.size() != truths.size())
    throw std::invalid_argument("decision/truth length mismatch: " +
                                std::to_string(decisions.size()) + " vs " +
                                std::to_string(truths.size()));
}

void finalize(TprGroup& g) {
  g.empty = (g.tp + g.fn) == 0;
  g.tpr = g.empty ? 0.0
                  : static_cast<double>(g.tp) / static_cast<double>(g.tp + g.fn);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

TprReport tpr_per_class(const std::vector<Decision>& decisions,
                        const std::vector<DatasetRecord>& truths,
                        bool mask_utilized) {
  check_aligned(decisions, truths);
  TprReport report;
  report.groups.resize(kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    TprGroup& g = report.groups[static_cast<std::size_t>(c)];
    g.class_id = c;
    g.technology = static_cast<int>(technology_of(c));
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const DatasetRecord& r = truths[i];
      if (!r.labels.contains(c)) {
        if (decisions[i].predicted.contains(c)) ++g.fp;
        continue;
      }
      if (mask_utilized && r.utilized == c) continue;
      if (decisions[i].predicted.contains(c)) ++g.tp; else ++g.fn;
    }
    finalize(g);
  }
  std::vector<double> tprs;
  for (const auto& g : report.groups)
    if (!g.empty) tprs.push_back(g.tpr);
  if (!tprs.empty()) {
    TprAggregate agg;
    agg.group_count = static_cast<int>(tprs.size());
    agg.mean_tpr = 0.0;
    for (double t : tprs) agg.mean_tpr += t;
    agg.mean_tpr /= static_cast<double>(tprs.size());
    agg.p10 = quantile(tprs, 0.10);
    agg.p90 = quantile(tprs, 0.90);
    report.aggregates.push_back(agg);
  }
  return report;
}

TprReport tpr_by_interferer_count(const std::vector<Decision>& decisions,
                                  const std::vector<DatasetRecord>& truths) {
  check_aligned(decisions, truths);
  // key: (technology, N, utilized class)
  std::map<std::tuple<int, int, int>, TprGroup> groups;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const DatasetRecord& r = truths[i];
    if (r.utilized == kNoUtilized || r.num_interferers < 1)
      throw std::invalid_argument(
          "interferer-count analysis needs multi-label records with recorded "
          "utilized class");
    for (int c = 0; c < kNumClasses; ++c) {
      if (c == r.utilized) continue;
      const int tech = static_cast<int>(technology_of(c));
      TprGroup& g = groups[{tech, r.num_interferers, r.utilized}];
      g.technology = tech;
      g.num_interferers = r.num_interferers;
      g.utilized = r.utilized;
      if (r.labels.contains(c)) {
        if (decisions[i].predicted.contains(c)) ++g.tp; else ++g.fn;
      } else if (decisions[i].predicted.contains(c)) {
        ++g.fp;
      }
    }
  }

  TprReport report;
  std::map<std::pair<int, int>, std::vector<double>> per_cell;
  for (auto& [key, g] : groups) {
    finalize(g);
    report.groups.push_back(g);
    if (!g.empty)
      per_cell[{g.technology, g.num_interferers}].push_back(g.tpr);
  }
  for (const auto& [key, tprs] : per_cell) {
    TprAggregate agg;
    agg.technology = key.first;
    agg.num_interferers = key.second;
    agg.group_count = static_cast<int>(tprs.size());
    for (double t : tprs) agg.mean_tpr += t;
    agg.mean_tpr /= static_cast<double>(tprs.size());
    agg.p10 = quantile(tprs, 0.10);
    agg.p90 = quantile(tprs, 0.90);
    report.aggregates.push_back(agg);
  }
  return report;
}

TprReport tpr_by_utilized(const std::vector<Decision>& decisions,
                          const std::vector<DatasetRecord>& truths) {
  check_aligned(decisions, truths);
  std::map<int, TprGroup> groups;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const DatasetRecord& r = truths[i];
    if (r.utilized == kNoUtilized)
      throw std::invalid_argument(
          "utilized-class analysis needs records with a recorded utilized class");
    TprGroup& g = groups[r.utilized];
    g.utilized = r.utilized;
    for (int c = 0; c < kNumClasses; ++c) {
      if (c == r.utilized) continue;
      if (r.labels.contains(c)) {
        if (decisions[i].predicted.contains(c)) ++g.tp; else ++g.fn;
      } else if (decisions[i].predicted.contains(c)) {
        ++g.fp;
      }
    }
  }
  TprReport report;
  std::vector<double> tprs;
  for (auto& [u, g] : groups) {
    finalize(g);
    report.groups.push_back(g);
    if (!g.empty) tprs.push_back(g.tpr);
  }
  if (!tprs.empty()) {
    TprAggregate agg;
    agg.group_count = static_cast<int>(tprs.size());
    for (double t : tprs) agg.mean_tpr += t;
    agg.mean_tpr /= static_cast<double>(tprs.size());
    agg.p10 = quantile(tprs, 0.10);
    agg.p90 = quantile(tprs, 0.90);
    report.aggregates.push_back(agg);
  }
  return report;
}

SnrCurve snr_tpr_curve(const Eigen::MatrixXd& scores,
                       const std::vector<DatasetRecord>& truths,
                       const std::vector<double>& thresholds) {
  if (scores.rows() != static_cast<Eigen::Index>(truths.size()))
    throw std::invalid_argument("score/truth length mismatch");
  if (thresholds.empty()) throw std::invalid_argument("no thresholds given");

  std::set<float> snrs;
  for (const auto& r : truths) {
    if (r.labels.count() != 1 || std::isnan(r.snr_db))
      throw std::invalid_argument(
          "SNR curve needs single-label records with recorded SNR");
    snrs.insert(r.snr_db);
  }
  if (snrs.empty()) throw std::invalid_argument("empty dataset");

  SnrCurve curve;
  curve.thresholds = thresholds;
  for (float s : snrs) curve.snr_db.push_back(static_cast<double>(s));
  curve.mean_tpr.resize(static_cast<Eigen::Index>(snrs.size()),
                        static_cast<Eigen::Index>(thresholds.size()));

  Eigen::Index si = 0;
  for (float s : snrs) {
    for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
      double sum = 0.0;
      for (int c = 0; c < kNumClasses; ++c) {
        long tp = 0, fn = 0;
        for (std::size_t i = 0; i < truths.size(); ++i) {
          const DatasetRecord& r = truths[i];
          if (r.snr_db != s || !r.labels.contains(c)) continue;
          if (scores(static_cast<Eigen::Index>(i), c) > thresholds[ti]) ++tp;
          else ++fn;
        }
        if (tp + fn == 0)
          throw std::invalid_argument(
              "missing SNR coverage: class " + std::to_string(c) + " at " +
              std::to_string(s) + " dB");
        sum += static_cast<double>(tp) / static_cast<double>(tp + fn);
      }
      curve.mean_tpr(si, static_cast<Eigen::Index>(ti)) = sum / kNumClasses;
    }
    ++si;
  }
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

json group_to_json(const TprGroup& g) {
  json j;
  j["class"] = g.class_id;
  j["technology"] = g.technology < 0
                        ? json(nullptr)
                        : json(technology_name(static_cast<Technology>(g.technology)));
  j["n"] = g.num_interferers;
  j["utilized"] = g.utilized;
  j["tp"] = g.tp;
  j["fn"] = g.fn;
  j["fp"] = g.fp;
  j["empty"] = g.empty;
  j["tpr"] = g.empty ? json(nullptr) : json(g.tpr);
  return j;
}

int technology_index(const json& j) {
  if (j.is_null()) return -1;
  const std::string name = j.get<std::string>();
  for (int t = 0; t < 3; ++t)
    if (name == technology_name(static_cast<Technology>(t))) return t;
  throw std::invalid_argument("unknown technology in report: " + name);
}

}  // namespace

std::string report_to_json(const TprReport& report) {
  json j;
  j["groups"] = json::array();
  for (const auto& g : report.groups) j["groups"].push_back(group_to_json(g));
  j["aggregates"] = json::array();
  for (const auto& a : report.aggregates) {
    json e;
    e["technology"] = a.technology < 0
                          ? json(nullptr)
                          : json(technology_name(static_cast<Technology>(a.technology)));
    e["n"] = a.num_interferers;
    e["mean_tpr"] = a.mean_tpr;
    e["p10"] = a.p10;
    e["p90"] = a.p90;
    e["group_count"] = a.group_count;
    j["aggregates"].push_back(e);
  }
  return j.dump(2);
}

TprReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  TprReport report;
  for (const auto& e : j.at("groups")) {
    TprGroup g;
    g.class_id = e.at("class").get<int>();
    g.technology = technology_index(e.at("technology"));
    g.num_interferers = e.at("n").get<int>();
    g.utilized = e.at("utilized").get<int>();
    g.tp = e.at("tp").get<long>();
    g.fn = e.at("fn").get<long>();
    g.fp = e.value("fp", 0L);
    g.empty = e.at("empty").get<bool>();
    g.tpr = g.empty ? 0.0 : e.at("tpr").get<double>();
    report.groups.push_back(g);
  }
  for (const auto& e : j.at("aggregates")) {
    TprAggregate a;
    a.technology = technology_index(e.at("technology"));
    a.num_interferers = e.at("n").get<int>();
    a.mean_tpr = e.at("mean_tpr").get<double>();
    a.p10 = e.at("p10").get<double>();
    a.p90 = e.at("p90").get<double>();
    a.group_count = e.at("group_count").get<int>();
    report.aggregates.push_back(a);
  }
  return report;
}

std::string report_to_csv(const TprReport& report) {
  std::ostringstream os;
  os << "class,technology,n,utilized,tp,fn,fp,empty,tpr\n";
  for (const auto& g : report.groups) {
    os << g.class_id << ','
       << (g.technology < 0 ? ""
                            : technology_name(static_cast<Technology>(g.technology)))
       << ',' << g.num_interferers << ',' << g.utilized << ',' << g.tp << ','
       << g.fn << ',' << g.fp << ',' << (g.empty ? 1 : 0) << ',';
    if (!g.empty) os << g.tpr;
    os << '\n';
  }
  return os.str();
}

void emit_report(const TprReport& report, ReportFormat format,
                 const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << (format == ReportFormat::kJson ? report_to_json(report)
                                      : report_to_csv(report));
  if (format == ReportFormat::kJson) f << "\n";
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

void emit_snr_curve_csv(const SnrCurve& curve, std::ostream& out) {
  out << "snr_db";
  for (double t : curve.thresholds) out << ",tpr@" << t;
  out << "\n";
  for (std::size_t i = 0; i < curve.snr_db.size(); ++i) {
    out << curve.snr_db[i];
    for (Eigen::Index t = 0; t < curve.mean_tpr.cols(); ++t)
      out << ',' << curve.mean_tpr(static_cast<Eigen::Index>(i), t);
    out << "\n";
  }
}

}  // namespace wii
