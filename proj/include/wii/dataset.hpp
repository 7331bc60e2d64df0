#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wii/labels.hpp"
#include "wii/snapshot.hpp"

namespace wii {

// How the aggregate interference is scaled relative to the utilized signal
// when N sources are superimposed. Power-preserving (amplitude 1/sqrt(N))
// keeps the aggregate interference power equal to the utilized power, i.e.
// SIR = 1 for every N; the literal 1/N amplitude variant is retained for
// fidelity experiments.
enum class SirMode { kPowerPreserving, kLiteralOneOverN };

const char* sir_mode_name(SirMode m);
SirMode sir_mode_from_name(const std::string& name);

inline constexpr int kNoUtilized = -1;
inline constexpr float kNoSnr = std::numeric_limits<float>::quiet_NaN();

// The 20 dB single-label records feed multi-label combination.
inline constexpr float kCombineSourceSnrDb = 20.0f;

struct DatasetRecord {
  Iq128f iq = Iq128f::Zero();
  LabelSet labels;
  int utilized = kNoUtilized;
  int num_interferers = 0;
  float snr_db = kNoSnr;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::string manifest_json;  // generation config and provenance (canonical JSON)

  std::size_t size() const { return records.size(); }
};

struct GenConfig {
  int snapshots_per_class_snr = 0;
  std::vector<double> snr_grid;          // dB, strictly increasing
  std::int64_t multi_total = 0;
  std::vector<int> interferer_counts;    // multi_total must divide evenly
  SirMode sir_mode = SirMode::kPowerPreserving;
  std::uint64_t master_seed = 0;
  double train_fraction = 0.8;

  void validate() const;  // throws std::invalid_argument
  nlohmann::json to_json() const;
  static GenConfig from_json(const nlohmann::json& j);
};

// Adds circularly-symmetric complex Gaussian noise with per-sample variance
// 10^(-snr_db/10) relative to the measured signal power. snr_db = +inf is
// the "no noise" sentinel. Deterministic per seed.
Iq128 add_awgn(const Iq128& snapshot, double snr_db, std::uint64_t seed);

// One record per (class, SNR, repetition); the modulation variant is drawn
// uniformly from the class's variant set. Record count =
// 15 * |snr_grid| * snapshots_per_class_snr.
Dataset generate_single_label(const GenConfig& config, int threads = 1);

// snapshot = utilized + a_N * sum(interferers) with a_N per SirMode; labels
// are the union of all source labels. Rejects duplicate classes, N outside
// [1, 6] and non-single-label inputs.
DatasetRecord combine_multi_label(const DatasetRecord& utilized,
                                  const std::vector<DatasetRecord>& interferers,
                                  SirMode sir_mode);

// Power of the weighted interference aggregate as combine_multi_label would
// mix it (used by the SIR checks).
double weighted_interference_power(const std::vector<DatasetRecord>& interferers,
                                   SirMode sir_mode);

// multi_total records, evenly split across interferer_counts; utilized
// class uniform over 15, interferer classes uniform without replacement
// from the remaining 14, sources drawn from the 20 dB pool of `single`.
Dataset generate_multi_label(const Dataset& single, const GenConfig& config,
                             int threads = 1);

// Balanced evaluation sets for the same- and cross-technology analyses:
// one cell per (utilized class, N) with interferers drawn from the same
// technology (STI) or exclusively from the other technologies (CTI).
Dataset generate_sti_eval(const Dataset& single, int records_per_cell,
                          std::uint64_t seed,
                          SirMode sir_mode = SirMode::kPowerPreserving);
Dataset generate_cti_eval(const Dataset& single, int records_per_cell,
                          std::uint64_t seed,
                          SirMode sir_mode = SirMode::kPowerPreserving);

// Disjoint random partition, stratified by num_interferers, original record
// order preserved within each part.
std::pair<Dataset, Dataset> split_train_val(const Dataset& dataset,
                                            double train_fraction,
                                            std::uint64_t seed);

// Binary dataset file (little-endian), magic "WIID"; a sidecar
// <path>.manifest.json stores the generation manifest. Round trips are
// bit-exact on samples, labels and metadata.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace wii
