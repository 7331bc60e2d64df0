#include "wii/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wii/catalog.hpp"
#include "wii/io.hpp"
#include "wii/parallel.hpp"
#include "wii/rng.hpp"
#include "wii/synth.hpp"

namespace wii {

using nlohmann::json;

namespace {

// Sub-stream tags for seed derivation.
constexpr std::uint64_t kStreamSingle = 0x314e4953ull;  // per single record
constexpr std::uint64_t kStreamMulti = 0x544c554dull;   // per multi record
constexpr std::uint64_t kStreamSti = 0x49545353ull;
constexpr std::uint64_t kStreamCti = 0x49545343ull;
constexpr std::uint64_t kStreamSplit = 0x54494c50ull;

json dataset_manifest(const char* kind, const GenConfig& config,
                      std::int64_t count) {
  json m;
  m["kind"] = kind;
  m["config"] = config.to_json();
  m["records"] = count;
  return m;
}

DatasetRecord make_single_record(const GenConfig& config, std::int64_t index) {
  const int grid = static_cast<int>(config.snr_grid.size());
  const int per = config.snapshots_per_class_snr;
  const int class_id = static_cast<int>(index / (grid * per));
  const int snr_idx = static_cast<int>((index / per) % grid);
  const double snr = config.snr_grid[static_cast<std::size_t>(snr_idx)];

  const std::uint64_t seed = derive_seed(config.master_seed, kStreamSingle,
                                         static_cast<std::uint64_t>(index));
  const ClassSpec& spec = class_spec(class_id);
  Rng rng(derive_seed(seed, 1));
  const auto& variant = spec.variants[rng.uniform_int(spec.variants.size())];

  const Iq128 burst = synthesize_burst(class_id, variant, derive_seed(seed, 2));
  const Iq128 noisy = add_awgn(burst, snr, derive_seed(seed, 3));

  DatasetRecord rec;
  rec.iq = noisy.cast<std::complex<float>>();
  rec.labels = LabelSet::single(class_id);
  rec.utilized = kNoUtilized;
  rec.num_interferers = 0;
  rec.snr_db = static_cast<float>(snr);
  rec.seed = seed;
  return rec;
}

// Indices of single-label 20 dB records per class.
std::array<std::vector<std::size_t>, kNumClasses> source_pools(const Dataset& single) {
  std::array<std::vector<std::size_t>, kNumClasses> pools;
  for (std::size_t i = 0; i < single.records.size(); ++i) {
    const DatasetRecord& r = single.records[i];
    if (r.labels.count() == 1 && r.snr_db == kCombineSourceSnrDb)
      pools[static_cast<std::size_t>(r.labels.ids()[0])].push_back(i);
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (pools[static_cast<std::size_t>(c)].empty())
      throw std::invalid_argument(
          "missing 20 dB single-label pool for class " + std::to_string(c));
  }
  return pools;
}

// Draw n distinct entries from `candidates` (partial Fisher-Yates).
std::vector<int> draw_distinct(std::vector<int> candidates, int n, Rng& rng) {
  if (n > static_cast<int>(candidates.size()))
    throw std::invalid_argument("cannot draw " + std::to_string(n) +
                                " distinct classes from " +
                                std::to_string(candidates.size()));
  for (int k = 0; k < n; ++k) {
    const std::size_t j = static_cast<std::size_t>(k) +
        rng.uniform_int(candidates.size() - static_cast<std::size_t>(k));
    std::swap(candidates[static_cast<std::size_t>(k)], candidates[j]);
  }
  candidates.resize(static_cast<std::size_t>(n));
  return candidates;
}

DatasetRecord combine_from_pools(
    const Dataset& single,
    const std::array<std::vector<std::size_t>, kNumClasses>& pools,
    int utilized_class, const std::vector<int>& interferer_classes,
    SirMode sir_mode, std::uint64_t seed, Rng& rng) {
  const auto& upool = pools[static_cast<std::size_t>(utilized_class)];
  const DatasetRecord& utilized = single.records[upool[rng.uniform_int(upool.size())]];
  std::vector<DatasetRecord> interferers;
  interferers.reserve(interferer_classes.size());
  for (int c : interferer_classes) {
    const auto& pool = pools[static_cast<std::size_t>(c)];
    interferers.push_back(single.records[pool[rng.uniform_int(pool.size())]]);
  }
  DatasetRecord rec = combine_multi_label(utilized, interferers, sir_mode);
  rec.seed = seed;
  return rec;
}

// (utilized class, N) cells for the balanced STI / CTI evaluation sets.
struct EvalCell {
  int utilized;
  int n;
  std::vector<int> candidates;
};

std::vector<EvalCell> sti_cells() {
  std::vector<EvalCell> cells;
  for (int u = 0; u < kNumClasses; ++u) {
    std::vector<int> same;
    for (int c : classes_of(technology_of(u)))
      if (c != u) same.push_back(c);
    const int max_n = std::min<int>(6, static_cast<int>(same.size()));
    for (int n = 1; n <= max_n; ++n) cells.push_back({u, n, same});
  }
  return cells;
}

std::vector<EvalCell> cti_cells() {
  std::vector<EvalCell> cells;
  for (int u = 0; u < kNumClasses; ++u) {
    std::vector<int> other;
    for (int c = 0; c < kNumClasses; ++c)
      if (technology_of(c) != technology_of(u)) other.push_back(c);
    const int max_n = std::min<int>(6, static_cast<int>(other.size()));
    for (int n = 1; n <= max_n; ++n) cells.push_back({u, n, other});
  }
  return cells;
}

Dataset generate_eval_set(const Dataset& single, int records_per_cell,
                          std::uint64_t seed, SirMode sir_mode,
                          const std::vector<EvalCell>& cells,
                          std::uint64_t stream, const char* kind) {
  if (records_per_cell <= 0)
    throw std::invalid_argument("records_per_cell must be positive");
  const auto pools = source_pools(single);
  Dataset out;
  out.records.reserve(cells.size() * static_cast<std::size_t>(records_per_cell));
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const EvalCell& cell = cells[ci];
    for (int rep = 0; rep < records_per_cell; ++rep) {
      const std::uint64_t rec_seed =
          derive_seed(seed, stream, ci, static_cast<std::uint64_t>(rep));
      Rng rng(rec_seed);
      const std::vector<int> classes = draw_distinct(cell.candidates, cell.n, rng);
      out.records.push_back(combine_from_pools(single, pools, cell.utilized,
                                               classes, sir_mode, rec_seed, rng));
    }
  }
  json m;
  m["kind"] = kind;
  m["records_per_cell"] = records_per_cell;
  m["cells"] = cells.size();
  m["seed"] = seed;
  m["sir_mode"] = sir_mode_name(sir_mode);
  m["records"] = out.records.size();
  out.manifest_json = m.dump();
  return out;
}

}  // namespace

const char* sir_mode_name(SirMode m) {
  return m == SirMode::kPowerPreserving ? "power_preserving" : "literal_one_over_n";
}

SirMode sir_mode_from_name(const std::string& name) {
  if (name == "power_preserving") return SirMode::kPowerPreserving;
  if (name == "literal_one_over_n") return SirMode::kLiteralOneOverN;
  throw std::invalid_argument("unknown sir_mode: " + name);
}

void GenConfig::validate() const {
  if (snapshots_per_class_snr <= 0)
    throw std::invalid_argument("snapshots_per_class_snr must be positive");
  if (snr_grid.empty())
    throw std::invalid_argument("snr_grid must not be empty");
  for (std::size_t i = 1; i < snr_grid.size(); ++i)
    if (snr_grid[i] <= snr_grid[i - 1])
      throw std::invalid_argument("snr_grid must be strictly increasing");
  if (multi_total <= 0)
    throw std::invalid_argument("multi_total must be positive");
  if (interferer_counts.empty())
    throw std::invalid_argument("interferer_counts must not be empty");
  for (int n : interferer_counts)
    if (n < 1 || n > 6)
      throw std::invalid_argument("interferer counts must lie in [1, 6]");
  if (multi_total % static_cast<std::int64_t>(interferer_counts.size()) != 0)
    throw std::invalid_argument(
        "multi_total must be divisible by the number of interferer counts");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
}

json GenConfig::to_json() const {
  json j;
  j["snapshots_per_class_snr"] = snapshots_per_class_snr;
  j["snr_grid"] = snr_grid;
  j["multi_total"] = multi_total;
  j["interferer_counts"] = interferer_counts;
  j["sir_mode"] = sir_mode_name(sir_mode);
  j["master_seed"] = master_seed;
  j["train_fraction"] = train_fraction;
  return j;
}

GenConfig GenConfig::from_json(const json& j) {
  GenConfig c;
  c.snapshots_per_class_snr = j.at("snapshots_per_class_snr").get<int>();
  c.snr_grid = j.at("snr_grid").get<std::vector<double>>();
  c.multi_total = j.at("multi_total").get<std::int64_t>();
  c.interferer_counts = j.at("interferer_counts").get<std::vector<int>>();
  c.sir_mode = sir_mode_from_name(j.at("sir_mode").get<std::string>());
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.train_fraction = j.at("train_fraction").get<double>();
  return c;
}

Iq128 add_awgn(const Iq128& snapshot, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return snapshot;
  const double signal_power = measure_power(snapshot);
  const double noise_power = signal_power * std::pow(10.0, -snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);
  Rng rng(seed);
  Iq128 out;
  for (int k = 0; k < kSnapshotLen; ++k) {
    out[k] = snapshot[k] +
             std::complex<double>(sigma * rng.gaussian(), sigma * rng.gaussian());
  }
  return out;
}

Dataset generate_single_label(const GenConfig& config, int threads) {
  config.validate();
  const std::int64_t total = static_cast<std::int64_t>(kNumClasses) *
                             static_cast<std::int64_t>(config.snr_grid.size()) *
                             config.snapshots_per_class_snr;
  Dataset ds;
  ds.records.resize(static_cast<std::size_t>(total));
  parallel_for(total, threads, [&](std::int64_t i) {
    ds.records[static_cast<std::size_t>(i)] = make_single_record(config, i);
  });
  ds.manifest_json = dataset_manifest("single", config, total).dump();
  return ds;
}

double weighted_interference_power(const std::vector<DatasetRecord>& interferers,
                                   SirMode sir_mode) {
  const double n = static_cast<double>(interferers.size());
  const double a = sir_mode == SirMode::kPowerPreserving ? 1.0 / std::sqrt(n) : 1.0 / n;
  Iq128 sum = Iq128::Zero();
  for (const auto& r : interferers) sum += r.iq.cast<std::complex<double>>();
  sum *= a;
  return measure_power(sum);
}

DatasetRecord combine_multi_label(const DatasetRecord& utilized,
                                  const std::vector<DatasetRecord>& interferers,
                                  SirMode sir_mode) {
  const std::size_t n = interferers.size();
  if (n < 1 || n > 6)
    throw std::invalid_argument("interferer count must lie in [1, 6], got " +
                                std::to_string(n));
  if (utilized.labels.count() != 1)
    throw std::invalid_argument("utilized record must be single-label");
  LabelSet labels = utilized.labels;
  const int utilized_class = utilized.labels.ids()[0];
  for (const auto& r : interferers) {
    if (r.labels.count() != 1)
      throw std::invalid_argument("interferer records must be single-label");
    const int c = r.labels.ids()[0];
    if (labels.contains(c))
      throw std::invalid_argument("duplicate class " + std::to_string(c) +
                                  " in multi-label combination");
    labels.insert(c);
  }

  const double a = sir_mode == SirMode::kPowerPreserving
                       ? 1.0 / std::sqrt(static_cast<double>(n))
                       : 1.0 / static_cast<double>(n);
  Iq128 mix = utilized.iq.cast<std::complex<double>>();
  for (const auto& r : interferers) mix += a * r.iq.cast<std::complex<double>>();

  DatasetRecord rec;
  rec.iq = mix.cast<std::complex<float>>();
  rec.labels = labels;
  rec.utilized = utilized_class;
  rec.num_interferers = static_cast<int>(n);
  rec.snr_db = kNoSnr;
  rec.seed = 0;
  return rec;
}

Dataset generate_multi_label(const Dataset& single, const GenConfig& config,
                             int threads) {
  config.validate();
  const auto pools = source_pools(single);
  const std::int64_t per_count =
      config.multi_total / static_cast<std::int64_t>(config.interferer_counts.size());

  Dataset ds;
  ds.records.resize(static_cast<std::size_t>(config.multi_total));
  parallel_for(config.multi_total, threads, [&](std::int64_t j) {
    const int n = config.interferer_counts[static_cast<std::size_t>(j / per_count)];
    const std::uint64_t seed = derive_seed(config.master_seed, kStreamMulti,
                                           static_cast<std::uint64_t>(j));
    Rng rng(seed);
    const int utilized_class = static_cast<int>(rng.uniform_int(kNumClasses));
    std::vector<int> others;
    others.reserve(kNumClasses - 1);
    for (int c = 0; c < kNumClasses; ++c)
      if (c != utilized_class) others.push_back(c);
    const std::vector<int> interferer_classes = draw_distinct(others, n, rng);
    ds.records[static_cast<std::size_t>(j)] = combine_from_pools(
        single, pools, utilized_class, interferer_classes, config.sir_mode,
        seed, rng);
  });
  ds.manifest_json = dataset_manifest("multi", config, config.multi_total).dump();
  return ds;
}

Dataset generate_sti_eval(const Dataset& single, int records_per_cell,
                          std::uint64_t seed, SirMode sir_mode) {
  return generate_eval_set(single, records_per_cell, seed, sir_mode,
                           sti_cells(), kStreamSti, "sti-eval");
}

Dataset generate_cti_eval(const Dataset& single, int records_per_cell,
                          std::uint64_t seed, SirMode sir_mode) {
  return generate_eval_set(single, records_per_cell, seed, sir_mode,
                           cti_cells(), kStreamCti, "cti-eval");
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& dataset,
                                            double train_fraction,
                                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  if (dataset.records.size() < 2)
    throw std::invalid_argument("dataset too small to split");

  // Strata by interferer count, shuffled independently.
  std::vector<std::vector<std::size_t>> strata(8);
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const int n = dataset.records[i].num_interferers;
    strata[static_cast<std::size_t>(std::clamp(n, 0, 7))].push_back(i);
  }
  std::vector<bool> in_train(dataset.records.size(), false);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto& idx = strata[s];
    if (idx.empty()) continue;
    Rng rng(derive_seed(seed, kStreamSplit, s));
    for (std::size_t k = idx.size(); k > 1; --k)
      std::swap(idx[k - 1], idx[rng.uniform_int(k)]);
    const auto take = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < std::min(take, idx.size()); ++k)
      in_train[idx[k]] = true;
  }

  Dataset train, val;
  for (std::size_t i = 0; i < dataset.records.size(); ++i)
    (in_train[i] ? train : val).records.push_back(dataset.records[i]);
  if (train.records.empty() || val.records.empty())
    throw std::invalid_argument("split produced an empty part");

  json base = dataset.manifest_json.empty()
                  ? json::object()
                  : json::parse(dataset.manifest_json);
  json jt = base;
  jt["split"] = {{"part", "train"}, {"train_fraction", train_fraction}, {"seed", seed}};
  jt["records"] = train.records.size();
  train.manifest_json = jt.dump();
  json jv = base;
  jv["split"] = {{"part", "val"}, {"train_fraction", train_fraction}, {"seed", seed}};
  jv["records"] = val.records.size();
  val.manifest_json = jv.dump();
  return {std::move(train), std::move(val)};
}

// ---------------------------------------------------------------------------
// Binary file format, little-endian:
//   magic "WIID" | u16 version | u64 record count | u16 samples per record |
//   per record: u16 label bitmask | u8 utilized (0xFF = none) |
//               u8 num_interferers | f32 snr_db (NaN = none) | u64 seed |
//               128 x (f32 I, f32 Q)

namespace {
constexpr char kDatasetMagic[4] = {'W', 'I', 'I', 'D'};
constexpr std::uint16_t kDatasetVersion = 1;
}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  io::Writer w(f);
  w.bytes(kDatasetMagic, 4);
  w.u16(kDatasetVersion);
  w.u64(dataset.records.size());
  w.u16(kSnapshotLen);
  for (const auto& r : dataset.records) {
    w.u16(r.labels.bits());
    w.u8(r.utilized == kNoUtilized ? 0xFF : static_cast<std::uint8_t>(r.utilized));
    w.u8(static_cast<std::uint8_t>(r.num_interferers));
    w.f32(r.snr_db);
    w.u64(r.seed);
    for (int k = 0; k < kSnapshotLen; ++k) {
      w.f32(r.iq[k].real());
      w.f32(r.iq[k].imag());
    }
  }
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);

  if (!dataset.manifest_json.empty()) {
    std::ofstream m(path + ".manifest.json", std::ios::trunc);
    if (!m) throw std::runtime_error("cannot write manifest for: " + path);
    m << dataset.manifest_json << "\n";
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dataset file: " + path);
  io::Reader r(f, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw io::FormatError(path + ": bad magic, not a WIID dataset file");
  const std::uint16_t version = r.u16();
  if (version != kDatasetVersion)
    throw io::FormatError(path + ": unsupported dataset version " +
                          std::to_string(version));
  const std::uint64_t count = r.u64();
  const std::uint16_t samples = r.u16();
  if (samples != kSnapshotLen)
    throw io::FormatError(path + ": unexpected samples per record " +
                          std::to_string(samples));

  Dataset ds;
  ds.records.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    DatasetRecord& rec = ds.records[static_cast<std::size_t>(i)];
    rec.labels = LabelSet::from_bits(r.u16());
    const std::uint8_t utilized = r.u8();
    rec.utilized = utilized == 0xFF ? kNoUtilized : static_cast<int>(utilized);
    rec.num_interferers = r.u8();
    rec.snr_db = r.f32();
    rec.seed = r.u64();
    for (int k = 0; k < kSnapshotLen; ++k) {
      const float re = r.f32();
      const float im = r.f32();
      rec.iq[k] = {re, im};
    }
  }

  const std::string manifest_path = path + ".manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream m(manifest_path);
    ds.manifest_json.assign(std::istreambuf_iterator<char>(m),
                            std::istreambuf_iterator<char>());
    while (!ds.manifest_json.empty() && ds.manifest_json.back() == '\n')
      ds.manifest_json.pop_back();
  }
  return ds;
}

}  // namespace wii
