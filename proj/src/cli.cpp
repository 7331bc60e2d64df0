#include "wii/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>

#include "wii/catalog.hpp"
#include "wii/dataset.hpp"
#include "wii/eval.hpp"
#include "wii/io.hpp"
#include "wii/nn/model_io.hpp"
#include "wii/nn/network.hpp"
#include "wii/nn/train.hpp"
#include "wii/synth.hpp"

namespace wii {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;
constexpr int kExitBadData = 65;
constexpr int kExitIo = 66;
constexpr int kExitInternal = 70;

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  return json::parse(f);
}

// Relative output paths land under WII_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  const char* dir = std::getenv("WII_OUT_DIR");
  if (dir == nullptr || *dir == '\0' ||
      std::filesystem::path(path).is_absolute())
    return path;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / path).string();
}

// Every file-producing run records its resolved configuration and the
// checksums of what it wrote; content is fully determined by the inputs, so
// repeated runs produce identical manifests.
void write_run_manifest(const std::string& command, const json& config,
                        const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["outputs"] = json::object();
  for (const auto& path : outputs)
    m["outputs"][path] = io::sha256_file(path);
  const std::string manifest_path = outputs.front() + ".run.json";
  std::ofstream f(manifest_path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest: " + manifest_path);
  f << m.dump(2) << "\n";
}

json config_section(const json& config, const char* name) {
  if (config.contains(name)) return config.at(name);
  return json::object();
}

nn::NetworkConfig network_from_config(const json& config) {
  if (config.contains("network"))
    return nn::NetworkConfig::from_json(config.at("network"));
  return nn::NetworkConfig::paper_preset();
}

struct Args {
  std::string config_path;
  std::string out;
  std::string in;
  std::string single_path;
  std::string train_path, val_path, model_path, data_path;
  std::string format = "json";
  std::string group_by = "class";
  std::vector<double> thresholds{0.3, 0.5, 0.7};
  double threshold = 0.5;
  int class_id = 0;
  std::string variant;
  std::uint64_t seed = 0;
  int index = 0;
  bool natural_order = false;
  bool no_normalize = false;
  int epochs = -1;
  int batch = -1;
  bool have_seed = false;
  bool verbose = false;
  int threads = 1;
};

int cmd_synth_preview(const Args& a) {
  const Iq128 burst = synthesize_burst(a.class_id, a.variant, a.seed);
  std::cout << "index,i,q\n" << std::setprecision(17);
  for (int k = 0; k < kSnapshotLen; ++k)
    std::cout << k << ',' << burst[k].real() << ',' << burst[k].imag() << '\n';
  return kExitOk;
}

int cmd_gen_single(const Args& a) {
  const json config = load_json_file(a.config_path);
  const GenConfig gen = GenConfig::from_json(config.at("gen"));
  const Dataset ds = generate_single_label(gen, a.threads);
  const std::string out = resolve_out(a.out);
  save_dataset(ds, out);
  write_run_manifest("gen-single", config, {out});
  std::cout << "wrote " << ds.size() << " records to " << out << "\n";
  return kExitOk;
}

int cmd_gen_multi(const Args& a) {
  const json config = load_json_file(a.config_path);
  const GenConfig gen = GenConfig::from_json(config.at("gen"));
  Dataset single;
  if (!a.single_path.empty()) {
    single = load_dataset(a.single_path);
  } else {
    single = generate_single_label(gen, a.threads);
  }
  const Dataset ds = generate_multi_label(single, gen, a.threads);
  const std::string out = resolve_out(a.out);
  save_dataset(ds, out);
  write_run_manifest("gen-multi", config, {out});
  std::cout << "wrote " << ds.size() << " records to " << out << "\n";
  return kExitOk;
}

int cmd_split(const Args& a) {
  const json config = load_json_file(a.config_path);
  const GenConfig gen = GenConfig::from_json(config.at("gen"));
  const Dataset ds = load_dataset(a.in);
  auto [train, val] = split_train_val(ds, gen.train_fraction, gen.master_seed);
  const std::string train_path = resolve_out(a.out + ".train.wiid");
  const std::string val_path = resolve_out(a.out + ".val.wiid");
  save_dataset(train, train_path);
  save_dataset(val, val_path);
  write_run_manifest("split", config, {train_path, val_path});
  std::cout << "wrote " << train.size() << " / " << val.size() << " records to "
            << train_path << " and " << val_path << "\n";
  return kExitOk;
}

int cmd_features(const Args& a) {
  const Dataset ds = load_dataset(a.in);
  if (a.index < 0 || static_cast<std::size_t>(a.index) >= ds.size())
    throw std::invalid_argument("record index " + std::to_string(a.index) +
                                " out of range (dataset has " +
                                std::to_string(ds.size()) + " records)");
  const Iq128f& iq = ds.records[static_cast<std::size_t>(a.index)].iq;
  IqVec<double> x;
  for (int k = 0; k < kSnapshotLen; ++k)
    x[k] = std::complex<double>(iq[k].real(), iq[k].imag());
  const FeatureMatrix<double> f =
      to_feature_matrix<double>(x, !a.no_normalize, !a.natural_order);
  std::cout << "row,re,im\n" << std::setprecision(17);
  for (int m = 0; m < kSnapshotLen; ++m)
    std::cout << m << ',' << f(m, 0) << ',' << f(m, 1) << '\n';
  return kExitOk;
}

int cmd_train(const Args& a) {
  const json config = load_json_file(a.config_path);
  const Dataset train_ds = load_dataset(a.train_path);
  const Dataset val_ds = load_dataset(a.val_path);

  const json tc = config_section(config, "train");
  nn::TrainOptions opt;
  opt.epochs = a.epochs >= 0 ? a.epochs : tc.value("epochs", 0);
  opt.batch_size = a.batch >= 0 ? a.batch : tc.value("batch_size", 256);
  opt.seed = a.have_seed ? a.seed : tc.value("seed", std::uint64_t{0});
  opt.learning_rate = tc.value("learning_rate", 1e-3);
  opt.lr_schedule =
      nn::lr_schedule_from_name(tc.value("lr_schedule", std::string("constant")));
  opt.verbose = a.verbose;

  nn::Network<float> net(network_from_config(config),
                         derive_seed(opt.seed, 0x1217));
  nn::train(net, train_ds, val_ds, opt);

  const std::string out = resolve_out(a.out);
  nn::save_model(net, out);
  write_run_manifest("train", config, {out});
  if (!net.training_log().empty()) {
    const auto& last = net.training_log().back();
    std::cout << "trained " << opt.epochs << " epochs; final loss "
              << last.train_loss << ", val mean TPR " << last.val_mean_tpr
              << "; model at " << out << "\n";
  } else {
    std::cout << "saved untrained model to " << out << "\n";
  }
  return kExitOk;
}

int cmd_eval(const Args& a) {
  nn::Network<float> net = nn::load_model<float>(a.model_path);
  const Dataset ds = load_dataset(a.data_path);
  const Eigen::MatrixXd scores = nn::predict_scores(net, ds);
  const std::vector<Decision> decisions = make_decisions(scores, a.threshold);

  TprReport report;
  if (a.group_by == "class") {
    report = tpr_per_class(decisions, ds.records);
  } else if (a.group_by == "n") {
    report = tpr_by_interferer_count(decisions, ds.records);
  } else if (a.group_by == "utilized") {
    report = tpr_by_utilized(decisions, ds.records);
  } else {
    throw std::invalid_argument("unknown group-by: " + a.group_by);
  }

  const std::string out = resolve_out(a.out);
  emit_report(report,
              a.format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson, out);
  json config;
  config["threshold"] = a.threshold;
  config["group_by"] = a.group_by;
  config["model"] = a.model_path;
  config["data"] = a.data_path;
  write_run_manifest("eval", config, {out});
  std::cout << "wrote report (" << report.groups.size() << " groups) to " << out
            << "\n";
  return kExitOk;
}

int cmd_compare_single(const Args& a) {
  nn::Network<float> net = nn::load_model<float>(a.model_path);
  const Dataset ds = load_dataset(a.data_path);
  const Eigen::MatrixXd scores = nn::predict_scores(net, ds);
  const SnrCurve curve = snr_tpr_curve(scores, ds.records, a.thresholds);
  if (a.out.empty()) {
    emit_snr_curve_csv(curve, std::cout);
    return kExitOk;
  }
  const std::string out = resolve_out(a.out);
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + out);
  emit_snr_curve_csv(curve, f);
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + out);
  json config;
  config["thresholds"] = a.thresholds;
  config["model"] = a.model_path;
  config["data"] = a.data_path;
  write_run_manifest("compare-single", config, {out});
  std::cout << "wrote SNR curve to " << out << "\n";
  return kExitOk;
}

int cmd_report(const Args& a) {
  std::ifstream f(a.in);
  if (!f) throw std::runtime_error("cannot open report file: " + a.in);
  std::string text(std::istreambuf_iterator<char>(f),
                   std::istreambuf_iterator<char>{});
  const TprReport report = report_from_json(text);
  const std::string out = resolve_out(a.out);
  emit_report(report,
              a.format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson, out);
  std::cout << "wrote " << a.format << " report to " << out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Wireless interference identification lab: signal synthesis, "
               "dataset generation, CNN training and TPR evaluation"};
  app.require_subcommand(1);
  Args a;

  if (const char* env = std::getenv("WII_THREADS"); env != nullptr && *env)
    a.threads = std::max(1, std::atoi(env));
  app.add_option("--threads", a.threads, "Worker thread cap (results are unaffected)");

  auto* synth = app.add_subcommand("synth-preview",
                                   "Emit one synthesized burst as CSV (index, I, Q)");
  synth->add_option("--class", a.class_id, "Class id (0-14)")->required();
  synth->add_option("--variant", a.variant, "Modulation variant name")->required();
  synth->add_option("--seed", a.seed, "Burst seed")->required();

  auto* gen_single = app.add_subcommand("gen-single", "Generate the single-label dataset");
  gen_single->add_option("--config", a.config_path, "Config JSON")->required();
  gen_single->add_option("--out", a.out, "Output dataset path")->required();

  auto* gen_multi = app.add_subcommand("gen-multi", "Generate the multi-label dataset");
  gen_multi->add_option("--config", a.config_path, "Config JSON")->required();
  gen_multi->add_option("--out", a.out, "Output dataset path")->required();
  gen_multi->add_option("--single", a.single_path,
                        "Existing single-label dataset (regenerated from config when omitted)");

  auto* split = app.add_subcommand("split", "Split a dataset into train/validation parts");
  split->add_option("--config", a.config_path, "Config JSON")->required();
  split->add_option("--in", a.in, "Input dataset")->required();
  split->add_option("--out", a.out, "Output prefix (.train.wiid / .val.wiid)")->required();

  auto* features = app.add_subcommand("features", "Dump the 128 x 2 feature matrix of one record");
  features->add_option("--in", a.in, "Dataset path")->required();
  features->add_option("--index", a.index, "Record index")->required();
  features->add_flag("--natural-order", a.natural_order, "Natural DFT bin order instead of centered");
  features->add_flag("--no-normalize", a.no_normalize, "Skip unit-RMS scaling");

  auto* train = app.add_subcommand("train", "Train the CNN on a multi-label dataset");
  train->add_option("--train", a.train_path, "Training dataset")->required();
  train->add_option("--val", a.val_path, "Validation dataset")->required();
  train->add_option("--config", a.config_path, "Config JSON")->required();
  train->add_option("--epochs", a.epochs, "Epoch count (overrides config)");
  train->add_option("--batch", a.batch, "Batch size (overrides config)");
  auto* seed_opt = train->add_option("--seed", a.seed, "Training seed (overrides config)");
  train->add_option("--out", a.out, "Output model path")->required();
  train->add_flag("--verbose", a.verbose, "Per-epoch progress on stderr");

  auto* eval = app.add_subcommand("eval", "Per-class / per-N TPR report for a model");
  eval->add_option("--model", a.model_path, "Model file")->required();
  eval->add_option("--data", a.data_path, "Dataset file")->required();
  eval->add_option("--threshold", a.threshold, "Decision threshold");
  eval->add_option("--group-by", a.group_by, "class | n | utilized");
  eval->add_option("--format", a.format, "json | csv");
  eval->add_option("--out", a.out, "Output report path")->required();

  auto* compare = app.add_subcommand("compare-single",
                                     "Mean TPR vs SNR curve on a single-label dataset");
  compare->add_option("--model", a.model_path, "Model file")->required();
  compare->add_option("--data", a.data_path, "Single-label dataset")->required();
  compare->add_option("--thresholds", a.thresholds, "Decision thresholds to sweep");
  compare->add_option("--out", a.out, "Output CSV (stdout when omitted)");

  auto* report = app.add_subcommand("report", "Convert a JSON report to CSV or back");
  report->add_option("--in", a.in, "Input report JSON")->required();
  report->add_option("--format", a.format, "json | csv");
  report->add_option("--out", a.out, "Output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }
  a.have_seed = seed_opt->count() > 0;

  try {
    if (synth->parsed()) return cmd_synth_preview(a);
    if (gen_single->parsed()) return cmd_gen_single(a);
    if (gen_multi->parsed()) return cmd_gen_multi(a);
    if (split->parsed()) return cmd_split(a);
    if (features->parsed()) return cmd_features(a);
    if (train->parsed()) return cmd_train(a);
    if (eval->parsed()) return cmd_eval(a);
    if (compare->parsed()) return cmd_compare_single(a);
    if (report->parsed()) return cmd_report(a);
    std::cerr << "error: usage: no subcommand\n";
    return kExitUsage;
  } catch (const io::FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return kExitBadData;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitBadData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid: " << e.what() << "\n";
    return kExitBadData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace wii
