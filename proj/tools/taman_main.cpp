#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "taman/ablation.hpp"
#include "taman/class_maps.hpp"
#include "taman/config.hpp"
#include "taman/evaluator.hpp"
#include "taman/synthetic.hpp"
#include "taman/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<int> csv_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ','))
    if (!part.empty()) out.push_back(std::stoi(part));
  return out;
}

std::vector<double> csv_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ','))
    if (!part.empty()) out.push_back(std::stod(part));
  return out;
}

std::vector<std::uint64_t> csv_u64(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(s, ','))
    if (!part.empty()) out.push_back(std::stoull(part));
  return out;
}

/// String holders for RunConfig flags shared by train and ablate.
struct RunFlags {
  taman::RunConfig rc;
  std::string scales_csv;
  std::string moments_csv;
  std::string variant = "full";
  std::string config_path;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--lr", f.rc.lr, "learning rate")->capture_default_str();
  cmd->add_option("--momentum", f.rc.momentum, "SGD momentum")->capture_default_str();
  cmd->add_option("--weight-decay", f.rc.weight_decay, "L2 weight decay")->capture_default_str();
  cmd->add_option("--epochs", f.rc.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--batch-size", f.rc.batch_size, "per-domain batch size")->capture_default_str();
  cmd->add_option("--lambda-df", f.rc.lambda_df, "spatial discrepancy weight")->capture_default_str();
  cmd->add_option("--lambda-dt", f.rc.lambda_dt, "temporal discrepancy weight")->capture_default_str();
  cmd->add_option("--scales", f.scales_csv, "temporal scales, e.g. 2,3,4 (default: 2..h)");
  cmd->add_option("--clips-per-scale", f.rc.clips_per_scale, "clips drawn per scale")->capture_default_str();
  cmd->add_option("--moments", f.moments_csv, "moment orders, e.g. 1,2");
  cmd->add_option("--seed", f.rc.seed, "random seed")->capture_default_str();
  cmd->add_option("--variant", f.variant, "training/evaluation variant")->capture_default_str();
  cmd->add_option("--temporal-dim", f.rc.temporal_dim, "temporal feature width")->capture_default_str();
  cmd->add_option("--hidden-dim", f.rc.hidden_dim, "integration net hidden width")->capture_default_str();
  cmd->add_option("--config", f.config_path, "key=value config file; command-line flags override");
}

/// key=value file, one pair per line, '#' comments. Applies only keys whose
/// flag was not given on the command line.
void apply_config_file(CLI::App* cmd, RunFlags& f) {
  if (f.config_path.empty()) return;
  std::ifstream in(f.config_path);
  if (!in) taman::fail(taman::ErrorKind::Config, "cannot open config file " + f.config_path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        taman::fail(taman::ErrorKind::Config,
                    f.config_path + ":" + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto unset = [&](const std::string& flag) { return cmd->count("--" + flag) == 0; };
  for (const auto& [key, value] : kv) {
    if (key == "lr" && unset("lr")) f.rc.lr = std::stod(value);
    else if (key == "momentum" && unset("momentum")) f.rc.momentum = std::stod(value);
    else if (key == "weight_decay" && unset("weight-decay")) f.rc.weight_decay = std::stod(value);
    else if (key == "epochs" && unset("epochs")) f.rc.epochs = std::stoi(value);
    else if (key == "batch_size" && unset("batch-size")) f.rc.batch_size = std::stoi(value);
    else if (key == "lambda_df" && unset("lambda-df")) f.rc.lambda_df = std::stod(value);
    else if (key == "lambda_dt" && unset("lambda-dt")) f.rc.lambda_dt = std::stod(value);
    else if (key == "scales" && unset("scales")) f.scales_csv = value;
    else if (key == "clips_per_scale" && unset("clips-per-scale")) f.rc.clips_per_scale = std::stoi(value);
    else if (key == "moments" && unset("moments")) f.moments_csv = value;
    else if (key == "seed" && unset("seed")) f.rc.seed = std::stoull(value);
    else if (key == "variant" && unset("variant")) f.variant = value;
    else if (key == "temporal_dim" && unset("temporal-dim")) f.rc.temporal_dim = std::stoi(value);
    else if (key == "hidden_dim" && unset("hidden-dim")) f.rc.hidden_dim = std::stoi(value);
    else if (key == "lr" || key == "momentum" || key == "weight_decay" || key == "epochs" ||
             key == "batch_size" || key == "lambda_df" || key == "lambda_dt" || key == "scales" ||
             key == "clips_per_scale" || key == "moments" || key == "seed" || key == "variant" ||
             key == "temporal_dim" || key == "hidden_dim") {
      // present on the command line; flag wins
    } else {
      taman::fail(taman::ErrorKind::Config, "unknown config key '" + key + "'");
    }
  }
}

taman::RunConfig finalize_run_config(CLI::App* cmd, RunFlags& f) {
  apply_config_file(cmd, f);
  if (!f.scales_csv.empty()) f.rc.scales = csv_ints(f.scales_csv);
  if (!f.moments_csv.empty()) f.rc.moment_orders = csv_ints(f.moments_csv);
  f.rc.variant = taman::parse_variant(f.variant);
  f.rc.validate();
  return f.rc;
}

json eval_report_json(const taman::EvalReport& report) {
  json j;
  j["top1"] = report.top1;
  j["video_count"] = report.video_count;
  j["class_count"] = report.class_count;
  j["per_class_accuracy"] = report.per_class;
  j["mean_ensemble_weight"] = report.mean_ensemble_weight;
  return j;
}

int cmd_synth(const taman::SyntheticSpec& spec, const std::string& out_dir) {
  auto files = taman::generate_synthetic(spec, out_dir);
  json j;
  for (const auto& [name, paths] : files)
    j[name] = {{"train", paths.train.string()},
               {"train_unlabeled", paths.train_unlabeled.string()},
               {"test", paths.test.string()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_manifest(const std::string& benchmark, const std::vector<std::string>& listing_args,
                 const std::string& out_dir, const std::string& strip_labels) {
  const taman::Benchmark b = taman::parse_benchmark(benchmark);
  std::map<std::string, std::vector<taman::ListingEntry>> listings;
  for (const auto& arg : listing_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
      taman::fail(taman::ErrorKind::Config, "--listing expects dataset=path, got '" + arg + "'");
    const std::string dataset = arg.substr(0, eq);
    const std::string path = arg.substr(eq + 1);
    std::ifstream in(path);
    if (!in) taman::fail(taman::ErrorKind::Format, "cannot open listing " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        taman::fail(taman::ErrorKind::Format,
                    path + ":" + std::to_string(line_no) + ": expected raw_label<TAB>path");
      listings[dataset].push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
  }
  auto manifests = taman::build_manifests(b, listings);
  fs::create_directories(out_dir);
  json j;
  for (const auto& [dataset, manifest] : manifests) {
    const fs::path out = fs::path(out_dir) / (dataset + ".manifest");
    taman::save_manifest(out, manifest);
    j[dataset] = out.string();
    if (dataset == strip_labels) {
      taman::Manifest unlabeled = manifest;
      for (auto& rec : unlabeled.records) rec.label = -1;
      const fs::path uout = fs::path(out_dir) / (dataset + "_unlabeled.manifest");
      taman::save_manifest(uout, unlabeled);
      j[dataset + "_unlabeled"] = uout.string();
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_train(const taman::RunConfig& rc, const std::vector<std::string>& source_paths,
              const std::string& target_path, const std::string& out_dir) {
  std::vector<taman::Dataset> sources;
  for (const auto& p : source_paths) sources.push_back(taman::load_dataset(p));
  taman::Dataset target = taman::load_dataset(target_path);

  fs::create_directories(out_dir);
  auto result = taman::train(rc, sources, target);

  std::ofstream metrics(fs::path(out_dir) / "metrics.jsonl", std::ios::trunc);
  for (const auto& rec : result.metrics) metrics << taman::to_json_line(rec) << "\n";
  taman::save_checkpoint(fs::path(out_dir) / "checkpoint.tmnc", result.checkpoint);
  std::ofstream cfg_out(fs::path(out_dir) / "config.json", std::ios::trunc);
  cfg_out << taman::to_json_string(result.checkpoint.config) << "\n";

  if (result.diverged) {
    std::cerr << "divergence error: " << result.divergence_message << "\n";
    return 1;
  }
  std::cout << "trained " << result.metrics.size() << " epochs; checkpoint at "
            << (fs::path(out_dir) / "checkpoint.tmnc").string() << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& manifest_path,
             const std::string& ensemble, const std::string& source_acc_csv) {
  const taman::Checkpoint cp = taman::load_checkpoint(checkpoint_path);
  const taman::Dataset test = taman::load_dataset(manifest_path);
  const taman::EnsembleMode mode = taman::parse_ensemble_mode(ensemble);
  std::vector<double> acc;
  if (!source_acc_csv.empty()) acc = csv_doubles(source_acc_csv);
  const auto report = taman::evaluate(cp, test, mode, acc);
  std::cout << eval_report_json(report).dump(2) << "\n";
  return 0;
}

int cmd_ablate(const taman::RunConfig& rc, const std::vector<std::string>& source_paths,
               const std::string& target_train_path, const std::string& target_test_path,
               const std::string& variants_csv, const std::string& seeds_csv,
               const std::string& out_dir) {
  std::vector<taman::Dataset> sources;
  for (const auto& p : source_paths) sources.push_back(taman::load_dataset(p));
  const taman::Dataset target_train = taman::load_dataset(target_train_path);
  const taman::Dataset target_test = taman::load_dataset(target_test_path);

  taman::AblationConfig cfg;
  cfg.base = rc;
  for (const auto& name : split(variants_csv, ','))
    if (!name.empty()) cfg.variants.push_back(taman::parse_variant(name));
  cfg.seeds = csv_u64(seeds_csv);

  const auto rows = taman::run_ablation(cfg, sources, target_train, target_test);

  json j = json::array();
  for (const auto& row : rows)
    j.push_back({{"variant", taman::to_string(row.variant)},
                 {"per_seed_accuracy", row.per_seed_accuracy},
                 {"mean", row.mean},
                 {"stddev", row.stddev}});
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "ablation.json", std::ios::trunc);
    out << j.dump(2) << "\n";
  }
  std::cout << taman::format_ablation_table(rows);
  return 0;
}

int cmd_gradcheck(double eps, std::uint64_t seed) {
  taman::PipelineCheckSpec spec;
  spec.eps = eps;
  spec.seed = seed;
  const auto report = taman::full_pipeline_grad_check(spec);
  for (const auto& t : report.tensors)
    std::cout << t.name << " max_rel_err=" << t.max_rel_err << " (analytic=" << t.analytic_at_worst
              << " numeric=" << t.numeric_at_worst << " at index " << t.worst_index << ")\n";
  if (!report.error.empty()) {
    std::cout << "FAIL " << report.error << "\n";
    return 1;
  }
  std::cout << (report.pass ? "PASS" : "FAIL") << " max_rel_err=" << report.max_rel_err
            << " tolerance=" << report.tolerance << "\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-source video domain adaptation on frame-level features"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic multi-domain benchmark");
  taman::SyntheticSpec spec;
  std::string synth_out;
  std::vector<std::string> domain_args;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--class-pairs", spec.class_pairs, "base classes (each gets a reversed confuser)")
      ->capture_default_str();
  synth->add_option("--dim", spec.feature_dim, "frame feature width")->capture_default_str();
  synth->add_option("--frames", spec.frame_count, "frames per video")->capture_default_str();
  synth->add_option("--videos-per-class", spec.videos_per_class, "videos per class per domain")
      ->capture_default_str();
  synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--train-fraction", spec.train_fraction, "train split fraction")
      ->capture_default_str();
  synth->add_option("--domain", domain_args, "domain as name:bias:sigma (repeat per domain)")
      ->required();

  // manifest
  auto* manifest = app.add_subcommand("manifest", "build benchmark manifests from raw listings");
  std::string benchmark, manifest_out, strip_labels;
  std::vector<std::string> listing_args;
  manifest->add_option("--benchmark", benchmark, "daily or sports")->required();
  manifest->add_option("--listing", listing_args, "dataset=listing.tsv (raw_label<TAB>path lines)")
      ->required();
  manifest->add_option("--out-dir", manifest_out, "output directory")->required();
  manifest->add_option("--strip-labels", strip_labels,
                       "also emit an unlabeled manifest for this dataset");

  // train
  auto* train = app.add_subcommand("train", "train on labeled sources and an unlabeled target");
  RunFlags train_flags;
  std::vector<std::string> train_sources;
  std::string train_target, train_out;
  train->add_option("--source", train_sources, "source manifest (repeat per domain)")->required();
  train->add_option("--target", train_target, "unlabeled target-train manifest")->required();
  train->add_option("--out-dir", train_out, "output directory")->required();
  add_run_flags(train, train_flags);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a labeled manifest");
  std::string eval_checkpoint, eval_manifest, eval_ensemble = "certainty", eval_source_acc;
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
  eval->add_option("--manifest", eval_manifest, "labeled test manifest")->required();
  eval->add_option("--ensemble", eval_ensemble, "certainty, average, or source_accuracy")
      ->capture_default_str();
  eval->add_option("--source-accuracy", eval_source_acc,
                   "per-source accuracies for source_accuracy mode, e.g. 0.61,0.48");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run variants across seeds and tabulate accuracy");
  RunFlags ablate_flags;
  ablate_flags.rc.epochs = 30;  // desk-scale default
  std::vector<std::string> ablate_sources;
  std::string ablate_target_train, ablate_target_test, ablate_out;
  std::string variants_csv =
      "full,no_confidence,no_dominance,no_local_attention,source_only";
  std::string seeds_csv = "0,1,2,3,4";
  ablate->add_option("--source", ablate_sources, "source manifest (repeat per domain)")->required();
  ablate->add_option("--target-train", ablate_target_train, "unlabeled target-train manifest")
      ->required();
  ablate->add_option("--target-test", ablate_target_test, "labeled target-test manifest")->required();
  ablate->add_option("--variants", variants_csv, "comma-separated variant list")->capture_default_str();
  ablate->add_option("--seeds", seeds_csv, "comma-separated seeds")->capture_default_str();
  ablate->add_option("--out-dir", ablate_out, "where to write ablation.json");
  add_run_flags(ablate, ablate_flags);

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the full loss");
  double gc_eps = 3e-4;
  std::uint64_t gc_seed = 0;
  gradcheck->add_option("--eps", gc_eps, "central difference step")->capture_default_str();
  gradcheck->add_option("--seed", gc_seed, "instance seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      for (const auto& arg : domain_args) {
        const auto parts = split(arg, ':');
        if (parts.size() != 3)
          taman::fail(taman::ErrorKind::Config, "--domain expects name:bias:sigma, got '" + arg + "'");
        spec.domains.push_back({parts[0], std::stod(parts[1]), std::stod(parts[2])});
      }
      return cmd_synth(spec, synth_out);
    }
    if (manifest->parsed()) return cmd_manifest(benchmark, listing_args, manifest_out, strip_labels);
    if (train->parsed())
      return cmd_train(finalize_run_config(train, train_flags), train_sources, train_target,
                       train_out);
    if (eval->parsed()) return cmd_eval(eval_checkpoint, eval_manifest, eval_ensemble, eval_source_acc);
    if (ablate->parsed())
      return cmd_ablate(finalize_run_config(ablate, ablate_flags), ablate_sources,
                        ablate_target_train, ablate_target_test, variants_csv, seeds_csv, ablate_out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_eps, gc_seed);
  } catch (const taman::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
