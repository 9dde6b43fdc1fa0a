#include "geovad/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "geovad/config.hpp"
#include "geovad/dlsp.hpp"
#include "geovad/errors.hpp"
#include "geovad/metrics.hpp"
#include "geovad/parallel.hpp"
#include "geovad/pipeline.hpp"
#include "geovad/sweep.hpp"
#include "geovad/synth.hpp"

namespace geovad::cli {

namespace {

struct GlobalOpts {
  std::string config_path;
  std::int64_t seed = -1;  // -1 = keep config value
  int threads = 1;
};

PipelineConfig load_config(const GlobalOpts& global) {
  PipelineConfig config;
  if (!global.config_path.empty()) config = parse_config(global.config_path);
  if (global.seed >= 0) config.seed = static_cast<std::uint64_t>(global.seed);
  return config;
}

// Calibration feature files carry one video per class, named "normal" and
// "abnormal"; the main stream holds the calibration samples.
void split_calibration(const FeatureDataset& calib, MatX* normal, MatX* abn) {
  const MatX* n = nullptr;
  const MatX* a = nullptr;
  for (const auto& video : calib.videos) {
    if (video.id == "normal") n = &video.main;
    if (video.id == "abnormal") a = &video.main;
  }
  if (n == nullptr || a == nullptr)
    throw ConfigError("calibration file must contain videos named 'normal' and 'abnormal'");
  *normal = *n;
  *abn = *a;
}

FrameScores traces_to_scores(const std::vector<ScoreTrace>& traces) {
  FrameScores scores;
  for (const auto& trace : traces) scores.by_video.emplace_back(trace.video_id, trace.frame_scores);
  return scores;
}

int cmd_synth(const std::string& preset_name, Index dim, std::uint64_t seed,
              const std::string& out_dir, int layers, int salient_layer) {
  if (preset_name == "dlsp") {
    const auto stack = synth::make_layer_stack(dim, layers, salient_layer, 300, seed);
    write_features_multilayer(stack, out_dir + "/layers.gvfl");
    std::cout << "wrote " << out_dir << "/layers.gvfl (" << layers << " layers)\n";
    return 0;
  }
  const synth::WorldSpec spec = synth::preset(preset_name, dim, seed);
  const synth::World world = synth::build_world(spec);

  FeatureDataset calib;
  calib.dim = spec.dim;
  calib.videos.push_back({"normal", world.calib_normal, world.calib_normal});
  calib.videos.push_back({"abnormal", world.calib_abn, world.calib_abn});
  write_features(calib, out_dir + "/calib.gvf");
  write_features(world.test, out_dir + "/test.gvf");
  write_labels_csv(world.labels, out_dir + "/labels.csv");

  // Companion config sized to the world's cluster structure.
  std::ofstream cfg(out_dir + "/world.cfg");
  if (!cfg) throw Error("synth: cannot open " + out_dir + "/world.cfg");
  cfg << "# generated for world preset " << preset_name << "\n";
  cfg << "k_n=" << std::max<std::size_t>(spec.normal_clusters.size(), 1) << "\n";
  cfg << "k_a=" << std::max<std::size_t>(spec.abn_clusters.size(), 1) << "\n";
  cfg << "alpha_g=0.5\nbeta_base=0.5\nkappa=10\n";
  cfg << "frames_per_clip=" << spec.frames_per_clip << "\n";
  cfg << "smooth_sigma_clips=" << spec.smooth_sigma_clips << "\n";
  cfg << "seed=" << seed << "\n";
  std::cout << "wrote " << out_dir << "/{calib.gvf,test.gvf,labels.csv,world.cfg}\n";
  return 0;
}

int cmd_calibrate(const GlobalOpts& global, const std::string& calib_path,
                  const std::string& test_path, const std::string& mode,
                  const std::string& out_priors, const std::string& out_bank) {
  PipelineConfig config = load_config(global);
  if (mode == "online") config.mode = Mode::online;
  if (mode == "offline") config.mode = Mode::offline;
  MatX syn_normal, syn_abn;
  split_calibration(read_features(calib_path), &syn_normal, &syn_abn);
  FeatureDataset dataset;
  if (config.mode == Mode::offline) {
    if (test_path.empty())
      throw ConfigError("calibrate: offline mode needs --test (unified mean pools test features)");
    dataset = read_features(test_path);
  }
  const CalibrationPriors priors = compute_priors(dataset, syn_normal, syn_abn, config);
  save_priors({priors.unified_mean, priors.visual_mean}, out_priors);
  save_bank(priors.bank, out_bank);
  std::cout << "wrote " << out_priors << " and " << out_bank << " (D=" << priors.bank.dim()
            << ", K_N=" << priors.bank.norm_protos.rows()
            << ", K_A=" << priors.bank.abn_protos.rows() << ")\n";
  return 0;
}

int cmd_infer(const GlobalOpts& global, const std::string& features_path,
              const std::string& priors_path, const std::string& bank_path,
              const std::string& out_csv, const std::string& out_json) {
  const PipelineConfig config = load_config(global);
  const FeatureDataset dataset = read_features(features_path);
  const Priors priors_file = load_priors(priors_path);
  CalibrationPriors priors;
  priors.unified_mean = priors_file.unified_mean;
  priors.visual_mean = priors_file.visual_mean;
  priors.bank = load_bank(bank_path);
  if (priors.unified_mean.size() != priors.bank.dim())
    throw DimensionMismatchError("infer: priors and bank dimensions disagree");
  const OfflineResult result = score_dataset(dataset, priors, config);
  if (!out_csv.empty()) write_scores_csv(traces_to_scores(result.traces), out_csv);
  if (!out_json.empty()) write_traces_json(result.traces, out_json);
  if (result.at_base_count > 0)
    std::cerr << "warning: " << result.at_base_count
              << " clip(s) coincided with the centering base\n";
  std::cout << "scored " << dataset.videos.size() << " videos (" << dataset.total_clips()
            << " clips)\n";
  return 0;
}

int cmd_online(const GlobalOpts& global, const std::string& features_path,
               const std::string& priors_path, const std::string& bank_path,
               const std::string& out_csv) {
  const PipelineConfig config = load_config(global);
  const FeatureDataset dataset = read_features(features_path);
  const Priors priors_file = load_priors(priors_path);
  CalibrationPriors priors;
  priors.unified_mean = priors_file.unified_mean;
  priors.visual_mean = priors_file.visual_mean;
  priors.bank = load_bank(bank_path);

  std::ofstream out(out_csv);
  if (!out) throw Error("online: cannot open " + out_csv);
  out << "video_id,frame_index,score\n";
  out.precision(17);
  Index warn_count = 0;
  for (const auto& video : dataset.videos) {
    Index frame = 0;
    for (Index t = 0; t < video.main.rows(); ++t) {
      const OnlineScore clip = score_clip_online(video.main.row(t).transpose(), priors);
      warn_count += clip.at_base ? 1 : 0;
      for (int f = 0; f < config.frames_per_clip; ++f, ++frame)
        out << video.id << ',' << frame << ',' << clip.score << '\n';
      out.flush();  // one emission per clip, no batching dependency
    }
  }
  if (warn_count > 0)
    std::cerr << "warning: " << warn_count << " clip(s) coincided with the centering base\n";
  std::cout << "streamed " << dataset.total_clips() << " clips\n";
  return 0;
}

int cmd_eval(const std::string& scores_path, const std::string& labels_path) {
  const FrameScores scores = read_scores_csv(scores_path);
  const FrameLabels labels = read_labels_csv(labels_path);
  std::vector<double> flat_scores;
  std::vector<int> flat_labels;
  for (const auto& [id, frames] : scores.by_video) {
    const auto it = labels.by_video.find(id);
    if (it == labels.by_video.end()) throw Error("eval: no labels for video " + id);
    if (it->second.size() != frames.size())
      throw DimensionMismatchError("eval: frame count mismatch for video " + id);
    flat_scores.insert(flat_scores.end(), frames.begin(), frames.end());
    flat_labels.insert(flat_labels.end(), it->second.begin(), it->second.end());
  }
  std::cout.precision(6);
  std::cout << "frames=" << flat_scores.size() << "\n";
  std::cout << "auc=" << roc_auc(flat_scores, flat_labels) << "\n";
  std::cout << "ap=" << average_precision(flat_scores, flat_labels) << "\n";
  return 0;
}

int cmd_dlsp(const std::string& features_path, const std::string& out_csv) {
  const std::vector<FeatureDataset> stack = read_features_multilayer(features_path);
  std::vector<MatX> normal_layers, abn_layers;
  for (const auto& layer : stack) {
    MatX normal, abn;
    split_calibration(layer, &normal, &abn);
    normal_layers.push_back(normalize_rows(normal));
    abn_layers.push_back(normalize_rows(abn));
  }
  const LayerSaliency saliency = dlsp_evaluate(normal_layers, abn_layers);
  const std::size_t best = select_layer(saliency);

  std::ofstream out(out_csv);
  if (!out) throw Error("dlsp: cannot open " + out_csv);
  out << "layer,kl,ldr,entropy,z_kl,z_ldr,z_entropy,composite\n";
  out.precision(17);
  for (std::size_t l = 0; l < saliency.layer_count(); ++l)
    out << l << ',' << saliency.kl[l] << ',' << saliency.ldr[l] << ',' << saliency.entropy[l]
        << ',' << saliency.z_kl[l] << ',' << saliency.z_ldr[l] << ',' << saliency.z_entropy[l]
        << ',' << saliency.composite[l] << '\n';
  std::cout << "selected_layer=" << best << "\n";
  return 0;
}

int cmd_sweep(const GlobalOpts& global, const std::string& features_path,
              const std::string& calib_path, const std::string& labels_path,
              const std::string& grid_path, const std::string& out_csv) {
  const PipelineConfig base = load_config(global);
  const FeatureDataset dataset = read_features(features_path);
  MatX syn_normal, syn_abn;
  split_calibration(read_features(calib_path), &syn_normal, &syn_abn);
  const FrameLabels labels = read_labels_csv(labels_path);
  const ParamGrid grid = parse_grid(grid_path);
  const std::vector<SweepRow> rows = sweep(dataset, labels, syn_normal, syn_abn, base, grid);
  write_sweep_csv(rows, out_csv);
  std::cout << "wrote " << rows.size() << " sweep rows to " << out_csv << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Training-free video anomaly scoring on the unit hypersphere"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--config", global.config_path, "pipeline configuration file")
      ->configurable(false);
  app.add_option("--seed", global.seed, "override the configured seed");
  app.add_option("--threads", global.threads, "worker threads (never affects outputs)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a preset feature world");
  std::string preset_name = "A";
  std::string out_dir = ".";
  Index dim = 16;
  int layers = 5;
  int salient_layer = 3;
  synth_cmd->add_option("--preset", preset_name, "A|B|C|D|dlsp")->required();
  synth_cmd->add_option("--out", out_dir, "output directory")->required();
  synth_cmd->add_option("--dim", dim, "feature dimension");
  synth_cmd->add_option("--layers", layers, "layer count (dlsp preset)");
  synth_cmd->add_option("--salient-layer", salient_layer, "separated layer (dlsp preset)");

  // calibrate
  auto* calib_cmd = app.add_subcommand("calibrate", "compute priors and prototype bank");
  std::string calib_path, test_path, mode, out_priors = "priors.gvpr", out_bank = "bank.gvpb";
  calib_cmd->add_option("--calib", calib_path, "calibration features (GVF1)")->required();
  calib_cmd->add_option("--test", test_path, "test features (offline mode)");
  calib_cmd->add_option("--mode", mode, "offline|online (overrides config)");
  calib_cmd->add_option("--out-priors", out_priors, "priors output path");
  calib_cmd->add_option("--out-bank", out_bank, "bank output path");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "score a feature file offline");
  std::string features_path, priors_path, bank_path, out_csv, out_json;
  infer_cmd->add_option("--features", features_path, "test features")->required();
  infer_cmd->add_option("--priors", priors_path, "priors file")->required();
  infer_cmd->add_option("--bank", bank_path, "prototype bank")->required();
  infer_cmd->add_option("--out-csv", out_csv, "frame scores CSV");
  infer_cmd->add_option("--out-json", out_json, "per-video score trace JSON");

  // online
  auto* online_cmd = app.add_subcommand("online", "stream clips through the online scorer");
  std::string on_features, on_priors, on_bank, on_csv;
  online_cmd->add_option("--features", on_features, "clip stream (GVF1)")->required();
  online_cmd->add_option("--priors", on_priors, "synthetic-only priors")->required();
  online_cmd->add_option("--bank", on_bank, "prototype bank")->required();
  online_cmd->add_option("--out-csv", on_csv, "frame scores CSV")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "frame-level AUC/AP of a score file");
  std::string scores_path, labels_path;
  eval_cmd->add_option("--scores", scores_path, "scores CSV")->required();
  eval_cmd->add_option("--labels", labels_path, "labels CSV")->required();

  // dlsp
  auto* dlsp_cmd = app.add_subcommand("dlsp", "per-layer saliency and layer selection");
  std::string dlsp_features, dlsp_out = "saliency.csv";
  dlsp_cmd->add_option("--features", dlsp_features, "multi-layer features (GVFL)")->required();
  dlsp_cmd->add_option("--out", dlsp_out, "saliency CSV");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "grid search over pipeline parameters");
  std::string sw_features, sw_calib, sw_labels, sw_grid, sw_out = "sweep.csv";
  sweep_cmd->add_option("--features", sw_features, "test features")->required();
  sweep_cmd->add_option("--calib", sw_calib, "calibration features")->required();
  sweep_cmd->add_option("--labels", sw_labels, "labels CSV")->required();
  sweep_cmd->add_option("--grid", sw_grid, "grid file (key=v1,v2,...)")->required();
  sweep_cmd->add_option("--out", sw_out, "sweep table CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    parallel::set_threads(global.threads);
    const std::uint64_t seed = global.seed >= 0 ? static_cast<std::uint64_t>(global.seed)
                                                : load_config(global).seed;
    if (synth_cmd->parsed()) return cmd_synth(preset_name, dim, seed, out_dir, layers, salient_layer);
    if (calib_cmd->parsed())
      return cmd_calibrate(global, calib_path, test_path, mode, out_priors, out_bank);
    if (infer_cmd->parsed())
      return cmd_infer(global, features_path, priors_path, bank_path, out_csv, out_json);
    if (online_cmd->parsed()) return cmd_online(global, on_features, on_priors, on_bank, on_csv);
    if (eval_cmd->parsed()) return cmd_eval(scores_path, labels_path);
    if (dlsp_cmd->parsed()) return cmd_dlsp(dlsp_features, dlsp_out);
    if (sweep_cmd->parsed())
      return cmd_sweep(global, sw_features, sw_calib, sw_labels, sw_grid, sw_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace geovad::cli
