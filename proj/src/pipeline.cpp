#include "geovad/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "geovad/errors.hpp"
#include "geovad/parallel.hpp"
#include "geovad/sphere.hpp"
#include "geovad/vmf.hpp"

namespace geovad {

MatX normalize_rows(const MatX& feats) {
  MatX out(feats.rows(), feats.cols());
  parallel::for_chunks(feats.rows(), 256, [&](Index b, Index e) {
    for (Index i = b; i < e; ++i)
      out.row(i) = sphere::normalize(feats.row(i).transpose()).transpose();
  });
  return out;
}

MatX center_rows(const MatX& normalized, const VecX& base, Index* at_base_count) {
  MatX out(normalized.rows(), normalized.cols());
  std::atomic<Index> at_base{0};
  parallel::for_chunks(normalized.rows(), 256, [&](Index b, Index e) {
    for (Index i = b; i < e; ++i) {
      const VecX x = normalized.row(i).transpose();
      try {
        out.row(i) = sphere::center(base, x).transpose();
      } catch (const AtBasePointError&) {
        out.row(i) = normalized.row(i);  // measure-zero event, keep the feature
        at_base.fetch_add(1);
      }
    }
  });
  if (at_base_count != nullptr) *at_base_count += at_base.load();
  return out;
}

std::vector<double> expand_and_smooth(const std::vector<double>& clip_scores,
                                      int frames_per_clip, double sigma_clips) {
  if (clip_scores.empty()) throw Error("expand_and_smooth: empty clip scores");
  if (frames_per_clip < 1) throw ConfigError("expand_and_smooth: frames_per_clip must be >= 1");
  std::vector<double> frames;
  frames.reserve(clip_scores.size() * static_cast<std::size_t>(frames_per_clip));
  for (double s : clip_scores)
    for (int f = 0; f < frames_per_clip; ++f) frames.push_back(s);
  if (sigma_clips == 0.0) return frames;

  const double sigma = sigma_clips * frames_per_clip;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double kernel_sum = 0.0;
  for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
    const double w = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(j + radius)] = w;
    kernel_sum += w;
  }
  for (double& w : kernel) w /= kernel_sum;

  const auto n = static_cast<std::ptrdiff_t>(frames.size());
  auto reflect = [n](std::ptrdiff_t i) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  };
  std::vector<double> smoothed(frames.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -radius; j <= radius; ++j)
      acc += kernel[static_cast<std::size_t>(j + radius)] * frames[static_cast<std::size_t>(reflect(i + j))];
    smoothed[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, acc));
  }
  return smoothed;
}

namespace {

MatX vstack(const MatX& a, const MatX& b) {
  MatX out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

void check_dims(const FeatureDataset& dataset, const MatX& syn_normal, const MatX& syn_abn) {
  if (syn_normal.cols() != syn_abn.cols())
    throw ConfigError("pipeline: synthetic class dimensions disagree");
  if (dataset.dim != 0 && !dataset.videos.empty() && dataset.dim != syn_normal.cols())
    throw DimensionMismatchError("pipeline: dataset and synthetic dimensions disagree");
}

}  // namespace

CalibrationPriors compute_priors(const FeatureDataset& dataset, const MatX& syn_normal,
                                 const MatX& syn_abn, const PipelineConfig& config) {
  check_dims(dataset, syn_normal, syn_abn);
  const MatX syn_norm_unit = normalize_rows(syn_normal);
  const MatX syn_abn_unit = normalize_rows(syn_abn);
  MatX pool = vstack(syn_norm_unit, syn_abn_unit);

  CalibrationPriors priors;
  if (config.mode == Mode::offline) {
    // Unified mean pools synthetic and real main features (unweighted).
    Index total_real = dataset.total_clips();
    MatX pooled(pool.rows() + total_real, pool.cols());
    pooled.topRows(pool.rows()) = pool;
    Index row = pool.rows();
    for (const auto& video : dataset.videos) {
      pooled.middleRows(row, video.main.rows()) = normalize_rows(video.main);
      row += video.main.rows();
    }
    priors.unified_mean = sphere::frechet_mean(pooled).mean;

    // Visual features center at a test-set-only mean.
    MatX vis(total_real, pool.cols());
    row = 0;
    for (const auto& video : dataset.videos) {
      vis.middleRows(row, video.visual.rows()) = normalize_rows(video.visual);
      row += video.visual.rows();
    }
    priors.visual_mean = total_real > 0 ? sphere::frechet_mean(vis).mean : priors.unified_mean;
  } else {
    // Online: the reference frame is fixed a priori from synthetic features
    // alone; no test-set statistics enter the priors.
    priors.unified_mean = sphere::frechet_mean(pool).mean;
    priors.visual_mean = priors.unified_mean;
  }

  const MatX centered_norm = center_rows(syn_norm_unit, priors.unified_mean);
  const MatX centered_abn = center_rows(syn_abn_unit, priors.unified_mean);
  priors.bank = calibrate(centered_norm, centered_abn, config.k_n, config.k_a, config.kappa,
                          config.seed, config.kmeans);
  return priors;
}

OfflineResult score_dataset(const FeatureDataset& dataset, const CalibrationPriors& priors,
                            const PipelineConfig& config) {
  if (!dataset.videos.empty() && dataset.dim != priors.bank.dim())
    throw DimensionMismatchError("score_dataset: dataset and bank dimensions disagree");

  OfflineResult result;
  result.priors = priors;

  // Center both streams of every clip.
  const Index total = dataset.total_clips();
  MatX main_centered(total, dataset.dim);
  MatX vis_centered(total, dataset.dim);
  std::vector<Index> video_offsets;
  Index row = 0;
  Index at_base = 0;
  for (const auto& video : dataset.videos) {
    video_offsets.push_back(row);
    main_centered.middleRows(row, video.main.rows()) =
        center_rows(normalize_rows(video.main), priors.unified_mean, &at_base);
    vis_centered.middleRows(row, video.visual.rows()) =
        center_rows(normalize_rows(video.visual), priors.visual_mean);
    row += video.main.rows();
  }
  result.at_base_count = at_base;

  // Cross-video holistic attention over all test clips.
  MatX enhanced;
  if (config.enable_hsa) {
    const SparseAttention attn = build_sparse_attention(vis_centered, config.hsa_attention);
    enhanced = hsa_enhance(main_centered, attn, config.alpha_g);
  } else {
    enhanced = main_centered;
  }

  std::vector<double> init_scores(static_cast<std::size_t>(total));
  parallel::for_chunks(total, 256, [&](Index b, Index e) {
    for (Index i = b; i < e; ++i)
      init_scores[static_cast<std::size_t>(i)] =
          vmf_score(enhanced.row(i).transpose(), priors.bank);
  });

  result.traces.resize(dataset.videos.size());
  parallel::for_each_index(static_cast<Index>(dataset.videos.size()), [&](Index v) {
    const auto& video = dataset.videos[static_cast<std::size_t>(v)];
    const Index t = video.main.rows();
    const Index offset = video_offsets[static_cast<std::size_t>(v)];
    ScoreTrace trace;
    trace.video_id = video.id;
    trace.clip_scores_init.assign(init_scores.begin() + offset, init_scores.begin() + offset + t);
    if (config.enable_sgp) {
      const SgpResult sgp = sgp_video(enhanced.middleRows(offset, t),
                                      vis_centered.middleRows(offset, t),
                                      trace.clip_scores_init, priors.bank, config.sgp);
      trace.clip_scores_final = sgp.final_scores;
    } else {
      trace.clip_scores_final = trace.clip_scores_init;
    }
    trace.frame_scores =
        expand_and_smooth(trace.clip_scores_final, config.frames_per_clip,
                          config.smooth_sigma_clips);
    result.traces[static_cast<std::size_t>(v)] = std::move(trace);
  });
  return result;
}

OfflineResult run_offline(const FeatureDataset& dataset, const MatX& syn_normal,
                          const MatX& syn_abn, const PipelineConfig& config) {
  const CalibrationPriors priors = compute_priors(dataset, syn_normal, syn_abn, config);
  return score_dataset(dataset, priors, config);
}

OnlineScore score_clip_online(const VecX& raw_main, const CalibrationPriors& priors) {
  OnlineScore out;
  const VecX unit = sphere::normalize(raw_main);
  try {
    out.score = vmf_score(sphere::center(priors.unified_mean, unit), priors.bank);
  } catch (const AtBasePointError&) {
    out.score = 0.5;
    out.at_base = true;
  }
  return out;
}

void write_traces_json(const std::vector<ScoreTrace>& traces, const std::string& path) {
  nlohmann::json root = nlohmann::json::array();
  for (const auto& trace : traces) {
    root.push_back({{"video_id", trace.video_id},
                    {"clip_scores_init", trace.clip_scores_init},
                    {"clip_scores_final", trace.clip_scores_final},
                    {"frame_scores", trace.frame_scores}});
  }
  std::ofstream out(path);
  if (!out) throw Error("write_traces_json: cannot open " + path);
  out << root.dump(2) << '\n';
}

}  // namespace geovad
