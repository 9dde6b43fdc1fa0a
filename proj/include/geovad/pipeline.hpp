#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geovad/attention.hpp"
#include "geovad/io.hpp"
#include "geovad/prototypes.hpp"
#include "geovad/sgp.hpp"
#include "geovad/types.hpp"

namespace geovad {

enum class Mode { offline, online };

struct PipelineConfig {
  int k_n = 12;
  int k_a = 18;
  double alpha_g = 0.5;
  double kappa = 10.0;
  AttentionParams hsa_attention{0.70, 20, 1.0, true};
  SgpParams sgp{};
  bool enable_hsa = true;
  bool enable_sgp = true;
  int frames_per_clip = 4;
  double smooth_sigma_clips = 1.0;
  std::uint64_t seed = 42;
  Mode mode = Mode::offline;
  KMeansOptions kmeans{};
};

struct CalibrationPriors {
  VecX unified_mean;  // base point for main-feature centering
  VecX visual_mean;   // base point for visual-feature centering
  PrototypeBank bank;
};

struct ScoreTrace {
  std::string video_id;
  std::vector<double> clip_scores_init;
  std::vector<double> clip_scores_final;
  std::vector<double> frame_scores;
};

struct OfflineResult {
  std::vector<ScoreTrace> traces;
  CalibrationPriors priors;
  Index at_base_count = 0;  // clips that coincided with the centering base
};

// Row-wise l2 normalization (raises on zero rows).
MatX normalize_rows(const MatX& feats);

// Centers every row at the base point; rows coinciding with the base keep
// their normalized feature unchanged and bump the diagnostic counter.
MatX center_rows(const MatX& normalized, const VecX& base, Index* at_base_count = nullptr);

// Clip scores repeated frames_per_clip times, then Gaussian-smoothed with
// standard deviation sigma_clips * frames_per_clip frames (kernel truncated
// at radius ceil(4 sigma), weights normalized, reflective boundary), clamped
// to [0, 1]. sigma_clips = 0 skips smoothing.
std::vector<double> expand_and_smooth(const std::vector<double>& clip_scores,
                                      int frames_per_clip, double sigma_clips);

// Calibration: pools normalized synthetic and (offline mode) real main
// features for the unified mean, computes the test-only visual mean, and
// calibrates the prototype bank on the centered synthetic features. In
// online mode the unified mean uses synthetic features only and the dataset
// may be empty.
CalibrationPriors compute_priors(const FeatureDataset& dataset, const MatX& syn_normal,
                                 const MatX& syn_abn, const PipelineConfig& config);

// Stages S3-S6 given fixed priors: centering, optional cross-video HSA,
// initial vMF scores, optional per-video SGP, frame expansion + smoothing.
OfflineResult score_dataset(const FeatureDataset& dataset, const CalibrationPriors& priors,
                            const PipelineConfig& config);

// Full offline pipeline (S1-S6).
OfflineResult run_offline(const FeatureDataset& dataset, const MatX& syn_normal,
                          const MatX& syn_abn, const PipelineConfig& config);

struct OnlineScore {
  double score = 0.5;
  bool at_base = false;  // clip coincided with the centering base
};

// Stateless per-clip scoring for the streaming mode: center at the
// (synthetic-only) unified mean, score with the bank.
OnlineScore score_clip_online(const VecX& raw_main, const CalibrationPriors& priors);

void write_traces_json(const std::vector<ScoreTrace>& traces, const std::string& path);

}  // namespace geovad
