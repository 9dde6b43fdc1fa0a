#pragma once

#include <map>
#include <string>
#include <vector>

#include "geovad/types.hpp"

namespace geovad {

// Dual-stream per-clip features of one video, one clip per row.
struct VideoFeatures {
  std::string id;
  MatX main;    // T x D
  MatX visual;  // T x D
};

struct FeatureDataset {
  Index dim = 0;
  std::vector<VideoFeatures> videos;

  Index total_clips() const {
    Index total = 0;
    for (const auto& v : videos) total += v.main.rows();
    return total;
  }
};

// Feature container format, little-endian. Header: magic "GVF1", u32
// version=1, u32 D, u32 stream_count=2, u32 video_count; per video: u32 name
// length, UTF-8 name, u32 T, then T*D f32 main features, then T*D f32 visual
// features. Write-read round trips are bit-exact.
void write_features(const FeatureDataset& dataset, const std::string& path);
FeatureDataset read_features(const std::string& path);

// Multi-layer variant, magic "GVFL": u32 layer_count precedes the per-layer
// blocks, each block holding the full per-video section of one layer.
void write_features_multilayer(const std::vector<FeatureDataset>& layers,
                               const std::string& path);
std::vector<FeatureDataset> read_features_multilayer(const std::string& path);

// Frame-level ground truth keyed by video id; label in {0, 1}.
struct FrameLabels {
  std::map<std::string, std::vector<int>> by_video;
};

void write_labels_csv(const FrameLabels& labels, const std::string& path);
FrameLabels read_labels_csv(const std::string& path);

// Flat per-frame scores CSV with header "video_id,frame_index,score".
struct FrameScores {
  std::vector<std::pair<std::string, std::vector<double>>> by_video;
};

void write_scores_csv(const FrameScores& scores, const std::string& path);
FrameScores read_scores_csv(const std::string& path);

// Calibration priors: unified main-feature mean and visual mean, magic
// "GVPR", u32 version=1, u32 D, then 2*D f32 values. Means are re-normalized
// to unit length on load.
struct Priors {
  VecX unified_mean;
  VecX visual_mean;
};

void save_priors(const Priors& priors, const std::string& path);
Priors load_priors(const std::string& path);

}  // namespace geovad
