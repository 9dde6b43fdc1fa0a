#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geovad/io.hpp"
#include "geovad/types.hpp"

namespace geovad::synth {

struct ClusterSpec {
  VecX mean;     // unit direction
  double kappa;  // concentration > 0
};

// A reproducible two-class feature world: main-feature clusters per class,
// per-video anomaly intervals with optional ambiguous transition clips, and a
// visual-scene stream driving attention.
struct WorldSpec {
  Index dim = 16;
  std::vector<ClusterSpec> normal_clusters;
  std::vector<ClusterSpec> abn_clusters;
  std::vector<ClusterSpec> amb_clusters;  // transition clips at interval edges
  int videos = 8;
  int clips_per_video = 64;
  std::vector<std::pair<int, int>> anomaly_intervals;  // [begin, end) per video; empty pair = none
  int amb_ramp = 0;  // transition clips at each interval edge
  int calib_per_class = 1000;
  double domain_rotation_deg = 0.0;  // rotation of test features in the (e1, e2) plane
  double vis_kappa = 2000.0;
  double vis_cone_deg = 45.0;        // scene distance from the visual anchor
  double vis_video_spacing_deg = 40.0;  // planar angle between consecutive videos' scenes
  double vis_abn_tilt_deg = 55.0;    // tangent tilt of anomalous-segment scenes
  int frames_per_clip = 4;
  double smooth_sigma_clips = 1.0;  // companion-config smoothing width
  std::uint64_t seed = 42;
};

struct LabeledFeatures {
  MatX feats;
  std::vector<int> labels;  // 1 = anomalous
};

struct World {
  FeatureDataset test;
  FrameLabels labels;
  MatX calib_normal;  // main-feature calibration samples
  MatX calib_abn;
  WorldSpec spec;
};

// Labeled per-class samples from the world's cluster mixture (calibration
// oracle); calib_per_class samples per class split across clusters.
LabeledFeatures gen_two_class(const WorldSpec& spec);

// Givens rotation in the plane spanned by two orthonormal axes; an isometry
// of the sphere, so norms and pairwise geodesic distances are preserved.
MatX rotate_domain(const MatX& points, const VecX& axis_a, const VecX& axis_b,
                   double angle_deg);
VecX rotate_domain(const VecX& point, const VecX& axis_a, const VecX& axis_b,
                   double angle_deg);

// Single-cluster sample whose angular standard deviation (root mean squared
// geodesic distance from the generating mean) approximates the target;
// concentration calibrated by bisection. Rejects non-positive targets.
struct ConicalSample {
  MatX feats;
  double kappa;  // calibrated concentration
};
ConicalSample gen_conical(Index dim, double target_std_deg, Index n, std::uint64_t seed);

// Full reproducible world: test videos (dual streams), frame labels and
// calibration sets.
World build_world(const WorldSpec& spec);

// Named presets: A well-separated, B diverse anomalies with ambiguous
// transition clips, C domain-shift (A plus a rotated test domain), D conical.
WorldSpec preset(const std::string& name, Index dim = 16, std::uint64_t seed = 42);

// Multi-layer calibration stack for layer probing: every layer except
// salient_layer draws both classes from one shared distribution; the salient
// layer is class-separated. Videos are named "normal" / "abnormal".
std::vector<FeatureDataset> make_layer_stack(Index dim, int layers, int salient_layer,
                                             Index n_per_class, std::uint64_t seed);

}  // namespace geovad::synth
