#include "geovad/synth.hpp"

#include <cmath>

#include "geovad/errors.hpp"
#include "geovad/sphere.hpp"
#include "geovad/vmf.hpp"

namespace geovad::synth {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

VecX axis(Index dim, Index i) {
  VecX e = VecX::Zero(dim);
  e[i] = 1.0;
  return e;
}

VecX direction(Index dim, Index i, Index j, double angle_deg) {
  const double a = angle_deg * kDegToRad;
  VecX v = VecX::Zero(dim);
  v[i] = std::cos(a);
  v[j] = std::sin(a);
  return v;
}

// Scene direction for (video, status): a point at vis_cone_deg from the e3
// anchor, tangent direction on the (e4, e5) circle at the video's planar
// angle, tilted toward e6 for anomalous segments. Status separation is
// angular (not radial), so it survives spherical centering.
VecX scene_direction(const WorldSpec& spec, int video, bool anomalous) {
  const double phi = static_cast<double>(video) * spec.vis_video_spacing_deg * kDegToRad;
  VecX u = VecX::Zero(spec.dim);
  u[3] = std::cos(phi);
  u[4] = std::sin(phi);
  if (anomalous) {
    const double tilt = spec.vis_abn_tilt_deg * kDegToRad;
    u = std::cos(tilt) * u;
    u[5] += std::sin(tilt);
  }
  const double theta = spec.vis_cone_deg * kDegToRad;
  VecX anchor = axis(spec.dim, 2);
  return std::cos(theta) * anchor + std::sin(theta) * u;
}

// Per-role stream ids keep sampling deterministic however generation is
// ordered or parallelized.
enum Stream : std::uint64_t {
  kStreamCalib = 1'000'000,
  kStreamVideoBase = 16,
};

MatX sample_cluster_mix(const std::vector<ClusterSpec>& clusters, Index total,
                        std::uint64_t seed, std::uint64_t stream_base) {
  if (clusters.empty()) throw ConfigError("synth: class has no clusters");
  const Index dim = clusters.front().mean.size();
  MatX out(total, dim);
  Index row = 0;
  const auto k = static_cast<Index>(clusters.size());
  for (Index c = 0; c < k; ++c) {
    const Index n = total / k + (c < total % k ? 1 : 0);
    const MatX block = sample_vmf({clusters[static_cast<std::size_t>(c)].mean,
                                   clusters[static_cast<std::size_t>(c)].kappa},
                                  n, mix_seed(seed, stream_base + static_cast<std::uint64_t>(c)));
    out.middleRows(row, n) = block;
    row += n;
  }
  return out;
}

}  // namespace

LabeledFeatures gen_two_class(const WorldSpec& spec) {
  LabeledFeatures out;
  const MatX normal = sample_cluster_mix(spec.normal_clusters, spec.calib_per_class, spec.seed,
                                         kStreamCalib);
  const MatX abn = sample_cluster_mix(spec.abn_clusters, spec.calib_per_class, spec.seed,
                                      kStreamCalib + 1000);
  out.feats.resize(normal.rows() + abn.rows(), spec.dim);
  out.feats.topRows(normal.rows()) = normal;
  out.feats.bottomRows(abn.rows()) = abn;
  out.labels.assign(static_cast<std::size_t>(normal.rows()), 0);
  out.labels.insert(out.labels.end(), static_cast<std::size_t>(abn.rows()), 1);
  return out;
}

VecX rotate_domain(const VecX& point, const VecX& axis_a, const VecX& axis_b,
                   double angle_deg) {
  const double a = angle_deg * kDegToRad;
  const double pa = axis_a.dot(point);
  const double pb = axis_b.dot(point);
  return point + (std::cos(a) - 1.0) * (pa * axis_a + pb * axis_b) +
         std::sin(a) * (pa * axis_b - pb * axis_a);
}

MatX rotate_domain(const MatX& points, const VecX& axis_a, const VecX& axis_b,
                   double angle_deg) {
  MatX out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i)
    out.row(i) = rotate_domain(VecX(points.row(i).transpose()), axis_a, axis_b, angle_deg)
                     .transpose();
  return out;
}

ConicalSample gen_conical(Index dim, double target_std_deg, Index n, std::uint64_t seed) {
  if (target_std_deg <= 0.0)
    throw ConfigError("gen_conical: target angular std must be positive");
  const VecX mu = axis(dim, 0);
  const double target = target_std_deg * kDegToRad;

  auto measured_std = [&](double kappa) {
    const MatX pilot = sample_vmf({mu, kappa}, 1500, mix_seed(seed, 77));
    double sum_sq = 0.0;
    for (Index i = 0; i < pilot.rows(); ++i) {
      const double theta = sphere::geodesic_distance(pilot.row(i).transpose(), mu);
      sum_sq += theta * theta;
    }
    return std::sqrt(sum_sq / static_cast<double>(pilot.rows()));
  };

  // Angular std is monotone decreasing in kappa; bisect on log kappa.
  double lo = std::log(1.0);
  double hi = std::log(1e9);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (measured_std(std::exp(mid)) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  ConicalSample out;
  out.kappa = std::exp(0.5 * (lo + hi));
  out.feats = sample_vmf({mu, out.kappa}, n, mix_seed(seed, 78));
  return out;
}

World build_world(const WorldSpec& spec) {
  if (spec.dim < 3) throw ConfigError("build_world: dim must be >= 3");
  if (static_cast<int>(spec.anomaly_intervals.size()) != spec.videos)
    throw ConfigError("build_world: one anomaly interval entry per video required");

  World world;
  world.spec = spec;
  world.calib_normal =
      sample_cluster_mix(spec.normal_clusters, spec.calib_per_class, spec.seed, kStreamCalib);
  world.calib_abn = sample_cluster_mix(spec.abn_clusters, spec.calib_per_class, spec.seed,
                                       kStreamCalib + 1000);
  world.test.dim = spec.dim;

  const VecX e1 = axis(spec.dim, 0);
  const VecX e2 = axis(spec.dim, 1);
  const auto n_abn_clusters = static_cast<Index>(spec.abn_clusters.size());

  for (int v = 0; v < spec.videos; ++v) {
    const auto [ivl_begin, ivl_end] = spec.anomaly_intervals[static_cast<std::size_t>(v)];
    if (ivl_begin < 0 || ivl_end > spec.clips_per_video || ivl_begin > ivl_end)
      throw ConfigError("build_world: anomaly interval outside video");

    const std::uint64_t base = kStreamVideoBase * (static_cast<std::uint64_t>(v) + 1);
    Rng rng_norm(make_rng(spec.seed, base));
    Rng rng_abn(make_rng(spec.seed, base + 1));
    Rng rng_amb(make_rng(spec.seed, base + 2));
    Rng rng_vis(make_rng(spec.seed, base + 3));

    const Index abn_cluster = n_abn_clusters > 0 ? v % n_abn_clusters : 0;
    const VecX vis_norm = scene_direction(spec, v, false);
    const VecX vis_abn = scene_direction(spec, v, true);

    VideoFeatures video;
    video.id = "video_" + std::to_string(v);
    video.main.resize(spec.clips_per_video, spec.dim);
    video.visual.resize(spec.clips_per_video, spec.dim);
    std::vector<int> clip_labels(static_cast<std::size_t>(spec.clips_per_video), 0);

    for (int t = 0; t < spec.clips_per_video; ++t) {
      const bool in_interval = t >= ivl_begin && t < ivl_end;
      const bool in_ramp =
          in_interval && (t < ivl_begin + spec.amb_ramp || t >= ivl_end - spec.amb_ramp) &&
          !spec.amb_clusters.empty();
      clip_labels[static_cast<std::size_t>(t)] = in_interval ? 1 : 0;

      VecX main;
      if (in_ramp) {
        const auto amb_cluster =
            static_cast<std::size_t>(abn_cluster % static_cast<Index>(spec.amb_clusters.size()));
        main = sample_vmf_one({spec.amb_clusters[amb_cluster].mean,
                               spec.amb_clusters[amb_cluster].kappa},
                              rng_amb);
      } else if (in_interval) {
        const auto& cluster = spec.abn_clusters[static_cast<std::size_t>(abn_cluster)];
        main = sample_vmf_one({cluster.mean, cluster.kappa}, rng_abn);
      } else {
        const auto& cluster =
            spec.normal_clusters[static_cast<std::size_t>(v) % spec.normal_clusters.size()];
        main = sample_vmf_one({cluster.mean, cluster.kappa}, rng_norm);
      }
      VecX visual = sample_vmf_one({in_interval ? vis_abn : vis_norm, spec.vis_kappa}, rng_vis);

      if (spec.domain_rotation_deg != 0.0) {
        main = rotate_domain(main, e1, e2, spec.domain_rotation_deg);
        visual = rotate_domain(visual, e1, e2, spec.domain_rotation_deg);
      }
      video.main.row(t) = main.transpose();
      video.visual.row(t) = visual.transpose();
    }

    std::vector<int>& frames = world.labels.by_video[video.id];
    for (int t = 0; t < spec.clips_per_video; ++t)
      for (int f = 0; f < spec.frames_per_clip; ++f)
        frames.push_back(clip_labels[static_cast<std::size_t>(t)]);
    world.test.videos.push_back(std::move(video));
  }
  return world;
}

WorldSpec preset(const std::string& name, Index dim, std::uint64_t seed) {
  WorldSpec spec;
  spec.dim = dim;
  spec.seed = seed;

  auto interval_pattern = [&](int videos, int begin, int end) {
    spec.anomaly_intervals.assign(static_cast<std::size_t>(videos), {0, 0});
    for (int v = 1; v < videos; v += 2)
      spec.anomaly_intervals[static_cast<std::size_t>(v)] = {begin, end};
  };

  if (name == "A" || name == "C") {
    // Two well-separated classes, 60 degrees apart.
    spec.normal_clusters = {{direction(dim, 0, 1, 0.0), 100.0}};
    spec.abn_clusters = {{direction(dim, 0, 1, 60.0), 100.0}};
    spec.videos = 8;
    spec.clips_per_video = 64;
    interval_pattern(spec.videos, 20, 44);
    spec.calib_per_class = 1000;
    if (name == "C") spec.domain_rotation_deg = 5.0;
    return spec;
  }
  if (name == "B") {
    // One normal cluster, eight anomalous clusters fanned 45 degrees from it,
    // plus ambiguous transition clusters at the geodesic midpoints.
    spec.normal_clusters = {{direction(dim, 0, 1, 0.0), 100.0}};
    for (Index k = 0; k < 8; ++k) {
      spec.abn_clusters.push_back({direction(dim, 0, 2 + k, 45.0), 200.0});
      // Transition clips sit just abnormal of the arc midpoint so that
      // neighbor consensus resolves them consistently.
      spec.amb_clusters.push_back({direction(dim, 0, 2 + k, 24.75), 300.0});
    }
    spec.videos = 12;
    spec.clips_per_video = 100;
    spec.anomaly_intervals.assign(static_cast<std::size_t>(spec.videos), {0, 0});
    for (int v = 0; v < spec.videos; ++v)
      if (v % 3 != 0) spec.anomaly_intervals[static_cast<std::size_t>(v)] = {40, 60};
    spec.amb_ramp = 3;
    spec.calib_per_class = 1200;
    // Ablation direction is structural at clip granularity; frame smoothing
    // couples interval-edge frames to sharpened neighbors and adds rank
    // noise there, so this world's companion config disables it.
    spec.smooth_sigma_clips = 0.0;
    return spec;
  }
  if (name == "D") {
    // Conical world: overlapping narrow-cone classes, 3 degrees apart.
    const ConicalSample pilot = gen_conical(dim, 1.7, 1, seed);
    spec.normal_clusters = {{direction(dim, 0, 1, 0.0), pilot.kappa}};
    spec.abn_clusters = {{direction(dim, 0, 1, 3.0), pilot.kappa}};
    spec.videos = 6;
    spec.clips_per_video = 50;
    interval_pattern(spec.videos, 18, 34);
    spec.calib_per_class = 800;
    return spec;
  }
  throw ConfigError("preset: unknown world preset '" + name + "'");
}

std::vector<FeatureDataset> make_layer_stack(Index dim, int layers, int salient_layer,
                                             Index n_per_class, std::uint64_t seed) {
  if (layers < 1 || salient_layer < 0 || salient_layer >= layers)
    throw ConfigError("make_layer_stack: salient layer outside stack");
  std::vector<FeatureDataset> stack;
  const VecX shared = axis(dim, 0);
  const VecX separated = direction(dim, 0, 1, 40.0);
  for (int l = 0; l < layers; ++l) {
    // Non-salient layers draw both classes from one distribution; the salient
    // layer contrasts a tight normal class with a diffuse, displaced
    // anomalous one, separating the similarity-to-centroid distributions.
    const bool salient = l == salient_layer;
    const std::uint64_t base = 2'000'000 + 4 * static_cast<std::uint64_t>(l);
    FeatureDataset layer;
    layer.dim = dim;
    VideoFeatures norm_video;
    norm_video.id = "normal";
    norm_video.main =
        sample_vmf({shared, salient ? 400.0 : 50.0}, n_per_class, mix_seed(seed, base));
    norm_video.visual = norm_video.main;
    VideoFeatures abn_video;
    abn_video.id = "abnormal";
    abn_video.main = sample_vmf({salient ? separated : shared, salient ? 30.0 : 50.0},
                                n_per_class, mix_seed(seed, base + 1));
    abn_video.visual = abn_video.main;
    layer.videos.push_back(std::move(norm_video));
    layer.videos.push_back(std::move(abn_video));
    stack.push_back(std::move(layer));
  }
  return stack;
}

}  // namespace geovad::synth
