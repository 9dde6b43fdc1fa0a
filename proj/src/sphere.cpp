#include "geovad/sphere.hpp"

#include <algorithm>

#include "geovad/parallel.hpp"

namespace geovad::sphere {

namespace {

struct ChunkPartial {
  VecX grad_sum;
  double obj_sum = 0.0;
  double max_dist = 0.0;
};

// One pass over the data: per-point log maps accumulated per chunk, then
// combined in chunk order so the sum is identical for every worker count.
void accumulate(const MatX& points, const VecX& mu, VecX& grad, double& objective,
                double& max_dist) {
  const Index n = points.rows();
  const Index chunk = 256;
  const Index n_chunks = (n + chunk - 1) / chunk;
  std::vector<ChunkPartial> partials(static_cast<std::size_t>(n_chunks));
  parallel::for_chunks(n, chunk, [&](Index b, Index e) {
    ChunkPartial part;
    part.grad_sum = VecX::Zero(points.cols());
    for (Index i = b; i < e; ++i) {
      const auto x = points.row(i).transpose();
      const double c = clamp_unit(mu.dot(x));
      const double theta = std::acos(c);
      part.obj_sum += theta * theta;
      part.max_dist = std::max(part.max_dist, theta);
      if (theta < kSmallAngleTol) {
        part.grad_sum += x - mu;
      } else {
        part.grad_sum += (theta / std::sin(theta)) * (x - c * mu);
      }
    }
    partials[static_cast<std::size_t>(b / chunk)] = std::move(part);
  });
  grad = VecX::Zero(points.cols());
  objective = 0.0;
  max_dist = 0.0;
  for (const auto& part : partials) {
    grad += part.grad_sum;
    objective += part.obj_sum;
    max_dist = std::max(max_dist, part.max_dist);
  }
  grad /= static_cast<double>(n);
  objective /= static_cast<double>(n);
}

}  // namespace

FrechetResult frechet_mean(const MatX& points, const FrechetOptions& opts) {
  if (points.rows() == 0) throw DegenerateMeanError("frechet_mean: empty point set");
  VecX mean = points.colwise().mean().transpose();
  const double mean_norm = mean.norm();
  if (mean_norm < kZeroNormTol)
    throw DegenerateMeanError("frechet_mean: Euclidean mean vanished");
  VecX mu = mean / mean_norm;

  FrechetResult result;
  VecX grad;
  double objective = 0.0;
  double max_dist = 0.0;
  for (int t = 0; t <= opts.t_max; ++t) {
    accumulate(points, mu, grad, objective, max_dist);
    if (t == 0 && max_dist >= M_PI / 2.0 - opts.hemisphere_margin)
      throw HemisphereViolationError(
          "frechet_mean: points not contained in the open hemisphere around the "
          "initialization");
    result.objectives.push_back(objective);
    result.final_gradient_norm = grad.norm();
    if (result.final_gradient_norm < opts.eps || t == opts.t_max) break;
    mu = exp_map(mu, grad);
    result.iterations = t + 1;
  }
  result.mean = std::move(mu);
  return result;
}

FrechetResult frechet_mean(const std::vector<VecX>& points, const FrechetOptions& opts) {
  if (points.empty()) throw DegenerateMeanError("frechet_mean: empty point set");
  MatX m(static_cast<Index>(points.size()), points.front().size());
  for (Index i = 0; i < m.rows(); ++i) m.row(i) = points[static_cast<std::size_t>(i)].transpose();
  return frechet_mean(m, opts);
}

}  // namespace geovad::sphere
