#pragma once

#include <string>
#include <vector>

#include "geovad/config.hpp"
#include "geovad/io.hpp"
#include "geovad/pipeline.hpp"

namespace geovad {

struct SweepRow {
  std::vector<std::pair<std::string, std::string>> assignment;
  double auc = 0.0;
  double ap = 0.0;
};

// Runs the offline pipeline at every grid point (Cartesian product, first
// axis slowest) and evaluates frame-level AUC/AP against the labels over all
// concatenated videos. Row order follows the grid index.
std::vector<SweepRow> sweep(const FeatureDataset& dataset, const FrameLabels& labels,
                            const MatX& syn_normal, const MatX& syn_abn,
                            const PipelineConfig& base_config, const ParamGrid& grid);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

// Concatenates per-video frame scores and ground truth in trace order.
void concat_frames(const std::vector<ScoreTrace>& traces, const FrameLabels& labels,
                   std::vector<double>* scores, std::vector<int>* truth);

}  // namespace geovad
