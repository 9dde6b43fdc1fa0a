#include "geovad/sweep.hpp"

#include <fstream>

#include "geovad/errors.hpp"
#include "geovad/metrics.hpp"

namespace geovad {

void concat_frames(const std::vector<ScoreTrace>& traces, const FrameLabels& labels,
                   std::vector<double>* scores, std::vector<int>* truth) {
  scores->clear();
  truth->clear();
  for (const auto& trace : traces) {
    const auto it = labels.by_video.find(trace.video_id);
    if (it == labels.by_video.end())
      throw Error("concat_frames: no labels for video " + trace.video_id);
    if (it->second.size() != trace.frame_scores.size())
      throw DimensionMismatchError("concat_frames: label/frame count mismatch for video " +
                                   trace.video_id);
    scores->insert(scores->end(), trace.frame_scores.begin(), trace.frame_scores.end());
    truth->insert(truth->end(), it->second.begin(), it->second.end());
  }
}

std::vector<SweepRow> sweep(const FeatureDataset& dataset, const FrameLabels& labels,
                            const MatX& syn_normal, const MatX& syn_abn,
                            const PipelineConfig& base_config, const ParamGrid& grid) {
  if (grid.axes.empty()) throw ConfigError("sweep: empty parameter grid");
  const std::size_t total = grid.size();
  std::vector<SweepRow> rows(total);
  for (std::size_t point = 0; point < total; ++point) {
    // Decode the grid index, first axis slowest.
    SweepRow row;
    PipelineConfig config = base_config;
    std::size_t rest = point;
    std::size_t block = total;
    for (const auto& [key, values] : grid.axes) {
      block /= values.size();
      const std::size_t pick = rest / block;
      rest %= block;
      apply_config_key(config, key, values[pick], "<grid>", 0);
      row.assignment.emplace_back(key, values[pick]);
    }
    validate_config(config);
    const OfflineResult result = run_offline(dataset, syn_normal, syn_abn, config);
    std::vector<double> scores;
    std::vector<int> truth;
    concat_frames(result.traces, labels, &scores, &truth);
    row.auc = roc_auc(scores, truth);
    row.ap = average_precision(scores, truth);
    rows[point] = std::move(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_sweep_csv: cannot open " + path);
  if (rows.empty()) return;
  for (const auto& [key, value] : rows.front().assignment) out << key << ',';
  out << "auc,ap\n";
  out.precision(17);
  for (const auto& row : rows) {
    for (const auto& [key, value] : row.assignment) out << value << ',';
    out << row.auc << ',' << row.ap << '\n';
  }
}

}  // namespace geovad
