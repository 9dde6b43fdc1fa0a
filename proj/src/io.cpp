#include "geovad/io.hpp"

#include <fstream>
#include <sstream>

#include "geovad/errors.hpp"
#include "geovad/io_detail.hpp"

namespace geovad {

namespace {

void write_video_block(std::ostream& out, const VideoFeatures& video) {
  io_detail::write_u32(out, static_cast<std::uint32_t>(video.id.size()));
  out.write(video.id.data(), static_cast<std::streamsize>(video.id.size()));
  io_detail::write_u32(out, static_cast<std::uint32_t>(video.main.rows()));
  io_detail::write_f32_matrix(out, video.main);
  io_detail::write_f32_matrix(out, video.visual);
}

VideoFeatures read_video_block(io_detail::Reader& reader, Index dim) {
  VideoFeatures video;
  const std::uint32_t name_len = reader.u32();
  video.id = reader.bytes(name_len);
  const auto t = static_cast<Index>(reader.u32());
  if (t < 1) throw TruncatedFileError("feature file: video with zero clips");
  video.main = reader.f32_matrix(t, dim);
  video.visual = reader.f32_matrix(t, dim);
  return video;
}

void check_dataset(const FeatureDataset& dataset) {
  for (const auto& v : dataset.videos) {
    if (v.main.rows() != v.visual.rows() || v.main.cols() != dataset.dim ||
        v.visual.cols() != dataset.dim || v.main.rows() < 1)
      throw DimensionMismatchError("feature dataset: inconsistent video " + v.id);
  }
}

}  // namespace

void write_features(const FeatureDataset& dataset, const std::string& path) {
  check_dataset(dataset);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_features: cannot open " + path);
  io_detail::write_magic(out, "GVF1");
  io_detail::write_u32(out, 1);
  io_detail::write_u32(out, static_cast<std::uint32_t>(dataset.dim));
  io_detail::write_u32(out, 2);
  io_detail::write_u32(out, static_cast<std::uint32_t>(dataset.videos.size()));
  for (const auto& video : dataset.videos) write_video_block(out, video);
}

FeatureDataset read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_features: cannot open " + path);
  io_detail::Reader reader(in, path);
  reader.expect_magic("GVF1");
  if (reader.u32() != 1) throw BadMagicError(path + ": unsupported version");
  FeatureDataset dataset;
  dataset.dim = static_cast<Index>(reader.u32());
  if (reader.u32() != 2) throw BadMagicError(path + ": unsupported stream count");
  const std::uint32_t video_count = reader.u32();
  dataset.videos.reserve(video_count);
  for (std::uint32_t v = 0; v < video_count; ++v)
    dataset.videos.push_back(read_video_block(reader, dataset.dim));
  return dataset;
}

void write_features_multilayer(const std::vector<FeatureDataset>& layers,
                               const std::string& path) {
  if (layers.empty()) throw Error("write_features_multilayer: no layers");
  for (const auto& layer : layers) {
    check_dataset(layer);
    if (layer.dim != layers.front().dim ||
        layer.videos.size() != layers.front().videos.size())
      throw DimensionMismatchError("multilayer dataset: inconsistent layers");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_features_multilayer: cannot open " + path);
  io_detail::write_magic(out, "GVFL");
  io_detail::write_u32(out, 1);
  io_detail::write_u32(out, static_cast<std::uint32_t>(layers.front().dim));
  io_detail::write_u32(out, 2);
  io_detail::write_u32(out, static_cast<std::uint32_t>(layers.front().videos.size()));
  io_detail::write_u32(out, static_cast<std::uint32_t>(layers.size()));
  for (const auto& layer : layers)
    for (const auto& video : layer.videos) write_video_block(out, video);
}

std::vector<FeatureDataset> read_features_multilayer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_features_multilayer: cannot open " + path);
  io_detail::Reader reader(in, path);
  reader.expect_magic("GVFL");
  if (reader.u32() != 1) throw BadMagicError(path + ": unsupported version");
  const auto dim = static_cast<Index>(reader.u32());
  if (reader.u32() != 2) throw BadMagicError(path + ": unsupported stream count");
  const std::uint32_t video_count = reader.u32();
  const std::uint32_t layer_count = reader.u32();
  if (layer_count == 0) throw TruncatedFileError(path + ": zero layers");
  std::vector<FeatureDataset> layers(layer_count);
  for (auto& layer : layers) {
    layer.dim = dim;
    layer.videos.reserve(video_count);
    for (std::uint32_t v = 0; v < video_count; ++v)
      layer.videos.push_back(read_video_block(reader, dim));
  }
  return layers;
}

void write_labels_csv(const FrameLabels& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_labels_csv: cannot open " + path);
  out << "video_id,frame_index,label\n";
  for (const auto& [id, frames] : labels.by_video)
    for (std::size_t f = 0; f < frames.size(); ++f)
      out << id << ',' << f << ',' << frames[f] << '\n';
}

FrameLabels read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_labels_csv: cannot open " + path);
  FrameLabels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;  // header
    std::istringstream row(line);
    std::string id, frame_str, label_str;
    if (!std::getline(row, id, ',') || !std::getline(row, frame_str, ',') ||
        !std::getline(row, label_str))
      throw ParseError(path + ": malformed row at line " + std::to_string(line_no));
    const int label = std::stoi(label_str);
    if (label != 0 && label != 1)
      throw ParseError(path + ": label must be 0/1 at line " + std::to_string(line_no));
    auto& frames = labels.by_video[id];
    const auto frame = static_cast<std::size_t>(std::stoul(frame_str));
    if (frames.size() <= frame) frames.resize(frame + 1, 0);
    frames[frame] = label;
  }
  return labels;
}

void write_scores_csv(const FrameScores& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_scores_csv: cannot open " + path);
  out << "video_id,frame_index,score\n";
  out.precision(17);
  for (const auto& [id, frames] : scores.by_video)
    for (std::size_t f = 0; f < frames.size(); ++f)
      out << id << ',' << f << ',' << frames[f] << '\n';
}

FrameScores read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_scores_csv: cannot open " + path);
  FrameScores scores;
  std::string line;
  std::size_t line_no = 0;
  std::string current;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream row(line);
    std::string id, frame_str, score_str;
    if (!std::getline(row, id, ',') || !std::getline(row, frame_str, ',') ||
        !std::getline(row, score_str))
      throw ParseError(path + ": malformed row at line " + std::to_string(line_no));
    if (scores.by_video.empty() || scores.by_video.back().first != id)
      scores.by_video.emplace_back(id, std::vector<double>{});
    scores.by_video.back().second.push_back(std::stod(score_str));
  }
  return scores;
}

void save_priors(const Priors& priors, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_priors: cannot open " + path);
  io_detail::write_magic(out, "GVPR");
  io_detail::write_u32(out, 1);
  io_detail::write_u32(out, static_cast<std::uint32_t>(priors.unified_mean.size()));
  for (Index i = 0; i < priors.unified_mean.size(); ++i)
    io_detail::write_f32(out, static_cast<float>(priors.unified_mean[i]));
  for (Index i = 0; i < priors.visual_mean.size(); ++i)
    io_detail::write_f32(out, static_cast<float>(priors.visual_mean[i]));
}

Priors load_priors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_priors: cannot open " + path);
  io_detail::Reader reader(in, path);
  reader.expect_magic("GVPR");
  if (reader.u32() != 1) throw BadMagicError(path + ": unsupported version");
  const auto dim = static_cast<Index>(reader.u32());
  Priors priors;
  priors.unified_mean = reader.f32_matrix(1, dim).row(0).transpose();
  priors.visual_mean = reader.f32_matrix(1, dim).row(0).transpose();
  priors.unified_mean.normalize();
  priors.visual_mean.normalize();
  return priors;
}

}  // namespace geovad
