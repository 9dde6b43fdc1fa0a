#pragma once

#include <string>
#include <vector>

#include "geovad/pipeline.hpp"

namespace geovad {

// Flat key=value configuration, one key per line, '#' comments. Unknown keys
// are rejected; missing keys keep documented defaults. A "preset" key loads a
// named base configuration first; later keys override it.
PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

// Named presets: xd, ucf, ubnormal (SGP disabled), unified.
PipelineConfig config_preset(const std::string& name);

// Range checks on every knob; raises ConfigError on violations. Called by
// the parser and the sweep harness.
void validate_config(const PipelineConfig& config);

// Applies a single key=value assignment. Shared by the parser and the sweep
// harness.
void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value,
                      const std::string& origin, std::size_t line_no);

// Parameter grid: lines of key=v1,v2,...; the Cartesian product enumerates
// rows with the first key as the slowest axis.
struct ParamGrid {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;

  std::size_t size() const {
    std::size_t total = axes.empty() ? 0 : 1;
    for (const auto& [key, values] : axes) total *= values.size();
    return total;
  }
};

ParamGrid parse_grid(const std::string& path);

}  // namespace geovad
