#include "geovad/config.hpp"

#include <fstream>
#include <sstream>

#include "geovad/errors.hpp"

namespace geovad {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& origin, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(origin + ": bad numeric value '" + value + "' at line " +
                     std::to_string(line_no));
  }
}

int parse_int(const std::string& value, const std::string& origin, std::size_t line_no) {
  const double v = parse_double(value, origin, line_no);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError(origin + ": expected integer, got '" + value + "' at line " +
                     std::to_string(line_no));
  return i;
}

bool parse_bool(const std::string& value, const std::string& origin, std::size_t line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError(origin + ": expected boolean, got '" + value + "' at line " +
                   std::to_string(line_no));
}

}  // namespace

void validate_config(const PipelineConfig& config) {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (config.k_n < 1 || config.k_a < 1) fail("k_n and k_a must be >= 1");
  if (config.alpha_g < 0.0 || config.alpha_g > 1.0) fail("alpha_g must be in [0, 1]");
  if (config.kappa < 0.0) fail("kappa must be >= 0");
  if (config.frames_per_clip < 1) fail("frames_per_clip must be >= 1");
  if (config.smooth_sigma_clips < 0.0) fail("smooth_sigma_clips must be >= 0");
  if (config.kmeans.n_init < 1 || config.kmeans.max_iter < 1)
    fail("kmeans_n_init and kmeans_max_iter must be >= 1");
  for (const auto* attn : {&config.hsa_attention, &config.sgp.attention}) {
    if (attn->tau < -1.0 || attn->tau > 1.0) fail("attention tau must be in [-1, 1]");
    if (attn->top_k < 1) fail("attention top_k must be >= 1");
    if (attn->temperature <= 0.0) fail("attention temperature must be > 0");
  }
  const SgpParams& sgp = config.sgp;
  if (sgp.beta_base <= 0.0 || sgp.beta_base >= 1.0) fail("beta_base must be in (0, 1)");
  if (!(sgp.r_min > 0.0 && sgp.r_min < sgp.r_max && sgp.r_max <= 0.5))
    fail("need 0 < r_min < r_max <= 0.5");
  if (sgp.lambda_r <= 0.0 || sgp.tau_r <= 0.0) fail("lambda_r and tau_r must be > 0");
  if (sgp.gamma_min <= 0.0 || sgp.gamma_min >= 1.0) fail("gamma_min must be in (0, 1)");
  if (sgp.delta_margin < 0.0) fail("delta_margin must be >= 0");
}

PipelineConfig config_preset(const std::string& name) {
  PipelineConfig config;  // defaults double as the unified preset
  if (name == "unified") {
    config.k_n = 12;
    config.k_a = 18;
    config.alpha_g = 0.5;
    config.sgp.beta_base = 0.5;
    return config;
  }
  if (name == "xd") {
    config.k_n = 10;
    config.k_a = 12;
    config.alpha_g = 0.80;
    config.sgp.beta_base = 0.15;
    return config;
  }
  if (name == "ucf") {
    config.k_n = 18;
    config.k_a = 12;
    config.alpha_g = 0.75;
    config.sgp.beta_base = 0.50;
    return config;
  }
  if (name == "ubnormal") {
    config.k_n = 12;
    config.k_a = 20;
    config.alpha_g = 0.35;
    config.enable_sgp = false;
    return config;
  }
  throw ConfigError("config_preset: unknown preset '" + name + "'");
}

void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value,
                      const std::string& origin, std::size_t line_no) {
  if (key == "preset") {
    const PipelineConfig base = config_preset(value);
    config = base;
  } else if (key == "k_n") {
    config.k_n = parse_int(value, origin, line_no);
  } else if (key == "k_a") {
    config.k_a = parse_int(value, origin, line_no);
  } else if (key == "alpha_g") {
    config.alpha_g = parse_double(value, origin, line_no);
  } else if (key == "kappa") {
    config.kappa = parse_double(value, origin, line_no);
  } else if (key == "beta_base") {
    config.sgp.beta_base = parse_double(value, origin, line_no);
  } else if (key == "enable_hsa") {
    config.enable_hsa = parse_bool(value, origin, line_no);
  } else if (key == "enable_sgp") {
    config.enable_sgp = parse_bool(value, origin, line_no);
  } else if (key == "frames_per_clip") {
    config.frames_per_clip = parse_int(value, origin, line_no);
  } else if (key == "smooth_sigma_clips") {
    config.smooth_sigma_clips = parse_double(value, origin, line_no);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_double(value, origin, line_no));
  } else if (key == "mode") {
    if (value == "offline") {
      config.mode = Mode::offline;
    } else if (value == "online") {
      config.mode = Mode::online;
    } else {
      throw ParseError(origin + ": mode must be offline/online at line " +
                       std::to_string(line_no));
    }
  } else if (key == "hsa_tau") {
    config.hsa_attention.tau = parse_double(value, origin, line_no);
  } else if (key == "hsa_top_k") {
    config.hsa_attention.top_k = parse_int(value, origin, line_no);
  } else if (key == "hsa_temperature") {
    config.hsa_attention.temperature = parse_double(value, origin, line_no);
  } else if (key == "hsa_exclude_self") {
    config.hsa_attention.exclude_self = parse_bool(value, origin, line_no);
  } else if (key == "sgp_tau") {
    config.sgp.attention.tau = parse_double(value, origin, line_no);
  } else if (key == "sgp_top_k") {
    config.sgp.attention.top_k = parse_int(value, origin, line_no);
  } else if (key == "sgp_temperature") {
    config.sgp.attention.temperature = parse_double(value, origin, line_no);
  } else if (key == "sgp_exclude_self") {
    config.sgp.attention.exclude_self = parse_bool(value, origin, line_no);
  } else if (key == "r_min") {
    config.sgp.r_min = parse_double(value, origin, line_no);
  } else if (key == "r_max") {
    config.sgp.r_max = parse_double(value, origin, line_no);
  } else if (key == "lambda_r") {
    config.sgp.lambda_r = parse_double(value, origin, line_no);
  } else if (key == "tau_r") {
    config.sgp.tau_r = parse_double(value, origin, line_no);
  } else if (key == "gamma_min") {
    config.sgp.gamma_min = parse_double(value, origin, line_no);
  } else if (key == "delta_margin") {
    config.sgp.delta_margin = parse_double(value, origin, line_no);
  } else if (key == "kmeans_n_init") {
    config.kmeans.n_init = parse_int(value, origin, line_no);
  } else if (key == "kmeans_max_iter") {
    config.kmeans.max_iter = parse_int(value, origin, line_no);
  } else {
    throw UnknownKeyError(origin + ": unknown key '" + key + "' at line " +
                          std::to_string(line_no));
  }
}

PipelineConfig parse_config_text(const std::string& text, const std::string& origin) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ": expected key=value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_config_key(config, key, value, origin, line_no);
  }
  validate_config(config);
  return config;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse_config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

ParamGrid parse_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse_grid: cannot open " + path);
  ParamGrid grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ": expected key=v1,v2,... at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    std::vector<std::string> values;
    std::istringstream rest(line.substr(eq + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      item = trim(item);
      if (!item.empty()) values.push_back(item);
    }
    if (values.empty())
      throw ParseError(path + ": empty value list at line " + std::to_string(line_no));
    grid.axes.emplace_back(key, std::move(values));
  }
  return grid;
}

}  // namespace geovad
