#include "gpom/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gpom/io.hpp"

namespace gpom {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected boolean, got: " + v);
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::vector<Field> schema() {
  auto d = [](double RunConfig::* member, const char* key) {
    return Field{key,
                 [member](RunConfig& c, const std::string& v) { c.*member = std::stod(v); },
                 [member](const RunConfig& c) { return format_double(c.*member); }};
  };
  auto i = [](int RunConfig::* member, const char* key) {
    return Field{key,
                 [member](RunConfig& c, const std::string& v) { c.*member = std::stoi(v); },
                 [member](const RunConfig& c) { return std::to_string(c.*member); }};
  };
  auto b = [](bool RunConfig::* member, const char* key) {
    return Field{key,
                 [member](RunConfig& c, const std::string& v) { c.*member = parse_bool(v); },
                 [member](const RunConfig& c) { return c.*member ? "true" : "false"; }};
  };
  auto s = [](std::string RunConfig::* member, const char* key) {
    return Field{key, [member](RunConfig& c, const std::string& v) { c.*member = v; },
                 [member](const RunConfig& c) { return c.*member; }};
  };
  auto nd = [](double NoiseConfig::* member, const char* key) {
    return Field{key,
                 [member](RunConfig& c, const std::string& v) { c.noise.*member = std::stod(v); },
                 [member](const RunConfig& c) { return format_double(c.noise.*member); }};
  };

  return {
      s(&RunConfig::environment, "environment"),
      d(&RunConfig::resolution, "resolution"),
      d(&RunConfig::spawn_x, "spawn_x"),
      d(&RunConfig::spawn_y, "spawn_y"),
      d(&RunConfig::spawn_heading, "spawn_heading"),
      s(&RunConfig::policy, "policy"),
      Field{"seed",
            [](RunConfig& c, const std::string& v) { c.seed = std::stoull(v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      i(&RunConfig::max_steps, "max_steps"),
      i(&RunConfig::scan_stride, "scan_stride"),
      b(&RunConfig::perfect_pose, "perfect_pose"),
      i(&RunConfig::snapshot_every, "snapshot_every"),
      i(&RunConfig::sensor_n_z, "sensor_n_z"),
      d(&RunConfig::sensor_r_max, "sensor_r_max"),
      nd(&NoiseConfig::range_sigma, "range_sigma"),
      nd(&NoiseConfig::odom_sigma_x, "odom_sigma_x"),
      nd(&NoiseConfig::odom_sigma_y, "odom_sigma_y"),
      nd(&NoiseConfig::odom_sigma_heading, "odom_sigma_heading"),
      d(&RunConfig::beam_sigma_hit, "beam_sigma_hit"),
      d(&RunConfig::beam_lambda_short, "beam_lambda_short"),
      d(&RunConfig::beam_z_hit, "beam_z_hit"),
      d(&RunConfig::beam_z_short, "beam_z_short"),
      d(&RunConfig::beam_z_max, "beam_z_max"),
      d(&RunConfig::beam_z_rand, "beam_z_rand"),
      d(&RunConfig::beam_max_smear_width, "beam_max_smear_width"),
      i(&RunConfig::n_f_min, "n_f_min"),
      d(&RunConfig::free_spacing, "free_spacing"),
      b(&RunConfig::training_equidistant, "training_equidistant"),
      d(&RunConfig::occupied_inset, "occupied_inset"),
      s(&RunConfig::kernel_family, "kernel_family"),
      d(&RunConfig::kernel_kappa, "kernel_kappa"),
      d(&RunConfig::kernel_kappa_occupied, "kernel_kappa_occupied"),
      d(&RunConfig::kernel_kappa_free, "kernel_kappa_free"),
      d(&RunConfig::kernel_signal_variance, "kernel_signal_variance"),
      d(&RunConfig::gp_noise_variance, "gp_noise_variance"),
      b(&RunConfig::optimize_hyperparams, "optimize_hyperparams"),
      s(&RunConfig::hyperparams_file, "hyperparams_file"),
      d(&RunConfig::window_half_extent, "window_half_extent"),
      d(&RunConfig::prior_variance, "prior_variance"),
      d(&RunConfig::logistic_gamma, "logistic_gamma"),
      d(&RunConfig::class_gamma, "class_gamma"),
      d(&RunConfig::jsd_threshold, "jsd_threshold"),
      d(&RunConfig::ogm_l_occ, "ogm_l_occ"),
      d(&RunConfig::ogm_l_free, "ogm_l_free"),
      d(&RunConfig::ogm_l_max, "ogm_l_max"),
      d(&RunConfig::frontier_beta, "frontier_beta"),
      d(&RunConfig::frontier_gamma, "frontier_gamma"),
      d(&RunConfig::frontier_threshold, "frontier_threshold"),
      i(&RunConfig::frontier_min_cluster, "frontier_min_cluster"),
      i(&RunConfig::frontier_max_clusters, "frontier_max_clusters"),
      d(&RunConfig::frontier_sigma_floor, "frontier_sigma_floor"),
      i(&RunConfig::mi_n_z, "mi_n_z"),
      d(&RunConfig::mi_r_max, "mi_r_max"),
      d(&RunConfig::mi_s_z, "mi_s_z"),
      d(&RunConfig::mi_p_o, "mi_p_o"),
      d(&RunConfig::mi_p_f, "mi_p_f"),
      d(&RunConfig::alpha, "alpha"),
      s(&RunConfig::scan_log, "scan_log"),
      i(&RunConfig::bench_seeds, "bench_seeds"),
      s(&RunConfig::bench_policies, "bench_policies"),
      i(&RunConfig::bench_workers, "bench_workers"),
  };
}

}  // namespace

void RunConfig::validate() const {
  if (!(resolution > 0.0)) throw std::invalid_argument("config: resolution must be > 0");
  if (max_steps < 0 || scan_stride < 1 || sensor_n_z < 1 || mi_n_z < 1)
    throw std::invalid_argument("config: counts out of range");
  policy_from_string(policy);
  kernel_family_from_string(kernel_family);
  beam_model().validate();
  mi().validate();
  if (!(alpha >= 0.0)) throw std::invalid_argument("config: alpha must be >= 0");
  if (!(jsd_threshold >= 0.0)) throw std::invalid_argument("config: jsd_threshold must be >= 0");
  gp_init().kernel.validate();
}

BeamModelConfig RunConfig::beam_model() const {
  BeamModelConfig cfg;
  cfg.sigma_hit = beam_sigma_hit;
  cfg.lambda_short = beam_lambda_short;
  cfg.r_max = sensor_r_max;
  cfg.z_hit = beam_z_hit;
  cfg.z_short = beam_z_short;
  cfg.z_max = beam_z_max;
  cfg.z_rand = beam_z_rand;
  cfg.max_smear_width = beam_max_smear_width;
  return cfg;
}

TrainingConfig RunConfig::training() const {
  TrainingConfig cfg;
  cfg.n_f_min = n_f_min;
  cfg.free_spacing = free_spacing;
  cfg.map_resolution = resolution;
  cfg.r_max = sensor_r_max;
  cfg.equidistant = training_equidistant;
  cfg.occupied_inset = occupied_inset;
  return cfg;
}

Hyperparams RunConfig::gp_init() const {
  Hyperparams params;
  params.kernel.family = kernel_family_from_string(kernel_family);
  params.kernel.length_scale = kernel_kappa;
  params.kernel.signal_variance = kernel_signal_variance;
  params.noise_variance = gp_noise_variance;
  return params;
}

GpomConfig RunConfig::gpom() const {
  GpomConfig cfg;
  cfg.prior_variance = prior_variance;
  cfg.logistic_gamma = logistic_gamma;
  cfg.class_gamma = class_gamma;
  cfg.window_half_extent = window_half_extent;
  cfg.training = training();
  cfg.training_seed = seed;
  return cfg;
}

InverseSensorModel RunConfig::inverse_sensor() const {
  return {ogm_l_occ, ogm_l_free, ogm_l_max, sensor_r_max};
}

FrontierConfig RunConfig::frontier() const {
  FrontierConfig cfg;
  cfg.beta = frontier_beta;
  cfg.gamma_f = frontier_gamma;
  cfg.threshold = frontier_threshold;
  cfg.min_cluster_size = frontier_min_cluster;
  cfg.max_clusters = frontier_max_clusters;
  cfg.p_f = mi_p_f;
  cfg.sigma_min_floor = frontier_sigma_floor;
  return cfg;
}

MiConfig RunConfig::mi() const { return {mi_n_z, mi_r_max, mi_s_z, mi_p_o, mi_p_f}; }

Hyperparams RunConfig::gp_init_occupied() const {
  Hyperparams params = gp_init();
  if (kernel_kappa_occupied > 0.0) params.kernel.length_scale = kernel_kappa_occupied;
  return params;
}

Hyperparams RunConfig::gp_init_free() const {
  Hyperparams params = gp_init();
  if (kernel_kappa_free > 0.0) params.kernel.length_scale = kernel_kappa_free;
  return params;
}

UtilityConfig RunConfig::utility() const { return {alpha}; }

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  const std::vector<Field> fields = schema();
  std::map<std::string, const Field*> by_key;
  for (const Field& f : fields) by_key[f.key] = &f;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": missing '='");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
    it->second->set(cfg, value);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_run_config(ss.str());

  // Relative file references resolve against the config's own directory so
  // configs work from any working directory.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative())
      p = (base / p).lexically_normal().string();
  };
  rebase(cfg.environment);
  rebase(cfg.scan_log);
  rebase(cfg.hyperparams_file);
  return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const Field& f : schema()) out << f.key << '=' << f.get(cfg) << '\n';
  return out.str();
}

}  // namespace gpom
