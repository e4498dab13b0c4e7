#pragma once

#include <cstdint>
#include <string>

#include "gpom/explore.hpp"
#include "gpom/frontier.hpp"
#include "gpom/gp.hpp"
#include "gpom/gpom.hpp"
#include "gpom/mi.hpp"
#include "gpom/ogm.hpp"
#include "gpom/sensor.hpp"

namespace gpom {

struct NoiseConfig {
  double odom_sigma_x = 0.1;        // m per unit step
  double odom_sigma_y = 0.1;        // m per unit step
  double odom_sigma_heading = 0.0026;  // rad per unit step
  double range_sigma = 0.03;        // m

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// Flat key=value run configuration; unknown keys are rejected. Defaults are
/// the structured-indoor parameter set.
struct RunConfig {
  // run
  std::string environment;
  double resolution = 1.0;
  double spawn_x = 0.0, spawn_y = 0.0, spawn_heading = 0.0;
  std::string policy = "GPMI";
  std::uint64_t seed = 1;
  int max_steps = 150;
  int scan_stride = 3;
  bool perfect_pose = false;
  int snapshot_every = 0;

  // sensing
  int sensor_n_z = 36;
  double sensor_r_max = 8.0;
  NoiseConfig noise;

  // beam mixture model
  double beam_sigma_hit = 0.03;
  double beam_lambda_short = 0.2;
  double beam_z_hit = 0.7, beam_z_short = 0.1, beam_z_max = 0.1, beam_z_rand = 0.1;
  double beam_max_smear_width = 0.3;

  // training data
  int n_f_min = 2;
  double free_spacing = 1.0;
  bool training_equidistant = true;
  double occupied_inset = 0.0;

  // gp
  std::string kernel_family = "matern32";
  double kernel_kappa = 1.0;
  // Per-class length scales for the two-model mapper; 0 falls back to
  // kernel_kappa. Thin obstacles want a shorter scale than open free space.
  double kernel_kappa_occupied = 0.0;
  double kernel_kappa_free = 0.0;
  double kernel_signal_variance = 1.0;
  double gp_noise_variance = 0.01;
  bool optimize_hyperparams = true;
  std::string hyperparams_file;
  double window_half_extent = 8.0;

  // gpom
  double prior_variance = 1e6;
  double logistic_gamma = 1.0;
  double class_gamma = 1.0;
  double jsd_threshold = 0.05;

  // ogm baseline
  double ogm_l_occ = 0.8472978603872037;
  double ogm_l_free = -0.8472978603872037;
  double ogm_l_max = 10.0;

  // frontier
  double frontier_beta = 3.0;
  double frontier_gamma = 10.0;
  double frontier_threshold = 0.6;
  int frontier_min_cluster = 14;
  int frontier_max_clusters = 20;
  double frontier_sigma_floor = 0.0;

  // mi + utility
  int mi_n_z = 36;
  double mi_r_max = 4.0;
  double mi_s_z = 10.0 / 3.0;
  double mi_p_o = 0.65;
  double mi_p_f = 0.35;
  double alpha = 0.1;

  // cmd_map input
  std::string scan_log;

  // bench
  int bench_seeds = 10;
  std::string bench_policies = "NF,OGMI,GPNF,GPMI";
  int bench_workers = 0;  // 0 = hardware concurrency

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  void validate() const;  // throws on out-of-range values

  BeamModelConfig beam_model() const;
  TrainingConfig training() const;
  Hyperparams gp_init() const;
  Hyperparams gp_init_occupied() const;
  Hyperparams gp_init_free() const;
  GpomConfig gpom() const;
  InverseSensorModel inverse_sensor() const;
  FrontierConfig frontier() const;
  MiConfig mi() const;
  UtilityConfig utility() const;
  Pose2 spawn() const { return {spawn_x, spawn_y, spawn_heading}; }
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);

}  // namespace gpom
