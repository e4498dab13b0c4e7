#include "gpom/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpom/rng.hpp"

namespace gpom {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x, double mean, double sigma) {
  const double u = (x - mean) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

void BeamModelConfig::validate() const {
  if (!(sigma_hit > 0.0) || !(lambda_short > 0.0) || !(r_max > 0.0) || !(max_smear_width > 0.0))
    throw std::invalid_argument("BeamModelConfig: scale parameters must be positive");
  if (z_hit < 0.0 || z_short < 0.0 || z_max < 0.0 || z_rand < 0.0)
    throw std::invalid_argument("BeamModelConfig: negative mixture weight");
  const double sum = z_hit + z_short + z_max + z_rand;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("BeamModelConfig: mixture weights must sum to 1");
}

BeamModelConfig BeamModelConfig::normalized() const {
  const double sum = z_hit + z_short + z_max + z_rand;
  if (!(sum > 0.0)) throw std::invalid_argument("BeamModelConfig: weights sum to zero");
  BeamModelConfig out = *this;
  out.z_hit /= sum;
  out.z_short /= sum;
  out.z_max /= sum;
  out.z_rand /= sum;
  return out;
}

double beam_likelihood(double z, double expected, const BeamModelConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(z) || !std::isfinite(expected))
    throw std::invalid_argument("beam_likelihood: non-finite input");
  if (z < 0.0 || z > cfg.r_max || expected <= 0.0 || expected > cfg.r_max)
    throw std::invalid_argument("beam_likelihood: range outside [0, r_max]");

  // Hit: Gaussian around the expected range, truncated to [0, r_max].
  const double hit_mass = normal_cdf((cfg.r_max - expected) / cfg.sigma_hit) -
                          normal_cdf((0.0 - expected) / cfg.sigma_hit);
  const double p_hit = hit_mass > 0.0 ? normal_pdf(z, expected, cfg.sigma_hit) / hit_mass : 0.0;

  // Short: exponential truncated to [0, expected].
  double p_short = 0.0;
  if (z <= expected) {
    const double short_mass = 1.0 - std::exp(-cfg.lambda_short * expected);
    if (short_mass > 0.0)
      p_short = cfg.lambda_short * std::exp(-cfg.lambda_short * z) / short_mass;
  }

  // Max: mass spread over [r_max - w, r_max].
  const double w = std::min(cfg.max_smear_width, cfg.r_max);
  const double p_max = z >= cfg.r_max - w ? 1.0 / w : 0.0;

  const double p_rand = 1.0 / cfg.r_max;

  return cfg.z_hit * p_hit + cfg.z_short * p_short + cfg.z_max * p_max + cfg.z_rand * p_rand;
}

double unknown_cell_likelihood(double z, const BeamModelConfig& cfg) {
  if (z < 0.0 || z > cfg.r_max)
    throw std::invalid_argument("unknown_cell_likelihood: range outside [0, r_max]");
  return 1.0 / cfg.r_max;
}

Scan simulate_scan(const Pose2& true_pose, const GridSpec& grid,
                   const std::vector<double>& truth_occupancy, int n_z,
                   const BeamModelConfig& cfg, double range_sigma, std::uint64_t seed) {
  cfg.validate();
  if (n_z < 1) throw std::invalid_argument("simulate_scan: n_z must be >= 1");
  const auto cell = grid.world_to_cell(true_pose.position());
  if (!cell || truth_occupancy[grid.index(*cell)] >= 0.5)
    throw std::invalid_argument("simulate_scan: pose not in free space");

  Rng rng(seed);
  Scan scan;
  scan.pose = true_pose;
  scan.beams.reserve(n_z);
  for (int k = 0; k < n_z; ++k) {
    const double bearing = -M_PI + (k + 0.5) * (2.0 * M_PI / n_z);
    const Ray ray{true_pose.position(), normalize_angle(true_pose.heading + bearing), cfg.r_max};
    const RayTrace trace = cast_ray(ray, grid, truth_occupancy, 0.5);
    double range = trace.range;
    if (range_sigma > 0.0) range += rng.gaussian(0.0, range_sigma);
    range = std::clamp(range, 0.0, cfg.r_max);
    scan.beams.push_back({range, bearing});
  }
  return scan;
}

TrainingSet build_training_data(const Scan& scan, const TrainingConfig& cfg, std::uint64_t seed) {
  if (cfg.n_f_min < 0 || !(cfg.free_spacing > 0.0) || !(cfg.map_resolution > 0.0) ||
      !(cfg.r_max > 0.0))
    throw std::invalid_argument("build_training_data: invalid config");

  Rng rng(seed);
  TrainingSet out;
  const Vec2 pos = scan.pose.position();
  for (const Beam& beam : scan.beams) {
    if (beam.range <= 0.0) continue;
    const double angle = scan.pose.heading + beam.bearing;
    const Vec2 dir{std::cos(angle), std::sin(angle)};

    // A full-range reading is censored: no obstacle observed on this beam.
    const bool hit = beam.range < cfg.r_max - 1e-9;
    if (hit) out.occupied.push_back(pos + (beam.range + cfg.occupied_inset) * dir);

    // Free samples stay clear of the hit point by one map resolution.
    const double free_length = hit ? beam.range - cfg.map_resolution : beam.range;
    if (free_length <= 0.0) continue;
    const int n_f = std::max(cfg.n_f_min,
                             static_cast<int>(std::ceil(beam.range / cfg.free_spacing)));
    for (int j = 1; j <= n_f; ++j) {
      const double offset = cfg.equidistant ? (j - 0.5) * free_length / n_f
                                            : rng.uniform(0.0, free_length);
      out.free.push_back(pos + offset * dir);
    }
  }
  return out;
}

}  // namespace gpom
