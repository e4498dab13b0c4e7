#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gpom/geometry.hpp"
#include "gpom/gp.hpp"
#include "gpom/sensor.hpp"

namespace gpom {

inline constexpr double kProbEpsilon = 1e-6;

/// Grid-indexed field of per-cell Gaussians plus squashed occupancy
/// probability. Unobserved cells hold the prior (mean 0, prior variance,
/// p = 0.5).
struct GaussianMap {
  GridSpec grid;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> prob;
  std::vector<std::uint8_t> observed;
  double prior_variance = 1e6;

  static GaussianMap prior(const GridSpec& grid, double prior_variance);
};

struct GpomConfig {
  double prior_variance = 1e6;
  double logistic_gamma = 1.0;      // shape of the occupancy squashing
  // Squash shape for the per-class maps (m_o, m_f). Their means rest near
  // zero over most of the map, and a sharp squash amplifies the slow
  // confidence drift of repeated fusion into a false obstacle bias; a soft
  // squash keeps the unknown-area baseline at 0.5 as the frontier score
  // expects.
  double class_gamma = 1.0;
  double window_half_extent = 4.0;  // m; typically the sensor max range
  TrainingConfig training;
  std::uint64_t training_seed = 0;  // used only for random free-point sampling
};

/// Point-wise BCM fusion of two Gaussian estimates (uninformative prior).
std::pair<double, double> fuse_bcm(double mean_a, double var_a, double mean_b, double var_b);

/// Uncertainty-moderated squashing: p = 1 / (1 + exp(-gamma * mu / sqrt(var))),
/// clamped to [eps, 1-eps]. Larger variance pulls p toward 0.5.
double logistic_occupancy(double mean, double variance, double gamma);

/// In-bounds cells whose centers lie in the axis-aligned square of side
/// 2*half_extent centered at the pose. Query points are the cell centers.
std::vector<Cell> test_data_window(const Pose2& pose, double half_extent, const GridSpec& grid);

enum class StepStatus { Updated, NoTrainingData, EmptyWindow };

/// One incremental update: train a single GP on the scan's labeled points,
/// predict over the test window, and fuse into the global map.
StepStatus igpom_step(GaussianMap& map, const Scan& scan, const Hyperparams& theta,
                      const GpomConfig& cfg);

struct MapPair {
  GaussianMap occupied;
  GaussianMap free;
  GaussianMap merged;

  static MapPair prior(const GridSpec& grid, double prior_variance);
};

/// Two-GP update: separate occupied (+1) and free (-1) models fused into
/// their own global maps, then merged cell-wise. A scan without hits skips
/// the occupied model.
StepStatus igpom2_step(MapPair& maps, const Scan& scan, const Hyperparams& theta_occupied,
                       const Hyperparams& theta_free, const GpomConfig& cfg);

/// Cell-wise BCM merge of the occupied and free maps plus squashing.
void merge_maps(const GaussianMap& occupied, const GaussianMap& free, double gamma,
                GaussianMap& merged);

/// Mean per-cell Jensen-Shannon divergence between two Bernoulli fields
/// (natural log); lies in [0, log 2].
double jsd(const std::vector<double>& p, const std::vector<double>& q);

/// Single GP trained on the concatenated data of all scans (hard cap at the
/// exact-GP limit); comparison oracle for the incremental pipeline.
GaussianMap batch_gpom(const std::vector<Scan>& scans, const Hyperparams& theta,
                       const GpomConfig& cfg, const GridSpec& grid);

struct RegenState {
  double cumulative_jsd = 0.0;
  double threshold = 0.05;  // nats
  std::vector<Scan> history;
  int regenerations = 0;
};

/// Accumulates the per-step JSD between the merged maps before and after an
/// update; past the threshold the map pair is rebuilt by replaying the scan
/// history from a fresh prior. Returns true when a rebuild happened.
bool maybe_regenerate(RegenState& state, const std::vector<double>& prob_before, MapPair& maps,
                      const Hyperparams& theta_occupied, const Hyperparams& theta_free,
                      const GpomConfig& cfg);

}  // namespace gpom
