#include "gpom/gpom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpom {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

double bernoulli_entropy(double p) {
  p = clamp_prob(p);
  return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
}

// Fuses GP predictions at window cells into a global map.
void fuse_predictions(GaussianMap& map, const std::vector<Cell>& cells,
                      const std::vector<Prediction>& predictions, double gamma) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int idx = map.grid.index(cells[i]);
    const auto [mu, var] =
        fuse_bcm(map.mean[idx], map.variance[idx], predictions[i].mean, predictions[i].variance);
    map.mean[idx] = mu;
    map.variance[idx] = var;
    map.prob[idx] = logistic_occupancy(mu, var, gamma);
    map.observed[idx] = 1;
  }
}

Eigen::VectorXd constant_targets(std::size_t n, double value) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), value);
}

}  // namespace

GaussianMap GaussianMap::prior(const GridSpec& grid, double prior_variance) {
  if (!grid.valid() || !(prior_variance > 0.0))
    throw std::invalid_argument("GaussianMap::prior: invalid grid or prior variance");
  GaussianMap map;
  map.grid = grid;
  map.prior_variance = prior_variance;
  map.mean.assign(grid.size(), 0.0);
  map.variance.assign(grid.size(), prior_variance);
  map.prob.assign(grid.size(), 0.5);
  map.observed.assign(grid.size(), 0);
  return map;
}

std::pair<double, double> fuse_bcm(double mean_a, double var_a, double mean_b, double var_b) {
  if (!(var_a >= kVarianceFloor) || !(var_b >= kVarianceFloor))
    throw std::invalid_argument("fuse_bcm: variances must be >= variance floor");
  const double precision = 1.0 / var_a + 1.0 / var_b;
  const double var_c = 1.0 / precision;
  const double mean_c = var_c * (mean_a / var_a + mean_b / var_b);
  return {mean_c, std::max(var_c, kVarianceFloor)};
}

double logistic_occupancy(double mean, double variance, double gamma) {
  if (!(variance >= kVarianceFloor))
    throw std::invalid_argument("logistic_occupancy: variance below floor");
  const double p = 1.0 / (1.0 + std::exp(-gamma * mean / std::sqrt(variance)));
  return clamp_prob(p);
}

std::vector<Cell> test_data_window(const Pose2& pose, double half_extent, const GridSpec& grid) {
  if (!(half_extent > 0.0)) throw std::invalid_argument("test_data_window: half_extent <= 0");
  std::vector<Cell> cells;
  const double res = grid.resolution;
  const int cx_lo = std::max(0, static_cast<int>(std::floor((pose.x - half_extent - grid.origin.x) / res - 0.5)));
  const int cx_hi = std::min(grid.width - 1,
                             static_cast<int>(std::ceil((pose.x + half_extent - grid.origin.x) / res - 0.5)));
  const int cy_lo = std::max(0, static_cast<int>(std::floor((pose.y - half_extent - grid.origin.y) / res - 0.5)));
  const int cy_hi = std::min(grid.height - 1,
                             static_cast<int>(std::ceil((pose.y + half_extent - grid.origin.y) / res - 0.5)));
  const double slack = half_extent + 1e-9;
  for (int cy = cy_lo; cy <= cy_hi; ++cy) {
    for (int cx = cx_lo; cx <= cx_hi; ++cx) {
      const Vec2 center = grid.cell_center({cx, cy});
      if (std::abs(center.x - pose.x) <= slack && std::abs(center.y - pose.y) <= slack)
        cells.push_back({cx, cy});
    }
  }
  return cells;
}

StepStatus igpom_step(GaussianMap& map, const Scan& scan, const Hyperparams& theta,
                      const GpomConfig& cfg) {
  const TrainingSet data = build_training_data(scan, cfg.training, cfg.training_seed);
  if (data.empty()) return StepStatus::NoTrainingData;

  const std::vector<Cell> window = test_data_window(scan.pose, cfg.window_half_extent, map.grid);
  if (window.empty()) return StepStatus::EmptyWindow;

  std::vector<Vec2> inputs;
  inputs.reserve(data.size());
  inputs.insert(inputs.end(), data.occupied.begin(), data.occupied.end());
  inputs.insert(inputs.end(), data.free.begin(), data.free.end());
  Eigen::VectorXd targets(data.size());
  targets.head(data.occupied.size()) = constant_targets(data.occupied.size(), 1.0);
  targets.tail(data.free.size()) = constant_targets(data.free.size(), -1.0);

  const GpModel model = GpModel::fit(std::move(inputs), std::move(targets), theta.kernel,
                                     theta.noise_variance);
  std::vector<Vec2> queries;
  queries.reserve(window.size());
  for (const Cell& c : window) queries.push_back(map.grid.cell_center(c));
  fuse_predictions(map, window, model.predict(queries), cfg.logistic_gamma);
  return StepStatus::Updated;
}

MapPair MapPair::prior(const GridSpec& grid, double prior_variance) {
  MapPair maps;
  maps.occupied = GaussianMap::prior(grid, prior_variance);
  maps.free = GaussianMap::prior(grid, prior_variance);
  maps.merged = GaussianMap::prior(grid, prior_variance);
  return maps;
}

StepStatus igpom2_step(MapPair& maps, const Scan& scan, const Hyperparams& theta_occupied,
                       const Hyperparams& theta_free, const GpomConfig& cfg) {
  const TrainingSet data = build_training_data(scan, cfg.training, cfg.training_seed);
  if (data.empty()) return StepStatus::NoTrainingData;

  const std::vector<Cell> window =
      test_data_window(scan.pose, cfg.window_half_extent, maps.merged.grid);
  if (window.empty()) return StepStatus::EmptyWindow;

  std::vector<Vec2> queries;
  queries.reserve(window.size());
  for (const Cell& c : window) queries.push_back(maps.merged.grid.cell_center(c));

  if (!data.occupied.empty()) {
    const GpModel model =
        GpModel::fit(data.occupied, constant_targets(data.occupied.size(), 1.0),
                     theta_occupied.kernel, theta_occupied.noise_variance);
    fuse_predictions(maps.occupied, window, model.predict(queries), cfg.class_gamma);
  }
  if (!data.free.empty()) {
    const GpModel model = GpModel::fit(data.free, constant_targets(data.free.size(), -1.0),
                                       theta_free.kernel, theta_free.noise_variance);
    fuse_predictions(maps.free, window, model.predict(queries), cfg.class_gamma);
  }
  merge_maps(maps.occupied, maps.free, cfg.logistic_gamma, maps.merged);
  return StepStatus::Updated;
}

void merge_maps(const GaussianMap& occupied, const GaussianMap& free, double gamma,
                GaussianMap& merged) {
  if (!(occupied.grid == free.grid) || !(occupied.grid == merged.grid))
    throw std::invalid_argument("merge_maps: grids differ");
  for (int i = 0; i < merged.grid.size(); ++i) {
    const auto [mu, var] =
        fuse_bcm(occupied.mean[i], occupied.variance[i], free.mean[i], free.variance[i]);
    merged.mean[i] = mu;
    merged.variance[i] = var;
    merged.prob[i] = logistic_occupancy(mu, var, gamma);
    merged.observed[i] = occupied.observed[i] || free.observed[i];
  }
}

double jsd(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size() || p.empty()) throw std::invalid_argument("jsd: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += bernoulli_entropy(0.5 * (p[i] + q[i])) -
             0.5 * (bernoulli_entropy(p[i]) + bernoulli_entropy(q[i]));
  }
  return total / static_cast<double>(p.size());
}

GaussianMap batch_gpom(const std::vector<Scan>& scans, const Hyperparams& theta,
                       const GpomConfig& cfg, const GridSpec& grid) {
  TrainingSet all;
  for (const Scan& scan : scans) {
    const TrainingSet data = build_training_data(scan, cfg.training, cfg.training_seed);
    all.occupied.insert(all.occupied.end(), data.occupied.begin(), data.occupied.end());
    all.free.insert(all.free.end(), data.free.begin(), data.free.end());
  }
  if (all.empty()) throw std::invalid_argument("batch_gpom: no training data");
  if (all.size() > GpModel::kMaxTrainingPoints)
    throw std::invalid_argument("batch_gpom: training set exceeds the exact-GP cap");

  std::vector<Vec2> inputs;
  inputs.reserve(all.size());
  inputs.insert(inputs.end(), all.occupied.begin(), all.occupied.end());
  inputs.insert(inputs.end(), all.free.begin(), all.free.end());
  Eigen::VectorXd targets(all.size());
  targets.head(all.occupied.size()) = constant_targets(all.occupied.size(), 1.0);
  targets.tail(all.free.size()) = constant_targets(all.free.size(), -1.0);
  const GpModel model =
      GpModel::fit(std::move(inputs), std::move(targets), theta.kernel, theta.noise_variance);

  // Union of the per-scan test windows, predicted once from the batch model.
  GaussianMap map = GaussianMap::prior(grid, cfg.prior_variance);
  std::vector<std::uint8_t> in_union(grid.size(), 0);
  for (const Scan& scan : scans)
    for (const Cell& c : test_data_window(scan.pose, cfg.window_half_extent, grid))
      in_union[grid.index(c)] = 1;

  std::vector<Cell> cells;
  std::vector<Vec2> queries;
  for (int i = 0; i < grid.size(); ++i) {
    if (!in_union[i]) continue;
    cells.push_back(grid.cell(i));
    queries.push_back(grid.cell_center(grid.cell(i)));
  }
  const std::vector<Prediction> predictions = model.predict(queries);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int idx = grid.index(cells[i]);
    map.mean[idx] = predictions[i].mean;
    map.variance[idx] = std::max(predictions[i].variance, kVarianceFloor);
    map.prob[idx] = logistic_occupancy(map.mean[idx], map.variance[idx], cfg.logistic_gamma);
    map.observed[idx] = 1;
  }
  return map;
}

bool maybe_regenerate(RegenState& state, const std::vector<double>& prob_before, MapPair& maps,
                      const Hyperparams& theta_occupied, const Hyperparams& theta_free,
                      const GpomConfig& cfg) {
  state.cumulative_jsd += jsd(prob_before, maps.merged.prob);
  if (state.cumulative_jsd <= state.threshold) return false;

  MapPair rebuilt = MapPair::prior(maps.merged.grid, cfg.prior_variance);
  for (const Scan& scan : state.history)
    igpom2_step(rebuilt, scan, theta_occupied, theta_free, cfg);
  maps = std::move(rebuilt);
  state.cumulative_jsd = 0.0;
  ++state.regenerations;
  return true;
}

}  // namespace gpom
