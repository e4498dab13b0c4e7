#include "gpom/mi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpom/gpom.hpp"

namespace gpom {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

double negative_entropy(double p) {
  p = clamp_prob(p);
  return p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
}

}  // namespace

void MiConfig::validate() const {
  if (n_z < 1 || !(r_max > 0.0) || !(s_z > 0.0))
    throw std::invalid_argument("MiConfig: n_z, r_max, s_z must be positive");
  if (!(p_o > 0.5) || !(p_o < 1.0) || !(p_f > 0.0) || !(p_f < p_o))
    throw std::invalid_argument("MiConfig: thresholds must satisfy 0 < p_f < p_o, 0.5 < p_o < 1");
}

double cell_entropy(double p) { return -negative_entropy(p); }

MiMap build_mi_map(const Pose2& vantage, const GridSpec& grid,
                   const std::vector<double>& occupancy_prob, const MiConfig& cfg,
                   const BeamModelConfig& beam_cfg) {
  cfg.validate();
  if (static_cast<int>(occupancy_prob.size()) != grid.size())
    throw std::invalid_argument("build_mi_map: field size mismatch");
  const auto cell = grid.world_to_cell(vantage.position());
  if (!cell) throw std::invalid_argument("build_mi_map: vantage outside grid");
  if (occupancy_prob[grid.index(*cell)] >= cfg.p_f)
    throw std::invalid_argument("build_mi_map: vantage not in free space");

  // The mixture inside the MI prediction uses the MI range, which need not
  // equal the sensor range.
  BeamModelConfig mix = beam_cfg;
  mix.r_max = cfg.r_max;
  mix.validate();

  MiMap out;
  out.grid = grid;
  out.information.resize(grid.size());
  out.in_field.assign(grid.size(), 0);
  for (int i = 0; i < grid.size(); ++i) out.information[i] = cell_entropy(occupancy_prob[i]);

  const double dz = 1.0 / cfg.s_z;
  const double unknown = 1.0 / cfg.r_max;

  for (int k = 0; k < cfg.n_z; ++k) {
    const double angle = -M_PI + (k + 0.5) * (2.0 * M_PI / cfg.n_z);
    const RayTrace trace =
        cast_ray({vantage.position(), angle, cfg.r_max}, grid, occupancy_prob, cfg.p_o);
    const int n = static_cast<int>(trace.cells.size());
    if (n == 0) continue;
    const double z_hat = trace.range;

    std::vector<int> idx(n);
    std::vector<double> p(n), expected(n), prefix(n + 1);
    prefix[0] = 1.0;
    for (int j = 0; j < n; ++j) {
      idx[j] = grid.index(trace.cells[j]);
      p[j] = clamp_prob(occupancy_prob[idx[j]]);
      expected[j] = std::max(trace.entry_range[j], 1e-6);
      prefix[j + 1] = prefix[j] * (1.0 - p[j]);
      out.in_field[idx[j]] = 1;
    }

    std::vector<double> accumulated(n, 0.0);
    std::vector<double> numerator(n);
    for (int t = 0;; ++t) {
      const double z = (t + 1) * dz;
      if (z > z_hat + 1e-12) break;
      // Marginal measurement probability: all-free term plus the chain over
      // the first occupied cell.
      double p_z = unknown * prefix[n];
      for (int j = 0; j < n; ++j) {
        numerator[j] = beam_likelihood(std::min(z, cfg.r_max), expected[j], mix) * p[j] * prefix[j];
        p_z += numerator[j];
      }
      for (int i = 0; i < n; ++i) {
        const double predicted = clamp_prob(numerator[i] / p_z);
        accumulated[i] += p_z * negative_entropy(predicted);
      }
    }
    for (int i = 0; i < n; ++i) out.information[idx[i]] += accumulated[i] * dz;
  }

  for (double& v : out.information) v = std::max(v, 0.0);
  return out;
}

double total_information(const MiMap& map) {
  double total = 0.0;
  for (std::size_t i = 0; i < map.information.size(); ++i)
    if (map.in_field[i]) total += map.information[i];
  return total;
}

}  // namespace gpom
