// Regenerates the bundled datasets under data/: the structured 40x40 and
// sparse 120x120 environments, the 25-scan structured log, the half-explored
// map used by the mi/frontier commands, and the pinned MI snapshot.
// Everything is seeded, so reruns reproduce the committed files byte for byte.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <vector>

#include "gpom/config.hpp"
#include "gpom/gpom.hpp"
#include "gpom/io.hpp"
#include "gpom/mi.hpp"
#include "gpom/rng.hpp"
#include "gpom/sensor.hpp"

using namespace gpom;

namespace {

struct MapBuilder {
  GridSpec grid;
  std::vector<double> occ;

  explicit MapBuilder(int w, int h) : grid{{0.0, 0.0}, 1.0, w, h}, occ(w * h, 0.0) {
    rect(0, 0, w - 1, 0);
    rect(0, h - 1, w - 1, h - 1);
    rect(0, 0, 0, h - 1);
    rect(w - 1, 0, w - 1, h - 1);
  }

  void rect(int x0, int y0, int x1, int y1, double value = 1.0) {
    for (int cy = y0; cy <= y1; ++cy)
      for (int cx = x0; cx <= x1; ++cx)
        if (grid.in_bounds({cx, cy})) occ[grid.index({cx, cy})] = value;
  }

  bool area_free(int x0, int y0, int x1, int y1) const {
    for (int cy = y0; cy <= y1; ++cy)
      for (int cx = x0; cx <= x1; ++cx)
        if (!grid.in_bounds({cx, cy}) || occ[grid.index({cx, cy})] >= 0.5) return false;
    return true;
  }

  void save(const std::string& path) const {
    write_pgm(path, probability_to_pgm(grid, occ));
  }
};

// Multi-room indoor layout: two vertical and one horizontal dividing wall
// with door gaps, plus seeded clutter blocks.
MapBuilder structured_map() {
  MapBuilder m(40, 40);
  m.rect(13, 1, 13, 38);
  m.rect(13, 8, 13, 10, 0.0);
  m.rect(13, 28, 13, 30, 0.0);
  m.rect(26, 1, 26, 38);
  m.rect(26, 14, 26, 16, 0.0);
  m.rect(26, 33, 26, 35, 0.0);
  m.rect(1, 20, 38, 20);
  m.rect(5, 20, 7, 20, 0.0);
  m.rect(19, 20, 21, 20, 0.0);
  m.rect(31, 20, 33, 20, 0.0);

  Rng rng(2024);
  int placed = 0;
  while (placed < 7) {
    const int w = rng.uniform_int(2, 3);
    const int h = rng.uniform_int(2, 3);
    const int x = rng.uniform_int(3, 40 - 4 - w);
    const int y = rng.uniform_int(3, 40 - 4 - h);
    if (!m.area_free(x - 2, y - 2, x + w + 1, y + h + 1)) continue;
    if (x < 8 && y < 8) continue;  // keep the spawn area clear
    m.rect(x, y, x + w - 1, y + h - 1);
    ++placed;
  }
  return m;
}

// Sparse outdoor layout: scattered building-sized blocks in open space.
MapBuilder campus_map() {
  MapBuilder m(120, 120);
  Rng rng(7171);
  int placed = 0;
  while (placed < 16) {
    const int w = rng.uniform_int(6, 14);
    const int h = rng.uniform_int(6, 14);
    const int x = rng.uniform_int(6, 120 - 7 - w);
    const int y = rng.uniform_int(6, 120 - 7 - h);
    if (!m.area_free(x - 4, y - 4, x + w + 3, y + h + 3)) continue;
    m.rect(x, y, x + w - 1, y + h - 1);
    ++placed;
  }
  return m;
}

// 25 poses walking the structured map's rooms; the log stays sparse enough
// for the exact-GP batch comparison.
std::vector<Pose2> structured_trajectory() {
  std::vector<Pose2> poses;
  const double pts[25][2] = {
      {3.5, 3.5},   {7.5, 4.5},   {10.5, 7.5},  {9.5, 12.5},  {5.5, 15.5},
      {10.5, 17.5}, {6.5, 20.5},  {2.5, 22.5},  {8.5, 27.5},  {11.5, 31.5},
      {8.5, 35.5},  {13.5, 29.5}, {17.5, 26.5}, {20.5, 21.5}, {17.5, 16.5},
      {15.5, 9.5},  {19.5, 5.5},  {23.5, 9.5},  {22.5, 15.5}, {27.5, 15.5},
      {31.5, 11.5}, {34.5, 6.5},  {30.5, 24.5}, {34.5, 29.5}, {32.5, 34.5}};
  for (const auto& p : pts) poses.push_back({p[0], p[1], 0.0});
  return poses;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out);

  const MapBuilder structured = structured_map();
  structured.save(out + "/structured40.pgm");
  const MapBuilder campus = campus_map();
  campus.save(out + "/campus120.pgm");

  // Scan log over the structured map: a deliberately sparse 8-beam fan,
  // clean poses, light range noise; hit/miss classification uses r_max = 8.
  BeamModelConfig beam;
  beam.r_max = 8.0;
  std::vector<Scan> scans;
  int index = 0;
  for (const Pose2& pose : structured_trajectory()) {
    if (structured.occ[structured.grid.index(*structured.grid.world_to_cell(pose.position()))] >=
        0.5)
      throw std::runtime_error("trajectory pose inside an obstacle");
    scans.push_back(
        simulate_scan(pose, structured.grid, structured.occ, 8, beam, 0.01, 4000 + index++));
  }
  write_scan_log(out + "/scans_structured25.csv", scans);

  // Half-explored map: the first eight scans fused with fixed hyperparameters.
  Hyperparams theta;
  theta.kernel.length_scale = 0.8;
  theta.kernel.signal_variance = 1.0;
  theta.noise_variance = 0.05;
  GpomConfig gpom_cfg;
  gpom_cfg.window_half_extent = 8.0;
  gpom_cfg.logistic_gamma = 2.0;
  gpom_cfg.training.n_f_min = 2;
  gpom_cfg.training.free_spacing = 2.0;
  gpom_cfg.training.map_resolution = 1.0;
  gpom_cfg.training.r_max = 8.0;
  gpom_cfg.training.occupied_inset = 0.5;

  MapPair maps = MapPair::prior(structured.grid, gpom_cfg.prior_variance);
  for (int i = 0; i < 8; ++i) igpom2_step(maps, scans[i], theta, theta, gpom_cfg);
  write_map_csv(out + "/halfmap.csv", maps.merged);
  write_map_csv(out + "/halfmap_obstacle.csv", maps.occupied);

  const Pose2 vantage = structured_trajectory()[7];
  write_text_file(out + "/halfmap_vantage.txt",
                  format_double(vantage.x) + " " + format_double(vantage.y) + "\n");

  // Pinned MI snapshot at that vantage, same settings the mi command uses.
  MiConfig mi_cfg;
  mi_cfg.n_z = 36;
  mi_cfg.r_max = 4.0;
  mi_cfg.s_z = 10.0 / 3.0;
  mi_cfg.p_o = 0.65;
  mi_cfg.p_f = 0.35;
  const MiMap mi = build_mi_map(vantage, structured.grid, maps.merged.prob, mi_cfg, beam);
  write_pgm(out + "/mi_snapshot.pgm", scaled_to_pgm(structured.grid, mi.information, std::log(2.0)));

  std::cout << "datasets written to " << out << "\n";
  return 0;
}
