// Command-line front end: mapping from scan logs, closed-loop exploration,
// mutual-information and frontier maps, and the multi-seed benchmark.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gpom/config.hpp"
#include "gpom/explore.hpp"
#include "gpom/frontier.hpp"
#include "gpom/gpom.hpp"
#include "gpom/io.hpp"
#include "gpom/mi.hpp"
#include "gpom/ogm.hpp"
#include "gpom/sim.hpp"

namespace {

using namespace gpom;

namespace fs = std::filesystem;

std::string default_out(const std::string& command) {
  if (const char* root = std::getenv("GPEXPLORE_OUT"))
    return (fs::path(root) / command).string();
  return "out_" + command;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

GaussianMap map_from_csv(const MapCsv& csv, double prior_variance) {
  GaussianMap map = GaussianMap::prior(csv.grid, prior_variance);
  map.mean = csv.mean;
  map.variance = csv.variance;
  map.prob = csv.prob;
  for (int i = 0; i < csv.grid.size(); ++i)
    map.observed[i] = csv.variance[i] < prior_variance ? 1 : 0;
  return map;
}

std::vector<std::uint8_t> beam_coverage(const std::vector<Scan>& scans, const GridSpec& grid) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  const std::vector<double> empty(grid.size(), 0.0);
  for (const Scan& scan : scans) {
    for (const Beam& beam : scan.beams) {
      if (beam.range <= 0.0) continue;
      const Ray ray{scan.pose.position(), normalize_angle(scan.pose.heading + beam.bearing),
                    beam.range};
      try {
        for (const Cell& c : cast_ray(ray, grid, empty, 0.99).cells) mask[grid.index(c)] = 1;
      } catch (const std::invalid_argument&) {
      }
    }
  }
  return mask;
}

// Deterministic lawnmower sweep over free space, used when no scan log is
// configured.
std::vector<Scan> scripted_sweep(const Environment& env, const RunConfig& cfg) {
  std::vector<Scan> scans;
  const GridSpec& grid = env.grid;
  const int stride = std::max(2, static_cast<int>(std::lround(cfg.sensor_r_max / 2.0)));
  int scan_index = 0;
  for (int cy = 1; cy < grid.height - 1; cy += stride) {
    const bool reverse = (cy / stride) % 2 == 1;
    for (int step = 1; step < grid.width - 1; step += stride) {
      const int cx = reverse ? grid.width - 1 - step : step;
      if (env.occupancy[grid.index({cx, cy})] >= 0.5) continue;
      const Pose2 pose{cx + 0.5, cy + 0.5, 0.0};
      scans.push_back(simulate_scan(pose, grid, env.occupancy, cfg.sensor_n_z, cfg.beam_model(),
                                    cfg.noise.range_sigma,
                                    cfg.seed * 0x9e3779b97f4a7c15ULL + scan_index++));
    }
  }
  return scans;
}

struct MapHyperparams {
  Hyperparams single;
  Hyperparams occupied;
  Hyperparams free;
};

MapHyperparams prepare_hyperparams(const RunConfig& cfg, const std::vector<Scan>& scans) {
  MapHyperparams out{cfg.gp_init(), cfg.gp_init_occupied(), cfg.gp_init_free()};
  if (!cfg.hyperparams_file.empty()) {
    out.single = out.occupied = out.free = load_hyperparams(cfg.hyperparams_file);
    return out;
  }
  if (!cfg.optimize_hyperparams || scans.empty()) return out;

  // Optimized once on the first frame's combined labels; single-class
  // targets alone cannot identify a length scale. Explicit per-class
  // length scales from the config survive the transfer.
  const TrainingSet data = build_training_data(scans.front(), cfg.training(), cfg.seed);
  if (!data.empty()) {
    std::vector<Vec2> all = data.occupied;
    all.insert(all.end(), data.free.begin(), data.free.end());
    Eigen::VectorXd y(all.size());
    y.head(data.occupied.size()).setConstant(1.0);
    y.tail(data.free.size()).setConstant(-1.0);
    out.single = optimize_hyperparameters(all, y, out.single);
    out.occupied = out.single;
    out.free = out.single;
    if (cfg.kernel_kappa_occupied > 0.0)
      out.occupied.kernel.length_scale = cfg.kernel_kappa_occupied;
    if (cfg.kernel_kappa_free > 0.0) out.free.kernel.length_scale = cfg.kernel_kappa_free;
  }
  return out;
}

void export_gaussian_map(const std::string& prefix, const GaussianMap& map) {
  write_pgm(prefix + "_p.pgm", probability_to_pgm(map.grid, map.prob));
  write_scaled_field_pgm(prefix + "_mu.pgm", map.grid, map.mean);
  write_scaled_field_pgm(prefix + "_sigma.pgm", map.grid, map.variance);
  write_map_csv(prefix + ".csv", map);
}

int cmd_map(const RunConfig& cfg, const std::string& out_dir, bool batch_oracle) {
  const Environment env = load_environment(cfg.environment, cfg.resolution, cfg.spawn());
  fs::create_directories(out_dir);

  std::vector<Scan> scans;
  if (!cfg.scan_log.empty()) {
    scans = read_scan_log(cfg.scan_log);
  } else {
    scans = scripted_sweep(env, cfg);
    write_scan_log(out_dir + "/scan_log.csv", scans);
  }
  if (scans.empty()) throw std::runtime_error("no scans");

  const MapHyperparams theta = prepare_hyperparams(cfg, scans);
  save_hyperparams(out_dir + "/hyperparams_single.txt", theta.single);
  save_hyperparams(out_dir + "/hyperparams_occupied.txt", theta.occupied);
  save_hyperparams(out_dir + "/hyperparams_free.txt", theta.free);

  const GpomConfig gpom_cfg = cfg.gpom();
  GaussianMap igpom_map = GaussianMap::prior(env.grid, cfg.prior_variance);
  MapPair igpom2_maps = MapPair::prior(env.grid, cfg.prior_variance);
  LogOddsGrid ogm_map = LogOddsGrid::prior(env.grid, cfg.inverse_sensor());

  double incremental_time = 0.0;
  for (const Scan& scan : scans) {
    const double t0 = now_seconds();
    igpom_step(igpom_map, scan, theta.single, gpom_cfg);
    incremental_time += now_seconds() - t0;
    igpom2_step(igpom2_maps, scan, theta.occupied, theta.free, gpom_cfg);
    ogm_update(ogm_map, scan);
  }

  // Scored on every cell the mappers observed (the GP windows reach past
  // the beams); cells no mapper touched stay excluded.
  std::vector<std::uint8_t> mask = beam_coverage(scans, env.grid);
  for (int i = 0; i < env.grid.size(); ++i)
    if (igpom2_maps.merged.observed[i]) mask[i] = 1;
  std::vector<std::uint8_t> truth(env.grid.size(), 0);
  for (int i = 0; i < env.grid.size(); ++i) truth[i] = env.occupancy[i] >= 0.5 ? 1 : 0;

  const double auc_ogm = auc(ogm_map.probabilities(), truth, mask);
  const double auc_igpom = auc(igpom_map.prob, truth, mask);
  const double auc_igpom2 = auc(igpom2_maps.merged.prob, truth, mask);

  export_gaussian_map(out_dir + "/igpom", igpom_map);
  export_gaussian_map(out_dir + "/igpom2", igpom2_maps.merged);
  export_gaussian_map(out_dir + "/igpom2_obstacle", igpom2_maps.occupied);
  write_pgm(out_dir + "/ogm_p.pgm", probability_to_pgm(env.grid, ogm_map.probabilities()));
  {
    std::ostringstream csv;
    csv << "x,y,p\n";
    for (int cy = 0; cy < env.grid.height; ++cy)
      for (int cx = 0; cx < env.grid.width; ++cx) {
        const Vec2 c = env.grid.cell_center({cx, cy});
        csv << format_double(c.x) << ',' << format_double(c.y) << ','
            << format_double(ogm_map.prob(env.grid.index({cx, cy}))) << '\n';
      }
    write_text_file(out_dir + "/ogm.csv", csv.str());
  }

  std::ostringstream report;
  report << "method,auc\n";
  report << "OGM," << format_double(auc_ogm) << '\n';
  report << "I-GPOM," << format_double(auc_igpom) << '\n';
  report << "I-GPOM2," << format_double(auc_igpom2) << '\n';

  std::ostringstream timings;
  timings << "incremental_total_s=" << incremental_time << '\n'
          << "incremental_per_scan_s=" << incremental_time / scans.size() << '\n';

  if (batch_oracle) {
    const double t0 = now_seconds();
    const GaussianMap batch = batch_gpom(scans, theta.single, gpom_cfg, env.grid);
    const double batch_time = now_seconds() - t0;
    const double auc_batch = auc(batch.prob, truth, mask);
    export_gaussian_map(out_dir + "/batch_gpom", batch);
    report << "batch-GPOM," << format_double(auc_batch) << '\n';
    report << "batch-delta," << format_double(std::abs(auc_batch - auc_igpom)) << '\n';
    timings << "batch_total_s=" << batch_time << '\n'
            << "batch_per_scan_s=" << batch_time / scans.size() << '\n';
  }

  write_text_file(out_dir + "/auc_report.csv", report.str());
  write_text_file(out_dir + "/timings.txt", timings.str());
  std::cout << report.str();
  std::cout << "scans=" << scans.size() << " out=" << out_dir << '\n';
  return 0;
}

int cmd_explore(const RunConfig& cfg, const std::string& out_dir) {
  const Environment env = load_environment(cfg.environment, cfg.resolution, cfg.spawn());
  fs::create_directories(out_dir);
  const Policy policy = policy_from_string(cfg.policy);
  const RunMetrics metrics = run_exploration(env, cfg, policy, cfg.seed, out_dir);
  std::cout << "policy=" << cfg.policy << " seed=" << cfg.seed << " steps=" << metrics.steps
            << " complete=" << (metrics.mission_complete ? 1 : 0)
            << " travel=" << metrics.travel_distance << " entropy=" << metrics.final_entropy
            << " mer=" << metrics.mer << " auc=" << metrics.auc_final
            << " regenerations=" << metrics.regenerations << '\n';
  return metrics.mission_complete ? 0 : 3;
}

int cmd_mi(const RunConfig& cfg, const std::string& map_csv, double vx, double vy,
           const std::string& out_dir) {
  const MapCsv map = read_map_csv(map_csv);
  fs::create_directories(out_dir);
  const MiMap mi = build_mi_map({vx, vy, 0.0}, map.grid, map.prob, cfg.mi(), cfg.beam_model());
  write_pgm(out_dir + "/mi.pgm", scaled_to_pgm(map.grid, mi.information, std::log(2.0)));

  std::ostringstream csv;
  csv << "x,y,information\n";
  for (int cy = 0; cy < map.grid.height; ++cy)
    for (int cx = 0; cx < map.grid.width; ++cx) {
      const Vec2 c = map.grid.cell_center({cx, cy});
      csv << format_double(c.x) << ',' << format_double(c.y) << ','
          << format_double(mi.information[map.grid.index({cx, cy})]) << '\n';
    }
  write_text_file(out_dir + "/mi.csv", csv.str());
  std::cout << "total_information=" << total_information(mi) << " out=" << out_dir << '\n';
  return 0;
}

int cmd_frontier(const RunConfig& cfg, const std::string& map_csv,
                 const std::string& obstacle_csv, double rx, double ry,
                 const std::string& out_dir) {
  const MapCsv merged_csv = read_map_csv(map_csv);
  const MapCsv obstacle_map_csv = read_map_csv(obstacle_csv);
  const GaussianMap merged = map_from_csv(merged_csv, cfg.prior_variance);
  const GaussianMap obstacle = map_from_csv(obstacle_map_csv, cfg.prior_variance);
  fs::create_directories(out_dir);

  const FrontierMap frontier = build_frontier_map(merged, obstacle, cfg.frontier());
  write_pgm(out_dir + "/frontier.pgm", scaled_to_pgm(frontier.grid, frontier.f, 1.0));
  {
    std::ostringstream csv;
    csv << "x,y,f\n";
    for (int cy = 0; cy < frontier.grid.height; ++cy)
      for (int cx = 0; cx < frontier.grid.width; ++cx) {
        const Vec2 c = frontier.grid.cell_center({cx, cy});
        csv << format_double(c.x) << ',' << format_double(c.y) << ','
            << format_double(frontier.f[frontier.grid.index({cx, cy})]) << '\n';
      }
    write_text_file(out_dir + "/frontier.csv", csv.str());
  }

  const std::vector<MacroAction> actions =
      extract_macro_actions(frontier, merged.prob, {rx, ry, 0.0}, cfg.frontier());
  std::ostringstream csv;
  csv << "cx,cy,size,cost\n";
  for (const MacroAction& a : actions)
    csv << format_double(a.centroid.x) << ',' << format_double(a.centroid.y) << ','
        << a.cluster_size << ',' << format_double(a.path_cost) << '\n';
  write_text_file(out_dir + "/actions.csv", csv.str());
  std::cout << "actions=" << actions.size() << " out=" << out_dir << '\n';
  return 0;
}

int cmd_bench(const RunConfig& cfg, const std::string& out_dir) {
  const Environment env = load_environment(cfg.environment, cfg.resolution, cfg.spawn());
  fs::create_directories(out_dir);

  std::vector<Policy> policies;
  std::istringstream names(cfg.bench_policies);
  std::string name;
  while (std::getline(names, name, ',')) policies.push_back(policy_from_string(name));
  if (policies.empty() || cfg.bench_seeds < 1)
    throw std::runtime_error("bench: empty policy list or no seeds");

  struct Job {
    Policy policy;
    std::uint64_t seed;
    RunMetrics metrics;
  };
  std::vector<Job> jobs;
  for (Policy policy : policies)
    for (int seed = 1; seed <= cfg.bench_seeds; ++seed)
      jobs.push_back({policy, static_cast<std::uint64_t>(seed), {}});

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers =
      std::max(1, std::min(cfg.bench_workers > 0 ? cfg.bench_workers : hw,
                           static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i].metrics = run_exploration(env, cfg, jobs[i].policy, jobs[i].seed);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "policy,seed,steps,mission_complete,travel_distance,final_entropy,mer,auc,"
         "regenerations\n";
  for (const Job& job : jobs) {
    const RunMetrics& m = job.metrics;
    csv << to_string(job.policy) << ',' << job.seed << ',' << m.steps << ','
        << (m.mission_complete ? 1 : 0) << ',' << format_double(m.travel_distance) << ','
        << format_double(m.final_entropy) << ',' << format_double(m.mer) << ','
        << format_double(m.auc_final) << ',' << m.regenerations << '\n';
  }
  write_text_file(out_dir + "/runs.csv", csv.str());

  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  std::ostringstream summary;
  summary << "policy,median_mer,median_final_entropy,median_travel_distance,median_auc\n";
  std::cout << "policy  median_mer  median_entropy  median_travel\n";
  for (Policy policy : policies) {
    std::vector<double> mer, entropy, travel, aucs;
    for (const Job& job : jobs) {
      if (job.policy != policy) continue;
      mer.push_back(job.metrics.mer);
      entropy.push_back(job.metrics.final_entropy);
      travel.push_back(job.metrics.travel_distance);
      aucs.push_back(job.metrics.auc_final);
    }
    summary << to_string(policy) << ',' << format_double(median_of(mer)) << ','
            << format_double(median_of(entropy)) << ',' << format_double(median_of(travel))
            << ',' << format_double(median_of(aucs)) << '\n';
    std::cout << to_string(policy) << "  " << median_of(mer) << "  " << median_of(entropy)
              << "  " << median_of(travel) << '\n';
  }
  write_text_file(out_dir + "/summary.csv", summary.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental GP occupancy mapping and information-driven exploration"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string policy;
  bool perfect_pose = false;
  bool batch_oracle = false;
  std::string map_csv, obstacle_csv;
  double vantage_x = 0.0, vantage_y = 0.0;
  bool robot_set = false;
  double robot_x = 0.0, robot_y = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--perfect-pose", perfect_pose, "map with ground-truth poses");
    cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* map_cmd = app.add_subcommand("map", "build maps from a scan log or a scripted sweep");
  add_common(map_cmd);
  map_cmd->add_flag("--batch-oracle", batch_oracle, "also fit the batch GP for comparison");

  CLI::App* explore_cmd = app.add_subcommand("explore", "run the closed exploration loop");
  add_common(explore_cmd);
  explore_cmd->add_option("--policy", policy, "NF, OGMI, GPNF or GPMI");

  CLI::App* mi_cmd = app.add_subcommand("mi", "mutual-information map from a map CSV");
  add_common(mi_cmd);
  mi_cmd->add_option("--map", map_csv, "occupancy map CSV")->required();
  mi_cmd->add_option("--vantage-x", vantage_x, "vantage x (m)")->required();
  mi_cmd->add_option("--vantage-y", vantage_y, "vantage y (m)")->required();

  CLI::App* frontier_cmd = app.add_subcommand("frontier", "frontier map and macro-actions");
  add_common(frontier_cmd);
  frontier_cmd->add_option("--map", map_csv, "merged map CSV")->required();
  frontier_cmd->add_option("--obstacle-map", obstacle_csv, "obstacle map CSV")->required();
  frontier_cmd->add_option("--robot-x", robot_x, "robot x (m)")->each([&](const std::string&) {
    robot_set = true;
  });
  frontier_cmd->add_option("--robot-y", robot_y, "robot y (m)");

  CLI::App* bench_cmd = app.add_subcommand("bench", "multi-seed policy benchmark");
  add_common(bench_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_run_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!policy.empty()) cfg.policy = policy;
    if (perfect_pose) cfg.perfect_pose = true;
    cfg.validate();

    if (app.got_subcommand(map_cmd))
      return cmd_map(cfg, out_dir.empty() ? default_out("map") : out_dir, batch_oracle);
    if (app.got_subcommand(explore_cmd))
      return cmd_explore(cfg, out_dir.empty() ? default_out("explore") : out_dir);
    if (app.got_subcommand(mi_cmd))
      return cmd_mi(cfg, map_csv, vantage_x, vantage_y,
                    out_dir.empty() ? default_out("mi") : out_dir);
    if (app.got_subcommand(frontier_cmd)) {
      if (!robot_set) {
        robot_x = cfg.spawn_x;
        robot_y = cfg.spawn_y;
      }
      return cmd_frontier(cfg, map_csv, obstacle_csv, robot_x, robot_y,
                          out_dir.empty() ? default_out("frontier") : out_dir);
    }
    if (app.got_subcommand(bench_cmd))
      return cmd_bench(cfg, out_dir.empty() ? default_out("bench") : out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
