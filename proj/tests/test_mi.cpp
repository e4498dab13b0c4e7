#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "gpom/mi.hpp"
#include "gpom/rng.hpp"
#include "oracles.hpp"

using namespace gpom;

namespace {

BeamModelConfig mi_beam() {
  BeamModelConfig cfg;
  cfg.sigma_hit = 0.1;
  cfg.lambda_short = 0.2;
  cfg.max_smear_width = 0.3;
  return cfg;
}

MiConfig toy_mi(int n_z, double r_max, double s_z) {
  MiConfig cfg;
  cfg.n_z = n_z;
  cfg.r_max = r_max;
  cfg.s_z = s_z;
  cfg.p_o = 0.65;
  cfg.p_f = 0.35;
  return cfg;
}

void check_against_oracle(const Pose2& vantage, const GridSpec& grid,
                          const std::vector<double>& prob, const MiConfig& cfg,
                          const BeamModelConfig& beam, double tol = 1e-6) {
  const MiMap mi = build_mi_map(vantage, grid, prob, cfg, beam);
  const auto ref = oracle::brute_force_mi(vantage, grid, prob, cfg.n_z, cfg.r_max, cfg.s_z,
                                          cfg.p_o, beam);
  for (int i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(mi.information[i] - ref.information[i]) <= tol);
    CHECK(mi.in_field[i] == ref.in_field[i]);
  }
}

}  // namespace

TEST_CASE("cell_entropy") {
  CHECK(cell_entropy(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cell_entropy(1e-6) < 2e-5);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform(0.01, 0.99);
    CHECK(cell_entropy(p) == doctest::Approx(cell_entropy(1.0 - p)).epsilon(1e-12));
    CHECK(cell_entropy(p) >= 0.0);
  }
}

TEST_CASE("single-beam strip matches the joint-state oracle") {
  // One free vantage cell followed by five unknown cells; a single beam
  // pointing straight down the strip.
  const GridSpec grid{{0.0, 0.0}, 1.0, 6, 1};
  std::vector<double> prob(grid.size(), 0.5);
  prob[0] = 1e-6;
  const MiConfig cfg = toy_mi(1, 5.0, 20.0);
  check_against_oracle({0.5, 0.5, 0.0}, grid, prob, cfg, mi_beam());
}

TEST_CASE("random small maps match the joint-state oracle") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 9, 9};
  const BeamModelConfig beam = mi_beam();
  Rng rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<double> prob(grid.size());
    for (double& p : prob) {
      const double u = rng.uniform01();
      p = u < 0.25 ? rng.uniform(1e-6, 0.1)
                   : (u < 0.5 ? rng.uniform(0.7, 1.0 - 1e-6) : rng.uniform(0.3, 0.65));
    }
    prob[grid.index({4, 4})] = 0.01;  // free vantage
    const MiConfig cfg = toy_mi(8, 3.0, 10.0 / 3.0);
    check_against_oracle({4.5, 4.5, 0.0}, grid, prob, cfg, beam);
  }
}

TEST_CASE("deterministic maps carry no information") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 7, 7};
  std::vector<double> prob(grid.size());
  Rng rng(5);
  for (double& p : prob) p = rng.uniform01() < 0.7 ? 1e-6 : 1.0 - 1e-6;
  prob[grid.index({3, 3})] = 1e-6;
  const MiMap mi = build_mi_map({3.5, 3.5, 0.0}, grid, prob, toy_mi(12, 4.0, 5.0), mi_beam());
  for (int i = 0; i < grid.size(); ++i) CHECK(mi.information[i] < 2e-5);
}

TEST_CASE("cells beyond a confident obstacle keep their entropy") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 8, 1};
  std::vector<double> prob(grid.size(), 0.5);
  prob[0] = 0.01;
  prob[3] = 0.95;  // above p_o: the ray truncates here
  const MiConfig cfg = toy_mi(1, 7.0, 4.0);
  const MiMap mi = build_mi_map({0.5, 0.5, 0.0}, grid, prob, cfg, mi_beam());

  for (int cx = 4; cx < 8; ++cx) {
    const int idx = grid.index({cx, 0});
    CHECK(!mi.in_field[idx]);
    CHECK(mi.information[idx] == doctest::Approx(cell_entropy(prob[idx])).epsilon(1e-12));
  }
  // In-field unknown cells lose entropy; the map stores the expected gain.
  CHECK(mi.in_field[grid.index({1, 0})]);
  CHECK(mi.information[grid.index({1, 0})] < cell_entropy(0.5));
}

TEST_CASE("information is nonnegative and bounded by the current entropy") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 9, 9};
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> prob(grid.size());
    for (double& p : prob) p = rng.uniform(0.05, 0.95);
    prob[grid.index({4, 4})] = 0.1;
    const MiMap mi =
        build_mi_map({4.5, 4.5, 0.0}, grid, prob, toy_mi(16, 4.0, 10.0 / 3.0), mi_beam());
    for (int i = 0; i < grid.size(); ++i) {
      CHECK(mi.information[i] >= 0.0);
      CHECK(mi.information[i] <= cell_entropy(prob[i]) + 1e-9);
    }
  }
}

TEST_CASE("identical inputs produce bit-identical maps") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 9, 9};
  std::vector<double> prob(grid.size(), 0.5);
  prob[grid.index({4, 4})] = 0.05;
  prob[grid.index({7, 4})] = 0.9;
  const MiConfig cfg = toy_mi(24, 4.0, 10.0 / 3.0);
  const MiMap a = build_mi_map({4.5, 4.5, 0.0}, grid, prob, cfg, mi_beam());
  const MiMap b = build_mi_map({4.5, 4.5, 0.0}, grid, prob, cfg, mi_beam());
  CHECK(std::memcmp(a.information.data(), b.information.data(),
                    a.information.size() * sizeof(double)) == 0);
}

TEST_CASE("blocking a beam restores the entropy of the cells behind") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 9, 1};
  std::vector<double> open_prob(grid.size(), 0.4);
  open_prob[0] = 0.01;
  const MiConfig cfg = toy_mi(1, 8.0, 4.0);

  std::vector<double> blocked_prob = open_prob;
  blocked_prob[3] = 1.0 - 1e-6;

  const MiMap open_map = build_mi_map({0.5, 0.5, 0.0}, grid, open_prob, cfg, mi_beam());
  const MiMap blocked = build_mi_map({0.5, 0.5, 0.0}, grid, blocked_prob, cfg, mi_beam());

  for (int cx = 4; cx < 9; ++cx) {
    const int idx = grid.index({cx, 0});
    // The measurement can no longer reach these cells: the expected
    // entropy reduction h - I drops to zero (I returns to the full entropy).
    const double extracted_open = cell_entropy(open_prob[idx]) - open_map.information[idx];
    const double extracted_blocked =
        cell_entropy(blocked_prob[idx]) - blocked.information[idx];
    CHECK(extracted_open > 0.0);
    CHECK(extracted_blocked == doctest::Approx(0.0));
    CHECK(extracted_blocked <= extracted_open);
  }
}

TEST_CASE("total_information sums the perception field once") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 9, 9};
  std::vector<double> prob(grid.size(), 1e-6);
  prob[grid.index({6, 4})] = 0.5;  // a single uncertain cell ahead
  const MiConfig cfg = toy_mi(24, 4.0, 10.0 / 3.0);
  const MiMap mi = build_mi_map({4.5, 4.5, 0.0}, grid, prob, cfg, mi_beam());

  // Only the uncertain cell can contribute appreciably; it is crossed by
  // several beams but must be counted once.
  CHECK(total_information(mi) <= std::log(2.0) + 1e-4);

  std::vector<double> certain(grid.size(), 1e-6);
  const MiMap none = build_mi_map({4.5, 4.5, 0.0}, grid, certain, cfg, mi_beam());
  CHECK(total_information(none) < 2e-3);
}

TEST_CASE("lowering the truncation threshold never adds information") {
  // Corridor with a mildly confident wall at the end: with a lower p_o the
  // ray stops there, with a higher one it continues through.
  const GridSpec grid{{0.0, 0.0}, 1.0, 12, 3};
  std::vector<double> prob(grid.size(), 0.45);
  for (int cx = 0; cx < 12; ++cx) {
    prob[grid.index({cx, 0})] = 0.9;
    prob[grid.index({cx, 2})] = 0.9;
  }
  prob[grid.index({0, 1})] = 0.05;
  prob[grid.index({7, 1})] = 0.8;

  MiConfig strict = toy_mi(8, 10.0, 4.0);
  strict.p_o = 0.7;
  MiConfig loose = strict;
  loose.p_o = 0.95;

  const MiMap early = build_mi_map({0.5, 1.5, 0.0}, grid, prob, strict, mi_beam());
  const MiMap late = build_mi_map({0.5, 1.5, 0.0}, grid, prob, loose, mi_beam());
  CHECK(total_information(early) <= total_information(late) + 1e-9);
}

TEST_CASE("vantage validation") {
  const GridSpec grid{{0.0, 0.0}, 1.0, 5, 5};
  std::vector<double> prob(grid.size(), 0.5);
  const MiConfig cfg = toy_mi(8, 3.0, 4.0);
  CHECK_THROWS_AS(build_mi_map({2.5, 2.5, 0.0}, grid, prob, cfg, mi_beam()),
                  std::invalid_argument);  // unknown cell
  prob[grid.index({2, 2})] = 0.95;
  CHECK_THROWS_AS(build_mi_map({2.5, 2.5, 0.0}, grid, prob, cfg, mi_beam()),
                  std::invalid_argument);  // occupied cell
  CHECK_THROWS_AS(build_mi_map({9.5, 2.5, 0.0}, grid, prob, cfg, mi_beam()),
                  std::invalid_argument);  // outside
}
