#pragma once

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gpom/geometry.hpp"

namespace gpom {

enum class KernelFamily { Matern32, Matern52 };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

struct KernelConfig {
  KernelFamily family = KernelFamily::Matern32;
  double length_scale = 1.0;     // kappa, m
  double signal_variance = 1.0;

  void validate() const;
};

double kernel_eval(const Vec2& a, const Vec2& b, const KernelConfig& cfg);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

inline constexpr double kVarianceFloor = 1e-6;

/// Exact GP regressor over 2D points with a cached Cholesky factorization.
/// Fitted models are immutable; predict is safe to call concurrently.
class GpModel {
 public:
  static constexpr int kMaxTrainingPoints = 2000;

  /// Factorizes K + sigma_n^2 I, climbing an adaptive jitter ladder
  /// (from 1e-10 * trace/n by factors of 10, up to 1e-4 * trace/n) if the
  /// plain matrix is not positive definite.
  static GpModel fit(std::vector<Vec2> inputs, Eigen::VectorXd targets,
                     const KernelConfig& kernel, double noise_variance);

  std::vector<Prediction> predict(const std::vector<Vec2>& queries) const;
  Prediction predict_one(const Vec2& query) const;

  int size() const { return static_cast<int>(inputs_.size()); }
  const KernelConfig& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  double jitter() const { return jitter_; }

 private:
  GpModel() = default;

  std::vector<Vec2> inputs_;
  Eigen::VectorXd targets_;
  Eigen::VectorXd alpha_;  // (K + sigma_n^2 I)^-1 y
  Eigen::LLT<Eigen::MatrixXd> llt_;
  KernelConfig kernel_;
  double noise_variance_ = 0.0;
  double jitter_ = 0.0;
};

struct NlmlResult {
  double value = 0.0;
  // Gradient w.r.t. (log length_scale, log signal_variance, log noise_variance).
  double d_log_length_scale = 0.0;
  double d_log_signal_variance = 0.0;
  double d_log_noise_variance = 0.0;
};

/// Negative log marginal likelihood with its analytic gradient in
/// log-parameter space.
NlmlResult nlml(const std::vector<Vec2>& inputs, const Eigen::VectorXd& targets,
                const KernelConfig& kernel, double noise_variance);

struct Hyperparams {
  KernelConfig kernel;
  double noise_variance = 1e-2;
};

struct OptimizeOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
  double min_step = 1e-14;
};

/// BFGS with backtracking line search on the log parameters.
/// Deterministic; the returned value never exceeds nlml at the init.
Hyperparams optimize_hyperparameters(const std::vector<Vec2>& inputs,
                                     const Eigen::VectorXd& targets, const Hyperparams& init,
                                     const OptimizeOptions& options = {});

/// Flat key=value persistence (family, kappa, signal_variance, noise_variance).
void save_hyperparams(const std::string& path, const Hyperparams& params);
Hyperparams load_hyperparams(const std::string& path);

}  // namespace gpom
