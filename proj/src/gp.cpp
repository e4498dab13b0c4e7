#include "gpom/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpom {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

// Kernel value and its derivative w.r.t. log(length_scale) at distance r.
struct KernelValue {
  double k;
  double d_log_kappa;
};

KernelValue kernel_at(double r, const KernelConfig& cfg) {
  switch (cfg.family) {
    case KernelFamily::Matern32: {
      const double s = kSqrt3 * r / cfg.length_scale;
      const double e = std::exp(-s);
      return {cfg.signal_variance * (1.0 + s) * e, cfg.signal_variance * s * s * e};
    }
    case KernelFamily::Matern52: {
      const double s = kSqrt5 * r / cfg.length_scale;
      const double e = std::exp(-s);
      return {cfg.signal_variance * (1.0 + s + s * s / 3.0) * e,
              cfg.signal_variance * (s * s / 3.0) * (1.0 + s) * e};
    }
  }
  throw std::logic_error("kernel_at: unknown family");
}

Eigen::MatrixXd kernel_matrix(const std::vector<Vec2>& x, const KernelConfig& cfg) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = cfg.signal_variance;
    for (int j = i + 1; j < n; ++j) {
      const double v = kernel_at(norm(x[i] - x[j]), cfg).k;
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Cholesky with the adaptive jitter ladder; returns the jitter used.
double factorize(const Eigen::MatrixXd& gram, double noise_variance,
                 Eigen::LLT<Eigen::MatrixXd>& llt) {
  const int n = static_cast<int>(gram.rows());
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += noise_variance;
  llt.compute(a);
  if (llt.info() == Eigen::Success) return 0.0;

  const double scale = a.trace() / n;
  double jitter = 1e-10 * scale;
  const double max_jitter = 1e-4 * scale;
  while (jitter <= max_jitter) {
    Eigen::MatrixXd aj = a;
    aj.diagonal().array() += jitter;
    llt.compute(aj);
    if (llt.info() == Eigen::Success) return jitter;
    jitter *= 10.0;
  }
  std::ostringstream msg;
  msg << "GP factorization failed after jitter " << max_jitter;
  throw std::runtime_error(msg.str());
}

}  // namespace

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw std::invalid_argument("unknown kernel family: " + name);
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::Matern32 ? "matern32" : "matern52";
}

void KernelConfig::validate() const {
  if (!(length_scale > 0.0) || !(signal_variance > 0.0))
    throw std::invalid_argument("KernelConfig: length_scale and signal_variance must be > 0");
}

double kernel_eval(const Vec2& a, const Vec2& b, const KernelConfig& cfg) {
  cfg.validate();
  return kernel_at(norm(a - b), cfg).k;
}

GpModel GpModel::fit(std::vector<Vec2> inputs, Eigen::VectorXd targets,
                     const KernelConfig& kernel, double noise_variance) {
  kernel.validate();
  const int n = static_cast<int>(inputs.size());
  if (n < 1 || targets.size() != n)
    throw std::invalid_argument("GpModel::fit: empty or mismatched training set");
  if (n > kMaxTrainingPoints)
    throw std::invalid_argument("GpModel::fit: training set exceeds the exact-GP cap");
  if (noise_variance < 0.0) throw std::invalid_argument("GpModel::fit: negative noise variance");

  GpModel model;
  model.inputs_ = std::move(inputs);
  model.targets_ = std::move(targets);
  model.kernel_ = kernel;
  model.noise_variance_ = noise_variance;
  model.jitter_ = factorize(kernel_matrix(model.inputs_, kernel), noise_variance, model.llt_);
  model.alpha_ = model.llt_.solve(model.targets_);
  return model;
}

std::vector<Prediction> GpModel::predict(const std::vector<Vec2>& queries) const {
  const int n = size();
  const int m = static_cast<int>(queries.size());
  Eigen::MatrixXd k_star(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      k_star(i, j) = kernel_at(norm(inputs_[i] - queries[j]), kernel_).k;

  // var = k(x,x) - ||L^-1 k_*||^2, reusing the cached factorization.
  const Eigen::MatrixXd v = llt_.matrixL().solve(k_star);
  std::vector<Prediction> out(m);
  for (int j = 0; j < m; ++j) {
    const double mean = k_star.col(j).dot(alpha_);
    const double variance = kernel_.signal_variance - v.col(j).squaredNorm();
    out[j] = {mean, std::max(variance, kVarianceFloor)};
  }
  return out;
}

Prediction GpModel::predict_one(const Vec2& query) const { return predict({query})[0]; }

NlmlResult nlml(const std::vector<Vec2>& inputs, const Eigen::VectorXd& targets,
                const KernelConfig& kernel, double noise_variance) {
  kernel.validate();
  const int n = static_cast<int>(inputs.size());
  if (n < 1 || targets.size() != n) throw std::invalid_argument("nlml: invalid training set");

  Eigen::MatrixXd gram(n, n);
  Eigen::MatrixXd d_kappa(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = kernel.signal_variance;
    d_kappa(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const KernelValue v = kernel_at(norm(inputs[i] - inputs[j]), kernel);
      gram(i, j) = gram(j, i) = v.k;
      d_kappa(i, j) = d_kappa(j, i) = v.d_log_kappa;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt;
  factorize(gram, noise_variance, llt);
  const Eigen::VectorXd alpha = llt.solve(targets);

  NlmlResult out;
  out.value = 0.5 * targets.dot(alpha) + llt.matrixLLT().diagonal().array().log().sum() +
              0.5 * n * std::log(2.0 * M_PI);

  // d nlml / d theta = 0.5 tr((K^-1 - alpha alpha^T) dK/dtheta)
  const Eigen::MatrixXd k_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd w = k_inv - alpha * alpha.transpose();
  out.d_log_length_scale = 0.5 * w.cwiseProduct(d_kappa).sum();
  out.d_log_signal_variance = 0.5 * w.cwiseProduct(gram).sum();
  out.d_log_noise_variance = 0.5 * noise_variance * w.trace();
  return out;
}

Hyperparams optimize_hyperparameters(const std::vector<Vec2>& inputs,
                                     const Eigen::VectorXd& targets, const Hyperparams& init,
                                     const OptimizeOptions& options) {
  init.kernel.validate();
  if (static_cast<int>(inputs.size()) > GpModel::kMaxTrainingPoints)
    throw std::invalid_argument("optimize_hyperparameters: training set exceeds the exact-GP cap");
  if (!(init.noise_variance > 0.0))
    throw std::invalid_argument("optimize_hyperparameters: noise variance must be > 0");

  const double log_lo = std::log(1e-4);
  const double log_hi = std::log(1e4);
  auto clamp_log = [&](Eigen::Vector3d v) {
    for (int i = 0; i < 3; ++i) v[i] = std::clamp(v[i], log_lo, log_hi);
    return v;
  };
  auto unpack = [&](const Eigen::Vector3d& v) {
    Hyperparams p = init;
    p.kernel.length_scale = std::exp(v[0]);
    p.kernel.signal_variance = std::exp(v[1]);
    p.noise_variance = std::exp(v[2]);
    return p;
  };
  auto evaluate = [&](const Eigen::Vector3d& v, Eigen::Vector3d* grad) {
    const Hyperparams p = unpack(v);
    const NlmlResult r = nlml(inputs, targets, p.kernel, p.noise_variance);
    if (grad) *grad = {r.d_log_length_scale, r.d_log_signal_variance, r.d_log_noise_variance};
    return r.value;
  };

  Eigen::Vector3d x = clamp_log({std::log(init.kernel.length_scale),
                                 std::log(init.kernel.signal_variance),
                                 std::log(init.noise_variance)});
  Eigen::Vector3d grad;
  double value = evaluate(x, &grad);
  Eigen::Vector3d best_x = x;
  double best_value = value;

  // BFGS on the 3-dim log-parameter space with Armijo backtracking.
  Eigen::Matrix3d h_inv = Eigen::Matrix3d::Identity();
  for (int it = 0; it < options.max_iterations; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;

    Eigen::Vector3d direction = -h_inv * grad;
    if (direction.dot(grad) >= 0.0) {
      h_inv.setIdentity();
      direction = -grad;
    }

    double step = 1.0;
    Eigen::Vector3d x_new;
    double value_new = value;
    bool accepted = false;
    while (step >= options.min_step) {
      x_new = clamp_log(x + step * direction);
      try {
        value_new = evaluate(x_new, nullptr);
      } catch (const std::runtime_error&) {
        step *= 0.5;
        continue;
      }
      if (value_new <= value + 1e-4 * step * grad.dot(direction)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::Vector3d grad_new;
    evaluate(x_new, &grad_new);
    const Eigen::Vector3d s = x_new - x;
    const Eigen::Vector3d y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
      const Eigen::Matrix3d v = i3 - s * y.transpose() / sy;
      h_inv = v * h_inv * v.transpose() + s * s.transpose() / sy;
    } else {
      h_inv.setIdentity();
    }
    x = x_new;
    value = value_new;
    grad = grad_new;
    if (value < best_value) {
      best_value = value;
      best_x = x;
    }
  }
  return unpack(best_x);
}

void save_hyperparams(const std::string& path, const Hyperparams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write hyperparameter file: " + path);
  out.precision(17);
  out << "family=" << to_string(params.kernel.family) << "\n"
      << "kappa=" << params.kernel.length_scale << "\n"
      << "signal_variance=" << params.kernel.signal_variance << "\n"
      << "noise_variance=" << params.noise_variance << "\n";
}

Hyperparams load_hyperparams(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read hyperparameter file: " + path);
  Hyperparams params;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed hyperparameter line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "family")
      params.kernel.family = kernel_family_from_string(value);
    else if (key == "kappa")
      params.kernel.length_scale = std::stod(value);
    else if (key == "signal_variance")
      params.kernel.signal_variance = std::stod(value);
    else if (key == "noise_variance")
      params.noise_variance = std::stod(value);
    else
      throw std::runtime_error("unknown hyperparameter key: " + key);
  }
  params.kernel.validate();
  return params;
}

}  // namespace gpom
