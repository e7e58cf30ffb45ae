#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "proxyens/ensemble.hpp"

namespace proxyens::gp {

struct KernelParams {
  double signal_variance = 1.0;
  double lengthscale = 1.0;
  double noise_variance = 1e-6;
};

// Matern nu=5/2 on the Euclidean distance r = |a - b|:
//   sigma_f^2 (1 + sqrt(5) r / l + 5 r^2 / (3 l^2)) exp(-sqrt(5) r / l)
double kernel_eval(const KernelParams& p, const WeightVector& a,
                   const WeightVector& b);

// Hyperparameter grid searched by fit(); lengthscale factors are multiples
// of sqrt(input dimension).
struct HyperGrid {
  std::vector<double> lengthscale_factors{0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> signal_variances{0.5, 1.0, 2.0};
  std::vector<double> noise_variances{1e-6, 1e-4, 1e-2};
};

// Posterior state over standardized targets. Predictions report the mean in
// original target units while the variance stays in kernel units so it is
// bounded by the prior signal_variance.
struct GPState {
  std::vector<WeightVector> inputs;
  KernelParams params;
  double target_mean = 0.0;
  double target_std = 1.0;
  double jitter = 0.0;             // diagonal boost needed for factorization
  Eigen::MatrixXd chol_lower;      // K + noise I (+ jitter I) = L L^T
  Eigen::VectorXd alpha;           // (K + noise I)^-1 standardized targets

  std::size_t observation_count() const { return inputs.size(); }
};

// -1/2 y^T K^-1 y - 1/2 log|K| - n/2 log(2 pi) with K = gram + noise I,
// evaluated on the targets exactly as given. Throws when K cannot be
// factorized even at maximal jitter or when n = 0.
double log_marginal_likelihood(const std::vector<WeightVector>& inputs,
                               const std::vector<double>& targets,
                               const KernelParams& p);

// Standardizes targets, grid-searches the hyperparameters by marginal
// likelihood (ties keep the earlier grid point) and caches the Cholesky
// factorization. An empty observation set yields the prior state.
GPState fit(const std::vector<WeightVector>& inputs,
            const std::vector<double>& targets, const HyperGrid& grid = {});

// Same, with the hyperparameters fixed.
GPState fit(const std::vector<WeightVector>& inputs,
            const std::vector<double>& targets, const KernelParams& params);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

// mean = k^T alpha de-standardized; variance = k(q,q) - |L^-1 k|^2 floored
// at zero. The empty state returns the prior (0, signal_variance).
Prediction predict(const GPState& state, const WeightVector& query);

// Batched predictions sharing one triangular solve.
void predict_batch(const GPState& state, std::span<const WeightVector> queries,
                   std::vector<double>& means, std::vector<double>& variances);

}  // namespace proxyens::gp
