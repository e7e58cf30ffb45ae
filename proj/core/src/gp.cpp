#include "proxyens/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace proxyens::gp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double matern52(double r_over_l) {
  const double s = std::sqrt(5.0) * r_over_l;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double distance(const WeightVector& a, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Eigen::MatrixXd distance_matrix(const std::vector<WeightVector>& inputs) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = distance(inputs[i], inputs[j]);
    }
  }
  return d;
}

struct Factor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
  bool ok = false;
};

// Cholesky with an escalating diagonal boost: the matrix is first tried as
// given, then with jitter 1e-8 growing tenfold up to 1e-2.
Factor factorize(Eigen::MatrixXd k) {
  static constexpr double kJitters[] = {0.0,  1e-8, 1e-7, 1e-6, 1e-5,
                                        1e-4, 1e-3, 1e-2};
  double added = 0.0;
  for (double j : kJitters) {
    k.diagonal().array() += j - added;
    added = j;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    bool clean = true;
    for (Eigen::Index i = 0; i < lower.rows() && clean; ++i) {
      clean = std::isfinite(lower(i, i)) && lower(i, i) > 0.0;
    }
    if (clean) return {std::move(lower), j, true};
  }
  return {};
}

double lml_from_factor(const Eigen::MatrixXd& lower, const Eigen::VectorXd& y) {
  const Eigen::VectorXd tmp =
      lower.triangularView<Eigen::Lower>().solve(y);
  const double half_logdet = lower.diagonal().array().log().sum();
  return -0.5 * tmp.squaredNorm() - half_logdet -
         0.5 * double(y.size()) * kLog2Pi;
}

void check_training_set(const std::vector<WeightVector>& inputs,
                        const std::vector<double>& targets) {
  if (inputs.size() != targets.size()) {
    throw std::invalid_argument("gp: inputs/targets length mismatch");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw std::invalid_argument("gp: non-finite target");
  }
  for (const auto& w : inputs) {
    if (w.size() != inputs.front().size()) {
      throw std::invalid_argument("gp: inputs differ in dimension");
    }
  }
}

GPState assemble_state(const std::vector<WeightVector>& inputs,
                       const Eigen::VectorXd& y_std, const KernelParams& p,
                       double mean, double stddev, Factor factor) {
  GPState s;
  s.inputs = inputs;
  s.params = p;
  s.target_mean = mean;
  s.target_std = stddev;
  s.jitter = factor.jitter;
  const Eigen::VectorXd tmp =
      factor.lower.triangularView<Eigen::Lower>().solve(y_std);
  s.alpha = factor.lower.transpose()
                .triangularView<Eigen::Upper>()
                .solve(tmp);
  s.chol_lower = std::move(factor.lower);
  return s;
}

}  // namespace

double kernel_eval(const KernelParams& p, const WeightVector& a,
                   const WeightVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  if (p.lengthscale <= 0.0 || p.signal_variance <= 0.0) {
    throw std::invalid_argument("kernel_eval: non-positive hyperparameter");
  }
  return p.signal_variance * matern52(distance(a, b) / p.lengthscale);
}

double log_marginal_likelihood(const std::vector<WeightVector>& inputs,
                               const std::vector<double>& targets,
                               const KernelParams& p) {
  if (inputs.empty()) {
    throw std::invalid_argument("log_marginal_likelihood: no observations");
  }
  check_training_set(inputs, targets);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = p.signal_variance *
                matern52(distance(inputs[i], inputs[j]) / p.lengthscale);
    }
  }
  k.diagonal().array() += p.noise_variance;
  Factor f = factorize(std::move(k));
  if (!f.ok) {
    throw std::runtime_error("log_marginal_likelihood: factorization failed");
  }
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
  return lml_from_factor(f.lower, y);
}

GPState fit(const std::vector<WeightVector>& inputs,
            const std::vector<double>& targets, const HyperGrid& grid) {
  if (inputs.empty()) return GPState{};
  check_training_set(inputs, targets);
  if (grid.lengthscale_factors.empty() || grid.signal_variances.empty() ||
      grid.noise_variances.empty()) {
    throw std::invalid_argument("gp fit: empty hyperparameter grid");
  }

  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
  const double mean = y.mean();
  double stddev = std::sqrt((y.array() - mean).square().sum() / double(n));
  if (!(stddev > 1e-12)) stddev = 1.0;
  const Eigen::VectorXd y_std = (y.array() - mean) / stddev;

  const double root_dim = std::sqrt(double(inputs.front().size()));
  const Eigen::MatrixXd dist = distance_matrix(inputs);

  double best_lml = -std::numeric_limits<double>::infinity();
  KernelParams best_params;
  Factor best_factor;
  for (double lf : grid.lengthscale_factors) {
    const double ell = lf * root_dim;
    const Eigen::MatrixXd gram =
        dist.unaryExpr([ell](double r) { return matern52(r / ell); });
    for (double sf2 : grid.signal_variances) {
      for (double sn2 : grid.noise_variances) {
        Eigen::MatrixXd k = sf2 * gram;
        k.diagonal().array() += sn2;
        Factor f = factorize(std::move(k));
        if (!f.ok) continue;
        const double lml = lml_from_factor(f.lower, y_std);
        if (lml > best_lml) {
          best_lml = lml;
          best_params = {sf2, ell, sn2};
          best_factor = std::move(f);
        }
      }
    }
  }
  if (!best_factor.ok) {
    throw std::runtime_error("gp fit: factorization failed on every grid point");
  }
  return assemble_state(inputs, y_std, best_params, mean, stddev,
                        std::move(best_factor));
}

GPState fit(const std::vector<WeightVector>& inputs,
            const std::vector<double>& targets, const KernelParams& params) {
  if (inputs.empty()) {
    GPState s;
    s.params = params;
    return s;
  }
  check_training_set(inputs, targets);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
  const double mean = y.mean();
  double stddev = std::sqrt((y.array() - mean).square().sum() / double(n));
  if (!(stddev > 1e-12)) stddev = 1.0;
  const Eigen::VectorXd y_std = (y.array() - mean) / stddev;

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = params.signal_variance *
                matern52(distance(inputs[i], inputs[j]) / params.lengthscale);
    }
  }
  k.diagonal().array() += params.noise_variance;
  Factor f = factorize(std::move(k));
  if (!f.ok) throw std::runtime_error("gp fit: factorization failed");
  return assemble_state(inputs, y_std, params, mean, stddev, std::move(f));
}

Prediction predict(const GPState& state, const WeightVector& query) {
  std::vector<double> means, vars;
  predict_batch(state, std::span<const WeightVector>(&query, 1), means, vars);
  return {means[0], vars[0]};
}

void predict_batch(const GPState& state, std::span<const WeightVector> queries,
                   std::vector<double>& means, std::vector<double>& variances) {
  const std::size_t c = queries.size();
  means.assign(c, state.target_mean);
  variances.assign(c, state.params.signal_variance);
  if (state.inputs.empty()) {
    for (double& m : means) m = 0.0;  // prior has constant mean zero
    return;
  }
  for (const auto& q : queries) {
    if (q.size() != state.inputs.front().size()) {
      throw std::invalid_argument("predict: query dimension mismatch");
    }
  }
  const auto n = static_cast<Eigen::Index>(state.inputs.size());
  Eigen::MatrixXd kc(n, static_cast<Eigen::Index>(c));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(c); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      kc(i, j) = kernel_eval(state.params, state.inputs[i],
                             queries[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::VectorXd mean_std = kc.transpose() * state.alpha;
  const Eigen::MatrixXd v =
      state.chol_lower.triangularView<Eigen::Lower>().solve(kc);
  for (std::size_t j = 0; j < c; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    means[j] = state.target_mean + state.target_std * mean_std(jj);
    variances[j] =
        std::max(0.0, state.params.signal_variance - v.col(jj).squaredNorm());
  }
}

}  // namespace proxyens::gp
