#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairmiss/distributions.hpp"

namespace fairmiss {

struct LinearFit {
  Eigen::VectorXd beta;  // beta[0] is the intercept
  bool converged = true;
  int iterations = 0;
  bool rank_deficient = false;
};

inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(x.cols()) = x;
  return z;
}

/// Ordinary least squares via column-pivoted QR; on rank deficiency falls back
/// to ridge-damped normal equations (damping 1e-8) and flags the fit.
inline LinearFit fit_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit_least_squares: size mismatch");
  if (x.rows() == 0) throw std::invalid_argument("fit_least_squares: no rows");
  const Eigen::MatrixXd z = with_intercept(x);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  LinearFit fit;
  if (qr.rank() == z.cols()) {
    fit.beta = qr.solve(y);
    return fit;
  }
  fit.rank_deficient = true;
  const Eigen::MatrixXd gram =
      z.transpose() * z + 1e-8 * Eigen::MatrixXd::Identity(z.cols(), z.cols());
  fit.beta = gram.ldlt().solve(z.transpose() * y);
  return fit;
}

/// Penalized binomial log-likelihood; the intercept is not penalized.
inline double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& beta, double lambda) {
  const Eigen::MatrixXd z = with_intercept(x);
  const Eigen::VectorXd eta = z * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // y*log(p) + (1-y)*log(1-p) without overflow
    const double e = eta[i];
    const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y[i] * e - softplus;
  }
  double penalty = 0.0;
  for (Eigen::Index j = 1; j < beta.size(); ++j) penalty += beta[j] * beta[j];
  return ll - 0.5 * lambda * penalty;
}

/// Analytic gradient of logistic_objective with respect to beta.
inline Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& beta, double lambda) {
  const Eigen::MatrixXd z = with_intercept(x);
  const Eigen::VectorXd eta = z * beta;
  Eigen::VectorXd p(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) p[i] = logistic(eta[i]);
  Eigen::VectorXd g = z.transpose() * (y - p);
  for (Eigen::Index j = 1; j < beta.size(); ++j) g[j] -= lambda * beta[j];
  return g;
}

/// L2-regularized logistic regression by damped iteratively reweighted least
/// squares. Converges when the largest coefficient change drops below tol;
/// past max_iter the best iterate is returned with converged=false.
inline LinearFit fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              double lambda = 0.0, int max_iter = 100,
                              double tol = 1e-8) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit_logistic: size mismatch");
  if (x.rows() == 0) throw std::invalid_argument("fit_logistic: no rows");
  const Eigen::MatrixXd z = with_intercept(x);
  const Eigen::Index p = z.cols();

  LinearFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  double obj = logistic_objective(x, y, fit.beta, lambda);

  Eigen::MatrixXd penal = lambda * Eigen::MatrixXd::Identity(p, p);
  penal(0, 0) = 0.0;

  for (int iter = 0; iter < max_iter; ++iter) {
    fit.iterations = iter + 1;
    const Eigen::VectorXd eta = z * fit.beta;
    Eigen::VectorXd prob(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob[i] = logistic(eta[i]);
      w[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-10);
    }
    Eigen::VectorXd grad = z.transpose() * (y - prob);
    for (Eigen::Index j = 1; j < p; ++j) grad[j] -= lambda * fit.beta[j];

    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z + penal;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      hess += 1e-8 * Eigen::MatrixXd::Identity(p, p);
      ldlt.compute(hess);
      fit.rank_deficient = true;
    }
    Eigen::VectorXd step = ldlt.solve(grad);

    // damped step: halve until the penalized log-likelihood does not decrease
    double scale = 1.0;
    Eigen::VectorXd candidate = fit.beta + step;
    double cand_obj = logistic_objective(x, y, candidate, lambda);
    for (int h = 0; h < 30 && cand_obj < obj; ++h) {
      scale *= 0.5;
      candidate = fit.beta + scale * step;
      cand_obj = logistic_objective(x, y, candidate, lambda);
    }
    const double max_change = (scale * step).cwiseAbs().maxCoeff();
    fit.beta = candidate;
    obj = cand_obj;
    if (max_change < tol) return fit;
  }
  fit.converged = false;
  return fit;
}

}  // namespace fairmiss
