#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <stdexcept>
#include <vector>

namespace fairmiss {

namespace detail {

/// RBF kernel rows over a row-major matrix, with a full-matrix fast path and
/// an LRU row cache once the full matrix would exceed the byte budget.
class RbfKernel {
 public:
  RbfKernel(const double* x, std::size_t n, std::size_t p, double gamma,
            std::size_t max_bytes = std::size_t(256) << 20)
      : x_(x), n_(n), p_(p), gamma_(gamma) {
    if (n_ * n_ * sizeof(double) <= max_bytes) {
      full_.assign(n_ * n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        full_[i * n_ + i] = 1.0;
        for (std::size_t j = i + 1; j < n_; ++j) {
          const double k = value(i, j);
          full_[i * n_ + j] = k;
          full_[j * n_ + i] = k;
        }
      }
    } else {
      const std::size_t cap = std::max<std::size_t>(4, max_bytes / (n_ * sizeof(double)));
      capacity_ = cap;
      slot_of_.assign(n_, SIZE_MAX);
    }
  }

  const double* row(std::size_t i) {
    if (!full_.empty()) return full_.data() + i * n_;
    if (slot_of_[i] != SIZE_MAX) {
      touch(i);
      return slots_[slot_of_[i]].data();
    }
    std::size_t slot;
    if (slots_.size() < capacity_) {
      slot = slots_.size();
      slots_.emplace_back(n_);
    } else {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      slot = slot_of_[victim];
      slot_of_[victim] = SIZE_MAX;
    }
    auto& dst = slots_[slot];
    dst.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) dst[j] = value(i, j);
    slot_of_[i] = slot;
    lru_.push_front(i);
    return dst.data();
  }

  double value(std::size_t i, std::size_t j) const {
    const double* a = x_ + i * p_;
    const double* b = x_ + j * p_;
    double d2 = 0.0;
    for (std::size_t k = 0; k < p_; ++k) {
      const double d = a[k] - b[k];
      d2 += d * d;
    }
    return std::exp(-gamma_ * d2);
  }

 private:
  void touch(std::size_t i) {
    for (auto it = lru_.begin(); it != lru_.end(); ++it)
      if (*it == i) {
        lru_.erase(it);
        break;
      }
    lru_.push_front(i);
  }

  const double* x_;
  std::size_t n_, p_;
  double gamma_;
  std::vector<double> full_;
  std::vector<std::vector<double>> slots_;
  std::vector<std::size_t> slot_of_;
  std::list<std::size_t> lru_;
  std::size_t capacity_ = 0;
};

}  // namespace detail

struct SvmParams {
  double c = 1.0;
  double gamma = 0.1;
  double tol = 1e-3;        // KKT tolerance
  std::size_t max_steps = 0;  // 0 = max(200000, 100 n)
};

/// Soft-margin RBF SVM trained by sequential minimal optimization with
/// maximal-violating-pair working set selection.
struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coef;            // alpha_i * y_i per support vector
  std::vector<std::size_t> sv_index;   // row index in the training set
  double rho = 0.0;
  double gamma = 0.1;
  bool converged = true;
  std::size_t steps = 0;

  double decision(const double* row, std::size_t p) const {
    double f = 0.0;
    for (std::size_t s = 0; s < support_vectors.size(); ++s) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        const double d = support_vectors[s][k] - row[k];
        d2 += d * d;
      }
      f += coef[s] * std::exp(-gamma * d2);
    }
    return f - rho;
  }
  /// Label 1 on the non-negative side of the decision surface.
  int predict_row(const double* row, std::size_t p) const {
    return decision(row, p) >= 0.0 ? 1 : 0;
  }
};

/// y holds labels in {0, 1}; they are mapped onto {-1, +1} internally.
inline SvmModel fit_svm(const double* x, std::size_t n, std::size_t p,
                        const std::vector<int>& y01, const SvmParams& params) {
  if (n == 0) throw std::invalid_argument("fit_svm: empty data");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = y01[i] == 1 ? 1.0 : -1.0;

  const double c = params.c;
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  detail::RbfKernel kernel(x, n, p, params.gamma);

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
  };

  const std::size_t max_steps =
      params.max_steps > 0 ? params.max_steps : std::max<std::size_t>(200000, 100 * n);
  SvmModel model;
  model.gamma = params.gamma;

  double m_up = 0.0, m_low = 0.0;
  for (model.steps = 0; model.steps < max_steps; ++model.steps) {
    // maximal violating pair
    std::size_t i = SIZE_MAX, j = SIZE_MAX;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i == SIZE_MAX || j == SIZE_MAX || m_up - m_low <= params.tol) break;

    const double* ki = kernel.row(i);
    const double* kj = kernel.row(j);
    const double quad = std::max(ki[i] + kj[j] - 2.0 * ki[j], 1e-12);
    const double ai_old = alpha[i], aj_old = alpha[j];

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double di = (alpha[i] - ai_old) * y[i];
    const double dj = (alpha[j] - aj_old) * y[j];
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (di * ki[t] + dj * kj[t]);
  }
  model.converged = m_up - m_low <= params.tol;

  // rho from free support vectors, midpoint of the violating gap otherwise
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0 && alpha[t] < c) {
      sum_free += y[t] * grad[t];
      ++n_free;
    }
  model.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : -(m_up + m_low) / 2.0;

  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0) {
      model.support_vectors.emplace_back(x + t * p, x + (t + 1) * p);
      model.coef.push_back(alpha[t] * y[t]);
      model.sv_index.push_back(t);
    }
  return model;
}

}  // namespace fairmiss
