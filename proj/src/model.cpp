#include "multires/model.hpp"

#include <cfloat>
#include <cmath>

#include "multires/errors.hpp"

namespace multires {
namespace detail {

Eigen::MatrixXd linear_predictor(const DesignMatrix& x, const CoefficientMatrix& beta) {
  if (x.p() != static_cast<int>(beta.values.rows())) {
    throw ValidationError("design matrix and coefficient matrix have incompatible shapes");
  }
  Eigen::MatrixXd u = x.values * beta.values;
  if (!u.allFinite()) {
    throw NumericalError("linear predictor overflowed");
  }
  return u;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows();
  const Eigen::Index k = u.cols();
  Eigen::MatrixXd p(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = u.row(i).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double e = std::exp(u(i, j) - m);
      p(i, j) = e;
      denom += e;
    }
    // denom >= 1 because the max term contributes exp(0) = 1.
    for (Eigen::Index j = 0; j < k; ++j) {
      double v = p(i, j) / denom;
      if (v < DBL_MIN) v = DBL_MIN;                      // keep strictly positive
      if (v > 1.0 - DBL_EPSILON) v = 1.0 - DBL_EPSILON;  // keep strictly below one
      p(i, j) = v;
    }
  }
  return p;
}

double nll_from_predictor(const Eigen::MatrixXd& u, const ResponseCounts& y) {
  const Eigen::Index n = u.rows();
  const Eigen::Index k = u.cols();
  if (y.counts.rows() != n || y.counts.cols() != k) {
    throw ValidationError("response and linear predictor have incompatible shapes");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = u.row(i).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) denom += std::exp(u(i, j) - m);
    const double lse = m + std::log(denom);
    total += static_cast<double>(y.trials(i)) * lse;
    for (Eigen::Index j = 0; j < k; ++j) {
      total -= static_cast<double>(y.counts(i, j)) * u(i, j);
    }
  }
  const double value = total / static_cast<double>(n);
  if (!std::isfinite(value)) {
    throw NumericalError("negative log-likelihood is not finite");
  }
  return value;
}

Eigen::MatrixXd gradient_from_predictor(const Eigen::MatrixXd& u, const DesignMatrix& x,
                                        const ResponseCounts& y) {
  const Eigen::Index n = u.rows();
  if (y.counts.rows() != n || y.counts.cols() != u.cols()) {
    throw ValidationError("response and linear predictor have incompatible shapes");
  }
  Eigen::MatrixXd p = softmax_rows(u);
  // residual R = diag(trials) P - Y, gradient = (1/n) X' R
  for (Eigen::Index i = 0; i < n; ++i) {
    p.row(i) *= static_cast<double>(y.trials(i));
  }
  p -= y.counts.cast<double>();
  Eigen::MatrixXd g = (x.values.transpose() * p) / static_cast<double>(n);
  if (!g.allFinite()) {
    throw NumericalError("gradient is not finite");
  }
  return g;
}

}  // namespace detail

ProbabilityMatrix compute_probabilities(const DesignMatrix& x, const CoefficientMatrix& beta) {
  ProbabilityMatrix out;
  out.values = detail::softmax_rows(detail::linear_predictor(x, beta));
  return out;
}

double negative_log_likelihood(const DesignMatrix& x, const ResponseCounts& y,
                               const CoefficientMatrix& beta) {
  if (x.n() != static_cast<int>(y.counts.rows())) {
    throw ValidationError("design matrix and response have different row counts");
  }
  return detail::nll_from_predictor(detail::linear_predictor(x, beta), y);
}

Eigen::MatrixXd nll_gradient(const DesignMatrix& x, const ResponseCounts& y,
                             const CoefficientMatrix& beta) {
  if (x.n() != static_cast<int>(y.counts.rows())) {
    throw ValidationError("design matrix and response have different row counts");
  }
  return detail::gradient_from_predictor(detail::linear_predictor(x, beta), x, y);
}

}  // namespace multires
