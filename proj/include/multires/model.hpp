#pragma once

#include "multires/types.hpp"

namespace multires {

// Softmax category probabilities pi_{i,k} = exp(x_i' b_{:,k}) / sum_j exp(x_i' b_{:,j}),
// stabilized by per-row max subtraction. Entries are clamped into (0, 1) so
// extreme linear predictors cannot produce exact zeros.
ProbabilityMatrix compute_probabilities(const DesignMatrix& x, const CoefficientMatrix& beta);

// Scaled negative log-likelihood, constants dropped:
//   (1/n) sum_i [ n_i * logsumexp_k(x_i' b_{:,k}) - sum_k y_{i,k} x_i' b_{:,k} ].
double negative_log_likelihood(const DesignMatrix& x, const ResponseCounts& y,
                               const CoefficientMatrix& beta);

// Gradient of the scaled negative log-likelihood: (1/n) X' (diag(trials) P - Y).
Eigen::MatrixXd nll_gradient(const DesignMatrix& x, const ResponseCounts& y,
                             const CoefficientMatrix& beta);

namespace detail {

// Linear predictor U = X B with a finiteness check.
Eigen::MatrixXd linear_predictor(const DesignMatrix& x, const CoefficientMatrix& beta);

// Row-stabilized softmax of a linear-predictor matrix.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& u);

// NLL and gradient evaluated from a shared linear predictor; used by the
// solver to avoid recomputing X*B.
double nll_from_predictor(const Eigen::MatrixXd& u, const ResponseCounts& y);
Eigen::MatrixXd gradient_from_predictor(const Eigen::MatrixXd& u, const DesignMatrix& x,
                                        const ResponseCounts& y);

}  // namespace detail

}  // namespace multires
