#pragma once

#include <cstdint>
#include <limits>

#include "multires/solver.hpp"

namespace multires {

// Closed-form null model: intercept row set to the centered log empirical
// category frequencies (clamped away from zero), every other row zero. When
// the design has no intercept column the reference is simply beta = 0.
CoefficientMatrix intercept_only_fit(const DesignMatrix& x, const ResponseCounts& y);

// Smallest gamma whose optimum zeroes every penalized row, inflated by 1e-6
// so a fit at the returned value lands on exact zeros rather than on the
// knife edge. Throws ValidationError when the null-model gradient vanishes.
double gamma_max(const DesignMatrix& x, const ResponseCounts& y);

// Lambda scale taken from the centering components of the null-model
// gradient, then doubled until a fit at (gamma = 0, lambda) is exactly
// constant within every group. The returned value therefore certifiably
// collapses the model.
double lambda_max(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                  const SolverConfig& config = {});

// count values log-spaced from top down to top*min_ratio (count = 1 keeps
// just top).
std::vector<double> log_spaced_grid(double top, int count, double min_ratio);

// Log-spaced gamma grid from gamma_max down to gamma_max*min_ratio, and a
// log-spaced lambda grid from lambda_max with 0 appended (so the pure
// row-sparsity model lies on the grid). An empty structure yields
// lambdas = {0}.
TuningGrid build_grid(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                      int n_gamma, int n_lambda, double min_ratio,
                      const SolverConfig& config = {});

struct MetricsReport {
    double hellinger = std::numeric_limits<double>::quiet_NaN();      // needs true probabilities
    double kl_divergence = std::numeric_limits<double>::quiet_NaN();  // needs true probabilities
    double classification_error = 0.0;
    double deviance = 0.0;
    int degrees_of_freedom = 0;
};

// 2 * n * G(beta): twice the total negative log-likelihood.
double deviance(const DesignMatrix& x, const ResponseCounts& y, const CoefficientMatrix& beta);

// Same quantity evaluated from predicted probabilities (clamped at 1e-300
// before the log); used by models that predict without a single beta.
double deviance_from_probabilities(const ProbabilityMatrix& probs, const ResponseCounts& y);

// Sum over rows of the number of distinct values: unpenalized rows count K,
// all-zero penalized rows count 0, anything else counts its distinct values
// under exact equality (the prox writes shared values exactly).
int degrees_of_freedom(const CoefficientMatrix& beta);

// hellinger = mean over rows of (1/sqrt(2))*||sqrt(p_hat) - sqrt(pi)||_2;
// kl = mean row KL(pi || p_hat); classification error compares argmax of
// p_hat with the observed category (ties resolved to the lowest index).
// pi_true may be null, leaving hellinger/kl as NaN.
MetricsReport evaluate_metrics(const CoefficientMatrix& beta, const DesignMatrix& x_test,
                               const ResponseCounts& y_test,
                               const ProbabilityMatrix* pi_true = nullptr);

MetricsReport evaluate_metrics_from_probabilities(const ProbabilityMatrix& probs,
                                                  const ResponseCounts& y_test,
                                                  const ProbabilityMatrix* pi_true,
                                                  int degrees_of_freedom);

struct SelectionResult {
    int gamma_index = -1;
    int lambda_index = -1;
    double gamma = 0.0;
    double lambda = 0.0;
    double validation_deviance = std::numeric_limits<double>::infinity();
    FitResult fit;
};

// Cell minimizing validation deviance; exact ties go to the larger gamma,
// then the larger lambda (the sparser model). Throws when every cell failed.
SelectionResult select_model(const FitPath& path, const DesignMatrix& x_val,
                             const ResponseCounts& y_val);

struct BicSelectionResult {
    int gamma_index = -1;
    int lambda_index = -1;
    double gamma = 0.0;
    double lambda = 0.0;
    double bic = std::numeric_limits<double>::infinity();
    FitResult fit;
};

// Cell minimizing BIC = training deviance + log(n_train) * degrees_of_freedom,
// with the same tie rule as select_model. Validation deviance is the better
// predictor but keeps many small spurious rows, so structure readouts use this
// selection-consistent rule instead.
BicSelectionResult select_by_bic(const FitPath& path, const DesignMatrix& x_train,
                                 const ResponseCounts& y_train);

// Fold labels in [0, folds) assigned by a seeded shuffle; sizes differ by at
// most one.
std::vector<int> cv_fold_assignment(int n, int folds, std::uint64_t seed);

struct CrossValidationResult {
    TuningGrid grid;
    Eigen::MatrixXd mean_deviance;  // n_gamma x n_lambda; NaN where any fold failed
    int gamma_index = -1;
    int lambda_index = -1;
    double gamma = 0.0;
    double lambda = 0.0;
};

// K-fold estimate of the validation deviance per grid cell; folds run in
// parallel, fold deviances are averaged in fold order.
CrossValidationResult cross_validate(const DesignMatrix& x, const ResponseCounts& y,
                                     const CoarseStructure& s, const TuningGrid& grid,
                                     int folds, std::uint64_t seed,
                                     const SolverConfig& config = {}, int threads = 1);

}  // namespace multires
