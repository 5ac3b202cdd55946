#pragma once

#include <string>
#include <vector>

#include "multires/selection.hpp"

namespace multires {

// Row group lasso: the lambda = 0 special case, swept over a gamma grid.
FitPath fit_group(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                  const std::vector<double>& gamma_grid, const SolverConfig& config = {});

// Elementwise penalty G(beta) + gamma * sum over penalized rows of ||beta_j||_1,
// solved by the same proximal gradient engine with a soft-threshold prox.
FitPath fit_l1(const DesignMatrix& x, const ResponseCounts& y,
               const std::vector<double>& gamma_grid, const SolverConfig& config = {});

// Max over rows of the Euclidean norm of the elementwise stationarity
// residual: g_jk + gamma*sign(beta_jk) at nonzeros, soft-thresholded gradient
// at zeros.
double kkt_residual_l1(const DesignMatrix& x, const ResponseCounts& y,
                       const CoefficientMatrix& beta, double gamma);

// Largest penalized-entry gradient magnitude at the null model, inflated by
// 1e-6; at this gamma the l1 optimum zeroes every penalized entry.
double gamma_max_l1(const DesignMatrix& x, const ResponseCounts& y);

struct ApproxConfig {
    int n_gamma = 20;
    double min_ratio = 1e-3;
    SolverConfig solver;
};

struct ApproxConditional {
    std::vector<int> categories;  // fine categories of this coarse class
    bool has_model = false;       // singletons and fallback classes carry no fit
    FitResult fit;
    double gamma = 0.0;  // selected tuning value when has_model
    bool fallback = false;
    Eigen::VectorXd fallback_probs;  // within-class probabilities when fallback
};

// Two-step approximation: a coarse-class group-lasso fit, then one
// conditional group-lasso fit per coarse class on that class's training rows.
// Predicted fine probabilities multiply the two stages.
struct ApproxModel {
    std::vector<std::vector<int>> classes;  // partition of [K]; singleton classes allowed
    std::vector<int> class_of;              // size K
    FitResult coarse_fit;
    double coarse_gamma = 0.0;
    std::vector<ApproxConditional> conditionals;  // one per class, same order
    std::vector<std::string> diagnostics;         // fallbacks and empty validation classes

    ProbabilityMatrix predict(const DesignMatrix& x) const;
    // Distinct fitted values summed over both stages; fallback classes count
    // their probability vector entries.
    int degrees_of_freedom() const;
};

// Requires disjoint groups and single-trial responses. Categories outside
// every group become singleton coarse classes. Both stages tune gamma by
// validation deviance; a class with no validation rows keeps the sparsest
// cell, and a class whose conditional fit is impossible (no rows, degenerate
// subset) falls back to smoothed empirical frequencies. All such events are
// recorded in diagnostics.
ApproxModel fit_approx(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                       const DesignMatrix& x_val, const ResponseCounts& y_val,
                       const ApproxConfig& config = {});

}  // namespace multires
