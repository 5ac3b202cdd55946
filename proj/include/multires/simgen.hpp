#pragma once

#include <cstdint>

#include "multires/types.hpp"

namespace multires {

// Synthetic-benchmark scenario. Model m makes s = 3*(m-1) of the 18 relevant
// predictors coarse-only: constant within each coarse category but varying
// across them. Model 1 is fully fine-resolved, Model 6 nearly fully coarse.
struct SimulationSpec {
    int model_id = 1;  // in [1, 6]
    int p = 100;
    int n_train = 500;
    int n_val = 500;
    int n_test = 2000;
    std::uint64_t seed = 1;
    int num_categories = 12;
    CoarseStructure structure = default_structure();
    int num_relevant = 18;

    int coarse_only_rows() const { return 3 * (model_id - 1); }
    void validate() const;

    // Four consecutive triples over 12 categories.
    static CoarseStructure default_structure();
};

struct SimulatedDataset {
    DesignMatrix x_train;  // no intercept column
    DesignMatrix x_val;
    DesignMatrix x_test;
    ResponseCounts y_train;  // single-trial
    ResponseCounts y_val;
    ResponseCounts y_test;
    CoefficientMatrix beta_star;     // p x K, every row penalized
    ProbabilityMatrix pi_true_test;  // softmax of x_test * beta_star
};

// Coefficient construction, all draws from the stream (seed, tag "beta"):
//   1. num_relevant distinct rows chosen uniformly (partial shuffle), sorted;
//   2. coarse_only_rows of them chosen uniformly among the relevant, sorted;
//   3. values drawn in ascending row order: a coarse-only row takes one
//      N(0,5) draw per group (groups in order, then uncovered categories),
//      a fine row takes one N(0,5) draw per category.
// Rows outside the relevant set stay zero.
CoefficientMatrix generate_coefficients(const SimulationSpec& spec);

// Predictors are rows of N_p(0, Sigma) with Sigma_jk = 0.7^|j-k| (via
// Cholesky), responses single-trial multinomials sampled by inverse CDF from
// the softmax probabilities of x_i' beta_star. Each split consumes its own
// derived RNG stream, so draws are independent and the whole dataset is a
// deterministic function of the seed.
SimulatedDataset generate_dataset(const SimulationSpec& spec);

}  // namespace multires
