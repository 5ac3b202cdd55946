#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "multires/baselines.hpp"
#include "multires/simgen.hpp"

namespace multires {

// Replicated comparison of the four estimators on synthetic scenarios.
struct BenchConfig {
    std::vector<int> model_ids = {1, 2, 3, 4, 5, 6};
    int p = 100;
    int n_train = 500;
    int n_val = 500;
    int n_test = 2000;
    int reps = 20;
    std::uint64_t seed = 1;
    std::vector<std::string> methods = {"multires", "group", "l1", "approx"};
    int n_gamma = 15;
    int n_lambda = 6;
    double min_ratio = 1e-3;
    SolverConfig solver;
    int threads = 1;

    void validate() const;
};

struct BenchRow {
    int model_id = 0;
    int p = 0;
    int rep = 0;
    std::string method;
    double hellinger = std::numeric_limits<double>::quiet_NaN();
    double kl_divergence = std::numeric_limits<double>::quiet_NaN();
    double classification_error = std::numeric_limits<double>::quiet_NaN();
    double deviance = std::numeric_limits<double>::quiet_NaN();
    int degrees_of_freedom = 0;
    double gamma = std::numeric_limits<double>::quiet_NaN();   // selected tuning values
    double lambda = std::numeric_limits<double>::quiet_NaN();  // NaN for methods without one
    // Structure recovery against the generating coefficients, read off the
    // BIC-selected cell (validation selection over-keeps near-zero rows); NaN
    // for methods without a single coefficient matrix (approx).
    double collapsed_recovered = std::numeric_limits<double>::quiet_NaN();
    double irrelevant_recovered = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

// One row per (model, replication, method), ordered by model, then
// replication, then the configured method order. Replications are
// independent and run in parallel; each one is single-threaded, so results
// do not depend on the thread count.
std::vector<BenchRow> run_bench(const BenchConfig& config);

struct BenchSummaryRow {
    int model_id = 0;
    std::string method;
    int reps = 0;
    double hellinger = 0.0;
    double kl_divergence = 0.0;
    double classification_error = 0.0;
    double deviance = 0.0;
    double degrees_of_freedom = 0.0;
    double collapsed_recovered = std::numeric_limits<double>::quiet_NaN();
    double irrelevant_recovered = std::numeric_limits<double>::quiet_NaN();
};

// Per (model, method) means over replications, in first-appearance order.
std::vector<BenchSummaryRow> summarize_bench(const std::vector<BenchRow>& rows);

// Fractions of truly collapsed (row, group) pairs kept collapsed and of truly
// zero rows kept at zero, both under exact equality. `fitted` carries the
// intercept row; `truth` does not.
void recovery_fractions(const CoefficientMatrix& fitted, const CoefficientMatrix& truth,
                        const CoarseStructure& s, double* collapsed_recovered,
                        double* irrelevant_recovered);

}  // namespace multires
