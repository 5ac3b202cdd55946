#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "multires/prox.hpp"
#include "multires/types.hpp"

namespace multires {

struct SolverConfig {
    int max_iters = 2000;
    double rel_tol = 1e-8;        // relative objective change per iterate
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    bool acceleration = true;
    bool kkt_check = true;        // gate objective-stall exits on the KKT residual
    double kkt_tol = 1e-6;
    ProxOptions prox;

    void validate() const;
};

struct FitResult {
    CoefficientMatrix beta;
    std::vector<double> objective_trace;  // initial objective, then one entry per iterate
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    int prox_nonconverged = 0;  // dual BCD calls that hit max_sweeps

    double objective() const {
        return objective_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : objective_trace.back();
    }
};

// Accelerated proximal gradient descent with backtracking for
//   G(beta) + sum_{penalized j} [ gamma*||beta_j|| + lambda*sum_l w_l*||D beta_{j,A_l}|| ].
// Acceleration restarts on objective increase. Rows listed in
// beta.penalized_rows (all rows but the intercept by default) are penalized;
// the rest take plain gradient steps.
FitResult fit(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
              double gamma, double lambda, const SolverConfig& config = {},
              const CoefficientMatrix* warm_start = nullptr);

// Max over rows of the Euclidean distance from -grad G(beta)_j to the
// subdifferential of row j's penalty at beta_j; zero exactly at a minimizer.
// Unpenalized rows contribute their plain gradient norm.
double kkt_residual(const DesignMatrix& x, const ResponseCounts& y,
                    const CoefficientMatrix& beta, const CoarseStructure& s, double gamma,
                    double lambda);

struct TuningGrid {
    std::vector<double> gammas;   // descending, positive
    std::vector<double> lambdas;  // descending, nonnegative

    int num_gammas() const { return static_cast<int>(gammas.size()); }
    int num_lambdas() const { return static_cast<int>(lambdas.size()); }
    void validate() const;
};

struct PathCell {
    double gamma = 0.0;
    double lambda = 0.0;
    int gamma_index = 0;
    int lambda_index = 0;
    bool ok = false;
    std::string error;
    FitResult result;
};

struct FitPath {
    TuningGrid grid;
    std::vector<PathCell> cells;  // row-major: gamma_index * num_lambdas + lambda_index

    const PathCell& cell(int gamma_index, int lambda_index) const;
    PathCell& cell(int gamma_index, int lambda_index);
};

// Fits every grid cell. The first lambda column is swept sequentially down
// gamma (each warm-started from the row above); the remaining lambdas of each
// gamma row are swept left to right from that row's first solution. Rows are
// independent after their first cell, so they run in parallel when
// threads > 1 with results identical to the sequential order. A failed cell
// records its error and the sweep continues from the last good solution.
FitPath fit_path(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                 const TuningGrid& grid, const SolverConfig& config = {}, int threads = 1);

namespace detail {

// Hooks that specialize the proximal gradient engine to a penalty.
struct PenaltyHooks {
    // Prox of tau * (row penalty) at eta; j is the row index in beta.
    std::function<Eigen::VectorXd(int j, const Eigen::VectorXd& eta, double tau)> prox_row;
    // Row penalty value (without tau).
    std::function<double(int j, const Eigen::VectorXd& v)> penalty_row;
    // Full KKT residual for the current iterate.
    std::function<double(const CoefficientMatrix& beta)> kkt;
    // Dual BCD non-convergence count for diagnostics (may stay zero).
    std::function<int()> prox_failures;
};

FitResult run_proximal_gradient(const DesignMatrix& x, const ResponseCounts& y,
                                const CoefficientMatrix& start, const PenaltyHooks& hooks,
                                const SolverConfig& config, double gamma, double lambda);

}  // namespace detail

}  // namespace multires
