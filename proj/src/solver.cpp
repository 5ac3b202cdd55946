#include "multires/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "multires/errors.hpp"
#include "multires/model.hpp"
#include "multires/parallel.hpp"

namespace multires {

void SolverConfig::validate() const {
    if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    if (!(initial_step > 0.0)) throw ValidationError("initial_step must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw ValidationError("backtrack_factor must lie in (0,1)");
    }
    if (!(kkt_tol > 0.0)) throw ValidationError("kkt_tol must be positive");
}

void TuningGrid::validate() const {
    if (gammas.empty() || lambdas.empty()) throw ValidationError("tuning grid must be nonempty");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] >= 0.0)) throw ValidationError("gamma grid values must be nonnegative");
        if (i > 0 && gammas[i] > gammas[i - 1]) {
            throw ValidationError("gamma grid must be nonincreasing");
        }
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0)) throw ValidationError("lambda grid values must be nonnegative");
        if (i > 0 && lambdas[i] > lambdas[i - 1]) {
            throw ValidationError("lambda grid must be nonincreasing");
        }
    }
}

const PathCell& FitPath::cell(int gamma_index, int lambda_index) const {
    return cells[static_cast<std::size_t>(gamma_index) * static_cast<std::size_t>(grid.num_lambdas()) +
                 static_cast<std::size_t>(lambda_index)];
}

PathCell& FitPath::cell(int gamma_index, int lambda_index) {
    return cells[static_cast<std::size_t>(gamma_index) * static_cast<std::size_t>(grid.num_lambdas()) +
                 static_cast<std::size_t>(lambda_index)];
}

namespace detail {

namespace {
double require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
    return v;
}
}  // namespace

FitResult run_proximal_gradient(const DesignMatrix& x, const ResponseCounts& y,
                                const CoefficientMatrix& start, const PenaltyHooks& hooks,
                                const SolverConfig& config, double gamma, double lambda) {
    config.validate();
    const Eigen::Index p = x.p();
    const Eigen::Index K = y.num_categories();

    std::vector<char> penalized(static_cast<std::size_t>(p), 0);
    for (int j : start.penalized_rows) penalized[static_cast<std::size_t>(j)] = 1;

    auto full_penalty = [&](const Eigen::MatrixXd& b) {
        double value = 0.0;
        for (int j : start.penalized_rows) value += hooks.penalty_row(j, b.row(j).transpose());
        return value;
    };

    FitResult out;
    out.gamma = gamma;
    out.lambda = lambda;
    out.beta.penalized_rows = start.penalized_rows;

    Eigen::MatrixXd beta = start.values;          // current iterate
    Eigen::MatrixXd search = beta;                // extrapolated point
    Eigen::MatrixXd candidate(p, K);
    double theta = 1.0;
    double tau = config.initial_step;

    double objective =
        require_finite(negative_log_likelihood(x, y, CoefficientMatrix{beta, start.penalized_rows}) +
                           full_penalty(beta),
                       "objective");
    out.objective_trace.push_back(objective);

    bool converged = false;
    int iter = 0;
    while (iter < config.max_iters) {
        ++iter;
        const Eigen::MatrixXd u_search = x.values * search;
        if (!u_search.allFinite()) throw NumericalError("iterates diverged");
        const double g_search = nll_from_predictor(u_search, y);
        const Eigen::MatrixXd grad = gradient_from_predictor(u_search, x, y);

        // Monotone backtracking: tau only ever shrinks, so once the search
        // settles the update map is a fixed contraction and the iterates can
        // converge to machine precision instead of churning on step growth.
        double g_candidate = 0.0;
        for (;;) {
            for (Eigen::Index j = 0; j < p; ++j) {
                const Eigen::VectorXd eta = (search.row(j) - tau * grad.row(j)).transpose();
                if (penalized[static_cast<std::size_t>(j)]) {
                    candidate.row(j) = hooks.prox_row(static_cast<int>(j), eta, tau).transpose();
                } else {
                    candidate.row(j) = eta.transpose();
                }
            }
            bool accept = false;
            const Eigen::MatrixXd u_candidate = x.values * candidate;
            if (u_candidate.allFinite()) {  // an oversized trial step overflows; just shrink it
                g_candidate = nll_from_predictor(u_candidate, y);
                const Eigen::MatrixXd diff = candidate - search;
                const double quad = g_search + (grad.array() * diff.array()).sum() +
                                    diff.squaredNorm() / (2.0 * tau);
                // The slack absorbs likelihood-evaluation roundoff (which
                // scales with n); a spurious rejection would shrink tau for
                // good, so the slack must stay above that noise.
                accept = g_candidate <= quad + 1e-12 * std::max(1.0, std::abs(g_search));
            }
            if (accept) break;
            tau *= config.backtrack_factor;
            if (tau < 1e-18) {
                throw NumericalError("backtracking line search reached the machine-step floor");
            }
        }

        const double objective_new =
            require_finite(g_candidate + full_penalty(candidate), "objective");
        out.objective_trace.push_back(objective_new);

        if (config.acceleration) {
            if (objective_new > objective) {
                theta = 1.0;  // function-value restart: drop the momentum
                search = candidate;
            } else {
                const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
                const double weight = (theta - 1.0) / theta_next;
                search = candidate + weight * (candidate - beta);
                theta = theta_next;
            }
        } else {
            search = candidate;
        }

        const bool stalled =
            std::abs(objective_new - objective) <= config.rel_tol * std::max(1.0, std::abs(objective));
        beta = candidate;
        objective = objective_new;

        if (stalled) {
            if (config.kkt_check && hooks.kkt) {
                out.beta.values = beta;
                const double residual = hooks.kkt(out.beta);
                if (residual <= config.kkt_tol) {
                    out.kkt_residual = residual;
                    converged = true;
                    break;
                }
            } else {
                converged = true;
                break;
            }
        }
    }

    out.beta.values = beta;
    out.iterations = iter;
    out.converged = converged;
    if (hooks.kkt && !(converged && config.kkt_check)) {
        out.kkt_residual = hooks.kkt(out.beta);
    }
    if (hooks.prox_failures) out.prox_nonconverged = hooks.prox_failures();
    return out;
}

}  // namespace detail

FitResult fit(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
              double gamma, double lambda, const SolverConfig& config,
              const CoefficientMatrix* warm_start) {
    x.validate();
    y.validate();
    if (gamma < 0.0 || lambda < 0.0) throw ValidationError("penalty parameters must be nonnegative");
    if (s.num_categories != static_cast<int>(y.num_categories())) {
        throw ValidationError("structure and response disagree on the category count");
    }

    CoefficientMatrix start = warm_start
                                  ? *warm_start
                                  : CoefficientMatrix::zero(x.p(), y.num_categories(),
                                                            x.has_intercept_column);
    check_dimensions_match(x, y, start);

    // Per-row dual warm starts persist across iterations; only needed when
    // the structure overlaps (the disjoint prox is closed-form).
    const bool needs_duals = !s.disjoint() && lambda > 0.0;
    std::vector<Eigen::MatrixXd> duals;
    if (needs_duals) duals.resize(static_cast<std::size_t>(x.p()));
    auto failures = std::make_shared<int>(0);

    detail::PenaltyHooks hooks;
    hooks.prox_row = [&s, gamma, lambda, needs_duals, &duals, failures, &config](
                         int j, const Eigen::VectorXd& eta, double tau) {
        ProxDiagnostics diag;
        Eigen::MatrixXd* dual = needs_duals ? &duals[static_cast<std::size_t>(j)] : nullptr;
        Eigen::VectorXd nu =
            prox_composite_row(eta, tau * gamma, tau * lambda, s, dual, config.prox, &diag);
        if (!diag.converged) ++*failures;
        return nu;
    };
    hooks.penalty_row = [&s, gamma, lambda](int, const Eigen::VectorXd& v) {
        return row_penalty(v, s, gamma, lambda);
    };
    hooks.kkt = [&x, &y, &s, gamma, lambda](const CoefficientMatrix& b) {
        return kkt_residual(x, y, b, s, gamma, lambda);
    };
    hooks.prox_failures = [failures]() { return *failures; };

    return detail::run_proximal_gradient(x, y, start, hooks, config, gamma, lambda);
}

double kkt_residual(const DesignMatrix& x, const ResponseCounts& y,
                    const CoefficientMatrix& beta, const CoarseStructure& s, double gamma,
                    double lambda) {
    const Eigen::MatrixXd grad = nll_gradient(x, y, beta);
    std::vector<char> penalized(static_cast<std::size_t>(beta.p()), 0);
    for (int j : beta.penalized_rows) penalized[static_cast<std::size_t>(j)] = 1;

    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.p(); ++j) {
        const Eigen::VectorXd g = grad.row(j).transpose();
        double residual;
        if (!penalized[static_cast<std::size_t>(j)]) {
            residual = g.norm();
        } else {
            const Eigen::VectorXd v = beta.values.row(j).transpose();
            if ((v.array() == 0.0).all()) {
                // -g must lie in the subdifferential of the whole penalty at 0;
                // the distance is the norm of the composite prox (unit step).
                residual = prox_composite_row(-g, gamma, lambda, s).norm();
            } else {
                Eigen::VectorXd r = -g - gamma * v / v.norm();
                std::vector<int> collapsed;
                for (int l = 0; l < s.size(); ++l) {
                    const auto& idx = s.groups[l];
                    if (is_constant_on(v, idx)) {
                        collapsed.push_back(l);
                        continue;
                    }
                    double mean = 0.0;
                    for (int k : idx) mean += v(k);
                    mean /= static_cast<double>(idx.size());
                    double ss = 0.0;
                    for (int k : idx) {
                        const double d = v(k) - mean;
                        ss += d * d;
                    }
                    const double norm_d = std::sqrt(ss);
                    for (int k : idx) r(k) -= lambda * s.weights(l) * (v(k) - mean) / norm_d;
                }
                if (collapsed.empty()) {
                    residual = r.norm();
                } else {
                    residual = prox_centering(r, lambda, s.subset(collapsed)).norm();
                }
            }
        }
        if (residual > worst) worst = residual;
    }
    return worst;
}

FitPath fit_path(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                 const TuningGrid& grid, const SolverConfig& config, int threads) {
    grid.validate();
    const int n_gamma = grid.num_gammas();
    const int n_lambda = grid.num_lambdas();

    FitPath path;
    path.grid = grid;
    path.cells.resize(static_cast<std::size_t>(n_gamma) * static_cast<std::size_t>(n_lambda));
    for (int gi = 0; gi < n_gamma; ++gi) {
        for (int li = 0; li < n_lambda; ++li) {
            PathCell& c = path.cell(gi, li);
            c.gamma = grid.gammas[static_cast<std::size_t>(gi)];
            c.lambda = grid.lambdas[static_cast<std::size_t>(li)];
            c.gamma_index = gi;
            c.lambda_index = li;
        }
    }

    auto solve_cell = [&](PathCell& cell, const CoefficientMatrix* warm) {
        try {
            cell.result = fit(x, y, s, cell.gamma, cell.lambda, config, warm);
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    };

    // First column: sequential warm-start chain down gamma.
    {
        CoefficientMatrix warm;
        bool have_warm = false;
        for (int gi = 0; gi < n_gamma; ++gi) {
            PathCell& cell = path.cell(gi, 0);
            solve_cell(cell, have_warm ? &warm : nullptr);
            if (cell.ok) {
                warm = cell.result.beta;
                have_warm = true;
            }
        }
    }

    // Remaining columns: each gamma row continues from its own first cell.
    if (n_lambda > 1) {
        parallel_for(n_gamma, threads, [&](int gi) {
            CoefficientMatrix warm;
            bool have_warm = false;
            if (path.cell(gi, 0).ok) {
                warm = path.cell(gi, 0).result.beta;
                have_warm = true;
            }
            for (int li = 1; li < n_lambda; ++li) {
                PathCell& cell = path.cell(gi, li);
                solve_cell(cell, have_warm ? &warm : nullptr);
                if (cell.ok) {
                    warm = cell.result.beta;
                    have_warm = true;
                }
            }
        });
    }
    return path;
}

}  // namespace multires
