#include "multires/selection.hpp"

#include <algorithm>
#include <cmath>

#include "multires/errors.hpp"
#include "multires/model.hpp"
#include "multires/parallel.hpp"
#include "multires/rng.hpp"

namespace multires {

CoefficientMatrix intercept_only_fit(const DesignMatrix& x, const ResponseCounts& y) {
    x.validate();
    y.validate();
    const Eigen::Index K = y.num_categories();
    CoefficientMatrix beta = CoefficientMatrix::zero(x.p(), K, x.has_intercept_column);
    if (!x.has_intercept_column) return beta;

    Eigen::VectorXd freq(K);
    double total = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
        freq(k) = y.counts.col(k).cast<double>().sum();
        total += freq(k);
    }
    freq /= total;
    for (Eigen::Index k = 0; k < K; ++k) freq(k) = std::max(freq(k), 1e-12);
    freq /= freq.sum();

    Eigen::VectorXd b = freq.array().log();
    b.array() -= b.mean();
    beta.values.row(0) = b.transpose();
    return beta;
}

double gamma_max(const DesignMatrix& x, const ResponseCounts& y) {
    const CoefficientMatrix null_fit = intercept_only_fit(x, y);
    const Eigen::MatrixXd grad = nll_gradient(x, y, null_fit);
    double worst = 0.0;
    for (int j : null_fit.penalized_rows) worst = std::max(worst, grad.row(j).norm());
    if (!(worst > 0.0)) {
        throw ValidationError("null-model gradient vanishes on every penalized row");
    }
    return worst * (1.0 + 1e-6);
}

double lambda_max(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                  const SolverConfig& config) {
    if (s.empty()) throw ValidationError("lambda_max needs at least one coarse category");
    const CoefficientMatrix null_fit = intercept_only_fit(x, y);
    const Eigen::MatrixXd grad = nll_gradient(x, y, null_fit);
    double scale = 0.0;
    for (int j : null_fit.penalized_rows) {
        const Eigen::VectorXd g = grad.row(j).transpose();
        for (int l = 0; l < s.size(); ++l) {
            scale = std::max(scale, centered_norm(g, s.groups[l]) / s.weights(l));
        }
    }
    if (!(scale > 0.0)) {
        throw ValidationError("null-model gradient has no centering component");
    }

    // The gradient bound holds at the null model, not at the collapsed
    // optimum, so verify by fitting and double until everything collapses.
    SolverConfig calib = config;
    calib.kkt_check = false;
    double lambda = scale * (1.0 + 1e-6);
    for (int attempt = 0; attempt < 60; ++attempt) {
        const FitResult res = fit(x, y, s, 0.0, lambda, calib);
        bool all_collapsed = true;
        for (int j : res.beta.penalized_rows) {
            const Eigen::VectorXd v = res.beta.values.row(j).transpose();
            for (int l = 0; l < s.size() && all_collapsed; ++l) {
                all_collapsed = is_constant_on(v, s.groups[l]);
            }
            if (!all_collapsed) break;
        }
        if (all_collapsed) return lambda;
        lambda *= 2.0;
    }
    throw NumericalError("lambda_max calibration failed to collapse the fit");
}

std::vector<double> log_spaced_grid(double top, int count, double min_ratio) {
    if (count < 1) throw ValidationError("grid sizes must be at least 1");
    if (!(top > 0.0)) throw ValidationError("grid top must be positive");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
        throw ValidationError("min_ratio must lie in (0,1)");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        values.push_back(top);
        return values;
    }
    const double log_ratio = std::log(min_ratio);
    for (int i = 0; i < count; ++i) {
        values.push_back(top * std::exp(log_ratio * static_cast<double>(i) /
                                        static_cast<double>(count - 1)));
    }
    return values;
}

TuningGrid build_grid(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                      int n_gamma, int n_lambda, double min_ratio, const SolverConfig& config) {
    TuningGrid grid;
    grid.gammas = log_spaced_grid(gamma_max(x, y), n_gamma, min_ratio);
    if (s.empty()) {
        grid.lambdas = {0.0};
    } else {
        grid.lambdas = log_spaced_grid(lambda_max(x, y, s, config), n_lambda, min_ratio);
        grid.lambdas.push_back(0.0);
    }
    grid.validate();
    return grid;
}

double deviance(const DesignMatrix& x, const ResponseCounts& y, const CoefficientMatrix& beta) {
    return 2.0 * static_cast<double>(y.n()) * negative_log_likelihood(x, y, beta);
}

double deviance_from_probabilities(const ProbabilityMatrix& probs, const ResponseCounts& y) {
    if (probs.n() != y.n() || probs.num_categories() != y.num_categories()) {
        throw ValidationError("probabilities and response have incompatible shapes");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.n(); ++i) {
        for (Eigen::Index k = 0; k < y.num_categories(); ++k) {
            if (y.counts(i, k) == 0) continue;
            total -= static_cast<double>(y.counts(i, k)) *
                     std::log(std::max(probs.values(i, k), 1e-300));
        }
    }
    return 2.0 * total;
}

int degrees_of_freedom(const CoefficientMatrix& beta) {
    std::vector<char> penalized(static_cast<std::size_t>(beta.p()), 0);
    for (int j : beta.penalized_rows) penalized[static_cast<std::size_t>(j)] = 1;
    const Eigen::Index K = beta.num_categories();
    int total = 0;
    std::vector<double> row(static_cast<std::size_t>(K));
    for (Eigen::Index j = 0; j < beta.p(); ++j) {
        if (!penalized[static_cast<std::size_t>(j)]) {
            total += static_cast<int>(K);
            continue;
        }
        bool all_zero = true;
        for (Eigen::Index k = 0; k < K; ++k) {
            row[static_cast<std::size_t>(k)] = beta.values(j, k);
            all_zero = all_zero && beta.values(j, k) == 0.0;
        }
        if (all_zero) continue;
        std::sort(row.begin(), row.end());
        int distinct = 1;
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k] != row[k - 1]) ++distinct;
        }
        total += distinct;
    }
    return total;
}

namespace {

int argmax_row_int(const Eigen::MatrixXi& m, Eigen::Index i) {
    int best = 0;
    for (Eigen::Index k = 1; k < m.cols(); ++k) {
        if (m(i, k) > m(i, best)) best = static_cast<int>(k);
    }
    return best;
}

int argmax_row(const Eigen::MatrixXd& m, Eigen::Index i) {
    int best = 0;
    for (Eigen::Index k = 1; k < m.cols(); ++k) {
        if (m(i, k) > m(i, best)) best = static_cast<int>(k);
    }
    return best;
}

}  // namespace

MetricsReport evaluate_metrics_from_probabilities(const ProbabilityMatrix& probs,
                                                  const ResponseCounts& y_test,
                                                  const ProbabilityMatrix* pi_true,
                                                  int degrees_of_freedom) {
    const Eigen::Index n = probs.n();
    const Eigen::Index K = probs.num_categories();
    if (y_test.n() != n || y_test.num_categories() != K) {
        throw ValidationError("probabilities and response have incompatible shapes");
    }
    MetricsReport report;
    report.degrees_of_freedom = degrees_of_freedom;
    report.deviance = deviance_from_probabilities(probs, y_test);

    int errors = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (argmax_row(probs.values, i) != argmax_row_int(y_test.counts, i)) ++errors;
    }
    report.classification_error = static_cast<double>(errors) / static_cast<double>(n);

    if (pi_true) {
        if (pi_true->n() != n || pi_true->num_categories() != K) {
            throw ValidationError("true probabilities have the wrong shape");
        }
        double hellinger_sum = 0.0;
        double kl_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sq = 0.0;
            double kl = 0.0;
            for (Eigen::Index k = 0; k < K; ++k) {
                const double pt = pi_true->values(i, k);
                const double ph = std::max(probs.values(i, k), 1e-300);
                const double d = std::sqrt(ph) - std::sqrt(pt);
                sq += d * d;
                if (pt > 0.0) kl += pt * (std::log(pt) - std::log(ph));
            }
            hellinger_sum += std::sqrt(sq / 2.0);
            kl_sum += kl;
        }
        report.hellinger = hellinger_sum / static_cast<double>(n);
        report.kl_divergence = kl_sum / static_cast<double>(n);
    }
    return report;
}

MetricsReport evaluate_metrics(const CoefficientMatrix& beta, const DesignMatrix& x_test,
                               const ResponseCounts& y_test, const ProbabilityMatrix* pi_true) {
    const ProbabilityMatrix probs = compute_probabilities(x_test, beta);
    MetricsReport report =
        evaluate_metrics_from_probabilities(probs, y_test, pi_true, degrees_of_freedom(beta));
    // The softmax clamp never bites at sane scales, but the direct formula is
    // the exact deviance of beta, so prefer it.
    report.deviance = deviance(x_test, y_test, beta);
    return report;
}

SelectionResult select_model(const FitPath& path, const DesignMatrix& x_val,
                             const ResponseCounts& y_val) {
    if (path.cells.empty()) throw ValidationError("empty path");
    SelectionResult best;
    bool found = false;
    for (const PathCell& cell : path.cells) {
        if (!cell.ok) continue;
        const double dev = deviance(x_val, y_val, cell.result.beta);
        // Cells are stored with gamma descending then lambda descending, so a
        // strict comparison implements the larger-(gamma, lambda) tie rule.
        if (!found || dev < best.validation_deviance) {
            found = true;
            best.gamma_index = cell.gamma_index;
            best.lambda_index = cell.lambda_index;
            best.gamma = cell.gamma;
            best.lambda = cell.lambda;
            best.validation_deviance = dev;
            best.fit = cell.result;
        }
    }
    if (!found) throw ValidationError("every path cell failed");
    return best;
}

BicSelectionResult select_by_bic(const FitPath& path, const DesignMatrix& x_train,
                                 const ResponseCounts& y_train) {
    if (path.cells.empty()) throw ValidationError("empty path");
    const double log_n = std::log(static_cast<double>(x_train.values.rows()));
    BicSelectionResult best;
    bool found = false;
    for (const PathCell& cell : path.cells) {
        if (!cell.ok) continue;
        const double score = deviance(x_train, y_train, cell.result.beta) +
                             log_n * degrees_of_freedom(cell.result.beta);
        // Same storage-order argument as select_model: strict comparison
        // implements the larger-(gamma, lambda) tie rule.
        if (!found || score < best.bic) {
            found = true;
            best.gamma_index = cell.gamma_index;
            best.lambda_index = cell.lambda_index;
            best.gamma = cell.gamma;
            best.lambda = cell.lambda;
            best.bic = score;
            best.fit = cell.result;
        }
    }
    if (!found) throw ValidationError("every path cell failed");
    return best;
}

std::vector<int> cv_fold_assignment(int n, int folds, std::uint64_t seed) {
    if (folds < 2) throw ValidationError("need at least 2 folds");
    if (folds > n) throw ValidationError("more folds than samples");
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Rng rng(seed, 0xF01D);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % folds;
    }
    return assignment;
}

CrossValidationResult cross_validate(const DesignMatrix& x, const ResponseCounts& y,
                                     const CoarseStructure& s, const TuningGrid& grid,
                                     int folds, std::uint64_t seed, const SolverConfig& config,
                                     int threads) {
    grid.validate();
    const int n = static_cast<int>(x.n());
    const std::vector<int> assignment = cv_fold_assignment(n, folds, seed);

    const int n_gamma = grid.num_gammas();
    const int n_lambda = grid.num_lambdas();
    std::vector<Eigen::MatrixXd> fold_deviance(
        static_cast<std::size_t>(folds),
        Eigen::MatrixXd::Constant(n_gamma, n_lambda, std::numeric_limits<double>::quiet_NaN()));

    parallel_for(folds, threads, [&](int f) {
        std::vector<int> train_rows;
        std::vector<int> holdout_rows;
        for (int i = 0; i < n; ++i) {
            if (assignment[static_cast<std::size_t>(i)] == f) {
                holdout_rows.push_back(i);
            } else {
                train_rows.push_back(i);
            }
        }
        const DesignMatrix x_train = select_rows(x, train_rows);
        const ResponseCounts y_train = select_rows(y, train_rows);
        const DesignMatrix x_hold = select_rows(x, holdout_rows);
        const ResponseCounts y_hold = select_rows(y, holdout_rows);
        const FitPath path = fit_path(x_train, y_train, s, grid, config, 1);
        for (const PathCell& cell : path.cells) {
            if (!cell.ok) continue;
            fold_deviance[static_cast<std::size_t>(f)](cell.gamma_index, cell.lambda_index) =
                deviance(x_hold, y_hold, cell.result.beta);
        }
    });

    CrossValidationResult result;
    result.grid = grid;
    result.mean_deviance = Eigen::MatrixXd::Zero(n_gamma, n_lambda);
    for (int f = 0; f < folds; ++f) result.mean_deviance += fold_deviance[static_cast<std::size_t>(f)];
    result.mean_deviance /= static_cast<double>(folds);  // NaN propagates from failed cells

    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    for (int gi = 0; gi < n_gamma; ++gi) {
        for (int li = 0; li < n_lambda; ++li) {
            const double dev = result.mean_deviance(gi, li);
            if (std::isnan(dev)) continue;
            if (!found || dev < best) {
                found = true;
                best = dev;
                result.gamma_index = gi;
                result.lambda_index = li;
            }
        }
    }
    if (!found) throw ValidationError("cross-validation failed in every cell");
    result.gamma = grid.gammas[static_cast<std::size_t>(result.gamma_index)];
    result.lambda = grid.lambdas[static_cast<std::size_t>(result.lambda_index)];
    return result;
}

}  // namespace multires
