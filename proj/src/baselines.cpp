#include "multires/baselines.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "multires/errors.hpp"
#include "multires/model.hpp"

namespace multires {

FitPath fit_group(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                  const std::vector<double>& gamma_grid, const SolverConfig& config) {
    TuningGrid grid;
    grid.gammas = gamma_grid;
    grid.lambdas = {0.0};
    return fit_path(x, y, s, grid, config, 1);
}

namespace {

FitResult fit_l1_single(const DesignMatrix& x, const ResponseCounts& y, double gamma,
                        const SolverConfig& config, const CoefficientMatrix* warm_start) {
    x.validate();
    y.validate();
    if (gamma < 0.0) throw ValidationError("gamma must be nonnegative");
    CoefficientMatrix start = warm_start
                                  ? *warm_start
                                  : CoefficientMatrix::zero(x.p(), y.num_categories(),
                                                            x.has_intercept_column);
    check_dimensions_match(x, y, start);

    detail::PenaltyHooks hooks;
    hooks.prox_row = [gamma](int, const Eigen::VectorXd& eta, double tau) {
        return soft_threshold_l1(eta, tau * gamma);
    };
    hooks.penalty_row = [gamma](int, const Eigen::VectorXd& v) {
        return gamma * v.lpNorm<1>();
    };
    hooks.kkt = [&x, &y, gamma](const CoefficientMatrix& b) {
        return kkt_residual_l1(x, y, b, gamma);
    };
    return detail::run_proximal_gradient(x, y, start, hooks, config, gamma, 0.0);
}

}  // namespace

FitPath fit_l1(const DesignMatrix& x, const ResponseCounts& y,
               const std::vector<double>& gamma_grid, const SolverConfig& config) {
    TuningGrid grid;
    grid.gammas = gamma_grid;
    grid.lambdas = {0.0};
    grid.validate();

    FitPath path;
    path.grid = grid;
    path.cells.resize(gamma_grid.size());
    CoefficientMatrix warm;
    bool have_warm = false;
    for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
        PathCell& cell = path.cells[gi];
        cell.gamma = gamma_grid[gi];
        cell.lambda = 0.0;
        cell.gamma_index = static_cast<int>(gi);
        cell.lambda_index = 0;
        try {
            cell.result = fit_l1_single(x, y, cell.gamma, config, have_warm ? &warm : nullptr);
            cell.ok = true;
            warm = cell.result.beta;
            have_warm = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    }
    return path;
}

double kkt_residual_l1(const DesignMatrix& x, const ResponseCounts& y,
                       const CoefficientMatrix& beta, double gamma) {
    const Eigen::MatrixXd grad = nll_gradient(x, y, beta);
    std::vector<char> penalized(static_cast<std::size_t>(beta.p()), 0);
    for (int j : beta.penalized_rows) penalized[static_cast<std::size_t>(j)] = 1;

    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.p(); ++j) {
        double ss = 0.0;
        for (Eigen::Index k = 0; k < beta.num_categories(); ++k) {
            const double g = grad(j, k);
            double r;
            if (!penalized[static_cast<std::size_t>(j)]) {
                r = g;
            } else if (beta.values(j, k) != 0.0) {
                r = g + (beta.values(j, k) > 0.0 ? gamma : -gamma);
            } else {
                r = std::abs(g) > gamma ? std::abs(g) - gamma : 0.0;
            }
            ss += r * r;
        }
        worst = std::max(worst, std::sqrt(ss));
    }
    return worst;
}

double gamma_max_l1(const DesignMatrix& x, const ResponseCounts& y) {
    const CoefficientMatrix null_fit = intercept_only_fit(x, y);
    const Eigen::MatrixXd grad = nll_gradient(x, y, null_fit);
    double worst = 0.0;
    for (int j : null_fit.penalized_rows) {
        worst = std::max(worst, grad.row(j).cwiseAbs().maxCoeff());
    }
    if (!(worst > 0.0)) {
        throw ValidationError("null-model gradient vanishes on every penalized entry");
    }
    return worst * (1.0 + 1e-6);
}

namespace {

// Smoothed within-class frequencies from full-training column sums; strictly
// positive so predicted probabilities stay inside (0,1).
Eigen::VectorXd empirical_class_probs(const ResponseCounts& y, const std::vector<int>& cats) {
    Eigen::VectorXd probs(static_cast<Eigen::Index>(cats.size()));
    for (std::size_t m = 0; m < cats.size(); ++m) {
        probs(static_cast<Eigen::Index>(m)) =
            y.counts.col(cats[m]).cast<double>().sum() + 1e-12;
    }
    probs /= probs.sum();
    return probs;
}

}  // namespace

ProbabilityMatrix ApproxModel::predict(const DesignMatrix& x) const {
    const ProbabilityMatrix coarse = compute_probabilities(x, coarse_fit.beta);
    const Eigen::Index n = x.n();
    Eigen::Index K = 0;
    for (const auto& c : classes) K += static_cast<Eigen::Index>(c.size());

    ProbabilityMatrix out;
    out.values.resize(n, K);
    for (std::size_t l = 0; l < classes.size(); ++l) {
        const ApproxConditional& cond = conditionals[l];
        const auto& cats = classes[l];
        if (cats.size() == 1) {
            out.values.col(cats[0]) = coarse.values.col(static_cast<Eigen::Index>(l));
            continue;
        }
        if (cond.has_model) {
            const ProbabilityMatrix within = compute_probabilities(x, cond.fit.beta);
            for (std::size_t m = 0; m < cats.size(); ++m) {
                out.values.col(cats[m]) =
                    coarse.values.col(static_cast<Eigen::Index>(l)).array() *
                    within.values.col(static_cast<Eigen::Index>(m)).array();
            }
        } else {
            for (std::size_t m = 0; m < cats.size(); ++m) {
                out.values.col(cats[m]) = coarse.values.col(static_cast<Eigen::Index>(l)) *
                                          cond.fallback_probs(static_cast<Eigen::Index>(m));
            }
        }
    }
    // Products of stage probabilities can underflow; keep entries in (0,1).
    out.values = out.values.cwiseMax(DBL_MIN);
    return out;
}

int ApproxModel::degrees_of_freedom() const {
    int total = multires::degrees_of_freedom(coarse_fit.beta);
    for (const ApproxConditional& cond : conditionals) {
        if (cond.has_model) {
            total += multires::degrees_of_freedom(cond.fit.beta);
        } else if (cond.fallback) {
            total += static_cast<int>(cond.fallback_probs.size());
        }
    }
    return total;
}

ApproxModel fit_approx(const DesignMatrix& x, const ResponseCounts& y, const CoarseStructure& s,
                       const DesignMatrix& x_val, const ResponseCounts& y_val,
                       const ApproxConfig& config) {
    x.validate();
    y.validate();
    x_val.validate();
    y_val.validate();
    if (!s.disjoint()) throw ValidationError("the two-step method needs disjoint groups");
    if ((y.trials.array() != 1).any() || (y_val.trials.array() != 1).any()) {
        throw ValidationError("the two-step method needs single-trial responses");
    }
    const int K = static_cast<int>(y.num_categories());
    if (s.num_categories != K) {
        throw ValidationError("structure and response disagree on the category count");
    }

    ApproxModel model;
    model.classes = s.groups;
    for (int k : s.uncovered_categories()) model.classes.push_back({k});
    const int L = static_cast<int>(model.classes.size());
    model.class_of.assign(static_cast<std::size_t>(K), -1);
    for (int l = 0; l < L; ++l) {
        for (int k : model.classes[static_cast<std::size_t>(l)]) {
            model.class_of[static_cast<std::size_t>(k)] = l;
        }
    }

    auto coarsen = [&](const ResponseCounts& fine) {
        ResponseCounts coarse;
        coarse.counts = Eigen::MatrixXi::Zero(fine.n(), L);
        coarse.trials = fine.trials;
        for (Eigen::Index i = 0; i < fine.n(); ++i) {
            for (int k = 0; k < K; ++k) {
                coarse.counts(i, model.class_of[static_cast<std::size_t>(k)]) +=
                    fine.counts(i, k);
            }
        }
        return coarse;
    };
    const ResponseCounts y_coarse = coarsen(y);
    const ResponseCounts y_val_coarse = coarsen(y_val);

    // Step 1: coarse-class group lasso tuned on the validation split.
    {
        const std::vector<double> gammas =
            log_spaced_grid(gamma_max(x, y_coarse), config.n_gamma, config.min_ratio);
        const FitPath path = fit_group(x, y_coarse, CoarseStructure::none(L), gammas, config.solver);
        const SelectionResult sel = select_model(path, x_val, y_val_coarse);
        model.coarse_fit = sel.fit;
        model.coarse_gamma = sel.gamma;
    }

    // Step 2: one conditional model per class with at least two categories.
    for (int l = 0; l < L; ++l) {
        const auto& cats = model.classes[static_cast<std::size_t>(l)];
        ApproxConditional cond;
        cond.categories = cats;
        if (cats.size() == 1) {
            model.conditionals.push_back(std::move(cond));
            continue;
        }

        std::vector<int> train_rows;
        for (Eigen::Index i = 0; i < y_coarse.n(); ++i) {
            if (y_coarse.counts(i, l) == 1) train_rows.push_back(static_cast<int>(i));
        }
        std::vector<int> val_rows;
        for (Eigen::Index i = 0; i < y_val_coarse.n(); ++i) {
            if (y_val_coarse.counts(i, l) == 1) val_rows.push_back(static_cast<int>(i));
        }

        auto restrict_counts = [&](const ResponseCounts& fine, const std::vector<int>& rows) {
            ResponseCounts sub;
            sub.counts.resize(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(cats.size()));
            sub.trials = Eigen::VectorXi::Ones(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                for (std::size_t m = 0; m < cats.size(); ++m) {
                    sub.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
                        fine.counts(rows[i], cats[m]);
                }
            }
            return sub;
        };

        if (train_rows.empty()) {
            cond.fallback = true;
            cond.fallback_probs = empirical_class_probs(y, cats);
            model.diagnostics.push_back("class " + std::to_string(l) +
                                        ": no training rows, using empirical frequencies");
            model.conditionals.push_back(std::move(cond));
            continue;
        }

        try {
            const DesignMatrix x_sub = select_rows(x, train_rows);
            const ResponseCounts y_sub = restrict_counts(y, train_rows);
            const std::vector<double> gammas =
                log_spaced_grid(gamma_max(x_sub, y_sub), config.n_gamma, config.min_ratio);
            const FitPath path = fit_group(x_sub, y_sub, CoarseStructure::none(static_cast<int>(cats.size())),
                                           gammas, config.solver);
            if (val_rows.empty()) {
                // Nothing to tune on; keep the sparsest solved cell.
                const PathCell* chosen = nullptr;
                for (const PathCell& cell : path.cells) {
                    if (cell.ok) {
                        chosen = &cell;
                        break;
                    }
                }
                if (!chosen) throw NumericalError("every conditional cell failed");
                cond.has_model = true;
                cond.fit = chosen->result;
                cond.gamma = chosen->gamma;
                model.diagnostics.push_back("class " + std::to_string(l) +
                                            ": no validation rows, kept the sparsest fit");
            } else {
                const SelectionResult sel = select_model(path, select_rows(x_val, val_rows),
                                                         restrict_counts(y_val, val_rows));
                cond.has_model = true;
                cond.fit = sel.fit;
                cond.gamma = sel.gamma;
            }
        } catch (const std::exception& e) {
            cond.has_model = false;
            cond.fallback = true;
            cond.fallback_probs = empirical_class_probs(y, cats);
            model.diagnostics.push_back("class " + std::to_string(l) + ": " + e.what() +
                                        "; using empirical frequencies");
        }
        model.conditionals.push_back(std::move(cond));
    }
    return model;
}

}  // namespace multires
