#include "multires/bench.hpp"

#include <chrono>
#include <cmath>

#include "multires/errors.hpp"
#include "multires/io.hpp"
#include "multires/parallel.hpp"
#include "multires/prox.hpp"
#include "multires/rng.hpp"

namespace multires {

void BenchConfig::validate() const {
    if (model_ids.empty()) throw ValidationError("bench: no models selected");
    for (int m : model_ids) {
        if (m < 1 || m > 6) throw ValidationError("bench: model_id out of [1,6]");
    }
    if (p < 18) throw ValidationError("bench: p must be at least 18");
    if (n_train < 1 || n_val < 1 || n_test < 1) throw ValidationError("bench: empty split");
    if (reps < 1) throw ValidationError("bench: reps must be positive");
    if (methods.empty()) throw ValidationError("bench: no methods selected");
    for (const std::string& m : methods) {
        if (m != "multires" && m != "group" && m != "l1" && m != "approx") {
            throw ValidationError("bench: unknown method '" + m + "'");
        }
    }
    if (n_gamma < 1 || n_lambda < 1) throw ValidationError("bench: grid sizes must be positive");
    if (!(min_ratio > 0.0) || min_ratio > 1.0) {
        throw ValidationError("bench: min_ratio must lie in (0, 1]");
    }
    if (threads < 1) throw ValidationError("bench: threads must be positive");
    solver.validate();
}

void recovery_fractions(const CoefficientMatrix& fitted, const CoefficientMatrix& truth,
                        const CoarseStructure& s, double* collapsed_recovered,
                        double* irrelevant_recovered) {
    const Eigen::Index offset = fitted.values.rows() - truth.values.rows();
    if (offset != 0 && offset != 1) {
        throw ValidationError("recovery_fractions: row counts differ by more than an intercept");
    }
    if (fitted.values.cols() != truth.values.cols()) {
        throw ValidationError("recovery_fractions: category counts differ");
    }

    const ResolutionReport report = resolution_report(fitted, s);
    int collapsed_total = 0;
    int collapsed_hit = 0;
    int zero_total = 0;
    int zero_hit = 0;
    for (Eigen::Index j = 0; j < truth.values.rows(); ++j) {
        const Eigen::VectorXd true_row = truth.values.row(j).transpose();
        const RowResolution& fit_row = report.rows[static_cast<std::size_t>(j + offset)];
        for (int l = 0; l < s.size(); ++l) {
            if (!is_constant_on(true_row, s.groups[static_cast<std::size_t>(l)])) continue;
            ++collapsed_total;
            if (fit_row.groups[static_cast<std::size_t>(l)].collapsed) ++collapsed_hit;
        }
        if (true_row.isZero(0.0)) {
            ++zero_total;
            if (fit_row.irrelevant) ++zero_hit;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (collapsed_recovered) {
        *collapsed_recovered =
            collapsed_total > 0 ? static_cast<double>(collapsed_hit) / collapsed_total : nan;
    }
    if (irrelevant_recovered) {
        *irrelevant_recovered = zero_total > 0 ? static_cast<double>(zero_hit) / zero_total : nan;
    }
}

namespace {

void fill_metrics(BenchRow& row, const MetricsReport& m) {
    row.hellinger = m.hellinger;
    row.kl_divergence = m.kl_divergence;
    row.classification_error = m.classification_error;
    row.deviance = m.deviance;
    row.degrees_of_freedom = m.degrees_of_freedom;
}

std::vector<BenchRow> run_replication(const BenchConfig& cfg, int model_id, int rep) {
    SimulationSpec spec;
    spec.model_id = model_id;
    spec.p = cfg.p;
    spec.n_train = cfg.n_train;
    spec.n_val = cfg.n_val;
    spec.n_test = cfg.n_test;
    spec.seed = split_seed(cfg.seed, static_cast<std::uint64_t>(rep) + 1);
    const SimulatedDataset data = generate_dataset(spec);

    const DesignMatrix x_train = DesignMatrix::with_intercept(data.x_train.values);
    const DesignMatrix x_val = DesignMatrix::with_intercept(data.x_val.values);
    const DesignMatrix x_test = DesignMatrix::with_intercept(data.x_test.values);

    std::vector<BenchRow> rows;
    rows.reserve(cfg.methods.size());
    for (const std::string& method : cfg.methods) {
        BenchRow row;
        row.model_id = model_id;
        row.p = cfg.p;
        row.rep = rep;
        row.method = method;

        const auto started = std::chrono::steady_clock::now();
        if (method == "multires") {
            const TuningGrid grid = build_grid(x_train, data.y_train, spec.structure, cfg.n_gamma,
                                               cfg.n_lambda, cfg.min_ratio, cfg.solver);
            const FitPath path =
                fit_path(x_train, data.y_train, spec.structure, grid, cfg.solver, 1);
            const SelectionResult sel = select_model(path, x_val, data.y_val);
            row.gamma = sel.gamma;
            row.lambda = sel.lambda;
            fill_metrics(row, evaluate_metrics(sel.fit.beta, x_test, data.y_test,
                                               &data.pi_true_test));
            // Structure recovery is read off the BIC cell: validation deviance
            // is prediction-optimal but keeps spurious near-zero rows.
            const BicSelectionResult structure = select_by_bic(path, x_train, data.y_train);
            recovery_fractions(structure.fit.beta, data.beta_star, spec.structure,
                               &row.collapsed_recovered, &row.irrelevant_recovered);
        } else if (method == "group") {
            const std::vector<double> gammas =
                log_spaced_grid(gamma_max(x_train, data.y_train), cfg.n_gamma, cfg.min_ratio);
            const FitPath path = fit_group(x_train, data.y_train, spec.structure, gammas,
                                           cfg.solver);
            const SelectionResult sel = select_model(path, x_val, data.y_val);
            row.gamma = sel.gamma;
            row.lambda = sel.lambda;
            fill_metrics(row, evaluate_metrics(sel.fit.beta, x_test, data.y_test,
                                               &data.pi_true_test));
            const BicSelectionResult structure = select_by_bic(path, x_train, data.y_train);
            recovery_fractions(structure.fit.beta, data.beta_star, spec.structure,
                               &row.collapsed_recovered, &row.irrelevant_recovered);
        } else if (method == "l1") {
            const std::vector<double> gammas =
                log_spaced_grid(gamma_max_l1(x_train, data.y_train), cfg.n_gamma, cfg.min_ratio);
            const FitPath path = fit_l1(x_train, data.y_train, gammas, cfg.solver);
            const SelectionResult sel = select_model(path, x_val, data.y_val);
            row.gamma = sel.gamma;
            fill_metrics(row, evaluate_metrics(sel.fit.beta, x_test, data.y_test,
                                               &data.pi_true_test));
            const BicSelectionResult structure = select_by_bic(path, x_train, data.y_train);
            recovery_fractions(structure.fit.beta, data.beta_star, spec.structure,
                               &row.collapsed_recovered, &row.irrelevant_recovered);
        } else {
            ApproxConfig approx;
            approx.n_gamma = cfg.n_gamma;
            approx.min_ratio = cfg.min_ratio;
            approx.solver = cfg.solver;
            const ApproxModel model =
                fit_approx(x_train, data.y_train, spec.structure, x_val, data.y_val, approx);
            const ProbabilityMatrix probs = model.predict(x_test);
            row.gamma = model.coarse_gamma;
            fill_metrics(row, evaluate_metrics_from_probabilities(probs, data.y_test,
                                                                  &data.pi_true_test,
                                                                  model.degrees_of_freedom()));
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                          .count();
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
    config.validate();
    const int reps = config.reps;
    const int tasks = static_cast<int>(config.model_ids.size()) * reps;
    std::vector<std::vector<BenchRow>> per_task(tasks);
    parallel_for(tasks, config.threads, [&](int t) {
        const int model_id = config.model_ids[static_cast<std::size_t>(t / reps)];
        per_task[t] = run_replication(config, model_id, t % reps);
    });

    std::vector<BenchRow> rows;
    rows.reserve(static_cast<std::size_t>(tasks) * config.methods.size());
    for (std::vector<BenchRow>& task_rows : per_task) {
        for (BenchRow& row : task_rows) rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Mean ignoring NaN; NaN when nothing contributes.
struct NanMean {
    double sum = 0.0;
    int count = 0;

    void add(double v) {
        if (std::isnan(v)) return;
        sum += v;
        ++count;
    }
    double value() const {
        return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
    }
};

}  // namespace

std::vector<BenchSummaryRow> summarize_bench(const std::vector<BenchRow>& rows) {
    struct Accumulator {
        int reps = 0;
        NanMean hellinger, kl, err, dev, dof, collapsed, irrelevant;
    };
    std::vector<std::pair<int, std::string>> keys;
    std::vector<Accumulator> accs;
    for (const BenchRow& row : rows) {
        const std::pair<int, std::string> key{row.model_id, row.method};
        std::size_t idx = 0;
        while (idx < keys.size() && keys[idx] != key) ++idx;
        if (idx == keys.size()) {
            keys.push_back(key);
            accs.emplace_back();
        }
        Accumulator& a = accs[idx];
        ++a.reps;
        a.hellinger.add(row.hellinger);
        a.kl.add(row.kl_divergence);
        a.err.add(row.classification_error);
        a.dev.add(row.deviance);
        a.dof.add(static_cast<double>(row.degrees_of_freedom));
        a.collapsed.add(row.collapsed_recovered);
        a.irrelevant.add(row.irrelevant_recovered);
    }

    std::vector<BenchSummaryRow> summary;
    summary.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        BenchSummaryRow s;
        s.model_id = keys[i].first;
        s.method = keys[i].second;
        s.reps = accs[i].reps;
        s.hellinger = accs[i].hellinger.value();
        s.kl_divergence = accs[i].kl.value();
        s.classification_error = accs[i].err.value();
        s.deviance = accs[i].dev.value();
        s.degrees_of_freedom = accs[i].dof.value();
        s.collapsed_recovered = accs[i].collapsed.value();
        s.irrelevant_recovered = accs[i].irrelevant.value();
        summary.push_back(std::move(s));
    }
    return summary;
}

}  // namespace multires
