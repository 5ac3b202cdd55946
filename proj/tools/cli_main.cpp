#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multires/bench.hpp"
#include "multires/errors.hpp"
#include "multires/io.hpp"
#include "multires/model.hpp"
#include "multires/simgen.hpp"

namespace {

using namespace multires;

namespace fs = std::filesystem;

// Data shared by the model-fitting subcommands.
struct Dataset {
    DesignMatrix x;
    ResponseCounts y;
    CoarseStructure structure;
    std::vector<std::string> category_names;
    std::vector<std::string> group_names;
    std::vector<std::string> predictor_names;  // one per beta row
};

Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::string& groups_path, bool intercept) {
    Dataset d;
    std::vector<std::string> x_names;
    d.x = read_design_csv(x_path, intercept, &x_names);

    GroupSpecParse spec;
    int num_categories = 0;
    if (!groups_path.empty()) {
        spec = read_group_spec(groups_path);
        num_categories = spec.structure.num_categories;
    }
    std::vector<std::string> y_names;
    d.y = read_response_csv(y_path, num_categories, &y_names);
    if (!groups_path.empty()) {
        d.structure = spec.structure;
        d.category_names = std::move(spec.category_names);
        d.group_names = std::move(spec.group_names);
    } else {
        d.structure = CoarseStructure::none(static_cast<int>(d.y.num_categories()));
        d.category_names = std::move(y_names);
    }
    if (d.x.n() != d.y.n()) {
        throw ValidationError(x_path + " has " + std::to_string(d.x.n()) + " rows but " + y_path +
                              " has " + std::to_string(d.y.n()));
    }
    if (intercept) d.predictor_names.push_back("(intercept)");
    d.predictor_names.insert(d.predictor_names.end(), x_names.begin(), x_names.end());
    return d;
}

ModelBundle make_bundle(FitPath path, const Dataset& d, bool intercept) {
    ModelBundle b;
    b.path = std::move(path);
    b.structure = d.structure;
    b.category_names = d.category_names;
    b.group_names = d.group_names;
    b.predictor_names = d.predictor_names;
    b.has_intercept = intercept;
    return b;
}

struct SolverFlags {
    SolverConfig config;
    bool no_accel = false;
    bool no_kkt_check = false;

    SolverConfig resolve() const {
        SolverConfig c = config;
        c.acceleration = !no_accel;
        c.kkt_check = !no_kkt_check;
        c.validate();
        return c;
    }
};

void add_solver_options(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--max-iters", flags.config.max_iters, "solver iteration cap");
    cmd->add_option("--rel-tol", flags.config.rel_tol, "relative objective change tolerance");
    cmd->add_option("--initial-step", flags.config.initial_step, "initial step size");
    cmd->add_option("--backtrack", flags.config.backtrack_factor, "backtracking shrink factor");
    cmd->add_flag("--no-accel", flags.no_accel, "plain proximal gradient, no acceleration");
    cmd->add_flag("--no-kkt-check", flags.no_kkt_check,
                  "accept objective stalls without a KKT residual check");
    cmd->add_option("--kkt-tol", flags.config.kkt_tol, "KKT residual tolerance");
    cmd->add_option("--prox-tol", flags.config.prox.tol, "dual coordinate descent tolerance");
    cmd->add_option("--prox-sweeps", flags.config.prox.max_sweeps,
                    "dual coordinate descent sweep cap");
}

struct GridFlags {
    int n_gamma = 20;
    int n_lambda = 10;
    double min_ratio = 1e-3;
    std::vector<double> gammas;   // explicit overrides
    std::vector<double> lambdas;
};

void add_grid_options(CLI::App* cmd, GridFlags& flags) {
    cmd->add_option("--n-gamma", flags.n_gamma, "gamma grid size");
    cmd->add_option("--n-lambda", flags.n_lambda, "lambda grid size (0 is appended)");
    cmd->add_option("--min-ratio", flags.min_ratio, "smallest grid value over largest");
    cmd->add_option("--gammas", flags.gammas, "explicit gamma grid")->delimiter(',');
    cmd->add_option("--lambdas", flags.lambdas, "explicit lambda grid")->delimiter(',');
}

TuningGrid make_grid(const Dataset& d, const GridFlags& flags, const SolverConfig& solver) {
    TuningGrid grid;
    if (!flags.gammas.empty()) {
        grid.gammas = flags.gammas;
        std::sort(grid.gammas.begin(), grid.gammas.end(), std::greater<double>());
    } else {
        grid.gammas = log_spaced_grid(gamma_max(d.x, d.y), flags.n_gamma, flags.min_ratio);
    }
    if (!flags.lambdas.empty()) {
        grid.lambdas = flags.lambdas;
        std::sort(grid.lambdas.begin(), grid.lambdas.end(), std::greater<double>());
    } else if (d.structure.empty()) {
        grid.lambdas = {0.0};
    } else {
        grid.lambdas =
            log_spaced_grid(lambda_max(d.x, d.y, d.structure, solver), flags.n_lambda,
                            flags.min_ratio);
        grid.lambdas.push_back(0.0);
    }
    grid.validate();
    return grid;
}

void print_path_table(const FitPath& path, std::ostream& out) {
    out << "gamma_index\tlambda_index\tgamma\tlambda\tok\titerations\tconverged\tobjective"
           "\tkkt_residual\terror\n";
    for (const PathCell& c : path.cells) {
        out << c.gamma_index << '\t' << c.lambda_index << '\t' << format_double(c.gamma) << '\t'
            << format_double(c.lambda) << '\t' << (c.ok ? 1 : 0) << '\t';
        if (c.ok) {
            out << c.result.iterations << '\t' << (c.result.converged ? 1 : 0) << '\t'
                << format_double(c.result.objective()) << '\t'
                << format_double(c.result.kkt_residual) << "\t\n";
        } else {
            out << "0\t0\tnan\tnan\t" << c.error << '\n';
        }
    }
}

// Cell lookup shared by predict and report: explicit indices, else the
// recorded selection, else the only cell.
const FitResult& choose_cell(const ModelBundle& bundle, int gamma_index, int lambda_index) {
    if (gamma_index >= 0 || lambda_index >= 0) {
        if (gamma_index < 0 || lambda_index < 0) {
            throw ValidationError("pass both --gamma-index and --lambda-index");
        }
        if (gamma_index >= bundle.path.grid.num_gammas() ||
            lambda_index >= bundle.path.grid.num_lambdas()) {
            throw ValidationError("cell index out of range for the saved grid");
        }
        const PathCell& c = bundle.path.cell(gamma_index, lambda_index);
        if (!c.ok) throw ValidationError("requested cell failed: " + c.error);
        return c.result;
    }
    if (bundle.has_selection()) return bundle.selected_fit();
    if (bundle.path.cells.size() == 1) {
        const PathCell& c = bundle.path.cells[0];
        if (!c.ok) throw ValidationError("the saved fit failed: " + c.error);
        return c.result;
    }
    throw ValidationError(
        "model has several cells and no recorded selection; pass --gamma-index/--lambda-index");
}

struct SimulateOptions {
    int model_id = 1;
    int p = 100;
    int n_train = 500;
    int n_val = 500;
    int n_test = 2000;
    std::uint64_t seed = 1;
    std::string groups_path;
    std::string out_dir;
    int threads = 1;
};

void run_simulate(const SimulateOptions& opt) {
    SimulationSpec spec;
    spec.model_id = opt.model_id;
    spec.p = opt.p;
    spec.n_train = opt.n_train;
    spec.n_val = opt.n_val;
    spec.n_test = opt.n_test;
    spec.seed = opt.seed;

    GroupSpecParse groups;
    if (!opt.groups_path.empty()) {
        groups = read_group_spec(opt.groups_path);
        spec.structure = groups.structure;
        spec.num_categories = groups.structure.num_categories;
    } else {
        groups.structure = spec.structure;
        groups.category_names = default_column_names("c", spec.num_categories);
        groups.group_names = default_column_names("A", spec.structure.size());
    }
    spec.validate();

    const SimulatedDataset data = generate_dataset(spec);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw ValidationError("cannot create directory " + opt.out_dir + ": " + ec.message());
    const fs::path dir(opt.out_dir);

    write_design_csv((dir / "x_train.csv").string(), data.x_train);
    write_design_csv((dir / "x_val.csv").string(), data.x_val);
    write_design_csv((dir / "x_test.csv").string(), data.x_test);
    write_labels_csv((dir / "y_train.csv").string(), data.y_train);
    write_labels_csv((dir / "y_val.csv").string(), data.y_val);
    write_labels_csv((dir / "y_test.csv").string(), data.y_test);
    write_matrix_csv((dir / "beta_star.csv").string(), data.beta_star.values,
                     groups.category_names);
    write_matrix_csv((dir / "pi_true_test.csv").string(), data.pi_true_test.values,
                     groups.category_names);
    write_text_file((dir / "groups.txt").string(), format_group_spec(groups));
    write_text_file((dir / "manifest.json").string(),
                    std::string("{\n") + "  \"model_id\": " + std::to_string(spec.model_id) +
                        ",\n  \"p\": " + std::to_string(spec.p) +
                        ",\n  \"n_train\": " + std::to_string(spec.n_train) +
                        ",\n  \"n_val\": " + std::to_string(spec.n_val) +
                        ",\n  \"n_test\": " + std::to_string(spec.n_test) +
                        ",\n  \"seed\": " + std::to_string(spec.seed) + "\n}\n");
    std::cout << "wrote " << opt.out_dir << " (model " << spec.model_id << ", p=" << spec.p
              << ", seed=" << spec.seed << ")\n";
}

struct FitOptions {
    std::string x_path, y_path, groups_path, out_dir;
    bool no_intercept = false;
    double gamma = 0.0;
    double lambda = 0.0;
    SolverFlags solver;
};

void run_fit(const FitOptions& opt) {
    const bool intercept = !opt.no_intercept;
    const Dataset d = load_dataset(opt.x_path, opt.y_path, opt.groups_path, intercept);
    const SolverConfig config = opt.solver.resolve();

    TuningGrid grid;
    grid.gammas = {opt.gamma};
    grid.lambdas = {opt.lambda};
    grid.validate();
    const FitPath path = fit_path(d.x, d.y, d.structure, grid, config, 1);
    const PathCell& cell = path.cells[0];
    if (!cell.ok) throw NumericalError("fit failed: " + cell.error);

    std::cout << "objective " << format_double(cell.result.objective()) << "\n"
              << "iterations " << cell.result.iterations << "\n"
              << "converged " << (cell.result.converged ? 1 : 0) << "\n"
              << "kkt_residual " << format_double(cell.result.kkt_residual) << "\n"
              << "dof " << degrees_of_freedom(cell.result.beta) << "\n";
    if (!opt.out_dir.empty()) {
        save_model(opt.out_dir, make_bundle(path, d, intercept));
        std::cout << "wrote " << opt.out_dir << "\n";
    }
}

struct PathOptions {
    std::string x_path, y_path, groups_path, out_dir;
    bool no_intercept = false;
    GridFlags grid;
    SolverFlags solver;
    int threads = 1;
};

void run_path(const PathOptions& opt) {
    const bool intercept = !opt.no_intercept;
    const Dataset d = load_dataset(opt.x_path, opt.y_path, opt.groups_path, intercept);
    const SolverConfig config = opt.solver.resolve();
    const TuningGrid grid = make_grid(d, opt.grid, config);

    const FitPath path = fit_path(d.x, d.y, d.structure, grid, config, opt.threads);
    print_path_table(path, std::cout);
    if (!opt.out_dir.empty()) {
        save_model(opt.out_dir, make_bundle(path, d, intercept));
    }
}

struct CvOptions {
    std::string x_path, y_path, groups_path, out_path;
    bool no_intercept = false;
    GridFlags grid;
    SolverFlags solver;
    int folds = 5;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_cv(const CvOptions& opt) {
    const bool intercept = !opt.no_intercept;
    const Dataset d = load_dataset(opt.x_path, opt.y_path, opt.groups_path, intercept);
    const SolverConfig config = opt.solver.resolve();
    const TuningGrid grid = make_grid(d, opt.grid, config);

    const CrossValidationResult cv =
        cross_validate(d.x, d.y, d.structure, grid, opt.folds, opt.seed, config, opt.threads);

    std::string table = "gamma_index\tlambda_index\tgamma\tlambda\tmean_deviance\n";
    for (int gi = 0; gi < cv.grid.num_gammas(); ++gi) {
        for (int li = 0; li < cv.grid.num_lambdas(); ++li) {
            table += std::to_string(gi) + '\t' + std::to_string(li) + '\t' +
                     format_double(cv.grid.gammas[static_cast<std::size_t>(gi)]) + '\t' +
                     format_double(cv.grid.lambdas[static_cast<std::size_t>(li)]) + '\t' +
                     format_double(cv.mean_deviance(gi, li)) + '\n';
        }
    }
    std::cout << table;
    std::cout << "selected gamma " << format_double(cv.gamma) << " (index " << cv.gamma_index
              << "), lambda " << format_double(cv.lambda) << " (index " << cv.lambda_index
              << ")\n";
    if (!opt.out_path.empty()) write_text_file(opt.out_path, table);
}

struct SelectOptions {
    std::string x_path, y_path, x_val_path, y_val_path, groups_path, out_dir;
    bool no_intercept = false;
    GridFlags grid;
    SolverFlags solver;
    int threads = 1;
};

void run_select(const SelectOptions& opt) {
    const bool intercept = !opt.no_intercept;
    const Dataset d = load_dataset(opt.x_path, opt.y_path, opt.groups_path, intercept);
    const DesignMatrix x_val = read_design_csv(opt.x_val_path, intercept);
    const ResponseCounts y_val =
        read_response_csv(opt.y_val_path, static_cast<int>(d.y.num_categories()));
    const SolverConfig config = opt.solver.resolve();
    const TuningGrid grid = make_grid(d, opt.grid, config);

    const FitPath path = fit_path(d.x, d.y, d.structure, grid, config, opt.threads);
    const SelectionResult sel = select_model(path, x_val, y_val);

    std::cout << "selected gamma " << format_double(sel.gamma) << " (index " << sel.gamma_index
              << "), lambda " << format_double(sel.lambda) << " (index " << sel.lambda_index
              << ")\n"
              << "validation_deviance " << format_double(sel.validation_deviance) << "\n"
              << "dof " << degrees_of_freedom(sel.fit.beta) << "\n";
    if (!opt.out_dir.empty()) {
        ModelBundle bundle = make_bundle(path, d, intercept);
        bundle.selected_gamma_index = sel.gamma_index;
        bundle.selected_lambda_index = sel.lambda_index;
        save_model(opt.out_dir, bundle);
        std::cout << "wrote " << opt.out_dir << "\n";
    }
}

struct PredictOptions {
    std::string model_dir, x_path, out_path;
    int gamma_index = -1;
    int lambda_index = -1;
};

void run_predict(const PredictOptions& opt) {
    const ModelBundle bundle = load_model(opt.model_dir);
    const FitResult& fit = choose_cell(bundle, opt.gamma_index, opt.lambda_index);
    const DesignMatrix x = read_design_csv(opt.x_path, bundle.has_intercept);
    if (x.p() != fit.beta.p()) {
        throw ValidationError("model expects " + std::to_string(fit.beta.p()) +
                              " predictor columns (intercept included), got " +
                              std::to_string(x.p()));
    }
    const ProbabilityMatrix probs = compute_probabilities(x, fit.beta);
    const std::vector<std::string> names =
        bundle.category_names.empty()
            ? default_column_names("c", static_cast<int>(probs.num_categories()))
            : bundle.category_names;
    if (opt.out_path.empty()) {
        std::string text;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) text += ',';
            text += names[i];
        }
        text += '\n';
        for (Eigen::Index i = 0; i < probs.n(); ++i) {
            for (Eigen::Index k = 0; k < probs.num_categories(); ++k) {
                if (k > 0) text += ',';
                text += format_double(probs.values(i, k));
            }
            text += '\n';
        }
        std::cout << text;
    } else {
        write_matrix_csv(opt.out_path, probs.values, names);
        std::cout << "wrote " << opt.out_path << "\n";
    }
}

struct ReportOptions {
    std::string model_dir, out_path;
    int gamma_index = -1;
    int lambda_index = -1;
};

void run_report(const ReportOptions& opt) {
    const ModelBundle bundle = load_model(opt.model_dir);
    const FitResult& fit = choose_cell(bundle, opt.gamma_index, opt.lambda_index);
    const ResolutionReport report = resolution_report(fit.beta, bundle.structure);
    const std::vector<std::string> predictor_names =
        bundle.predictor_names.size() == static_cast<std::size_t>(fit.beta.p())
            ? bundle.predictor_names
            : std::vector<std::string>{};
    const std::string text =
        format_resolution_report(report, predictor_names, bundle.group_names);
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(opt.out_path, text);
        std::cout << "wrote " << opt.out_path << "\n";
    }
}

struct BenchOptions {
    BenchConfig config;
    SolverFlags solver;
    std::string out_path, summary_path;
};

void run_bench_cmd(const BenchOptions& opt) {
    BenchConfig config = opt.config;
    config.solver = opt.solver.resolve();
    const std::vector<BenchRow> rows = run_bench(config);
    std::cout << format_bench_summary(summarize_bench(rows));
    if (!opt.out_path.empty()) write_text_file(opt.out_path, format_bench_rows(rows));
    if (!opt.summary_path.empty()) {
        write_text_file(opt.summary_path, format_bench_summary(summarize_bench(rows)));
    }
}

void add_data_options(CLI::App* cmd, std::string& x_path, std::string& y_path,
                      std::string& groups_path, bool& no_intercept) {
    cmd->add_option("--x", x_path, "predictor CSV")->required();
    cmd->add_option("--y", y_path, "response CSV (1-based labels or counts)")->required();
    cmd->add_option("--groups", groups_path, "coarse group specification file");
    cmd->add_flag("--no-intercept", no_intercept, "do not prepend an intercept column");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiresolution multinomial logistic regression"};
    app.require_subcommand(1);

    auto sim = std::make_shared<SimulateOptions>();
    {
        CLI::App* cmd = app.add_subcommand("simulate", "generate a synthetic benchmark dataset");
        cmd->add_option("--model", sim->model_id, "scenario in [1,6]")->required();
        cmd->add_option("--p", sim->p, "number of predictors");
        cmd->add_option("--n-train", sim->n_train, "training rows");
        cmd->add_option("--n-val", sim->n_val, "validation rows");
        cmd->add_option("--n-test", sim->n_test, "test rows");
        cmd->add_option("--seed", sim->seed, "RNG seed")->required();
        cmd->add_option("--groups", sim->groups_path, "coarse group specification file");
        cmd->add_option("--out", sim->out_dir, "output directory")->required();
        cmd->add_option("--threads", sim->threads, "accepted for interface symmetry");
        cmd->callback([sim] { run_simulate(*sim); });
    }

    auto fit = std::make_shared<FitOptions>();
    {
        CLI::App* cmd = app.add_subcommand("fit", "fit a single (gamma, lambda) model");
        add_data_options(cmd, fit->x_path, fit->y_path, fit->groups_path, fit->no_intercept);
        cmd->add_option("--gamma", fit->gamma, "row sparsity penalty")->required();
        cmd->add_option("--lambda", fit->lambda, "group centering penalty");
        cmd->add_option("--out", fit->out_dir, "model output directory");
        add_solver_options(cmd, fit->solver);
        cmd->callback([fit] { run_fit(*fit); });
    }

    auto path = std::make_shared<PathOptions>();
    {
        CLI::App* cmd = app.add_subcommand("path", "fit a full tuning grid");
        add_data_options(cmd, path->x_path, path->y_path, path->groups_path,
                         path->no_intercept);
        add_grid_options(cmd, path->grid);
        add_solver_options(cmd, path->solver);
        cmd->add_option("--threads", path->threads, "worker threads");
        cmd->add_option("--out", path->out_dir, "model output directory");
        cmd->callback([path] { run_path(*path); });
    }

    auto cv = std::make_shared<CvOptions>();
    {
        CLI::App* cmd = app.add_subcommand("cv", "cross-validate the tuning grid");
        add_data_options(cmd, cv->x_path, cv->y_path, cv->groups_path, cv->no_intercept);
        add_grid_options(cmd, cv->grid);
        add_solver_options(cmd, cv->solver);
        cmd->add_option("--folds", cv->folds, "number of folds");
        cmd->add_option("--seed", cv->seed, "fold shuffle seed")->required();
        cmd->add_option("--threads", cv->threads, "worker threads");
        cmd->add_option("--out", cv->out_path, "deviance table output file");
        cmd->callback([cv] { run_cv(*cv); });
    }

    auto sel = std::make_shared<SelectOptions>();
    {
        CLI::App* cmd =
            app.add_subcommand("select", "fit a grid and pick the best cell on validation data");
        add_data_options(cmd, sel->x_path, sel->y_path, sel->groups_path, sel->no_intercept);
        cmd->add_option("--x-val", sel->x_val_path, "validation predictor CSV")->required();
        cmd->add_option("--y-val", sel->y_val_path, "validation response CSV")->required();
        add_grid_options(cmd, sel->grid);
        add_solver_options(cmd, sel->solver);
        cmd->add_option("--threads", sel->threads, "worker threads");
        cmd->add_option("--out", sel->out_dir, "model output directory");
        cmd->callback([sel] { run_select(*sel); });
    }

    auto pred = std::make_shared<PredictOptions>();
    {
        CLI::App* cmd = app.add_subcommand("predict", "predict category probabilities");
        cmd->add_option("--model", pred->model_dir, "saved model directory")->required();
        cmd->add_option("--x", pred->x_path, "predictor CSV")->required();
        cmd->add_option("--out", pred->out_path, "probability CSV output file");
        cmd->add_option("--gamma-index", pred->gamma_index, "grid cell to use");
        cmd->add_option("--lambda-index", pred->lambda_index, "grid cell to use");
        cmd->callback([pred] { run_predict(*pred); });
    }

    auto rep = std::make_shared<ReportOptions>();
    {
        CLI::App* cmd = app.add_subcommand("report", "effect-resolution report of a saved model");
        cmd->add_option("--model", rep->model_dir, "saved model directory")->required();
        cmd->add_option("--out", rep->out_path, "report output file");
        cmd->add_option("--gamma-index", rep->gamma_index, "grid cell to use");
        cmd->add_option("--lambda-index", rep->lambda_index, "grid cell to use");
        cmd->callback([rep] { run_report(*rep); });
    }

    auto bench = std::make_shared<BenchOptions>();
    {
        CLI::App* cmd = app.add_subcommand("bench", "replicated estimator comparison");
        cmd->add_option("--models", bench->config.model_ids, "scenario ids")->delimiter(',');
        cmd->add_option("--p", bench->config.p, "number of predictors");
        cmd->add_option("--n-train", bench->config.n_train, "training rows");
        cmd->add_option("--n-val", bench->config.n_val, "validation rows");
        cmd->add_option("--n-test", bench->config.n_test, "test rows");
        cmd->add_option("--reps", bench->config.reps, "replications per model");
        cmd->add_option("--seed", bench->config.seed, "RNG seed")->required();
        cmd->add_option("--methods", bench->config.methods,
                        "subset of multires,group,l1,approx")
            ->delimiter(',');
        cmd->add_option("--n-gamma", bench->config.n_gamma, "gamma grid size");
        cmd->add_option("--n-lambda", bench->config.n_lambda, "lambda grid size");
        cmd->add_option("--min-ratio", bench->config.min_ratio,
                        "smallest grid value over largest");
        cmd->add_option("--threads", bench->config.threads, "worker threads");
        cmd->add_option("--out", bench->out_path, "per-replication metrics output file");
        cmd->add_option("--summary-out", bench->summary_path, "summary table output file");
        add_solver_options(cmd, bench->solver);
        cmd->callback([bench] { run_bench_cmd(*bench); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
