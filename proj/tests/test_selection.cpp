#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "multires/errors.hpp"
#include "multires/model.hpp"
#include "multires/selection.hpp"
#include "multires/solver.hpp"
#include "support/oracles.hpp"

using namespace multires;
namespace ts = multires::testsupport;

namespace {

ts::RandomInstance fixture(std::uint64_t seed, int n = 60, int p = 5, int k = 4) {
    Rng rng(seed);
    return ts::random_instance(rng, n, p, k, true);
}

const CoarseStructure kPairs = CoarseStructure::make({{0, 1}, {2, 3}}, 4);

}  // namespace

TEST_CASE("intercept-only fit reproduces the empirical frequencies") {
    const ts::RandomInstance inst = fixture(601);
    const CoefficientMatrix null_fit = intercept_only_fit(inst.x, inst.y);
    for (int j = 1; j < 5; ++j) CHECK(null_fit.values.row(j).isZero(0.0));

    Eigen::VectorXd freq = inst.y.counts.cast<double>().colwise().sum().transpose();
    freq /= freq.sum();
    const ProbabilityMatrix probs = compute_probabilities(inst.x, null_fit);
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(std::abs(probs.values(0, k) - freq(k)) < 1e-12);
    }

    // Without an intercept column the null model is beta = 0.
    Rng rng(602);
    const ts::RandomInstance flat = ts::random_instance(rng, 30, 3, 4, false);
    CHECK(intercept_only_fit(flat.x, flat.y).values.isZero(0.0));
}

TEST_CASE("gamma_max is the edge of total sparsity") {
    const ts::RandomInstance inst = fixture(603);
    const double top = gamma_max(inst.x, inst.y);
    CHECK(top > 0.0);

    const FitResult at_top = fit(inst.x, inst.y, kPairs, top, 0.0);
    for (int j : at_top.beta.penalized_rows) {
        CHECK(at_top.beta.values.row(j).isZero(0.0));
    }

    const FitResult below = fit(inst.x, inst.y, kPairs, 0.5 * top, 0.0);
    bool any_active = false;
    for (int j : below.beta.penalized_rows) {
        if (!below.beta.values.row(j).isZero(0.0)) any_active = true;
    }
    CHECK(any_active);
}

TEST_CASE("lambda_max certifiably collapses every group") {
    const ts::RandomInstance inst = fixture(604);
    const double top = lambda_max(inst.x, inst.y, kPairs);
    CHECK(top > 0.0);
    const FitResult res = fit(inst.x, inst.y, kPairs, 0.0, top);
    for (int j : res.beta.penalized_rows) {
        const Eigen::VectorXd row = res.beta.values.row(j).transpose();
        for (const auto& group : kPairs.groups) CHECK(is_constant_on(row, group));
    }
    CHECK_THROWS_AS(lambda_max(inst.x, inst.y, CoarseStructure::none(4)), ValidationError);
}

TEST_CASE("log-spaced grids have constant ratio and pinned endpoints") {
    const std::vector<double> grid = log_spaced_grid(2.0, 6, 1e-3);
    REQUIRE(grid.size() == 6);
    CHECK(grid.front() == 2.0);
    CHECK(std::abs(grid.back() - 2.0 * 1e-3) < 1e-12);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        CHECK(std::abs(grid[i + 1] / grid[i] - grid[1] / grid[0]) < 1e-12);
    }
    CHECK(std::is_sorted(grid.rbegin(), grid.rend()));

    const std::vector<double> single = log_spaced_grid(3.5, 1, 1e-2);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 3.5);

    CHECK_THROWS_AS(log_spaced_grid(0.0, 4, 1e-2), ValidationError);
    CHECK_THROWS_AS(log_spaced_grid(1.0, 0, 1e-2), ValidationError);
    CHECK_THROWS_AS(log_spaced_grid(1.0, 4, 2.0), ValidationError);
}

TEST_CASE("build_grid appends the pure sparsity column") {
    const ts::RandomInstance inst = fixture(605);
    const TuningGrid grid = build_grid(inst.x, inst.y, kPairs, 4, 3, 1e-2);
    grid.validate();
    CHECK(grid.num_gammas() == 4);
    REQUIRE(grid.num_lambdas() == 4);
    CHECK(grid.gammas.front() == gamma_max(inst.x, inst.y));
    CHECK(grid.lambdas.back() == 0.0);
    CHECK(grid.lambdas[2] > 0.0);

    const TuningGrid plain = build_grid(inst.x, inst.y, CoarseStructure::none(4), 3, 5, 1e-2);
    CHECK(plain.num_gammas() == 3);
    REQUIRE(plain.num_lambdas() == 1);
    CHECK(plain.lambdas[0] == 0.0);
}

TEST_CASE("deviance is twice the total negative log-likelihood") {
    const ts::RandomInstance inst = fixture(606);
    const double dev = deviance(inst.x, inst.y, inst.beta);
    const double nll = negative_log_likelihood(inst.x, inst.y, inst.beta);
    CHECK(std::abs(dev - 2.0 * 60 * nll) < 1e-10 * std::max(1.0, dev));

    const ProbabilityMatrix probs = compute_probabilities(inst.x, inst.beta);
    CHECK(std::abs(deviance_from_probabilities(probs, inst.y) - dev) <
          1e-8 * std::max(1.0, dev));
}

TEST_CASE("degrees of freedom counts distinct values per row") {
    CoefficientMatrix beta = CoefficientMatrix::zero(4, 12, true);
    // Intercept row: always K even though it holds zeros.
    // Row 1: six distinct doubled values.
    for (int k = 0; k < 12; ++k) beta.values(1, k) = static_cast<double>(k / 2 + 1);
    // Row 2: exactly zero, penalized.
    // Row 3: all twelve distinct.
    for (int k = 0; k < 12; ++k) beta.values(3, k) = 0.25 * k + 1.0;
    CHECK(degrees_of_freedom(beta) == 12 + 6 + 0 + 12);

    const CoefficientMatrix null_beta = CoefficientMatrix::zero(3, 4, true);
    CHECK(degrees_of_freedom(null_beta) == 4);
}

TEST_CASE("metrics vanish when the prediction equals the truth") {
    const ts::RandomInstance inst = fixture(607);
    const ProbabilityMatrix truth = compute_probabilities(inst.x, inst.beta);
    const MetricsReport report = evaluate_metrics(inst.beta, inst.x, inst.y, &truth);
    CHECK(std::abs(report.hellinger) < 1e-12);
    CHECK(std::abs(report.kl_divergence) < 1e-12);
    CHECK(report.deviance == doctest::Approx(deviance(inst.x, inst.y, inst.beta)).epsilon(1e-12));
    CHECK(report.degrees_of_freedom == degrees_of_freedom(inst.beta));
}

TEST_CASE("hellinger and kl stay in range against a wrong model") {
    const ts::RandomInstance inst = fixture(608);
    Rng rng(609);
    const ts::RandomInstance other = ts::random_instance(rng, 60, 5, 4, true);
    const ProbabilityMatrix truth = compute_probabilities(inst.x, other.beta);
    const MetricsReport report = evaluate_metrics(inst.beta, inst.x, inst.y, &truth);
    CHECK(report.hellinger >= 0.0);
    CHECK(report.hellinger <= 1.0);
    CHECK(report.kl_divergence >= 0.0);
    CHECK(std::isfinite(report.kl_divergence));
    CHECK(report.classification_error >= 0.0);
    CHECK(report.classification_error <= 1.0);
}

TEST_CASE("classification ties resolve to the lowest category index") {
    // beta = 0 predicts uniform probabilities, so argmax is category 0 and
    // the error rate is the fraction of labels that are not 0.
    DesignMatrix x = DesignMatrix::with_intercept(Eigen::MatrixXd::Zero(4, 1));
    const ResponseCounts y = ResponseCounts::from_labels({0, 1, 2, 0}, 3);
    const CoefficientMatrix beta = CoefficientMatrix::zero(2, 3, true);
    const MetricsReport report = evaluate_metrics(beta, x, y);
    CHECK(report.classification_error == 0.5);
    CHECK(std::isnan(report.hellinger));
    CHECK(std::isnan(report.kl_divergence));
}

TEST_CASE("select_model picks the cell with the smallest validation deviance") {
    const ts::RandomInstance train = fixture(610, 80);
    const ts::RandomInstance val = fixture(611, 40);

    TuningGrid grid;
    grid.gammas = {0.3, 0.1, 0.03};
    grid.lambdas = {0.05, 0.0};
    const FitPath path = fit_path(train.x, train.y, kPairs, grid);
    const SelectionResult pick = select_model(path, val.x, val.y);

    double best = std::numeric_limits<double>::infinity();
    for (const PathCell& cell : path.cells) {
        REQUIRE(cell.ok);
        best = std::min(best, deviance(val.x, val.y, cell.result.beta));
    }
    CHECK(pick.validation_deviance == best);
    CHECK(pick.gamma == grid.gammas[static_cast<std::size_t>(pick.gamma_index)]);
    CHECK(pick.lambda == grid.lambdas[static_cast<std::size_t>(pick.lambda_index)]);
}

TEST_CASE("select_model breaks exact ties toward the sparser cell") {
    // Hand-built path where every cell carries the same beta, so every
    // validation deviance ties and the first storage-order cell must win:
    // the largest gamma, then the largest lambda.
    const ts::RandomInstance val = fixture(612, 30);
    FitPath path;
    path.grid.gammas = {1.0, 0.5};
    path.grid.lambdas = {0.2, 0.0};
    path.cells.resize(4);
    for (int gi = 0; gi < 2; ++gi) {
        for (int li = 0; li < 2; ++li) {
            PathCell& cell = path.cell(gi, li);
            cell.gamma = path.grid.gammas[static_cast<std::size_t>(gi)];
            cell.lambda = path.grid.lambdas[static_cast<std::size_t>(li)];
            cell.gamma_index = gi;
            cell.lambda_index = li;
            cell.ok = true;
            cell.result.beta = CoefficientMatrix::zero(5, 4, true);
            cell.result.objective_trace = {1.0};
        }
    }
    const SelectionResult pick = select_model(path, val.x, val.y);
    CHECK(pick.gamma_index == 0);
    CHECK(pick.lambda_index == 0);

    // A failed cell is skipped even if it would have won.
    path.cell(0, 0).ok = false;
    const SelectionResult fallback = select_model(path, val.x, val.y);
    CHECK(fallback.gamma_index == 0);
    CHECK(fallback.lambda_index == 1);

    for (PathCell& cell : path.cells) cell.ok = false;
    CHECK_THROWS_AS(select_model(path, val.x, val.y), ValidationError);
}

TEST_CASE("select_by_bic minimizes penalized training deviance") {
    const ts::RandomInstance train = fixture(613, 80);

    TuningGrid grid;
    grid.gammas = {0.3, 0.1, 0.03};
    grid.lambdas = {0.05, 0.0};
    const FitPath path = fit_path(train.x, train.y, kPairs, grid);
    const BicSelectionResult pick = select_by_bic(path, train.x, train.y);

    const double log_n = std::log(static_cast<double>(train.x.values.rows()));
    double best = std::numeric_limits<double>::infinity();
    for (const PathCell& cell : path.cells) {
        REQUIRE(cell.ok);
        best = std::min(best, deviance(train.x, train.y, cell.result.beta) +
                                  log_n * degrees_of_freedom(cell.result.beta));
    }
    CHECK(pick.bic == best);
    CHECK(pick.gamma == grid.gammas[static_cast<std::size_t>(pick.gamma_index)]);
    CHECK(pick.lambda == grid.lambdas[static_cast<std::size_t>(pick.lambda_index)]);

    // The BIC score of the picked cell never lies below the bare deviance of
    // a saturated refit of the same cell, so the complexity term is in play.
    CHECK(pick.bic > deviance(train.x, train.y, pick.fit.beta));
}

TEST_CASE("fold assignment is balanced, in range, and seeded") {
    const std::vector<int> folds = cv_fold_assignment(23, 5, 99);
    REQUIRE(folds.size() == 23);
    std::vector<int> sizes(5, 0);
    for (int f : folds) {
        REQUIRE(f >= 0);
        REQUIRE(f < 5);
        ++sizes[static_cast<std::size_t>(f)];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);
    CHECK(cv_fold_assignment(23, 5, 99) == folds);
    CHECK(cv_fold_assignment(23, 5, 100) != folds);

    CHECK_THROWS_AS(cv_fold_assignment(23, 1, 99), ValidationError);
    CHECK_THROWS_AS(cv_fold_assignment(3, 4, 99), ValidationError);
}

TEST_CASE("cross validation averages finite fold deviances") {
    const ts::RandomInstance inst = fixture(613, 90);
    TuningGrid grid;
    grid.gammas = {0.2, 0.05};
    grid.lambdas = {0.05, 0.0};
    const CrossValidationResult cv =
        cross_validate(inst.x, inst.y, kPairs, grid, 3, 17, {}, 2);
    REQUIRE(cv.mean_deviance.rows() == 2);
    REQUIRE(cv.mean_deviance.cols() == 2);
    CHECK(cv.mean_deviance.allFinite());
    CHECK((cv.mean_deviance.array() > 0.0).all());
    REQUIRE(cv.gamma_index >= 0);
    REQUIRE(cv.lambda_index >= 0);
    CHECK(cv.mean_deviance(cv.gamma_index, cv.lambda_index) == cv.mean_deviance.minCoeff());
    CHECK(cv.gamma == grid.gammas[static_cast<std::size_t>(cv.gamma_index)]);

    // Same seed, same result; the fold split drives everything downstream.
    const CrossValidationResult again =
        cross_validate(inst.x, inst.y, kPairs, grid, 3, 17, {}, 1);
    CHECK((cv.mean_deviance - again.mean_deviance).cwiseAbs().maxCoeff() == 0.0);
}
