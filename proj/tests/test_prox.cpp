#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "multires/errors.hpp"
#include "multires/io.hpp"
#include "multires/prox.hpp"
#include "multires/rng.hpp"
#include "support/oracles.hpp"
#include "support/prox_cases.hpp"

using namespace multires;
namespace ts = multires::testsupport;

namespace {

// Ternary search on a convex scalar function; the bracket shrinks by 2/3 per
// step, so 200 steps pin the minimizer far below any tolerance used here.
double scalar_minimizer(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (f(a) < f(b)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("elementwise soft threshold matches its definition") {
    Eigen::VectorXd eta(2);
    eta << 2.0, -0.3;
    const Eigen::VectorXd out = soft_threshold_l1(eta, 0.5);
    CHECK(out(0) == 1.5);
    CHECK(out(1) == 0.0);

    const Eigen::VectorXd same = soft_threshold_l1(eta, 0.0);
    CHECK(same(0) == eta(0));
    CHECK(same(1) == eta(1));

    CHECK_THROWS_AS(soft_threshold_l1(eta, -0.1), ValidationError);
}

TEST_CASE("elementwise soft threshold matches scalar numeric minimization") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const double t = 2.0 * rng.uniform01();
        Eigen::VectorXd eta(5);
        for (int j = 0; j < 5; ++j) eta(j) = 3.0 * rng.standard_normal();
        const Eigen::VectorXd out = soft_threshold_l1(eta, t);
        for (int j = 0; j < 5; ++j) {
            const double e = eta(j);
            const double numeric = scalar_minimizer(
                [e, t](double v) { return 0.5 * (v - e) * (v - e) + t * std::abs(v); },
                -std::abs(e) - 1.0, std::abs(e) + 1.0);
            // Function-value comparisons cannot localize a quadratic argmin
            // below sqrt(machine epsilon), so the oracle is good to ~1e-7.
            CHECK(std::abs(out(j) - numeric) < 1e-6);
        }
    }
}

TEST_CASE("group soft threshold shrinks and zeroes") {
    Eigen::VectorXd v(2);
    v << 3.0, 4.0;
    const Eigen::VectorXd shrunk = group_soft_threshold(v, 0.5);
    CHECK(shrunk(0) == doctest::Approx(2.7).epsilon(1e-15));
    CHECK(shrunk(1) == doctest::Approx(3.6).epsilon(1e-15));

    // The boundary ||v|| == t lands exactly on zero.
    const Eigen::VectorXd boundary = group_soft_threshold(v, 5.0);
    CHECK(boundary(0) == 0.0);
    CHECK(boundary(1) == 0.0);

    const Eigen::VectorXd zeroed = group_soft_threshold(v, 6.0);
    CHECK(zeroed.isZero(0.0));

    const Eigen::VectorXd kept = group_soft_threshold(v, 0.0);
    CHECK(kept(0) == v(0));
    CHECK(kept(1) == v(1));
}

TEST_CASE("closed-form prox fills the mean inside the threshold") {
    Eigen::VectorXd eta(2);
    eta << 1.0, 1.1;
    const CoarseStructure s = CoarseStructure::make({{0, 1}}, 2);
    // centered norm is |1.0 - 1.05|*sqrt(2) ~ 0.0707, inside 0.1
    const Eigen::VectorXd out = prox_multires_nonoverlapping(eta, 0.1, s);
    CHECK(out(0) == doctest::Approx(1.05).epsilon(1e-15));
    CHECK(out(0) == out(1));  // one stored value, equality is exact
}

TEST_CASE("closed-form prox shrinks toward the mean outside the threshold") {
    Eigen::VectorXd eta(2);
    eta << 0.0, 2.0;
    const CoarseStructure s = CoarseStructure::make({{0, 1}}, 2);
    const double t = 0.5 / std::sqrt(2.0);
    const Eigen::VectorXd out = prox_multires_nonoverlapping(eta, 0.5, s);
    CHECK(out(0) == doctest::Approx(t).epsilon(1e-12));
    CHECK(out(1) == doctest::Approx(2.0 - t).epsilon(1e-12));

    // The self-certifying numeric minimizer agrees.
    const ts::CertifiedProx oracle = ts::certified_prox(eta, 0.0, 0.5, s);
    CHECK(oracle.error_bound < 1e-9);
    CHECK((out - oracle.nu).norm() < 1e-8 + oracle.error_bound);
}

TEST_CASE("closed-form prox: boundary, pass-through, constancy, overlap rejection") {
    const CoarseStructure s = CoarseStructure::make({{0, 1}}, 3);
    Eigen::VectorXd eta(3);
    eta << 0.0, 2.0, -7.5;

    // Centered norm exactly equal to the threshold collapses to the mean.
    const Eigen::VectorXd boundary = prox_multires_nonoverlapping(eta, std::sqrt(2.0), s);
    CHECK(boundary(0) == 1.0);
    CHECK(boundary(1) == 1.0);
    CHECK(boundary(2) == -7.5);  // uncovered category is untouched

    // A group that is already constant passes through with its bits intact.
    Eigen::VectorXd flat(3);
    flat << 0.3, 0.3, 5.0;
    const Eigen::VectorXd kept = prox_multires_nonoverlapping(flat, 10.0, s);
    CHECK(kept(0) == 0.3);
    CHECK(kept(1) == 0.3);
    CHECK(kept(2) == 5.0);

    // Zero penalty returns the input unchanged.
    const Eigen::VectorXd same = prox_multires_nonoverlapping(eta, 0.0, s);
    CHECK(same(1) == 2.0);

    const CoarseStructure overlap = CoarseStructure::make({{0, 1}, {1, 2}}, 3);
    CHECK_THROWS_AS(prox_multires_nonoverlapping(eta, 0.1, overlap), ValidationError);
}

TEST_CASE("closed-form prox output per group: exact constancy or strict shrinkage") {
    for (int trial = 0; trial < 50; ++trial) {
        const ProxProblem prob = ts::random_prox_problem(21, trial, true);
        const Eigen::VectorXd out =
            prox_multires_nonoverlapping(prob.eta, prob.lambda_tilde, prob.structure);
        for (int l = 0; l < prob.structure.size(); ++l) {
            const auto& idx = prob.structure.groups[l];
            if (is_constant_on(out, idx)) continue;
            CHECK(centered_norm(out, idx) < centered_norm(prob.eta, idx));
        }
    }
}

TEST_CASE("dual coordinate descent matches the closed form on disjoint groups") {
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const ProxProblem prob = ts::random_prox_problem(5150, trial, true);
        const Eigen::VectorXd closed =
            prox_multires_nonoverlapping(prob.eta, prob.lambda_tilde, prob.structure);
        Eigen::MatrixXd dual;
        const Eigen::VectorXd iterative = prox_multires_overlapping(
            prob.eta, prob.lambda_tilde, prob.structure, &dual);
        worst = std::max(worst, (closed - iterative).norm());
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("overlapping prox with zero penalty returns the input and zero duals") {
    const CoarseStructure s = CoarseStructure::make({{0, 1}, {1, 2}}, 3);
    Eigen::VectorXd eta(3);
    eta << 1.0, -2.0, 0.5;
    Eigen::MatrixXd dual;
    const Eigen::VectorXd out = prox_multires_overlapping(eta, 0.0, s, &dual);
    CHECK(out(0) == eta(0));
    CHECK(out(2) == eta(2));
    CHECK(dual.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("overlapping prox solves a symmetric chain analytically") {
    // groups {0,1} and {1,2} with eta = (1, 0, -1): the objective is invariant
    // under negating and reversing the coordinates, so the unique minimizer is
    // antisymmetric, nu = (a, 0, -a), and the one-dimensional reduction
    //   (a-1)^2 + 0.2*sqrt(2)*a  =>  a = 1 - 0.2/sqrt(2)
    const CoarseStructure s = CoarseStructure::make({{0, 1}, {1, 2}}, 3);
    Eigen::VectorXd eta(3);
    eta << 1.0, 0.0, -1.0;
    Eigen::MatrixXd dual;
    const Eigen::VectorXd out = prox_multires_overlapping(eta, 0.2, s, &dual);

    const double a = 1.0 - 0.2 / std::sqrt(2.0);
    CHECK(std::abs(out(0) - a) < 1e-9);
    CHECK(std::abs(out(1)) < 1e-9);
    CHECK(std::abs(out(2) + a) < 1e-9);

    const ts::CertifiedProx oracle = ts::certified_prox(eta, 0.0, 0.2, s);
    CHECK(oracle.error_bound < 1e-9);
    CHECK((out - oracle.nu).norm() < 1e-6);
}

TEST_CASE("dual objective is monotone and duals stay feasible across sweeps") {
    const CoarseStructure s = CoarseStructure::make({{0, 1, 2}, {2, 3, 4}}, 5);
    Eigen::VectorXd eta(5);
    eta << 2.0, -1.0, 0.5, 1.5, -2.0;
    const double lambda = 0.7;

    double previous = std::numeric_limits<double>::infinity();
    for (int sweeps = 1; sweeps <= 8; ++sweeps) {
        Eigen::MatrixXd dual;
        ProxOptions opt;
        opt.tol = 1e-300;  // never stop early, run exactly `sweeps` sweeps
        opt.max_sweeps = sweeps;
        ProxDiagnostics diag;
        prox_multires_overlapping(eta, lambda, s, &dual, opt, &diag);
        CHECK(diag.sweeps == sweeps);

        Eigen::VectorXd combined = Eigen::VectorXd::Zero(5);
        for (int l = 0; l < s.size(); ++l) {
            combined += dual.col(l);
            CHECK(dual.col(l).norm() <= s.weights(l) * lambda + 1e-12);
            // blocks are centered and supported on their group
            double sum = 0.0;
            for (int k : s.groups[l]) sum += dual(k, l);
            CHECK(std::abs(sum) < 1e-12);
        }
        CHECK(dual(3, 0) == 0.0);
        CHECK(dual(4, 0) == 0.0);
        CHECK(dual(0, 1) == 0.0);
        CHECK(dual(1, 1) == 0.0);

        const double objective = 0.5 * (eta - combined).squaredNorm();
        CHECK(objective <= previous + 1e-12);
        previous = objective;
    }
}

TEST_CASE("overlapping prox reports non-convergence instead of hiding it") {
    const CoarseStructure s = CoarseStructure::make({{0, 1, 2}, {2, 3, 4}}, 5);
    Eigen::VectorXd eta(5);
    eta << 2.0, -1.0, 0.5, 1.5, -2.0;
    ProxOptions opt;
    opt.tol = 1e-300;
    opt.max_sweeps = 1;
    ProxDiagnostics diag;
    prox_multires_overlapping(eta, 0.7, s, nullptr, opt, &diag);
    CHECK_FALSE(diag.converged);
    CHECK(diag.sweeps == 1);
}

TEST_CASE("warm-started duals converge fast and to the same point") {
    const CoarseStructure s = CoarseStructure::make({{0, 1, 2}, {1, 3}, {2, 3, 4}}, 5);
    Eigen::VectorXd eta(5);
    eta << 1.2, -0.4, 2.5, 0.9, -1.8;

    Eigen::MatrixXd dual;
    ProxDiagnostics cold;
    const Eigen::VectorXd first = prox_multires_overlapping(eta, 0.6, s, &dual, {}, &cold);
    CHECK(cold.converged);

    ProxDiagnostics warm;
    const Eigen::VectorXd second = prox_multires_overlapping(eta, 0.6, s, &dual, {}, &warm);
    CHECK(warm.converged);
    CHECK(warm.sweeps <= 2);
    CHECK((first - second).cwiseAbs().maxCoeff() < 1e-10);

    // An oversized warm start (stale step size) is re-clipped, not trusted.
    Eigen::MatrixXd stale = dual * 50.0;
    const Eigen::VectorXd rescued = prox_multires_overlapping(eta, 0.6, s, &stale);
    CHECK((first - rescued).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("chained collapsed groups share one value exactly") {
    const CoarseStructure s = CoarseStructure::make({{0, 1}, {1, 2}, {2, 3}}, 4);
    Eigen::VectorXd eta(4);
    eta << 0.4, -0.2, 0.3, 0.1;
    const Eigen::VectorXd out = prox_multires_overlapping(eta, 50.0, s, nullptr);
    CHECK(out(0) == out(1));
    CHECK(out(1) == out(2));
    CHECK(out(2) == out(3));
    CHECK(out(0) == doctest::Approx(eta.mean()).epsilon(1e-12));
}

TEST_CASE("composite prox screens small rows to exact zero") {
    const CoarseStructure s = CoarseStructure::make({{0, 1}}, 3);
    Eigen::VectorXd eta(3);
    eta << 0.3, -0.4, 0.2;  // norm ~ 0.54
    Eigen::MatrixXd dual = Eigen::MatrixXd::Ones(3, 1);
    const Eigen::VectorXd out = prox_composite_row(eta, 0.6, 0.5, s, &dual);
    CHECK(out(0) == 0.0);
    CHECK(out(1) == 0.0);
    CHECK(out(2) == 0.0);
    CHECK(dual.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("composite prox with zero gamma reduces to the centering prox") {
    const CoarseStructure s = CoarseStructure::make({{0, 2}, {1, 3}}, 4);
    Eigen::VectorXd eta(4);
    eta << 1.0, -0.5, 0.8, 2.0;
    const Eigen::VectorXd centering = prox_centering(eta, 0.7, s);
    const Eigen::VectorXd composite = prox_composite_row(eta, 0.0, 0.7, s);
    CHECK((centering - composite).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("composite prox without groups is the plain group soft threshold") {
    ProxProblem prob;
    prob.eta.resize(2);
    prob.eta << 3.0, 4.0;
    prob.gamma_tilde = 0.5;
    prob.lambda_tilde = 0.0;
    prob.structure = CoarseStructure::none(2);
    const Eigen::VectorXd out = prox_composite(prob);
    CHECK(out(0) == doctest::Approx(2.7).epsilon(1e-15));
    CHECK(out(1) == doctest::Approx(3.6).epsilon(1e-15));
}

TEST_CASE("composite prox matches the frozen certified solutions") {
    const std::vector<ts::ProxCase> cases =
        ts::parse_cases(read_text_file(std::string(MULTIRES_TEST_DATA_DIR) + "/prox_oracle_cases.txt"));
    CHECK(cases.size() == 500);
    // Hard overlapping cases need far more dual sweeps than the solver
    // default, which relies on warm starts and the outer KKT gate instead.
    ProxOptions opt;
    opt.tol = 1e-12;
    opt.max_sweeps = 300000;
    double worst = 0.0;
    for (const ts::ProxCase& c : cases) {
        REQUIRE(c.has_solution);
        const Eigen::VectorXd out = prox_composite(c.problem, opt);
        worst = std::max(worst, (out - c.solution).norm());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("composite prox matches the self-certifying oracle on fresh problems") {
    ProxOptions opt;
    opt.tol = 1e-12;
    opt.max_sweeps = 300000;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const ProxProblem prob = ts::random_prox_problem(90210, trial, false);
        const Eigen::VectorXd out = prox_composite(prob, opt);
        const ts::CertifiedProx oracle =
            ts::certified_prox(prob.eta, prob.gamma_tilde, prob.lambda_tilde, prob.structure);
        CHECK(oracle.error_bound < 1e-8);
        worst = std::max(worst, (out - oracle.nu).norm() - oracle.error_bound);
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("all three prox operations are nonexpansive") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const ProxProblem prob = ts::random_prox_problem(8800, trial, false);
        Eigen::VectorXd other(prob.eta.size());
        for (Eigen::Index j = 0; j < other.size(); ++j) {
            other(j) = prob.eta(j) + 0.5 * rng.standard_normal();
        }
        const double dist = (prob.eta - other).norm();

        CHECK((soft_threshold_l1(prob.eta, prob.lambda_tilde) -
               soft_threshold_l1(other, prob.lambda_tilde))
                  .norm() <= dist + 1e-12);
        CHECK((prox_multires_overlapping(prob.eta, prob.lambda_tilde, prob.structure, nullptr) -
               prox_multires_overlapping(other, prob.lambda_tilde, prob.structure, nullptr))
                  .norm() <= dist + 1e-7);
        CHECK((prox_composite_row(prob.eta, prob.gamma_tilde, prob.lambda_tilde, prob.structure) -
               prox_composite_row(other, prob.gamma_tilde, prob.lambda_tilde, prob.structure))
                  .norm() <= dist + 1e-7);
        if (prob.structure.disjoint()) {
            CHECK((prox_multires_nonoverlapping(prob.eta, prob.lambda_tilde, prob.structure) -
                   prox_multires_nonoverlapping(other, prob.lambda_tilde, prob.structure))
                      .norm() <= dist + 1e-12);
        }
    }
}

TEST_CASE("prox problem validation rejects bad inputs") {
    ProxProblem prob;
    prob.eta.resize(2);
    prob.eta << 1.0, 2.0;
    prob.structure = CoarseStructure::none(3);  // length mismatch
    prob.gamma_tilde = 0.1;
    CHECK_THROWS_AS(prob.validate(), ValidationError);

    prob.structure = CoarseStructure::none(2);
    prob.gamma_tilde = -0.1;
    CHECK_THROWS_AS(prob.validate(), ValidationError);

    prob.gamma_tilde = 0.1;
    prob.eta(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(prob.validate(), ValidationError);
}

TEST_CASE("constancy and centered-norm helpers are exact") {
    Eigen::VectorXd v(4);
    v << 0.7, 0.7, 0.7, 1.0;
    CHECK(is_constant_on(v, {0, 1, 2}));
    CHECK_FALSE(is_constant_on(v, {2, 3}));
    CHECK(centered_norm(v, {0, 1, 2}) == 0.0);
    CHECK(centered_norm(v, {2, 3}) > 0.0);

    const CoarseStructure s = CoarseStructure::make({{0, 1, 2}}, 4);
    // gamma*||v|| plus nothing: the only group is constant
    CHECK(row_penalty(v, s, 2.0, 3.0) == doctest::Approx(2.0 * v.norm()).epsilon(1e-15));
}
