#include "multires/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "multires/errors.hpp"
#include "multires/model.hpp"
#include "multires/rng.hpp"

namespace multires {

namespace {

// Stream tags; the values are arbitrary but frozen, changing them changes
// every generated dataset.
constexpr std::uint64_t kTagBeta = 1;
constexpr std::uint64_t kTagXTrain = 2;
constexpr std::uint64_t kTagYTrain = 3;
constexpr std::uint64_t kTagXVal = 4;
constexpr std::uint64_t kTagYVal = 5;
constexpr std::uint64_t kTagXTest = 6;
constexpr std::uint64_t kTagYTest = 7;

// First `take` elements of a uniform random permutation of [0, n), sorted.
std::vector<int> sample_without_replacement(int n, int take, Rng& rng) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < take; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + take);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

CoarseStructure SimulationSpec::default_structure() {
    std::vector<std::vector<int>> groups;
    for (int l = 0; l < 4; ++l) groups.push_back({3 * l, 3 * l + 1, 3 * l + 2});
    return CoarseStructure::make(std::move(groups), 12);
}

void SimulationSpec::validate() const {
    if (model_id < 1 || model_id > 6) throw ValidationError("model_id must lie in [1, 6]");
    if (p < num_relevant) throw ValidationError("p must be at least the number of relevant rows");
    if (num_relevant < coarse_only_rows()) {
        throw ValidationError("more coarse-only rows than relevant rows");
    }
    if (n_train < 1 || n_val < 1 || n_test < 1) throw ValidationError("split sizes must be positive");
    if (num_categories < 2) throw ValidationError("need at least two categories");
    if (structure.num_categories != num_categories) {
        throw ValidationError("structure does not match the category count");
    }
}

CoefficientMatrix generate_coefficients(const SimulationSpec& spec) {
    spec.validate();
    const int K = spec.num_categories;
    Rng rng(spec.seed, kTagBeta);

    const std::vector<int> relevant = sample_without_replacement(spec.p, spec.num_relevant, rng);
    const std::vector<int> coarse_positions =
        sample_without_replacement(spec.num_relevant, spec.coarse_only_rows(), rng);
    std::vector<char> coarse(static_cast<std::size_t>(spec.num_relevant), 0);
    for (int pos : coarse_positions) coarse[static_cast<std::size_t>(pos)] = 1;

    const double sd = std::sqrt(5.0);
    CoefficientMatrix beta;
    beta.values = Eigen::MatrixXd::Zero(spec.p, K);
    beta.penalized_rows = CoefficientMatrix::default_penalized_rows(spec.p, false);
    const std::vector<int> uncovered = spec.structure.uncovered_categories();
    for (int r = 0; r < spec.num_relevant; ++r) {
        const int j = relevant[static_cast<std::size_t>(r)];
        if (coarse[static_cast<std::size_t>(r)]) {
            for (int l = 0; l < spec.structure.size(); ++l) {
                const double value = sd * rng.standard_normal();
                for (int k : spec.structure.groups[l]) beta.values(j, k) = value;
            }
            for (int k : uncovered) beta.values(j, k) = sd * rng.standard_normal();
        } else {
            for (int k = 0; k < K; ++k) beta.values(j, k) = sd * rng.standard_normal();
        }
    }
    return beta;
}

namespace {

Eigen::MatrixXd ar1_cholesky(int p) {
    Eigen::MatrixXd sigma(p, p);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) sigma(j, k) = std::pow(0.7, std::abs(j - k));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("covariance factorization failed");
    return llt.matrixL();
}

DesignMatrix draw_predictors(int n, int p, const Eigen::MatrixXd& chol, std::uint64_t seed,
                             std::uint64_t tag) {
    Rng rng(seed, tag);
    DesignMatrix x;
    x.has_intercept_column = false;
    x.values.resize(n, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z(j) = rng.standard_normal();
        x.values.row(i) = (chol * z).transpose();
    }
    return x;
}

ResponseCounts draw_responses(const DesignMatrix& x, const CoefficientMatrix& beta,
                              std::uint64_t seed, std::uint64_t tag) {
    const ProbabilityMatrix probs = compute_probabilities(x, beta);
    const Eigen::Index n = x.n();
    const Eigen::Index K = probs.num_categories();
    Rng rng(seed, tag);
    ResponseCounts y;
    y.counts = Eigen::MatrixXi::Zero(n, K);
    y.trials = Eigen::VectorXi::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        double cum = 0.0;
        Eigen::Index pick = K - 1;  // guards against cum falling short of 1 by rounding
        for (Eigen::Index k = 0; k < K; ++k) {
            cum += probs.values(i, k);
            if (u < cum) {
                pick = k;
                break;
            }
        }
        y.counts(i, pick) = 1;
    }
    return y;
}

}  // namespace

SimulatedDataset generate_dataset(const SimulationSpec& spec) {
    spec.validate();
    SimulatedDataset data;
    data.beta_star = generate_coefficients(spec);

    const Eigen::MatrixXd chol = ar1_cholesky(spec.p);
    data.x_train = draw_predictors(spec.n_train, spec.p, chol, spec.seed, kTagXTrain);
    data.x_val = draw_predictors(spec.n_val, spec.p, chol, spec.seed, kTagXVal);
    data.x_test = draw_predictors(spec.n_test, spec.p, chol, spec.seed, kTagXTest);

    data.y_train = draw_responses(data.x_train, data.beta_star, spec.seed, kTagYTrain);
    data.y_val = draw_responses(data.x_val, data.beta_star, spec.seed, kTagYVal);
    data.y_test = draw_responses(data.x_test, data.beta_star, spec.seed, kTagYTest);

    data.pi_true_test = compute_probabilities(data.x_test, data.beta_star);
    return data;
}

}  // namespace multires
