#include "multires/types.hpp"

#include <algorithm>
#include <set>

#include "multires/errors.hpp"

namespace multires {

void DesignMatrix::validate() const {
    if (values.rows() < 1 || values.cols() < 1)
        throw ValidationError("design matrix must have at least one row and one column");
    if (!values.allFinite())
        throw ValidationError("design matrix contains non-finite entries");
    if (has_intercept_column) {
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            if (values(i, 0) != 1.0)
                throw ValidationError("intercept column must be identically one");
    }
}

DesignMatrix DesignMatrix::with_intercept(const Eigen::MatrixXd& raw) {
    DesignMatrix x;
    x.values.resize(raw.rows(), raw.cols() + 1);
    x.values.col(0).setOnes();
    x.values.rightCols(raw.cols()) = raw;
    x.has_intercept_column = true;
    return x;
}

DesignMatrix DesignMatrix::without_intercept(const Eigen::MatrixXd& raw) {
    return DesignMatrix{raw, false};
}

void ResponseCounts::validate() const {
    if (counts.cols() < 2)
        throw ValidationError("response must have at least two categories");
    if (counts.rows() < 1)
        throw ValidationError("response must have at least one row");
    if (trials.size() != counts.rows())
        throw ValidationError("trials length must equal the number of response rows");
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
        int sum = 0;
        for (Eigen::Index k = 0; k < counts.cols(); ++k) {
            if (counts(i, k) < 0)
                throw ValidationError("response counts must be nonnegative");
            sum += counts(i, k);
        }
        if (sum != trials(i))
            throw ValidationError("row sum of counts must equal the trials entry");
        if (trials(i) < 1)
            throw ValidationError("each response row needs at least one trial");
    }
}

ResponseCounts ResponseCounts::from_labels(const std::vector<int>& labels, int num_categories) {
    ResponseCounts y;
    y.counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(labels.size()), num_categories);
    y.trials = Eigen::VectorXi::Ones(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_categories)
            throw ValidationError("class label out of range");
        y.counts(static_cast<Eigen::Index>(i), labels[i]) = 1;
    }
    return y;
}

ResponseCounts ResponseCounts::from_counts(const Eigen::MatrixXi& counts) {
    ResponseCounts y;
    y.counts = counts;
    y.trials = counts.rowwise().sum();
    y.validate();
    return y;
}

void CoefficientMatrix::validate() const {
    if (!values.allFinite())
        throw ValidationError("coefficient matrix contains non-finite entries");
    for (int j : penalized_rows)
        if (j < 0 || j >= values.rows())
            throw ValidationError("penalized row index out of range");
}

CoefficientMatrix CoefficientMatrix::zero(Eigen::Index p, Eigen::Index num_categories,
                                          bool has_intercept) {
    CoefficientMatrix beta;
    beta.values = Eigen::MatrixXd::Zero(p, num_categories);
    beta.penalized_rows = default_penalized_rows(p, has_intercept);
    return beta;
}

std::vector<int> CoefficientMatrix::default_penalized_rows(Eigen::Index p, bool has_intercept) {
    std::vector<int> rows;
    for (Eigen::Index j = has_intercept ? 1 : 0; j < p; ++j)
        rows.push_back(static_cast<int>(j));
    return rows;
}

void ProbabilityMatrix::validate() const {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index k = 0; k < values.cols(); ++k) {
            const double v = values(i, k);
            if (!(v > 0.0 && v < 1.0))
                throw ValidationError("probabilities must lie strictly inside (0, 1)");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("probability rows must sum to one");
    }
}

std::vector<int> CoarseStructure::uncovered_categories() const {
    std::vector<int> out;
    std::size_t pos = 0;
    for (int k = 0; k < num_categories; ++k) {
        while (pos < covered_.size() && covered_[pos] < k) ++pos;
        if (pos >= covered_.size() || covered_[pos] != k) out.push_back(k);
    }
    return out;
}

CoarseStructure CoarseStructure::subset(const std::vector<int>& group_indices) const {
    std::vector<std::vector<int>> sub_groups;
    Eigen::VectorXd sub_weights(static_cast<Eigen::Index>(group_indices.size()));
    Eigen::Index pos = 0;
    for (int l : group_indices) {
        sub_groups.push_back(groups[static_cast<std::size_t>(l)]);
        sub_weights(pos++) = weights(l);
    }
    return make(std::move(sub_groups), num_categories, std::move(sub_weights));
}

CoarseStructure CoarseStructure::make(std::vector<std::vector<int>> groups, int num_categories) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(groups.size()));
    return make(std::move(groups), num_categories, std::move(w));
}

CoarseStructure CoarseStructure::make(std::vector<std::vector<int>> groups, int num_categories,
                                      Eigen::VectorXd weights) {
    if (num_categories < 2)
        throw ValidationError("coarse structure needs at least two fine categories");
    if (weights.size() != static_cast<Eigen::Index>(groups.size()))
        throw ValidationError("one weight per coarse category required");

    CoarseStructure s;
    s.num_categories = num_categories;
    std::set<int> covered;
    std::size_t covered_count = 0;
    for (auto& g : groups) {
        if (g.size() < 2)
            throw ValidationError("each coarse category needs at least two members");
        std::sort(g.begin(), g.end());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] < 0 || g[i] >= num_categories)
                throw ValidationError("coarse category index out of range");
            if (i > 0 && g[i] == g[i - 1])
                throw ValidationError("duplicate fine category within a coarse category");
        }
        covered_count += g.size();
        covered.insert(g.begin(), g.end());
    }
    for (Eigen::Index l = 0; l < weights.size(); ++l)
        if (!(weights(l) > 0.0))
            throw ValidationError("coarse category weights must be positive");

    s.groups = std::move(groups);
    s.weights = std::move(weights);
    s.covered_.assign(covered.begin(), covered.end());
    s.disjoint_ = covered_count == s.covered_.size();
    return s;
}

CoarseStructure CoarseStructure::none(int num_categories) {
    return make(std::vector<std::vector<int>>{}, num_categories);
}

void check_dimensions_match(const DesignMatrix& x, const ResponseCounts& y,
                            const CoefficientMatrix& beta) {
    if (x.values.rows() != y.counts.rows())
        throw ValidationError("design matrix and response have different row counts");
    if (x.values.cols() != beta.values.rows())
        throw ValidationError("design matrix column count must equal coefficient row count");
    if (y.counts.cols() != beta.values.cols())
        throw ValidationError("response and coefficient matrices have different category counts");
}

DesignMatrix select_rows(const DesignMatrix& x, const std::vector<int>& rows) {
    DesignMatrix out;
    out.has_intercept_column = x.has_intercept_column;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), x.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= x.values.rows())
            throw ValidationError("row index out of range");
        out.values.row(static_cast<Eigen::Index>(i)) = x.values.row(rows[i]);
    }
    return out;
}

ResponseCounts select_rows(const ResponseCounts& y, const std::vector<int>& rows) {
    ResponseCounts out;
    out.counts.resize(static_cast<Eigen::Index>(rows.size()), y.counts.cols());
    out.trials.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= y.counts.rows())
            throw ValidationError("row index out of range");
        out.counts.row(static_cast<Eigen::Index>(i)) = y.counts.row(rows[i]);
        out.trials(static_cast<Eigen::Index>(i)) = y.trials(rows[i]);
    }
    return out;
}

}  // namespace multires
