#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace multires {

// n x p predictor matrix. When has_intercept_column is set, column 0 must be
// identically one and stays unpenalized downstream.
struct DesignMatrix {
    Eigen::MatrixXd values;
    bool has_intercept_column = false;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index p() const { return values.cols(); }

    // Throws ValidationError on non-finite entries, empty dimensions, or an
    // intercept column that is not identically one.
    void validate() const;

    // Prepends a column of ones to a raw predictor matrix.
    static DesignMatrix with_intercept(const Eigen::MatrixXd& raw);
    static DesignMatrix without_intercept(const Eigen::MatrixXd& raw);
};

// n x K nonnegative count matrix with per-row trial totals.
struct ResponseCounts {
    Eigen::MatrixXi counts;
    Eigen::VectorXi trials;

    Eigen::Index n() const { return counts.rows(); }
    Eigen::Index num_categories() const { return counts.cols(); }

    void validate() const;

    // Builds single-trial counts from 0-based class labels.
    static ResponseCounts from_labels(const std::vector<int>& labels, int num_categories);
    // Computes trials as row sums.
    static ResponseCounts from_counts(const Eigen::MatrixXi& counts);
};

// p x K coefficient matrix plus the set of penalized row indices (0-based).
struct CoefficientMatrix {
    Eigen::MatrixXd values;
    std::vector<int> penalized_rows;

    Eigen::Index p() const { return values.rows(); }
    Eigen::Index num_categories() const { return values.cols(); }

    void validate() const;

    // All-zero matrix with the default penalization: every row except row 0
    // when an intercept column is present, every row otherwise.
    static CoefficientMatrix zero(Eigen::Index p, Eigen::Index num_categories,
                                  bool has_intercept);
    static std::vector<int> default_penalized_rows(Eigen::Index p, bool has_intercept);
};

// n x K matrix of category probabilities; rows sum to one.
struct ProbabilityMatrix {
    Eigen::MatrixXd values;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index num_categories() const { return values.cols(); }

    void validate() const;
};

// Coarse response categories: L subsets of the K fine categories, each of
// size >= 2, possibly overlapping, with positive weights (default all one).
struct CoarseStructure {
    std::vector<std::vector<int>> groups;  // 0-based, each sorted ascending
    Eigen::VectorXd weights;
    int num_categories = 0;

    int size() const { return static_cast<int>(groups.size()); }
    int group_size(int l) const { return static_cast<int>(groups[l].size()); }
    bool empty() const { return groups.empty(); }
    bool disjoint() const { return disjoint_; }

    // Sorted union of all group members.
    const std::vector<int>& covered_categories() const { return covered_; }
    // Categories belonging to no group, sorted.
    std::vector<int> uncovered_categories() const;

    // Structure restricted to a subset of groups (weights carried over).
    CoarseStructure subset(const std::vector<int>& group_indices) const;

    static CoarseStructure make(std::vector<std::vector<int>> groups, int num_categories);
    static CoarseStructure make(std::vector<std::vector<int>> groups, int num_categories,
                                Eigen::VectorXd weights);
    // The empty structure: no groups, penalty term vanishes.
    static CoarseStructure none(int num_categories);

private:
    bool disjoint_ = true;
    std::vector<int> covered_;
};

void check_dimensions_match(const DesignMatrix& x, const ResponseCounts& y,
                            const CoefficientMatrix& beta);

// Row subsets (fold splits, conditional-model training sets).
DesignMatrix select_rows(const DesignMatrix& x, const std::vector<int>& rows);
ResponseCounts select_rows(const ResponseCounts& y, const std::vector<int>& rows);

}  // namespace multires
