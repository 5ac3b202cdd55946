#pragma once

#include <Eigen/Dense>

#include <vector>

#include "multires/types.hpp"

namespace multires {

// Controls for the dual blockwise coordinate descent on overlapping groups.
struct ProxOptions {
    double tol = 1e-10;  // stop when the largest blockwise inf-norm change falls below this
    int max_sweeps = 500;
};

struct ProxDiagnostics {
    bool converged = true;
    int sweeps = 0;
};

// True when every indexed entry equals the first one (exact comparison).
// Collapsed groups are written as a repeated mean, so equality is exact by
// construction and no tolerance is involved.
bool is_constant_on(const Eigen::VectorXd& v, const std::vector<int>& idx);

// ||D(a) v_A||_2 with D(a) = I - 11'/a: the norm of the within-group centered
// subvector. Exactly 0 for a constant group (no rounding residue).
double centered_norm(const Eigen::VectorXd& v, const std::vector<int>& idx);

// Penalty on one coefficient row: gamma*||v||_2 + lambda*sum_l w_l*||D(a_l) v_{A_l}||_2.
double row_penalty(const Eigen::VectorXd& v, const CoarseStructure& s, double gamma,
                   double lambda);

// Componentwise sign(eta_k)*max(|eta_k| - t, 0).
Eigen::VectorXd soft_threshold_l1(const Eigen::VectorXd& eta, double t);

// 0 if ||v||_2 <= t, else (1 - t/||v||_2) v.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t);

// Closed form for pairwise-disjoint groups: per group, mean-fill when the
// centered norm is within w_l*lambda_tilde, otherwise shrink toward the mean;
// categories outside every group pass through. A group that is already
// constant is returned unchanged. Throws ValidationError on overlap.
Eigen::VectorXd prox_multires_nonoverlapping(const Eigen::VectorXd& eta, double lambda_tilde,
                                             const CoarseStructure& s);

// Blockwise coordinate descent on the dual of the centering prox. `dual`
// (K x L, column l supported on A_l) doubles as warm start and output; pass
// nullptr for a cold start. Fixed ascending sweep order. After convergence,
// categories joined by collapsed groups are re-filled with their component
// mean so within-group constancy holds exactly. Works for any structure.
Eigen::VectorXd prox_multires_overlapping(const Eigen::VectorXd& eta, double lambda_tilde,
                                          const CoarseStructure& s, Eigen::MatrixXd* dual,
                                          const ProxOptions& opt = {},
                                          ProxDiagnostics* diag = nullptr);

// Prox of lambda_tilde * sum_l w_l ||D(a_l) v_{A_l}||: dispatches to the
// closed form when the structure is disjoint, else to the dual BCD.
Eigen::VectorXd prox_centering(const Eigen::VectorXd& eta, double lambda_tilde,
                               const CoarseStructure& s, Eigen::MatrixXd* dual = nullptr,
                               const ProxOptions& opt = {}, ProxDiagnostics* diag = nullptr);

// Full composite prox: centering prox first, then the group soft threshold
// with gamma_tilde. Rows with ||eta|| <= gamma_tilde short-circuit to zero
// (the screening rule; exact because the centering prox fixes 0 and is
// nonexpansive, so it cannot increase the norm).
Eigen::VectorXd prox_composite_row(const Eigen::VectorXd& eta, double gamma_tilde,
                                   double lambda_tilde, const CoarseStructure& s,
                                   Eigen::MatrixXd* dual = nullptr, const ProxOptions& opt = {},
                                   ProxDiagnostics* diag = nullptr);

// Bundled problem form used by tests and the oracle generator.
struct ProxProblem {
    Eigen::VectorXd eta;
    double gamma_tilde = 0.0;
    double lambda_tilde = 0.0;
    CoarseStructure structure;

    void validate() const;
};

Eigen::VectorXd prox_composite(const ProxProblem& problem, const ProxOptions& opt = {},
                               ProxDiagnostics* diag = nullptr);

}  // namespace multires
