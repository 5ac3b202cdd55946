#include "multires/prox.hpp"

#include <cmath>
#include <numeric>

#include "multires/errors.hpp"

namespace multires {

namespace {

// Union-find with path halving; used to chain overlapping collapsed groups.
int uf_find(std::vector<int>& parent, int k) {
    while (parent[k] != k) {
        parent[k] = parent[parent[k]];
        k = parent[k];
    }
    return k;
}

void uf_unite(std::vector<int>& parent, int a, int b) {
    a = uf_find(parent, a);
    b = uf_find(parent, b);
    if (a != b) parent[b] = a;
}

}  // namespace

bool is_constant_on(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    if (idx.empty()) return true;
    const double first = v(idx[0]);
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (v(idx[i]) != first) return false;
    }
    return true;
}

double centered_norm(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    if (is_constant_on(v, idx)) return 0.0;
    double mean = 0.0;
    for (int k : idx) mean += v(k);
    mean /= static_cast<double>(idx.size());
    double ss = 0.0;
    for (int k : idx) {
        const double d = v(k) - mean;
        ss += d * d;
    }
    return std::sqrt(ss);
}

double row_penalty(const Eigen::VectorXd& v, const CoarseStructure& s, double gamma,
                   double lambda) {
    double value = gamma * v.norm();
    if (lambda > 0.0) {
        for (int l = 0; l < s.size(); ++l) {
            value += lambda * s.weights(l) * centered_norm(v, s.groups[l]);
        }
    }
    return value;
}

Eigen::VectorXd soft_threshold_l1(const Eigen::VectorXd& eta, double t) {
    if (t < 0.0) throw ValidationError("soft threshold requires t >= 0");
    Eigen::VectorXd out(eta.size());
    for (Eigen::Index k = 0; k < eta.size(); ++k) {
        const double a = std::abs(eta(k)) - t;
        out(k) = a > 0.0 ? (eta(k) > 0.0 ? a : -a) : 0.0;
    }
    return out;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t) {
    if (t < 0.0) throw ValidationError("group soft threshold requires t >= 0");
    const double norm = v.norm();
    if (norm <= t) return Eigen::VectorXd::Zero(v.size());
    return (1.0 - t / norm) * v;
}

Eigen::VectorXd prox_multires_nonoverlapping(const Eigen::VectorXd& eta, double lambda_tilde,
                                             const CoarseStructure& s) {
    if (!s.disjoint()) throw ValidationError("closed-form prox requires disjoint groups");
    if (lambda_tilde < 0.0) throw ValidationError("lambda_tilde must be nonnegative");
    Eigen::VectorXd nu = eta;
    if (lambda_tilde == 0.0) return nu;
    for (int l = 0; l < s.size(); ++l) {
        const auto& idx = s.groups[l];
        if (is_constant_on(eta, idx)) continue;  // D eta = 0 already; keep bits intact
        double mean = 0.0;
        for (int k : idx) mean += eta(k);
        mean /= static_cast<double>(idx.size());
        double ss = 0.0;
        for (int k : idx) {
            const double d = eta(k) - mean;
            ss += d * d;
        }
        const double norm_d = std::sqrt(ss);
        const double threshold = s.weights(l) * lambda_tilde;
        if (norm_d <= threshold) {
            for (int k : idx) nu(k) = mean;  // one stored value: constancy is exact
        } else {
            const double t = threshold / norm_d;
            for (int k : idx) nu(k) = eta(k) - t * (eta(k) - mean);
        }
    }
    return nu;
}

Eigen::VectorXd prox_multires_overlapping(const Eigen::VectorXd& eta, double lambda_tilde,
                                          const CoarseStructure& s, Eigen::MatrixXd* dual,
                                          const ProxOptions& opt, ProxDiagnostics* diag) {
    if (lambda_tilde < 0.0) throw ValidationError("lambda_tilde must be nonnegative");
    const Eigen::Index K = eta.size();
    const int L = s.size();
    if (diag) {
        diag->converged = true;
        diag->sweeps = 0;
    }
    if (lambda_tilde == 0.0 || L == 0) {
        if (dual) dual->setZero(K, L);
        return eta;
    }

    Eigen::MatrixXd local;
    Eigen::MatrixXd& zeta = dual ? *dual : local;
    if (zeta.rows() != K || zeta.cols() != L) {
        zeta.setZero(K, L);
    } else {
        // A warm start from a different step size may violate the new caps.
        for (int l = 0; l < L; ++l) {
            const double cap = s.weights(l) * lambda_tilde;
            const double norm = zeta.col(l).norm();
            if (norm > cap) zeta.col(l) *= cap / norm;
        }
    }

    // rho tracks the running primal eta - sum_l zeta_{:,l}.
    Eigen::VectorXd rho = eta;
    for (int l = 0; l < L; ++l) rho -= zeta.col(l);

    std::vector<char> collapsed(static_cast<std::size_t>(L), 0);
    bool converged = false;
    int sweep = 0;
    while (sweep < opt.max_sweeps) {
        ++sweep;
        double max_change = 0.0;
        for (int l = 0; l < L; ++l) {
            const auto& idx = s.groups[l];
            const double cap = s.weights(l) * lambda_tilde;
            // eta_tilde_{A_l} = rho_{A_l} + zeta_{A_l,l} (all other blocks removed)
            double mean = 0.0;
            bool constant = true;
            double first = rho(idx[0]) + zeta(idx[0], l);
            for (int k : idx) {
                const double v = rho(k) + zeta(k, l);
                mean += v;
                if (v != first) constant = false;
            }
            mean /= static_cast<double>(idx.size());
            double scale = 1.0;
            if (constant) {
                collapsed[static_cast<std::size_t>(l)] = 1;
                mean = first;  // exact; avoids a rounding residue in the block
            } else {
                double ss = 0.0;
                for (int k : idx) {
                    const double d = rho(k) + zeta(k, l) - mean;
                    ss += d * d;
                }
                const double norm_d = std::sqrt(ss);
                collapsed[static_cast<std::size_t>(l)] = norm_d <= cap ? 1 : 0;
                if (norm_d > cap) scale = cap / norm_d;
            }
            for (int k : idx) {
                const double d = rho(k) + zeta(k, l) - mean;
                const double updated = scale * d;
                const double delta = updated - zeta(k, l);
                zeta(k, l) = updated;
                rho(k) -= delta;
                const double mag = std::abs(delta);
                if (mag > max_change) max_change = mag;
            }
        }
        if (max_change < opt.tol) {
            converged = true;
            break;
        }
    }

    // Recompute the primal once to shed incremental-update drift.
    Eigen::VectorXd nu = eta;
    for (int l = 0; l < L; ++l) nu -= zeta.col(l);

    // Chains of collapsed groups share one value in the exact solution; the
    // BCD only matches it to tolerance. Re-fill each connected component with
    // its mean so downstream equality checks are exact.
    bool any_collapsed = false;
    for (int l = 0; l < L; ++l) any_collapsed = any_collapsed || collapsed[static_cast<std::size_t>(l)];
    if (any_collapsed) {
        std::vector<int> parent(static_cast<std::size_t>(K));
        std::iota(parent.begin(), parent.end(), 0);
        std::vector<char> member(static_cast<std::size_t>(K), 0);
        for (int l = 0; l < L; ++l) {
            if (!collapsed[static_cast<std::size_t>(l)]) continue;
            const auto& idx = s.groups[l];
            for (int k : idx) {
                member[static_cast<std::size_t>(k)] = 1;
                uf_unite(parent, idx[0], k);
            }
        }
        std::vector<double> sum(static_cast<std::size_t>(K), 0.0);
        std::vector<int> count(static_cast<std::size_t>(K), 0);
        for (int k = 0; k < K; ++k) {
            if (!member[static_cast<std::size_t>(k)]) continue;
            const int r = uf_find(parent, k);
            sum[static_cast<std::size_t>(r)] += nu(k);
            ++count[static_cast<std::size_t>(r)];
        }
        for (int k = 0; k < K; ++k) {
            if (!member[static_cast<std::size_t>(k)]) continue;
            const int r = uf_find(parent, k);
            nu(k) = sum[static_cast<std::size_t>(r)] / static_cast<double>(count[static_cast<std::size_t>(r)]);
        }
    }

    if (diag) {
        diag->converged = converged;
        diag->sweeps = sweep;
    }
    return nu;
}

Eigen::VectorXd prox_centering(const Eigen::VectorXd& eta, double lambda_tilde,
                               const CoarseStructure& s, Eigen::MatrixXd* dual,
                               const ProxOptions& opt, ProxDiagnostics* diag) {
    if (s.disjoint() && !dual) {
        if (diag) {
            diag->converged = true;
            diag->sweeps = 0;
        }
        return prox_multires_nonoverlapping(eta, lambda_tilde, s);
    }
    return prox_multires_overlapping(eta, lambda_tilde, s, dual, opt, diag);
}

Eigen::VectorXd prox_composite_row(const Eigen::VectorXd& eta, double gamma_tilde,
                                   double lambda_tilde, const CoarseStructure& s,
                                   Eigen::MatrixXd* dual, const ProxOptions& opt,
                                   ProxDiagnostics* diag) {
    if (gamma_tilde < 0.0) throw ValidationError("gamma_tilde must be nonnegative");
    if (diag) {
        diag->converged = true;
        diag->sweeps = 0;
    }
    if (gamma_tilde > 0.0 && eta.norm() <= gamma_tilde) {
        // Screening: the centering prox cannot increase the norm, so the
        // group soft threshold is guaranteed to land at zero.
        if (dual) dual->setZero(eta.size(), s.size());
        return Eigen::VectorXd::Zero(eta.size());
    }
    Eigen::VectorXd nu = prox_centering(eta, lambda_tilde, s, dual, opt, diag);
    if (gamma_tilde == 0.0) return nu;
    return group_soft_threshold(nu, gamma_tilde);
}

void ProxProblem::validate() const {
    if (!eta.allFinite()) throw ValidationError("prox input must be finite");
    if (gamma_tilde < 0.0 || lambda_tilde < 0.0) {
        throw ValidationError("prox parameters must be nonnegative");
    }
    if (structure.num_categories != static_cast<int>(eta.size())) {
        throw ValidationError("prox input length does not match the structure");
    }
}

Eigen::VectorXd prox_composite(const ProxProblem& problem, const ProxOptions& opt,
                               ProxDiagnostics* diag) {
    problem.validate();
    return prox_composite_row(problem.eta, problem.gamma_tilde, problem.lambda_tilde,
                              problem.structure, nullptr, opt, diag);
}

}  // namespace multires
