#pragma once

// Seeded random prox subproblems plus a line-based text form, shared by the
// case generator tool, the oracle pipeline, and the acceptance tests.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "multires/errors.hpp"
#include "multires/io.hpp"
#include "multires/prox.hpp"
#include "multires/rng.hpp"

namespace multires::testsupport {

struct ProxCase {
    ProxProblem problem;
    bool has_solution = false;
    Eigen::VectorXd solution;
};

// Case `index` of a seeded family: K in [2,8], up to 4 groups, gamma/lambda
// in [0,2] with occasional exact zeros, and a 15% chance of one group made
// exactly constant. force_disjoint additionally guarantees at least one
// group and pairwise-disjoint groups.
inline ProxProblem random_prox_problem(std::uint64_t seed, int index, bool force_disjoint) {
    Rng rng(seed, static_cast<std::uint64_t>(index) + 1);
    const int k = 2 + static_cast<int>(rng.uniform_below(7));
    const bool disjoint = force_disjoint || rng.uniform01() < 0.5;
    int target = static_cast<int>(rng.uniform_below(5));
    if (force_disjoint && target == 0) target = 1;

    std::vector<std::vector<int>> groups;
    if (disjoint) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = k - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        int pos = 0;
        while (static_cast<int>(groups.size()) < target && k - pos >= 2) {
            const int remaining = k - pos;
            const int size =
                2 + (remaining > 2
                         ? static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(remaining - 1)))
                         : 0);
            std::vector<int> g(perm.begin() + pos, perm.begin() + pos + size);
            std::sort(g.begin(), g.end());
            groups.push_back(std::move(g));
            pos += size;
        }
    } else {
        for (int l = 0; l < target; ++l) {
            const int size = 2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k - 1)));
            std::vector<int> pool(static_cast<std::size_t>(k));
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < size; ++i) {
                const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k - i)));
                std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            }
            std::vector<int> g(pool.begin(), pool.begin() + size);
            std::sort(g.begin(), g.end());
            groups.push_back(std::move(g));
        }
    }

    ProxProblem prob;
    const int num_groups = static_cast<int>(groups.size());
    if (num_groups == 0) {
        prob.structure = CoarseStructure::none(k);
    } else {
        Eigen::VectorXd weights(num_groups);
        for (int l = 0; l < num_groups; ++l) weights(l) = 0.5 + 1.5 * rng.uniform01();
        prob.structure = CoarseStructure::make(std::move(groups), k, std::move(weights));
    }
    prob.eta.resize(k);
    for (int i = 0; i < k; ++i) prob.eta(i) = 2.0 * rng.standard_normal();
    prob.gamma_tilde = rng.uniform01() < 0.1 ? 0.0 : 2.0 * rng.uniform01();
    prob.lambda_tilde = rng.uniform01() < 0.1 ? 0.0 : 2.0 * rng.uniform01();
    if (num_groups > 0 && rng.uniform01() < 0.15) {
        const std::vector<int>& g = prob.structure.groups[static_cast<std::size_t>(
            rng.uniform_below(static_cast<std::uint64_t>(num_groups)))];
        for (const int idx : g) prob.eta(idx) = prob.eta(g[0]);
    }
    prob.validate();
    return prob;
}

inline std::string format_cases(const std::vector<ProxCase>& cases) {
    std::string text = "prox-cases v1\nncases " + std::to_string(cases.size()) + "\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const ProxProblem& p = cases[i].problem;
        text += "case " + std::to_string(i) + "\n";
        text += "k " + std::to_string(p.structure.num_categories) + "\n";
        text += "gamma " + format_double(p.gamma_tilde) + "\n";
        text += "lambda " + format_double(p.lambda_tilde) + "\n";
        text += "eta";
        for (Eigen::Index j = 0; j < p.eta.size(); ++j) text += " " + format_double(p.eta(j));
        text += "\n";
        for (int l = 0; l < p.structure.size(); ++l) {
            text += "group " + format_double(p.structure.weights(l));
            for (const int idx : p.structure.groups[static_cast<std::size_t>(l)]) {
                text += " " + std::to_string(idx);
            }
            text += "\n";
        }
        if (cases[i].has_solution) {
            text += "solution";
            for (Eigen::Index j = 0; j < cases[i].solution.size(); ++j) {
                text += " " + format_double(cases[i].solution(j));
            }
            text += "\n";
        }
        text += "end\n";
    }
    return text;
}

inline std::vector<ProxCase> parse_cases(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char c : text) {
        if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
            if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
        } else {
            current += c;
        }
    }
    if (!current.empty()) tokens.push_back(current);

    std::size_t pos = 0;
    const auto next = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw ValidationError("prox cases: truncated file");
        return tokens[pos++];
    };
    const auto expect = [&](const std::string& word) {
        if (next() != word) throw ValidationError("prox cases: expected '" + word + "'");
    };

    expect("prox-cases");
    expect("v1");
    expect("ncases");
    const int ncases = static_cast<int>(parse_double(next()));

    std::vector<ProxCase> cases;
    cases.reserve(static_cast<std::size_t>(ncases));
    for (int i = 0; i < ncases; ++i) {
        expect("case");
        next();  // index, informational
        expect("k");
        const int k = static_cast<int>(parse_double(next()));
        expect("gamma");
        ProxCase c;
        c.problem.gamma_tilde = parse_double(next());
        expect("lambda");
        c.problem.lambda_tilde = parse_double(next());
        expect("eta");
        c.problem.eta.resize(k);
        for (int j = 0; j < k; ++j) c.problem.eta(j) = parse_double(next());

        std::vector<std::vector<int>> groups;
        std::vector<double> weights;
        std::string word = next();
        while (word == "group") {
            weights.push_back(parse_double(next()));
            std::vector<int> members;
            // members run until the next keyword; they are small nonnegative
            // integers, keywords are alphabetic
            while (pos < tokens.size() && !tokens[pos].empty() &&
                   (std::isdigit(static_cast<unsigned char>(tokens[pos][0])) != 0)) {
                members.push_back(static_cast<int>(parse_double(next())));
            }
            groups.push_back(std::move(members));
            word = next();
        }
        if (groups.empty()) {
            c.problem.structure = CoarseStructure::none(k);
        } else {
            c.problem.structure = CoarseStructure::make(
                std::move(groups), k,
                Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                  static_cast<Eigen::Index>(weights.size())));
        }
        if (word == "solution") {
            c.has_solution = true;
            c.solution.resize(k);
            for (int j = 0; j < k; ++j) c.solution(j) = parse_double(next());
            word = next();
        }
        if (word != "end") throw ValidationError("prox cases: expected 'end'");
        c.problem.validate();
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace multires::testsupport
