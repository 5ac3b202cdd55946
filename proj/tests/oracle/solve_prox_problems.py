#!/usr/bin/env python3
"""Solve generated prox cases and freeze certified solutions.

Each case asks for the minimizer of

    0.5*||nu - eta||^2 + gamma*||nu||_2 + lambda * sum_l w_l * ||nu_{A_l} - mean(nu_{A_l})||_2.

cvxpy provides an independent primal solution. The certificate is a feasible
point of the Fenchel dual

    max  0.5*||eta||^2 - 0.5*||eta - z||^2
    s.t. z = u + sum_l c_l,  ||u|| <= gamma,
         c_l supported on A_l, centered, ||c_l|| <= lambda*w_l,

refined by exact blockwise ascent (each block update is a centering followed
by a norm clip, both exact in floating point). Strong convexity of the primal
gives ||nu - nu*|| <= sqrt(2*(F(nu) - d(z))) for any feasible z, so the frozen
solution carries a rigorous accuracy bound no matter how it was produced.

Usage: solve_prox_problems.py <cases-in> <cases-out>
"""

import sys

import numpy as np
import cvxpy as cp

LD = np.longdouble


def parse_cases(path):
    tokens = open(path).read().split()
    pos = 0

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def expect(word):
        got = take()
        if got != word:
            raise ValueError(f"expected {word!r}, got {got!r}")

    expect("prox-cases")
    expect("v1")
    expect("ncases")
    ncases = int(take())
    cases = []
    for _ in range(ncases):
        expect("case")
        take()
        expect("k")
        k = int(take())
        expect("gamma")
        gamma = float(take())
        expect("lambda")
        lam = float(take())
        expect("eta")
        eta = np.array([float(take()) for _ in range(k)])
        groups, weights = [], []
        word = take()
        while word == "group":
            weights.append(float(take()))
            members = []
            while tokens[pos][0].isdigit():
                members.append(int(take()))
            groups.append(np.array(members, dtype=int))
            word = take()
        if word == "solution":
            for _ in range(k):
                take()
            word = take()
        if word != "end":
            raise ValueError(f"expected end, got {word!r}")
        cases.append((eta, gamma, lam, groups, np.array(weights)))
    return cases


def fmt(v):
    return "%.17g" % v


def format_cases(cases, solutions):
    out = ["prox-cases v1", f"ncases {len(cases)}"]
    for i, ((eta, gamma, lam, groups, weights), nu) in enumerate(zip(cases, solutions)):
        out.append(f"case {i}")
        out.append(f"k {len(eta)}")
        out.append(f"gamma {fmt(gamma)}")
        out.append(f"lambda {fmt(lam)}")
        out.append("eta " + " ".join(fmt(v) for v in eta))
        for members, w in zip(groups, weights):
            out.append(f"group {fmt(w)} " + " ".join(str(m) for m in members))
        out.append("solution " + " ".join(fmt(v) for v in nu))
        out.append("end")
    return "\n".join(out) + "\n"


def primal_value(nu, eta, gamma, lam, groups, weights):
    nu = nu.astype(LD)
    val = LD(0.5) * np.sum((nu - eta.astype(LD)) ** 2)
    val += LD(gamma) * np.sqrt(np.sum(nu**2))
    for members, w in zip(groups, weights):
        sub = nu[members]
        sub = sub - np.mean(sub)
        val += LD(lam) * LD(w) * np.sqrt(np.sum(sub**2))
    return val


def clip_to_ball(v, radius):
    norm = np.sqrt(np.sum(v**2))
    if norm <= radius or norm == 0.0:
        return v.copy()
    return v * (LD(radius) / norm)


def certify(eta, gamma, lam, groups, weights, nu_start, sweeps):
    """Blockwise dual ascent from zero; returns (best primal point, error bound)."""
    k = len(eta)
    etal = eta.astype(LD)
    u = np.zeros(k, dtype=LD)
    cs = [np.zeros(len(m), dtype=LD) for m in groups]
    radii = [LD(lam) * LD(w) for w in weights]

    best_nu = nu_start.copy()
    best_f = primal_value(best_nu, eta, gamma, lam, groups, weights)
    half_eta2 = LD(0.5) * np.sum(etal**2)

    resid = etal - u
    for members, c in zip(groups, cs):
        resid[members] -= c

    gap = np.inf
    for sweep in range(sweeps):
        rho = resid + u
        u_new = clip_to_ball(rho, LD(gamma))
        resid += u - u_new
        u = u_new
        for idx, members in enumerate(groups):
            rho = resid[members] + cs[idx]
            rho = rho - np.mean(rho)
            c_new = clip_to_ball(rho, radii[idx])
            resid[members] += cs[idx] - c_new
            cs[idx] = c_new

        # resid = eta - z for the current feasible z, and eta - z is the
        # primal candidate the dual point suggests
        dual = half_eta2 - LD(0.5) * np.sum((resid) ** 2)
        cand = np.asarray(resid, dtype=np.float64)
        f_cand = primal_value(cand, eta, gamma, lam, groups, weights)
        if f_cand < best_f:
            best_f = f_cand
            best_nu = cand
        gap = best_f - dual
        if gap <= LD(1e-32) or (sweep > 50 and gap <= LD(1e-18)):
            break
    return best_nu, float(np.sqrt(2.0 * max(gap, LD(0.0))))


def solve_case(eta, gamma, lam, groups, weights):
    k = len(eta)
    nu = cp.Variable(k)
    obj = 0.5 * cp.sum_squares(nu - eta) + gamma * cp.norm(nu, 2)
    for members, w in zip(groups, weights):
        obj += lam * w * cp.norm(nu[members.tolist()] - cp.sum(nu[members.tolist()]) / len(members))
    cp.Problem(cp.Minimize(obj)).solve(solver=cp.CLARABEL)
    nu_hat = np.asarray(nu.value, dtype=np.float64).reshape(-1)

    for sweeps in (2000, 50000):
        best_nu, bound = certify(eta, gamma, lam, groups, weights, nu_hat, sweeps)
        if bound <= 2e-8:
            return best_nu, bound
        nu_hat = best_nu
    return best_nu, bound


def main():
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    cases = parse_cases(sys.argv[1])
    solutions = []
    worst = 0.0
    failures = 0
    for i, case in enumerate(cases):
        nu, bound = solve_case(*case)
        solutions.append(nu)
        worst = max(worst, bound)
        if bound > 1e-7:
            failures += 1
            print(f"case {i}: certified bound {bound:g} too loose")
    print(f"{len(cases)} cases, worst certified ||nu - nu*|| bound: {worst:g}")
    if failures:
        print(f"{failures} cases failed certification; not writing output")
        return 1
    open(sys.argv[2], "w").write(format_cases(cases, solutions))
    print(f"wrote {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
