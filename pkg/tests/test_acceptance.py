"""Acceptance criteria, one test each.

Every test prints a single ``criterion k: PASS|FAIL`` line (shown even
without ``-s``) with its runtime, then asserts the same verdict.
"""
import itertools
import math
import time

import numpy as np
import pytest

from sparsephase.appendix import (carlen_bound, conjecture_statistic, conjecture_sweep, cycle_bound,
                                  fourier_matrix, naive_permanent)
from sparsephase.classify import classify_design, parity
from sparsephase.design import build_sparse_unitary, pattern_unitarity_defect, random_band_matrix
from sparsephase.engine import (all_rates, coincidence_rate, collision_free_configs, interference_weights,
                                sample_counts, unitarity_defect)
from sparsephase.estimate import estimate, genuine_check, marginal_flatness, phase_sign, rates_from_counts
from sparsephase.graphs import enhanced_graph_of, pure_cycle_check
from sparsephase.photons import (GramMatrix, InternalState, Permutation, collective_phase_of_cycle,
                                 cycle_gram, gram_from_states, overlap_r, random_gram)

REFERENCE_8 = np.array([
    [1, -1, -1, 1, 0, 0, 0, 0],
    [1, -1, 1, -1, 0, 0, 0, 0],
    [1, 1, 0, 0, -1, 1, 0, 0],
    [1, 1, 0, 0, 1, -1, 0, 0],
    [0, 0, 1, 1, 0, 0, -1, 1],
    [0, 0, 1, 1, 0, 0, 1, -1],
    [0, 0, 0, 0, 1, 1, -1, -1],
    [0, 0, 0, 0, 1, 1, 1, 1],
]) / 2


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(k, checks, limit):
        elapsed = time.perf_counter() - start
        checks = dict(checks)
        checks[f"runtime < {limit:g} s"] = elapsed < limit
        failed = [name for name, ok in checks.items() if not ok]
        verdict = "FAIL" if failed else "PASS"
        detail = f" [failed: {'; '.join(failed)}]" if failed else ""
        with capsys.disabled():
            print(f"\ncriterion {k}: {verdict} ({elapsed:.2f} s){detail}")
        assert not failed, failed

    return emit


def test_criterion_01_tritter_coefficients(report, rng):
    F = fourier_matrix(3)
    perms = [Permutation(p) for p in itertools.permutations((1, 2, 3))]
    probes = [random_gram(3, rng) for _ in range(24)]
    A = np.array([[overlap_r(G, s) for s in perms] for G in probes])
    c = np.array([coincidence_rate(F, G, (1, 2, 3), (1, 2, 3)) for G in probes])
    w, *_ = np.linalg.lstsq(A, c, rcond=None)
    coeff = dict(zip(perms, w))

    def expected(s):
        moved = sum(1 for cyc in s.cycles if len(cyc) > 1)
        return -1 / 9 if moved and not s.is_full_cycle() else 2 / 9

    err = max(abs(z - expected(s)) for s, z in coeff.items())
    kinds = sorted(round(expected(s) * 9) for s in perms)
    report(1, {"coefficients within 1e-12": err <= 1e-12,
               "one identity, three transpositions, two 3-cycles": kinds == [-1, -1, -1, 2, 2, 2]}, 1)


def test_criterion_02_hom_dip(report):
    BS = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    same = coincidence_rate(BS, GramMatrix.ones(2), (1, 2), (1, 2))
    diff = coincidence_rate(BS, GramMatrix.identity(2), (1, 2), (1, 2))
    report(2, {"identical photons give 0 within 1e-14": abs(same) <= 1e-14,
               "distinguishable photons give 1/2": abs(diff - 0.5) <= 1e-14}, 1)


def _pair_states(rng, a, b):
    """Photons 1,2 with |<1|2>|^2 = a and photons 3,4 with |<3|4>|^2 = b."""
    def pair(x):
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        u /= np.linalg.norm(u)
        w = rng.normal(size=4) + 1j * rng.normal(size=4)
        w -= np.vdot(u, w) * u
        w /= np.linalg.norm(w)
        return u, math.sqrt(x) * u + math.sqrt(1 - x) * w

    (s1, s2), (s3, s4) = pair(a), pair(b)
    return [InternalState(s) for s in (s1, s2, s3, s4)]


def test_criterion_03_four_photon_closed_forms(report, rng):
    d = build_sparse_unitary(4)
    c = classify_design(d)
    base = 1 / 2 ** 7
    s = phase_sign(4)
    closed_err = chi_err = xi_err = 0.0
    for _ in range(100):
        a, b = rng.uniform(size=2)
        G = gram_from_states(_pair_states(rng, a, b))
        rate = coincidence_rate(d.U, G, d.v, (1, 2, 7, 8))
        closed_err = max(closed_err, abs(rate - base * (2 - a - b + a * b)))

        G = random_gram(4, rng)
        rates = all_rates(d.U, G, d.v).rates
        for (i, j), members in c.chi_subsets.items():
            r = abs(G[i - 1, j - 1]) ** 2
            chi_err = max(chi_err, max(abs(rates[e] - base * (1 - r)) for e in members))
        amp = abs(overlap_r(G, Permutation.from_cycles(4, [d.sigma])))
        psi = collective_phase_of_cycle(G, d.sigma)
        for eta in c.xi:
            want = base * (1 + s * parity(eta) * amp * math.cos(psi))
            xi_err = max(xi_err, abs(rates[eta] - want))
    report(3, {f"(1,2,7,8) = (2-a-b+ab)/2^7 within 1e-12 (max err {closed_err:.2e})": closed_err <= 1e-12,
               f"chi rates (1-r)/2^7 within 1e-12 (max err {chi_err:.2e})": chi_err <= 1e-12,
               f"xi rates (1 +/- |r|cos psi)/2^7 within 1e-12 (max err {xi_err:.2e})": xi_err <= 1e-12}, 10)


def _weight_support(U, v, eta):
    return {p for p, z in interference_weights(U, v, eta).items() if abs(z) > 1e-12}


def test_criterion_04_set_cardinalities(report, rng):
    checks = {}
    for n in range(3, 7):
        d = build_sparse_unitary(n)
        c = classify_design(d)
        # brute force: a configuration carries pair (i, j) alone when its only
        # nonzero interference weights are the identity and the transposition
        brute = {}
        for eta in collision_free_configs(2 * n, n):
            support = _weight_support(d.U, d.v, eta)
            ident = Permutation.identity(n)
            if ident in support and len(support) == 2:
                (t,) = support - {ident}
                pair = tuple(sorted(cyc for cyc in t.cycles if len(cyc) == 2)[0])
                brute.setdefault(pair, set()).add(eta)
        want = (n - 1) * 2 ** (n - 2)
        listed = {tuple(sorted(p)): m for p, m in c.chi_subsets.items()}
        checks[f"n={n} |chi_pair| = {want}"] = (
            len(listed) == n and all(len(m) == want for m in brute.values())
            and {p: frozenset(m) for p, m in brute.items()} == listed)
        G = random_gram(n, rng)
        rates = all_rates(d.U, G, d.v).rates
        checks[f"n={n} zeta rates <= 1e-12"] = max((rates[e] for e in c.zeta), default=0.0) <= 1e-12
        if n == 4:
            checks["|chi_12| = 12"] = len(c.chi_subsets[(1, 2)]) == 12
            checks["|xi| = 16"] = len(c.xi) == 16
    report(4, checks, 30)


def test_criterion_05_exact_round_trip(report, rng):
    r_err = psi_err = 0.0
    for n in (3, 4, 5):
        d = build_sparse_unitary(n)
        c = classify_design(d)
        for _ in range(100):
            G = random_gram(n, rng)
            rep = estimate(all_rates(d.U, G, d.v), c)
            r_err = max(r_err, max(abs(r - abs(G[i - 1, j - 1]) ** 2) for (i, j), r in rep.pairwise.items()))
            psi_err = max(psi_err, abs(rep.phase - abs(collective_phase_of_cycle(G, d.sigma))))
    report(5, {f"pairwise r within 1e-10 (max err {r_err:.2e})": r_err <= 1e-10,
               f"|psi| within 1e-8 (max err {psi_err:.2e})": psi_err <= 1e-8}, 120)


def test_criterion_06_sampled_round_trip(report):
    rng = np.random.default_rng(7)
    common = rng.normal(size=4) + 1j * rng.normal(size=4)
    states = [InternalState.normalized(common + 0.9 * (rng.normal(size=4) + 1j * rng.normal(size=4)))
              for _ in range(4)]
    G = gram_from_states(states)
    d = build_sparse_unitary(4)
    c = classify_design(d)
    exact = all_rates(d.U, G, d.v)
    truth = abs(collective_phase_of_cycle(G, d.sigma))
    hits = 0
    for seed in range(100):
        rep = estimate(rates_from_counts(sample_counts(exact, 10 ** 7, seed)), c)
        hits += abs(rep.phase - truth) <= 4 * rep.stderr["phase"]
    report(6, {f">= 95 of 100 within 4 standard errors (got {hits})": hits >= 95}, 300)


def test_criterion_07_genuine_interference(report):
    d = build_sparse_unitary(4)
    c = classify_design(d)
    reports = [genuine_check(all_rates(d.U, cycle_gram(d.sigma, 0.4, k * math.pi / 4), d.v), c)
               for k in range(8)]
    pair_err = max(abs(m - 1 / 2 ** 6) for g in reports for m in g.pair_marginals.values())
    flat = marginal_flatness(reports)
    report(7, {f"trace-out marginal = 1/2^6 (max err {pair_err:.2e})": pair_err <= 1e-12,
               f"flat under the psi sweep (spread {flat:.2e})": flat <= 1e-12}, 10)


def test_criterion_08_designer(report):
    rng = np.random.default_rng(8)
    defects = {n: unitarity_defect(build_sparse_unitary(n).U.entries)[0] for n in range(3, 17)}
    cycles = {n: pure_cycle_check(enhanced_graph_of(d.U, d.v)).cycle == d.sigma
              for n, d in ((n, build_sparse_unitary(n)) for n in range(3, 11))}
    band_min = min(pattern_unitarity_defect(random_band_matrix(n, rng))
                   for n in range(3, 9) for _ in range(1000))
    report(8, {"n=4 equals the reference matrix": np.array_equal(build_sparse_unitary(4).U.entries, REFERENCE_8),
               f"unitarity defect <= 1e-12 for n=3..16 (max {max(defects.values()):.1e})":
                   max(defects.values()) <= 1e-12,
               "enhanced graph is the canonical cycle for n=3..10": all(cycles.values()),
               f"band matrices never unitary (min defect {band_min:.2e})": band_min > 1e-6}, 60)


def test_criterion_09_appendix(report):
    rng = np.random.default_rng(9)
    listed = {3: 2 / 9, 4: 0.09375, 5: 0.0384, 6: math.factorial(6) / 6 ** 6}
    fourier_err = max(max(abs(conjecture_statistic(fourier_matrix(n), tuple(range(1, n + 1))) - cycle_bound(n)),
                          abs(cycle_bound(n) - v)) for n, v in listed.items())
    dominated = 0
    for k in range(10 ** 4):
        n = 1 + k % 6
        V = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        dominated += abs(naive_permanent(V)) <= carlen_bound(V) * (1 + 1e-12)
    violations = sum(len(conjecture_sweep(n, 1000, seed=n).violations) for n in (3, 4, 5))
    report(9, {f"Fourier statistic = n!/n^n within 1e-12 (max err {fourier_err:.1e})": fourier_err <= 1e-12,
               f"Carlen bound dominates on 10^4 matrices ({dominated})": dominated == 10 ** 4,
               f"no Haar sweep violations ({violations})": violations == 0}, 300)


def test_criterion_10_scaling(report):
    rng = np.random.default_rng(10)
    d = build_sparse_unitary(8)
    c = classify_design(d)
    G = random_gram(8, rng)
    rates = all_rates(d.U, G, d.v)
    total = math.fsum(rates.rates.values()) + rates.discard_mass
    rep = estimate(rates, c)
    report(10, {"12870 configurations": len(rates.rates) == 12870,
                f"normalization within 1e-9 (|1 - total| = {abs(1 - total):.1e})": abs(1 - total) <= 1e-9,
                "pipeline produced an estimate": math.isfinite(rep.amplitude)}, 600)
