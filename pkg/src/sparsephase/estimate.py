"""Recovering pairwise overlaps and the n-photon collective phase from rates.

Works on exact rates (a :class:`CoincidenceReport` from the engine) or on
sampled counts turned into rates by :func:`rates_from_counts`. For sampled
input every estimate carries a delta-method standard error computed from
the multinomial covariance of the rate estimates.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import ConfigClassification, parity
from .engine import CoincidenceReport, CountsReport, interference_weights
from .errors import NumericalConsistencyError, ValidationError

EXACT_TOL = 1e-10
ARCCOS_TOL = 1e-8
AMPLITUDE_THRESHOLD = 1e-6
SIGMA_MULT = 3.0


class PhaseUnrecoverableError(NumericalConsistencyError):
    """The n-photon overlap amplitude is too small to divide by."""


def _pair_key(pair) -> str:
    return f"{pair[0]}-{pair[1]}"


def _rate_map(rates) -> dict:
    return rates.rates if isinstance(rates, CoincidenceReport) else dict(rates)


def _lookup(rmap: dict, eta) -> float:
    try:
        return rmap[eta]
    except KeyError:
        raise ValidationError(f"rate for configuration {eta} is missing") from None


def rates_from_counts(counts: CountsReport) -> CoincidenceReport:
    """Empirical rates ``count / shots`` with binomial standard errors.

    The discard bucket is part of the denominator, so rates stay absolute.
    """
    N = int(counts.shots)
    if N < 1:
        raise ValidationError(f"total shots must be >= 1, got {N}")
    rates, stderr = {}, {}
    for eta, k in counts.counts.items():
        p = k / N
        rates[eta] = p
        stderr[eta] = math.sqrt(p * (1 - p) / N)
    return CoincidenceReport(rates, counts.discard / N, {}, stderr, N)


def xi_signs(U, v, xi) -> dict:
    """Sign of the n-cycle interference weight for each ξ configuration.

    The rate of ``η`` in ξ is ``(1 + s_η |r_σ| cos ψ) / 2^{2n-1}``; for the
    sparse design ``s_η`` is the port parity times a design-wide sign.
    """
    out = {}
    for eta in sorted(xi):
        w = sum(z for p, z in interference_weights(U, v, eta).items() if p.is_full_cycle())
        if abs(w) < 1e-15:
            raise NumericalConsistencyError(f"configuration {eta} has no n-cycle weight")
        out[eta] = 1 if w.real > 0 else -1
    return out


@functools.lru_cache(maxsize=None)
def phase_sign(n: int) -> int:
    """Design-wide sign ``s`` in ``Σ_even ξ − Σ_odd ξ = s |r_σ| cos ψ / 2^{n-1}``."""
    from .classify import classify_design
    from .design import build_sparse_unitary

    d = build_sparse_unitary(n)
    eta = classify_design(d).xi_by_parity(+1)[0]
    return xi_signs(d.U, d.v, [eta])[eta]


def _default_signs(classification: ConfigClassification, n: int) -> dict:
    s = phase_sign(n)
    return {eta: s * parity(eta) for eta in classification.xi}


def pairwise_overlaps(rates, classification: ConfigClassification, n: int) -> dict:
    """Raw ``r = 1 − 2^{n+1}/(n−1) · Σ_{χ subset} rate`` per cycle pair (unclamped)."""
    if classification.n != n:
        raise ValidationError(f"classification is for n={classification.n}, not {n}")
    rmap = _rate_map(rates)
    scale = 2 ** (n + 1) / (n - 1)
    out = {}
    for pair, members in classification.chi_subsets.items():
        if not members:
            raise ValidationError(f"chi subset for pair {pair} is empty")
        out[pair] = 1 - scale * math.fsum(_lookup(rmap, eta) for eta in sorted(members))
    return out


def clamp_pairwise(raw: dict, tol: float | dict = EXACT_TOL) -> tuple[dict, dict]:
    """Clamp into ``[0, 1]``; returns the clamped map and the signed excess per pair.

    ``tol`` (scalar or per pair) bounds how far outside the range a raw
    value may sit before the input is declared inconsistent.
    """
    clamped, excess = {}, {}
    for pair, r in raw.items():
        t = tol[pair] if isinstance(tol, dict) else tol
        if r < -t or r > 1 + t:
            raise NumericalConsistencyError(
                f"pairwise overlap {_pair_key(pair)} = {r:.6g} outside [0, 1] beyond tolerance {t:.3g}")
        clamped[pair] = min(max(r, 0.0), 1.0)
        excess[pair] = r - clamped[pair]
    return clamped, excess


def overlap_amplitude(pairwise: dict, tol: float = EXACT_TOL) -> float:
    """``sqrt(Π r)`` with small negatives (``>= -tol``) clamped to zero."""
    prod = 1.0
    for pair, r in pairwise.items():
        if r < -tol:
            raise ValidationError(f"pairwise overlap {_pair_key(pair)} = {r:.6g} is negative")
        prod *= max(r, 0.0)
    return math.sqrt(prod)


def xi_difference(rates, classification: ConfigClassification) -> float:
    rmap = _rate_map(rates)
    even = math.fsum(_lookup(rmap, e) for e in classification.xi_by_parity(+1))
    odd = math.fsum(_lookup(rmap, e) for e in classification.xi_by_parity(-1))
    return even - odd


@dataclass(frozen=True)
class PhaseResult:
    phase: float
    argument: float  # before clamping
    excess: float
    diff: float
    amplitude: float

    @property
    def candidates(self) -> tuple:
        return (self.phase, -self.phase)


def _signed_sum(rmap: dict, signs: dict) -> float:
    return math.fsum(sg * _lookup(rmap, eta) for eta, sg in sorted(signs.items()))


def collective_phase(rates, classification: ConfigClassification, pairwise: dict, n: int,
                     threshold: float = AMPLITUDE_THRESHOLD, tol: float = ARCCOS_TOL,
                     signs: dict | None = None) -> PhaseResult:
    """``|ψ| = arccos(2^{n-1} Σ_ξ s_η rate_η / |r_σ|)``.

    ``signs`` maps each ξ configuration to ``s_η`` (see :func:`xi_signs`);
    by default the sparse design's parity rule. Only ``|ψ|`` is
    identifiable since the rates are even in ψ.
    """
    signs = _default_signs(classification, n) if signs is None else signs
    amp = overlap_amplitude(pairwise)
    if amp <= threshold:
        raise PhaseUnrecoverableError(
            f"phase unrecoverable: n-photon overlap amplitude {amp:.3g} <= {threshold:g}")
    rmap = _rate_map(rates)
    diff = xi_difference(rmap, classification)
    x = 2 ** (n - 1) * _signed_sum(rmap, signs) / amp
    clamped = min(max(x, -1.0), 1.0)
    excess = x - clamped
    if abs(excess) > tol:
        raise NumericalConsistencyError(
            f"arccos argument {x:.12g} exceeds [-1, 1] by {abs(excess):.3g} (tolerance {tol:.3g})")
    return PhaseResult(math.acos(clamped), x, excess, diff, amp)


def _argument_gradient(classification: ConfigClassification, n: int, pairwise: dict,
                       x: float, amp: float, signs: dict) -> dict:
    """Per-configuration gradient of the arccos argument."""
    c = 2 ** (n + 1) / (n - 1)
    g_x: dict = {}
    for eta, sg in signs.items():
        g_x[eta] = sg * 2 ** (n - 1) / amp
    for pair, members in classification.chi_subsets.items():
        r = pairwise[pair]
        d = x * c / (2 * r) if r > 0 else math.inf
        for eta in members:
            g_x[eta] = g_x.get(eta, 0.0) + d
    return g_x


def _multinomial_sd(grad: dict, rmap: dict, shots: int) -> float:
    """sd of ``Σ g_η p̂_η`` under a multinomial draw of ``shots``."""
    if any(not math.isfinite(g) for g in grad.values()):
        return math.inf
    etas = sorted(grad)
    g = np.array([grad[e] for e in etas])
    p = np.array([rmap.get(e, 0.0) for e in etas])
    var = (np.dot(g * g, p) - np.dot(g, p) ** 2) / shots
    return math.sqrt(max(var, 0.0))


@dataclass
class EstimateReport:
    n: int
    pairwise: dict
    pairwise_raw: dict
    amplitude: float
    phase: float
    diff: float
    diagnostics: dict = field(default_factory=dict)
    stderr: dict | None = None

    @property
    def phase_candidates(self) -> tuple:
        return (self.phase, -self.phase)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "pairwise": {_pair_key(p): r for p, r in self.pairwise.items()},
            "pairwise_raw": {_pair_key(p): r for p, r in self.pairwise_raw.items()},
            "amplitude": self.amplitude,
            "phase_abs": self.phase,
            "phase_candidates": list(self.phase_candidates),
            "diff": self.diff,
            "diagnostics": self.diagnostics,
        }
        if self.stderr is not None:
            out["stderr"] = self.stderr
        return out


def estimate(rates, classification: ConfigClassification, n: int | None = None,
             threshold: float = AMPLITUDE_THRESHOLD, signs: dict | None = None) -> EstimateReport:
    """Full estimate from exact rates or from :func:`rates_from_counts` output.

    Exact input uses fixed tolerances. Sampled input (a report with
    ``total_shots``) widens them to a few standard errors and attaches
    delta-method errors for every quantity.
    """
    n = classification.n if n is None else n
    signs = _default_signs(classification, n) if signs is None else signs
    rmap = _rate_map(rates)
    shots = rates.total_shots if isinstance(rates, CoincidenceReport) else None
    raw = pairwise_overlaps(rmap, classification, n)
    sampled = shots is not None

    r_sd, tol_r, tol_x = None, EXACT_TOL, ARCCOS_TOL
    if sampled:
        c = 2 ** (n + 1) / (n - 1)
        r_sd = {pair: _multinomial_sd({e: -c for e in members}, rmap, shots)
                for pair, members in classification.chi_subsets.items()}
        tol_r = {pair: max(EXACT_TOL, SIGMA_MULT * sd) for pair, sd in r_sd.items()}
    clamped, r_excess = clamp_pairwise(raw, tol_r)
    amp = overlap_amplitude(clamped)

    if sampled and amp > threshold:
        x = 2 ** (n - 1) * _signed_sum(rmap, signs) / amp
        g_x = _argument_gradient(classification, n, clamped, x, amp, signs)
        x_sd = _multinomial_sd(g_x, rmap, shots)
        tol_x = max(ARCCOS_TOL, SIGMA_MULT * x_sd)
    res = collective_phase(rmap, classification, clamped, n, threshold, tol_x, signs)

    diagnostics = {
        "arccos_argument": res.argument,
        "arccos_excess": res.excess,
        "pairwise_excess": {_pair_key(p): e for p, e in r_excess.items()},
        "mode": "sampled" if sampled else "exact",
    }
    stderr = None
    if sampled:
        x = res.argument
        slope = 1 / math.sqrt(1 - min(x * x, 1.0)) if abs(x) < 1 else math.inf
        amp_grad: dict = {}
        for pair, members in classification.chi_subsets.items():
            r = clamped[pair]
            d = -c * amp / (2 * r) if r > 0 else math.inf
            for eta in members:
                amp_grad[eta] = amp_grad.get(eta, 0.0) + d
        stderr = {
            "pairwise": {_pair_key(p): sd for p, sd in r_sd.items()},
            "amplitude": _multinomial_sd(amp_grad, rmap, shots),
            "diff": _multinomial_sd({e: parity(e) for e in classification.xi}, rmap, shots),
            "phase": slope * x_sd,
            "shots": shots,
        }
    return EstimateReport(n, clamped, raw, amp, res.phase, res.diff, diagnostics, stderr)


@dataclass
class GenuineReport:
    """Marginals after tracing out one detected photon from ξ configurations.

    ``pair_marginals[(rest, k)]`` sums the two configurations that complete
    ``rest`` inside the k-th O set (cycle order); ``full_marginals[rest]``
    sums every collision-free completion of ``rest``.
    """

    n: int
    expected_pair: float
    pair_marginals: dict
    full_marginals: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "expected_pair": self.expected_pair,
            "pair_marginals": [[list(r), k, v] for (r, k), v in sorted(self.pair_marginals.items())],
            "full_marginals": [[list(r), v] for r, v in sorted(self.full_marginals.items())],
            "violations": self.violations,
        }


def _ordered_o_sets(classification: ConfigClassification) -> list:
    """Recover the O sets in cycle order from the χ subsets (the doubly-filled set)."""
    sets = []
    for pair in classification.pairs:
        xi_ports = {p for e in classification.xi for p in e}
        common = None
        for eta in classification.chi_subsets[pair]:
            common = set(eta) if common is None else common & set(eta)
        sets.append(tuple(sorted(common & xi_ports)))
    return sets


def genuine_check(rates, classification: ConfigClassification, n: int | None = None,
                  tol: float = 1e-12) -> GenuineReport:
    n = classification.n if n is None else n
    rmap = _rate_map(rates)
    sets = _ordered_o_sets(classification)
    expected = 1 / 2 ** (2 * n - 2)
    pair_m, full_m, violations = {}, {}, []
    for eta in sorted(classification.xi):
        for k, o in enumerate(sets):
            rest = tuple(p for p in eta if p not in o)
            if (rest, k) in pair_m:
                continue
            total = math.fsum(_lookup(rmap, tuple(sorted(rest + (p,)))) for p in o)
            pair_m[(rest, k)] = total
            if abs(total - expected) > tol:
                violations.append({"rest": list(rest), "o_set": k, "value": total, "expected": expected})
            if rest not in full_m:
                free = [p for p in range(1, classification.m + 1) if p not in rest]
                full_m[rest] = math.fsum(rmap.get(tuple(sorted(rest + (p,))), 0.0) for p in free)
    return GenuineReport(n, expected, pair_m, full_m, violations)


def marginal_flatness(reports) -> float:
    """Largest spread of any traced-out marginal across a sweep of reports."""
    reports = list(reports)
    if not reports:
        return 0.0
    spread = 0.0
    for attr in ("pair_marginals", "full_marginals"):
        keys = set.intersection(*(set(getattr(r, attr)) for r in reports))
        for key in keys:
            vals = [getattr(r, attr)[key] for r in reports]
            spread = max(spread, max(vals) - min(vals))
    return spread
