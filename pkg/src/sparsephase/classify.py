"""Sorting collision-free output configurations of the sparse design.

``xi``  – one port from every O set: these carry the n-photon phase.
``zeta`` – some photon cannot reach any detected port: rate is exactly zero.
``chi``  – the rest. ``chi_subsets[pair]`` holds configurations that fill both
ports of one O set, one port of all but one of the other sets, and so depend
on a single pairwise overlap. Anything else lands in ``chi_rest``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import ValidationError


def _pairs(rho, n: int) -> list:
    s = rho.images if hasattr(rho, "images") else tuple(rho)
    if len(s) != n:
        raise ValidationError(f"cycle ordering {s} does not have {n} photons")
    return [(s[i], s[(i + 1) % n]) for i in range(n)]


def _ordered_sets(o_sets: dict, rho, n: int) -> list:
    """O sets in cycle order ``O_{ρ(1),ρ(2)}, …, O_{ρ(n),ρ(1)}``."""
    out = []
    for a, b in _pairs(rho, n):
        key = (min(a, b), max(a, b))
        if key not in o_sets:
            raise ValidationError(f"no O set for photon pair {key}")
        out.append(tuple(sorted(o_sets[key])))
    if len(o_sets) != n:
        raise ValidationError(f"expected {n} O sets, got {len(o_sets)}")
    flat = [p for s in out for p in s]
    if len(flat) != len(set(flat)) or any(len(s) == 0 for s in out):
        raise ValidationError("O sets must be nonempty and pairwise disjoint")
    return out


def parity(eta) -> int:
    """``(-1)^{Σ η_i}``: +1 for even, -1 for odd."""
    return -1 if sum(eta) % 2 else 1


def xi_set(o_sets: dict, rho, n: int) -> frozenset:
    sets = _ordered_sets(o_sets, rho, n)
    return frozenset(tuple(sorted(c)) for c in itertools.product(*sets))


def zeta_set(o_sets: dict, rho, n: int, m: int | None = None) -> frozenset:
    sets = _ordered_sets(o_sets, rho, n)
    m = 2 * n if m is None else m
    reach = [frozenset(sets[i]) | frozenset(sets[i - 1]) for i in range(n)]
    out = set()
    for eta in itertools.combinations(range(1, m + 1), n):
        e = set(eta)
        if any(not (r & e) for r in reach):
            out.add(eta)
    return frozenset(out)


def chi_subsets(o_sets: dict, rho, n: int) -> dict:
    sets = _ordered_sets(o_sets, rho, n)
    pairs = _pairs(rho, n)
    out = {}
    for i, pair in enumerate(pairs):
        members = set()
        others = [j for j in range(n) if j != i]
        for both in itertools.combinations(sets[i], 2):
            for skip in others:
                rest = [sets[j] for j in others if j != skip]
                for pick in itertools.product(*rest):
                    members.add(tuple(sorted(both + pick)))
        out[pair] = frozenset(members)
    return out


@dataclass(frozen=True)
class ConfigClassification:
    n: int
    m: int
    pairs: tuple
    xi: frozenset
    zeta: frozenset
    chi_subsets: dict
    chi_rest: frozenset

    def xi_by_parity(self, sign: int) -> list:
        return sorted(e for e in self.xi if parity(e) == sign)

    def partition_audit(self) -> dict:
        groups = [self.xi, self.zeta, *self.chi_subsets.values(), self.chi_rest]
        total = sum(len(g) for g in groups)
        union = frozenset().union(*groups)
        expected = math.comb(self.m, self.n)
        return {
            "expected": expected,
            "total": total,
            "disjoint": total == len(union),
            "complete": len(union) == expected,
            "ok": total == len(union) == expected,
        }

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "xi": [list(e) for e in sorted(self.xi)],
            "zeta": [list(e) for e in sorted(self.zeta)],
            "chi": {f"{a}-{b}": [list(e) for e in sorted(s)] for (a, b), s in self.chi_subsets.items()},
            "chi_rest": [list(e) for e in sorted(self.chi_rest)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConfigClassification":
        chi = {}
        for key, members in obj["chi"].items():
            a, b = (int(x) for x in key.split("-"))
            chi[(a, b)] = frozenset(tuple(e) for e in members)
        return cls(
            n=int(obj["n"]), m=int(obj["m"]), pairs=tuple(chi),
            xi=frozenset(tuple(e) for e in obj["xi"]),
            zeta=frozenset(tuple(e) for e in obj["zeta"]),
            chi_subsets=chi,
            chi_rest=frozenset(tuple(e) for e in obj["chi_rest"]),
        )


def classify(o_sets: dict, rho, n: int, m: int | None = None) -> ConfigClassification:
    """Full partition of the C(m, n) collision-free configurations (m defaults to 2n)."""
    m = 2 * n if m is None else m
    xi = xi_set(o_sets, rho, n)
    zeta = zeta_set(o_sets, rho, n, m)
    chi = chi_subsets(o_sets, rho, n)
    taken = set(xi) | set(zeta)
    for members in chi.values():
        taken |= members
    rest = frozenset(e for e in itertools.combinations(range(1, m + 1), n) if e not in taken)
    return ConfigClassification(n, m, tuple(_pairs(rho, n)), xi, zeta, chi, rest)


def classify_design(design) -> ConfigClassification:
    return classify(design.o_sets, design.rho, design.n)
