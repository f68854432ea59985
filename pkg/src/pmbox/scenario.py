"""Prepare-and-measure scenarios, behaviors and linear correlation inequalities.

A scenario fixes the alphabet sizes (message ``d``, inputs ``n_x``, outputs
``n_b``). A behavior is the conditional distribution p(b|x). Inequalities are
coefficient matrices c[x][b] with a classical bound; coefficients are kept as
exact ``Fraction`` values so the polytope machinery can certify bounds.

Bob's inconclusive symbol, where a scenario has one, is always the last output
index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

Coeffs = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Scenario:
    """Alphabet sizes of a prepare-and-measure scenario without receiver input."""

    d: int
    n_x: int
    n_b: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("message alphabet must have at least two symbols")
        if self.n_x <= self.d:
            raise ValueError("nX must exceed d: otherwise the message can carry the input")
        if self.n_b < 2:
            raise ValueError("output alphabet must have at least two symbols")


@dataclass(frozen=True)
class Behavior:
    """Conditional distribution p(b|x), stored as a dense (n_x, n_b) array."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2:
            raise ValueError("behavior must be a 2-D array indexed [x][b]")
        if p.min(initial=0.0) < -1e-12:
            raise ValueError(f"negative probability {p.min():.3e}")
        rowsums = p.sum(axis=1)
        if np.max(np.abs(rowsums - 1.0)) > 1e-10:
            raise ValueError("rows of p(b|x) must be normalized")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n_x(self) -> int:
        return self.p.shape[0]

    @property
    def n_b(self) -> int:
        return self.p.shape[1]


@dataclass(frozen=True)
class Inequality:
    """Linear functional sum_{x,b} c[x][b] p(b|x) with classical bound."""

    scenario: Scenario
    coeffs: Coeffs
    bound: Fraction
    name: str = ""

    def __post_init__(self):
        rows = tuple(tuple(Fraction(c) for c in row) for row in self.coeffs)
        if len(rows) != self.scenario.n_x or any(len(r) != self.scenario.n_b for r in rows):
            raise ValueError("coefficient shape does not match the scenario")
        object.__setattr__(self, "coeffs", rows)
        object.__setattr__(self, "bound", Fraction(self.bound))


def coeff_array(ineq: Inequality) -> np.ndarray:
    """Coefficients as a float matrix, for numerical work."""
    return np.array([[float(c) for c in row] for row in ineq.coeffs])


def evaluate(ineq: Inequality, beh: Behavior) -> float:
    """Value of the inequality functional on a behavior."""
    if beh.p.shape != (ineq.scenario.n_x, ineq.scenario.n_b):
        raise ValueError("behavior shape does not match the inequality's scenario")
    return float(np.sum(coeff_array(ineq) * beh.p))


def evaluate_exact(ineq: Inequality, vertex: Sequence[Sequence[int]]) -> Fraction:
    """Exact value on an integer behavior table (used on polytope vertices)."""
    return sum(
        (c * int(v) for row_c, row_v in zip(ineq.coeffs, vertex) for c, v in zip(row_c, row_v)),
        start=Fraction(0),
    )


def facet_family(n: int) -> Inequality:
    """Guess-or-pass inequality on the (2, n, n+1) scenario.

    Bob earns (n-1) points for guessing Alice's input and 1 point for passing
    (last output), scaled by 1/(2(n-1)); the classical bound is 1. For n = 3
    this is the minimal-scenario inequality S1.
    """
    if n < 3:
        raise ValueError("the family starts at n = 3")
    scen = Scenario(2, n, n + 1)
    pref = Fraction(1, 2 * (n - 1))
    coeffs = [[Fraction(0)] * (n + 1) for _ in range(n)]
    for i in range(n):
        coeffs[i][i] = (n - 1) * pref
        coeffs[i][n] = pref
    return Inequality(scen, tuple(tuple(r) for r in coeffs), Fraction(1), f"Sn({n})")


def _from_terms(scen: Scenario, terms, pref: Fraction, bound, name: str) -> Inequality:
    coeffs = [[Fraction(0)] * scen.n_b for _ in range(scen.n_x)]
    for x, b, c in terms:
        coeffs[x][b] = pref * c
    return Inequality(scen, tuple(tuple(r) for r in coeffs), Fraction(bound), name)


# Non-trivial facets of the (2,4,5) scenario, unnormalized integer form.
# Terms are (x, b, coefficient); the quantum violations reachable with
# two-qubit entanglement are kept alongside for reporting.
_T45_ROWS = {
    1: ([(0, 1, 2), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (1, 4, 2),
         (2, 1, -1), (2, 3, -1), (2, 4, -1), (3, 1, -1), (3, 2, -1), (3, 4, -1)], 2, 2.2071),
    2: ([(0, 1, 2), (0, 2, 2), (0, 3, 1), (1, 3, 1), (1, 4, 2),
         (3, 1, -2), (3, 2, -2), (3, 3, -1), (3, 4, -2)], 2, 2.1547),
    3: ([(0, 1, 2), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (1, 4, 2),
         (3, 1, -2), (3, 2, -1), (3, 3, -1), (3, 4, -2)], 2, 2.1547),
    4: ([(0, 1, 2), (0, 2, 2), (0, 3, 1), (1, 3, 1), (1, 4, 2),
         (2, 1, -1), (2, 2, -1), (2, 4, -1),
         (3, 1, -1), (3, 2, -1), (3, 3, -1), (3, 4, -1)], 2, 2.1784),
    5: ([(0, 1, 2), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 4, 2), (2, 3, 1),
         (3, 1, -2), (3, 2, -1), (3, 3, -2), (3, 4, -2)], 2, 2.1784),
    6: ([(0, 1, 2), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (1, 4, 2),
         (2, 1, -1), (2, 4, -1),
         (3, 1, -1), (3, 2, -1), (3, 3, -1), (3, 4, -1)], 2, 2.1784),
    7: ([(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 1, 1), (1, 2, 1), (1, 4, 1),
         (2, 3, 1), (2, 4, 1),
         (3, 1, -1), (3, 2, -1), (3, 3, -1), (3, 4, -1)], 2, 2.2071),
    8: ([(0, 1, 4), (0, 2, 2), (0, 3, 1), (1, 2, 2), (1, 3, 1), (1, 4, 4),
         (2, 3, 2),
         (3, 1, -4), (3, 2, -2), (3, 3, -3), (3, 4, -4)], 4, 4.3094),
    9: ([(0, 1, 2), (0, 2, 1), (1, 2, 1), (1, 3, 2),
         (2, 1, -1), (2, 3, -1),
         (3, 1, -1), (3, 2, -1), (3, 3, -1)], 2, 2.1784),
    10: ([(0, 1, 1), (0, 2, 1), (1, 1, 1), (1, 3, 1), (2, 2, 1), (2, 3, 1),
          (3, 1, -1), (3, 2, -1), (3, 3, -1)], 2, 2.2071),
    11: ([(0, 1, 3), (0, 2, 1), (1, 2, 1), (1, 3, 3), (2, 2, 1), (2, 4, 3),
          (3, 1, -3), (3, 2, -2), (3, 3, -3), (3, 4, -3)], 3, 3.1432),
    12: ([(0, 1, 2), (0, 2, 2), (0, 3, 1), (1, 1, 1), (1, 3, 1), (1, 4, 2),
          (2, 2, 1), (2, 3, 1), (2, 4, 1),
          (3, 1, -2), (3, 2, -2), (3, 3, -1), (3, 4, -2)], 3, 3.1784),
    13: ([(0, 1, 2), (0, 2, 1), (0, 3, 1), (1, 1, 1), (1, 2, 1), (1, 4, 2),
          (2, 2, 1), (2, 3, 2), (2, 4, 1),
          (3, 1, -2), (3, 2, -1), (3, 3, -2), (3, 4, -2)], 3, 3.1784),
    14: ([(0, 1, 4), (0, 2, 2), (0, 3, 1), (1, 2, 2), (1, 3, 1), (1, 4, 4),
          (2, 1, -1), (2, 3, 2), (2, 4, -1),
          (3, 1, -3), (3, 2, -2), (3, 3, -3), (3, 4, -3)], 4, 4.3202),
    15: ([(0, 1, 3), (0, 2, 3), (0, 3, 2), (1, 1, 3), (1, 3, 2), (1, 4, 3),
          (2, 2, 3), (2, 3, 2), (2, 4, 3),
          (3, 1, -3), (3, 2, -3), (3, 3, -2), (3, 4, -3)], 6, 6.6213),
    16: ([(0, 1, 3), (0, 2, 2), (0, 3, 1), (1, 1, 1), (1, 3, 2), (1, 4, 1),
          (2, 2, 2), (2, 3, 1), (2, 4, 3),
          (3, 1, -3), (3, 2, -2), (3, 3, -2), (3, 4, -3)], 4, 4.3371),
    17: ([(0, 1, 4), (0, 2, 3), (0, 3, 2), (1, 1, 2), (1, 3, 2), (1, 4, 2),
          (2, 2, 3), (2, 3, 2), (2, 4, 4),
          (3, 1, -4), (3, 2, -3), (3, 3, -2), (3, 4, -4)], 6, 6.5298),
    18: ([(0, 1, 4), (0, 2, 3), (0, 3, 2), (1, 1, 2), (1, 3, 2), (1, 4, 3),
          (2, 2, 3), (2, 3, 2), (2, 4, 3),
          (3, 1, -4), (3, 2, -3), (3, 3, -2), (3, 4, -4)], 6, 6.5733),
}

#: Reported two-qubit see-saw optima for the T45 facets, keyed by row number.
T45_QUANTUM = {k: v[2] for k, v in _T45_ROWS.items()}


def builtin_inequality(name: str) -> tuple[Scenario, Inequality]:
    """Look up a named inequality from the frozen registry.

    Known names: ``S1``, ``S2``, ``S3``, ``SD(2,3,3)``, ``T45-1`` .. ``T45-18``
    and ``Sn(k)`` for k >= 3.
    """
    if name == "S1":
        ineq = facet_family(3)
        ineq = Inequality(ineq.scenario, ineq.coeffs, ineq.bound, "S1")
        return ineq.scenario, ineq
    if name == "S2":
        scen = Scenario(2, 4, 4)
        terms = [(0, 1, 1), (0, 2, 1), (1, 0, 1), (1, 2, 1), (2, 0, 1), (2, 1, 1), (3, 3, 1)]
        return scen, _from_terms(scen, terms, Fraction(1, 3), 1, "S2")
    if name == "S3":
        scen = Scenario(2, 4, 4)
        terms = [(0, 0, 2), (0, 2, 1), (1, 1, 2), (1, 2, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)]
        return scen, _from_terms(scen, terms, Fraction(1, 4), 1, "S3")
    if name == "SD(2,3,3)":
        scen = Scenario(2, 3, 3)
        terms = [(0, 0, 1), (1, 1, 1), (2, 2, 1)]
        return scen, _from_terms(scen, terms, Fraction(1), 2, "SD(2,3,3)")
    if name.startswith("T45-"):
        try:
            row = int(name[4:])
            terms, bound, _ = _T45_ROWS[row]
        except (ValueError, KeyError):
            raise ValueError(f"unknown inequality {name!r}") from None
        scen = Scenario(2, 4, 5)
        return scen, _from_terms(scen, terms, Fraction(1), bound, name)
    if name.startswith("Sn(") and name.endswith(")"):
        try:
            n = int(name[3:-1])
        except ValueError:
            raise ValueError(f"unknown inequality {name!r}") from None
        ineq = facet_family(n)
        return ineq.scenario, ineq
    raise ValueError(f"unknown inequality {name!r}")


BUILTIN_INEQUALITY_NAMES = ("S1", "S2", "S3", "SD(2,3,3)") + tuple(
    f"T45-{k}" for k in sorted(_T45_ROWS)
)


def inequality_to_payload(ineq: Inequality) -> dict:
    return {
        "scenario": {"d": ineq.scenario.d, "nX": ineq.scenario.n_x, "nB": ineq.scenario.n_b},
        "coeffs": [[float(c) for c in row] for row in ineq.coeffs],
        "bound": float(ineq.bound),
        "name": ineq.name,
    }


def inequality_from_payload(payload: dict) -> Inequality:
    scen = Scenario(payload["scenario"]["d"], payload["scenario"]["nX"], payload["scenario"]["nB"])
    # Floats from disk are rationalized so the exact polytope routines stay exact;
    # every coefficient we ever emit has a tiny denominator.
    coeffs = tuple(
        tuple(Fraction(c).limit_denominator(10**6) for c in row) for row in payload["coeffs"]
    )
    bound = Fraction(payload["bound"]).limit_denominator(10**6)
    return Inequality(scen, coeffs, bound, payload.get("name", ""))


def save_inequality(ineq: Inequality, path) -> None:
    with open(path, "w") as fh:
        json.dump(inequality_to_payload(ineq), fh, indent=1)
        fh.write("\n")


def load_inequality(path) -> Inequality:
    with open(path) as fh:
        return inequality_from_payload(json.load(fh))
