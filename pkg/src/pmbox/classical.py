"""Classical polytope engine: strategies, vertices, exact bounds and facets.

A deterministic strategy is a pair (f, g): Alice encodes her input through
f: X -> messages, Bob decodes through g: messages -> outputs. The behaviors of
all strategies are the vertices of the classical polytope; everything here is
exact (integer vertices, Fraction coefficients), so bounds and facet ranks are
certified rather than approximated.

Facet enumeration runs the double description method in the reduced coordinate
space (last output column dropped per input, where the polytope is
full-dimensional) and then groups facets into canonical classes under
relabeling of inputs and outputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import dd
from .scenario import Behavior, Inequality, Scenario, evaluate_exact

Vertex = tuple[tuple[int, ...], ...]


class GuardError(Exception):
    """Raised when a scenario exceeds the size guard of exact enumeration."""


class DetStrategy(NamedTuple):
    f: tuple[int, ...]
    g: tuple[int, ...]


@dataclass(frozen=True)
class VertexSet:
    """Deduplicated 0/1 behaviors of all deterministic strategies.

    ``provenance[k]`` lists the strategy indices (in lexicographic order)
    that produce ``vertices[k]``.
    """

    scenario: Scenario
    vertices: tuple[Vertex, ...]
    provenance: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FacetReport:
    bound_attained: Fraction
    saturating_count: int
    affine_rank: int
    is_facet: bool
    is_valid: bool


def enumerate_strategies(s: Scenario) -> list[DetStrategy]:
    """All d^|X| * |B|^d deterministic strategies, lexicographic in (f, g)."""
    return [
        DetStrategy(f, g)
        for f in itertools.product(range(s.d), repeat=s.n_x)
        for g in itertools.product(range(s.n_b), repeat=s.d)
    ]


def strategy_behavior(st: DetStrategy, s: Scenario) -> Vertex:
    """Integer behavior table: p[x][b] = 1 iff g(f(x)) = b."""
    return tuple(
        tuple(1 if st.g[st.f[x]] == b else 0 for b in range(s.n_b)) for x in range(s.n_x)
    )


def behavior_from_vertex(vertex: Vertex) -> Behavior:
    return Behavior(np.array(vertex, dtype=float))


def enumerate_vertices(s: Scenario) -> VertexSet:
    """Vertices of the classical polytope, sorted lexicographically."""
    seen: dict[Vertex, list[int]] = {}
    for idx, st in enumerate(enumerate_strategies(s)):
        seen.setdefault(strategy_behavior(st, s), []).append(idx)
    vertices = sorted(seen)
    return VertexSet(s, tuple(vertices), tuple(tuple(seen[v]) for v in vertices))


def classical_bound(ineq: Inequality, s: Scenario | None = None) -> Fraction:
    """Exact maximum of the functional over classical models.

    The maximum over all deterministic strategies factorizes: for a fixed
    decoding g, the best encoding picks for every input the message whose
    decoded output has the largest coefficient. This equals the maximum over
    the polytope vertices but stays polynomial in the alphabet sizes.
    """
    s = s or ineq.scenario
    best = None
    for g in itertools.product(range(s.n_b), repeat=s.d):
        val = sum(max(ineq.coeffs[x][b] for b in g) for x in range(s.n_x))
        if best is None or val > best:
            best = val
    return best


def int_rank(rows: Iterable[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free Gaussian elimination."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    n_cols = len(m[0])
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][col]:
                a, b = pr[col], m[i][col]
                m[i] = [a * u - b * v for u, v in zip(m[i], pr)]
                g = math.gcd(*map(abs, m[i])) if any(m[i]) else 1
                if g > 1:
                    m[i] = [v // g for v in m[i]]
        rank += 1
        if rank == len(m):
            break
    return rank


def polytope_dimension(s: Scenario) -> int:
    """Affine rank of the vertex set (exact)."""
    verts = enumerate_vertices(s).vertices
    base = [v for row in verts[0] for v in row]
    diffs = [[v - b for v, b in zip((x for row in vert for x in row), base)] for vert in verts[1:]]
    return int_rank(diffs)


def verify_facet(ineq: Inequality, s: Scenario | None = None) -> FacetReport:
    """Check tightness and the affine rank of the saturating vertex set."""
    s = s or ineq.scenario
    vset = enumerate_vertices(s)
    values = [evaluate_exact(ineq, v) for v in vset.vertices]
    attained = max(values)
    is_valid = attained <= ineq.bound
    saturating = [v for v, val in zip(vset.vertices, values) if val == ineq.bound]
    if len(saturating) >= 2:
        base = [x for row in saturating[0] for x in row]
        diffs = [
            [x - b for x, b in zip((y for row in v for y in row), base)] for v in saturating[1:]
        ]
        affine_rank = int_rank(diffs)
    else:
        affine_rank = 0
    dim = polytope_dimension(s)
    is_facet = bool(is_valid and attained == ineq.bound and affine_rank == dim - 1)
    return FacetReport(attained, len(saturating), affine_rank, is_facet, is_valid)


# ---------------------------------------------------------------------------
# Facet canonicalization under relabeling of inputs and outputs.
#
# A facet's coefficient matrix is only defined up to adding per-input
# constants (the normalization equalities) and positive scaling. The gauge is
# fixed by making every row's minimum zero and clearing to coprime integers;
# the class representative is the lexicographic minimum over the relabeling
# group S_|X| x S_|B|.
# ---------------------------------------------------------------------------

IntRows = tuple[tuple[int, ...], ...]


def gauge_fix(coeffs, bound) -> tuple[IntRows, int]:
    rows = [tuple(Fraction(c) for c in row) for row in coeffs]
    bound = Fraction(bound)
    mins = [min(row) for row in rows]
    rows = [tuple(c - m for c in row) for row, m in zip(rows, mins)]
    bound = bound - sum(mins, start=Fraction(0))
    denom = 1
    for v in itertools.chain.from_iterable(rows):
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    denom = denom * bound.denominator // math.gcd(denom, bound.denominator)
    ints = [[int(c * denom) for c in row] for row in rows]
    b_int = int(bound * denom)
    g = abs(b_int)
    for v in itertools.chain.from_iterable(ints):
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [[v // g for v in row] for row in ints]
        b_int //= g
    return tuple(tuple(row) for row in ints), b_int


def _relabelings(rows: IntRows):
    n_x, n_b = len(rows), len(rows[0])
    for perm_x in itertools.permutations(range(n_x)):
        permuted = [rows[i] for i in perm_x]
        for perm_b in itertools.permutations(range(n_b)):
            yield tuple(tuple(row[j] for j in perm_b) for row in permuted)


def canonical_form(coeffs, bound) -> tuple[IntRows, int]:
    """Gauge-fixed integer form, minimized over input/output relabelings."""
    rows, b = gauge_fix(coeffs, bound)
    return min(_relabelings(rows)), b


def facet_orbit(rows: IntRows) -> set[IntRows]:
    """All distinct relabelings of a gauge-fixed coefficient matrix."""
    return set(_relabelings(rows))


def is_lifted(rows: IntRows) -> bool:
    """True when the class is a lifting of a facet from a smaller scenario.

    Input liftings leave the added input's row constant (all-zero after gauge
    fixing); output liftings give the added output the same column as an
    existing one (or an everywhere-minimal, all-zero column).
    """
    if any(not any(row) for row in rows):
        return True
    cols = [tuple(row[b] for row in rows) for b in range(len(rows[0]))]
    if any(not any(col) for col in cols):
        return True
    return len(set(cols)) < len(cols)


def is_discrimination(rows: IntRows) -> bool:
    """True for the plain guess-the-input facet: one unit reward per input.

    This family (sum_x p(sigma(x)|x) <= d for injective sigma) exists in every
    scenario and is counted separately from facets proper to a scenario.
    """
    cols = set()
    value = None
    for row in rows:
        nz = [(b, c) for b, c in enumerate(row) if c]
        if len(nz) != 1:
            return False
        b, c = nz[0]
        if value is None:
            value = c
        if c != value or b in cols:
            return False
        cols.add(b)
    return True


def _is_trivial(rows: IntRows) -> bool:
    # In the row-minimum-zero gauge the positivity facets p(b|x) >= 0 are the
    # only facets supported on a single input row.
    return sum(1 for row in rows if any(row)) <= 1


@dataclass(frozen=True)
class FacetClass:
    inequality: Inequality
    orbit_size: int
    lifted: bool
    discrimination: bool

    @property
    def new(self) -> bool:
        """Proper to this scenario: neither a lifting nor a guess-the-input facet."""
        return not (self.lifted or self.discrimination)


def enumerate_facets(
    s: Scenario, max_vertices: int = 2000, max_dim: int = 20
) -> list[FacetClass]:
    """All non-trivial facet classes of the classical polytope, exact.

    Returns one canonical representative per class under relabeling of inputs
    and outputs, with the orbit size; positivity facets are filtered out.
    Classes that do not touch every input and output (liftings from smaller
    scenarios) are flagged ``lifted``.
    """
    vset = enumerate_vertices(s)
    dim = s.n_x * (s.n_b - 1)
    if len(vset.vertices) > max_vertices or dim > max_dim:
        raise GuardError(
            f"scenario ({s.d},{s.n_x},{s.n_b}) exceeds the enumeration guard: "
            f"{len(vset.vertices)} vertices (max {max_vertices}), dimension {dim} (max {max_dim})"
        )
    # Homogenized constraints (1, v) over reduced coordinates (drop the last
    # output column; the polytope is full-dimensional there).
    constraints = np.array(
        [[1] + [v for row in vert for v in row[:-1]] for vert in vset.vertices],
        dtype=np.int64,
    )
    rays = dd.extreme_rays(constraints)

    facets: set[tuple[IntRows, int]] = set()
    for w in rays:
        bound = int(w[0])
        red = [-int(v) for v in w[1:]]
        rows = [tuple(red[x * (s.n_b - 1) : (x + 1) * (s.n_b - 1)]) + (0,) for x in range(s.n_x)]
        facets.add(gauge_fix(rows, bound))

    classes: list[FacetClass] = []
    remaining = dict.fromkeys(sorted(facets))
    while remaining:
        rows, bound = next(iter(remaining))
        orbit = facet_orbit(rows)
        for member in orbit:
            remaining.pop((member, bound), None)
        if _is_trivial(rows):
            continue
        canon = min(orbit)
        coeffs = tuple(tuple(Fraction(v) for v in row) for row in canon)
        ineq = Inequality(s, coeffs, Fraction(bound))
        classes.append(FacetClass(ineq, len(orbit), is_lifted(canon), is_discrimination(canon)))
    classes.sort(key=lambda fc: (fc.inequality.bound, fc.inequality.coeffs))
    named = []
    for i, fc in enumerate(classes, start=1):
        ineq = fc.inequality
        named.append(
            FacetClass(
                Inequality(ineq.scenario, ineq.coeffs, ineq.bound, f"facet-{i}"),
                fc.orbit_size,
                fc.lifted,
                fc.discrimination,
            )
        )
    return named
