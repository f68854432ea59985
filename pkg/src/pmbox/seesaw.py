"""Alternating (see-saw) maximization of an inequality over quantum protocols.

Classical-message search alternates three blocks, each solved with the others
fixed:

  * Alice block (binary messages): for each input the optimal encoding POVM is
    the projector onto the positive eigenspace of R_{x,0} - R_{x,1}, where
    R_{x,m} = Tr_B[(1 (x) sum_b c[x][b] B_{b|m}) psi]. Exact maximizer.
  * Bob block: for each message, maximizing sum_b Tr(B_b S_b) over POVMs is a
    weighted discrimination problem, solved by the Lagrangian fixed point
    B_b <- L S_b B_b S_b L with L = (sum_b S_b B_b S_b)^{-1/2}, after shifting
    every S_b positive definite. Accepted only when the objective does not
    decrease.
  * State block: the top eigenvector of sum c[x][b] A_{m|x} (x) B_{b|m}.
    Exact maximizer over all shared states.

Qubit-message search keeps Bob's marginal fixed per restart and optimizes the
encoded joint states tau_x directly over {tau >= 0, Tr_msg tau = rho_B} with
Dykstra-projected ascent, plus discrimination fixed points for the read-out
and decoding POVMs. Every block is accepted only if it does not decrease the
objective, so a restart's trace is monotone.

Restarts are independent (seed + restart index) and deterministic; nothing
here certifies global optimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import dagger, hermitize, inv_sqrt_psd, kron, partial_trace, psd_project
from .quantum import CCProtocol, QCProtocol
from .scenario import Inequality, Scenario, coeff_array

_TIE_EPS = 1e-12


@dataclass(frozen=True)
class SeesawConfig:
    dim_a: int
    dim_b: int
    restarts: int = 50
    max_sweeps: int = 500
    tol: float = 1e-10
    seed: int = 0
    message_dim: int = 2
    n_readout: int = 4  # read-out outcomes in the qubit-message search
    bob_iters: int = 2000
    bob_tol: float = 1e-12
    dykstra_iters: int = 500
    dykstra_tol: float = 1e-9
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.message_dim != 2:
            raise ValueError("only binary/qubit messages are supported")


@dataclass
class SeesawResult:
    best_value: float
    best_protocol: CCProtocol | QCProtocol
    trace: list[float]
    restart_values: list[float]
    traces: list[list[float]] = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# Random starting points.
# ---------------------------------------------------------------------------


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_povm(dim: int, n_out: int, rng: np.random.Generator, spread: float = 0.4) -> list[np.ndarray]:
    """Perturb the uniform POVM and project back onto the POVM set."""
    elements = []
    for _ in range(n_out):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        elements.append(psd_project(np.eye(dim) / n_out + spread * hermitize(g) / math.sqrt(dim)))
    total = sum(elements)
    norm = inv_sqrt_psd(total)
    povm = [hermitize(norm @ e @ norm) for e in elements]
    # Guard against rank-deficient draws.
    deficiency = np.eye(dim) - sum(povm)
    return [e + deficiency / n_out for e in povm]


# ---------------------------------------------------------------------------
# Classical-message blocks.
# ---------------------------------------------------------------------------


def _bob_weight_ops(coeffs: np.ndarray, bob: Sequence[Sequence[np.ndarray]]) -> list[list[np.ndarray]]:
    """W[x][m] = sum_b c[x][b] B_{b|m}."""
    n_x = coeffs.shape[0]
    return [
        [sum(c * e for c, e in zip(coeffs[x], povm)) for povm in bob]
        for x in range(n_x)
    ]


def alice_step(
    coeffs: np.ndarray,
    state: np.ndarray,
    bob: Sequence[Sequence[np.ndarray]],
    dim_a: int,
    dim_b: int,
) -> list[list[np.ndarray]]:
    """Exact optimal binary encodings for fixed state and decodings.

    Eigenvalues within 1e-12 of zero are assigned to message 1, which breaks
    ties deterministically.
    """
    if len(bob) != 2:
        raise ValueError("the closed-form Alice step needs binary messages")
    weights = _bob_weight_ops(coeffs, bob)
    alice = []
    for x in range(coeffs.shape[0]):
        r0 = partial_trace(kron(np.eye(dim_a), weights[x][0]) @ state, dim_a, dim_b, "B")
        r1 = partial_trace(kron(np.eye(dim_a), weights[x][1]) @ state, dim_a, dim_b, "B")
        vals, vecs = np.linalg.eigh(hermitize(r0 - r1))
        pos = vecs[:, vals > _TIE_EPS]
        a0 = pos @ dagger(pos)
        alice.append([hermitize(a0), np.eye(dim_a) - hermitize(a0)])
    return alice


def discrimination_fixed_point(
    ops: Sequence[np.ndarray],
    init: Sequence[np.ndarray],
    iters: int = 2000,
    tol: float = 1e-12,
) -> tuple[list[np.ndarray], float]:
    """Maximize sum_b Tr(B_b ops[b]) over POVMs {B_b}, warm-started at init.

    The operators are shifted positive definite (which adds the constant
    shift * dim to the shifted objective but moves no maximizer), then the
    fixed point B_b <- L S_b B_b S_b L, L = Lambda^{-1/2}, is iterated. The
    best iterate is returned, and never one with a lower objective than init.
    """
    dim = ops[0].shape[0]
    low = min(float(np.min(np.linalg.eigvalsh(hermitize(s)))) for s in ops)
    shift = max(0.0, -low) + 0.01
    shifted = [hermitize(s) + shift * np.eye(dim) for s in ops]

    def objective(povm) -> float:
        return float(sum(np.trace(b @ s).real for b, s in zip(povm, ops)))

    povm = [e.copy() for e in init]
    best_val, best = objective(povm), povm
    prev = best_val
    for _ in range(iters):
        lam = sum(s @ b @ s for s, b in zip(shifted, povm))
        vals, vecs = np.linalg.eigh(hermitize(lam))
        inv = np.where(vals > 1e-12, 1.0 / np.sqrt(np.clip(vals, 1e-12, None)), 0.0)
        norm = (vecs * inv) @ vecs.conj().T
        povm = [hermitize(norm @ s @ b @ s @ norm) for s, b in zip(shifted, povm)]
        deficiency = np.eye(dim) - sum(povm)
        povm = [b + deficiency / len(povm) for b in povm]
        val = objective(povm)
        if val > best_val:
            best_val, best = val, povm
        if abs(val - prev) < tol:
            break
        prev = val
    return [e.copy() for e in best], best_val


def bob_step(
    coeffs: np.ndarray,
    state: np.ndarray,
    alice: Sequence[Sequence[np.ndarray]],
    bob: Sequence[Sequence[np.ndarray]],
    dim_a: int,
    dim_b: int,
    iters: int = 2000,
    tol: float = 1e-12,
) -> list[list[np.ndarray]]:
    """Fixed-point update of every decoding POVM, warm-started at bob."""
    n_x, n_b = coeffs.shape
    new_bob = []
    for m in range(len(bob)):
        reduced = [
            partial_trace(kron(alice[x][m], np.eye(dim_b)) @ state, dim_a, dim_b, "A")
            for x in range(n_x)
        ]
        ops = [hermitize(sum(coeffs[x, b] * reduced[x] for x in range(n_x))) for b in range(n_b)]
        povm, _ = discrimination_fixed_point(ops, bob[m], iters=iters, tol=tol)
        new_bob.append(povm)
    return new_bob


def correlation_operator(
    coeffs: np.ndarray,
    alice: Sequence[Sequence[np.ndarray]],
    bob: Sequence[Sequence[np.ndarray]],
) -> np.ndarray:
    weights = _bob_weight_ops(coeffs, bob)
    total = None
    for x in range(coeffs.shape[0]):
        for m in range(len(bob)):
            term = kron(alice[x][m], weights[x][m])
            total = term if total is None else total + term
    return hermitize(total)


def _top_eigvec(f: np.ndarray) -> np.ndarray:
    """Leading eigenvector; degenerate spaces resolve toward low basis indices."""
    vals, vecs = np.linalg.eigh(f)
    space = vecs[:, vals >= vals[-1] - _TIE_EPS]
    overlaps = np.linalg.norm(space, axis=1)
    row = int(np.argmax(overlaps > 1e-8))
    v = space @ space[row].conj()
    return v / np.linalg.norm(v)


def state_step(
    coeffs: np.ndarray,
    alice: Sequence[Sequence[np.ndarray]],
    bob: Sequence[Sequence[np.ndarray]],
) -> np.ndarray:
    """Exact optimal pure shared state for fixed measurements."""
    v = _top_eigvec(correlation_operator(coeffs, alice, bob))
    return np.outer(v, v.conj())


def cc_objective(
    coeffs: np.ndarray,
    state: np.ndarray,
    alice: Sequence[Sequence[np.ndarray]],
    bob: Sequence[Sequence[np.ndarray]],
) -> float:
    return float(np.trace(correlation_operator(coeffs, alice, bob) @ state).real)


def _run_restart_cc(
    coeffs: np.ndarray,
    config: SeesawConfig,
    restart: int,
    fixed_state: np.ndarray | None,
) -> tuple[float, CCProtocol, list[float]]:
    rng = np.random.default_rng(config.seed + restart)
    n_b = coeffs.shape[1]
    dim_a, dim_b = config.dim_a, config.dim_b
    state = fixed_state if fixed_state is not None else random_pure_state(dim_a * dim_b, rng)
    bob = [random_povm(dim_b, n_b, rng) for _ in range(config.message_dim)]
    alice = None
    trace: list[float] = []
    value = -math.inf
    for _ in range(config.max_sweeps):
        alice = alice_step(coeffs, state, bob, dim_a, dim_b)
        trace.append(cc_objective(coeffs, state, alice, bob))
        bob = bob_step(coeffs, state, alice, bob, dim_a, dim_b, config.bob_iters, config.bob_tol)
        trace.append(cc_objective(coeffs, state, alice, bob))
        if fixed_state is None:
            state = state_step(coeffs, alice, bob)
            trace.append(cc_objective(coeffs, state, alice, bob))
        if trace[-1] - value < config.tol:
            value = trace[-1]
            break
        value = trace[-1]
    protocol = CCProtocol(
        state,
        tuple(tuple(e for e in p) for p in alice),
        tuple(tuple(e for e in p) for p in bob),
        dim_a,
        dim_b,
    )
    # Report the value of the explicit protocol (validates it as a side effect).
    from .quantum import eval_cc

    value = float(np.sum(coeffs * eval_cc(protocol).p))
    return value, protocol, trace


def _collect(
    runner: Callable[[int], tuple[float, object, list[float]]],
    restarts: int,
    workers: int,
) -> SeesawResult:
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(runner, range(restarts)))
    else:
        outcomes = [runner(r) for r in range(restarts)]
    values = [v for v, _, _ in outcomes]
    best = int(np.argmax(values))
    return SeesawResult(
        best_value=values[best],
        best_protocol=outcomes[best][1],
        trace=outcomes[best][2],
        restart_values=values,
        traces=[t for _, _, t in outcomes],
    )


class _CCRunner:
    """Picklable per-restart worker for the classical-message search."""

    def __init__(self, coeffs, config, fixed_state):
        self.coeffs, self.config, self.fixed_state = coeffs, config, fixed_state

    def __call__(self, restart: int):
        return _run_restart_cc(self.coeffs, self.config, restart, self.fixed_state)


def seesaw_cc(ineq: Inequality, scenario: Scenario, config: SeesawConfig) -> SeesawResult:
    """Best protocol over seeded random restarts; lower bound, not a certificate."""
    coeffs = coeff_array(ineq)
    return _collect(_CCRunner(coeffs, config, None), config.restarts, config.workers)


def seesaw_cc_fixed_state(ineq: Inequality, state: np.ndarray, config: SeesawConfig) -> SeesawResult:
    """See-saw over measurements only, for a fixed shared state."""
    coeffs = coeff_array(ineq)
    state = np.asarray(state, dtype=complex)
    return _collect(_CCRunner(coeffs, config, state), config.restarts, config.workers)


def max_entangled_state(dim: int) -> np.ndarray:
    v = np.zeros(dim * dim, dtype=complex)
    for i in range(dim):
        v[i * dim + i] = 1.0
    v /= math.sqrt(dim)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# Qubit-message search.
# ---------------------------------------------------------------------------


def _psd_clip(h: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(h)
    if vals[0] >= 0.0:
        return h
    return (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T


def dykstra_project(
    h: np.ndarray,
    rho_b: np.ndarray,
    dim_b: int,
    iters: int = 500,
    tol: float = 1e-9,
) -> np.ndarray:
    """Project a Hermitian operator onto {tau >= 0, Tr_msg tau = rho_b}.

    True Dykstra iteration (per-set correction terms), alternating the PSD
    cone with the affine slice; the affine projection is
    tau -> tau + (1/2) 1_msg (x) (rho_b - Tr_msg tau). The final sweeps drop
    the correction terms, so the result is feasible to ~tol even when the
    nearest-point iteration has not fully converged.
    """
    eye_msg = np.eye(2, dtype=complex)

    def affine(t: np.ndarray) -> np.ndarray:
        gap = rho_b - partial_trace(t, 2, dim_b, "A")
        return t + kron(eye_msg, gap) / 2

    x = hermitize(h)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    z = x
    for _ in range(iters):
        y = _psd_clip(hermitize(x + p))
        p = x + p - y
        z = affine(y + q)
        q = y + q - z
        x = z
        psd_residual = -min(0.0, float(np.min(np.linalg.eigvalsh(hermitize(z)))))
        affine_residual = float(np.max(np.abs(partial_trace(y, 2, dim_b, "A") - rho_b)))
        if psd_residual < tol and affine_residual < tol:
            break
    # Feasibility polish: plain alternating projections converge to a point of
    # the intersection and guarantee the candidate cannot profit from
    # constraint violation. The marginal is exact after the final affine step.
    z = hermitize(z)
    polish_tol = min(tol, 1e-12)
    for _ in range(300):
        z = affine(_psd_clip(z))
        if -min(0.0, float(np.min(np.linalg.eigvalsh(z)))) < polish_tol:
            break
        z = hermitize(z)
    return hermitize(z)


def _qc_objective(coeffs, taus, readout, bob) -> float:
    weights = _bob_weight_ops(coeffs, bob)
    total = 0.0
    for x, tau in enumerate(taus):
        g = sum(kron(m, weights[x][mi]) for mi, m in enumerate(readout))
        total += float(np.trace(g @ tau).real)
    return total


def _run_restart_qc(
    coeffs: np.ndarray,
    config: SeesawConfig,
    restart: int,
) -> tuple[float, QCProtocol, list[float]]:
    rng = np.random.default_rng(config.seed + restart)
    n_x, n_b = coeffs.shape
    dim_b = config.dim_b
    # Bob's marginal is steered from a sampled seed state and stays fixed for
    # the whole restart; the tau block then ranges over every channel output.
    seed_state = random_pure_state(config.dim_a * dim_b, rng)
    rho_b = hermitize(partial_trace(seed_state, config.dim_a, dim_b, "A"))
    taus = [kron(random_pure_state(2, rng), rho_b) for _ in range(n_x)]
    readout = random_povm(2, config.n_readout, rng)
    bob = [random_povm(dim_b, n_b, rng) for _ in range(config.n_readout)]

    trace: list[float] = []
    value = -math.inf
    for _ in range(config.max_sweeps):
        # (a) tau block: Dykstra-projected ascent, accepted only on improvement.
        weights = _bob_weight_ops(coeffs, bob)
        for x in range(n_x):
            g = hermitize(sum(kron(m, weights[x][mi]) for mi, m in enumerate(readout)))
            g_norm = float(np.linalg.norm(g))
            if g_norm < 1e-14:
                continue
            current = float(np.trace(g @ taus[x]).real)
            best_tau, best_val = taus[x], current
            for eta in (64.0, 8.0, 1.0, 0.125):
                cand = dykstra_project(
                    taus[x] + (eta / g_norm) * g, rho_b, dim_b,
                    config.dykstra_iters, config.dykstra_tol,
                )
                val = float(np.trace(g @ cand).real)
                if val > best_val:
                    best_tau, best_val = cand, val
            taus[x] = best_tau
        trace.append(_qc_objective(coeffs, taus, readout, bob))

        # (b) read-out block: discrimination fixed point on {M_m}.
        weights = _bob_weight_ops(coeffs, bob)
        t_ops = [
            hermitize(sum(
                partial_trace(kron(np.eye(2), weights[x][m]) @ taus[x], 2, dim_b, "B")
                for x in range(n_x)
            ))
            for m in range(config.n_readout)
        ]
        readout, _ = discrimination_fixed_point(t_ops, readout, config.bob_iters, config.bob_tol)
        trace.append(_qc_objective(coeffs, taus, readout, bob))

        # (c) Bob block: per read-out decoding POVMs.
        new_bob = []
        for m in range(config.n_readout):
            reduced = [
                partial_trace(kron(readout[m], np.eye(dim_b)) @ taus[x], 2, dim_b, "A")
                for x in range(n_x)
            ]
            ops = [hermitize(sum(coeffs[x, b] * reduced[x] for x in range(n_x))) for b in range(n_b)]
            povm, _ = discrimination_fixed_point(ops, bob[m], config.bob_iters, config.bob_tol)
            new_bob.append(povm)
        bob = new_bob
        trace.append(_qc_objective(coeffs, taus, readout, bob))

        if trace[-1] - value < config.tol:
            value = trace[-1]
            break
        value = trace[-1]

    protocol = qc_protocol_from_taus(taus, rho_b, readout, bob, dim_b)
    from .quantum import eval_qc

    value = float(np.sum(coeffs * eval_qc(protocol).p))
    return value, protocol, trace


class _QCRunner:
    def __init__(self, coeffs, config):
        self.coeffs, self.config = coeffs, config

    def __call__(self, restart: int):
        return _run_restart_qc(self.coeffs, self.config, restart)


def seesaw_qc(ineq: Inequality, scenario: Scenario, config: SeesawConfig) -> SeesawResult:
    """Qubit-message see-saw; Bob's marginal is resampled across restarts."""
    coeffs = coeff_array(ineq)
    return _collect(_QCRunner(coeffs, config), config.restarts, config.workers)


def qc_protocol_from_taus(
    taus: Sequence[np.ndarray],
    rho_b: np.ndarray,
    readout: Sequence[np.ndarray],
    bob: Sequence[Sequence[np.ndarray]],
    dim_b: int,
) -> QCProtocol:
    """Recover an explicit protocol (state + channels) from the tau variables.

    The shared state is the standard purification psi = (1 (x) sqrt(rho_b)) |Omega>,
    so a channel with Choi operator (1 (x) r) tau (1 (x) r), r = rho_b^{-1/2},
    reproduces tau; the channel acts arbitrarily on the complement of the
    support of rho_b, completed here with a depolarizing branch.
    """
    root = _psd_sqrt(rho_b)
    inv_root = inv_sqrt_psd(rho_b)
    support = inv_root @ rho_b @ inv_root
    complement = np.eye(dim_b) - support

    omega = np.zeros(dim_b * dim_b, dtype=complex)
    for i in range(dim_b):
        omega[i * dim_b + i] = 1.0
    psi_vec = kron(np.eye(dim_b), root) @ omega
    state = np.outer(psi_vec, psi_vec.conj())

    kraus_lists = []
    for tau in taus:
        choi = kron(np.eye(2), inv_root) @ tau @ kron(np.eye(2), inv_root)
        choi = _psd_clip(hermitize(choi + kron(np.eye(2) / 2, complement)))
        # Renormalize so the channel is exactly trace-preserving; this absorbs
        # the residual infeasibility of tau at the 1e-12 scale.
        marg = hermitize(partial_trace(choi, 2, dim_b, "A"))
        fix = inv_sqrt_psd(marg)
        choi = hermitize(kron(np.eye(2), fix) @ choi @ kron(np.eye(2), fix))
        vals, vecs = np.linalg.eigh(choi)
        ops = []
        for val, vec in zip(vals, vecs.T):
            if val > 1e-14:
                ops.append(math.sqrt(val) * vec.reshape(2, dim_b))
        kraus_lists.append(tuple(ops))
    return QCProtocol(
        state,
        tuple(kraus_lists),
        tuple(readout),
        tuple(tuple(e for e in p) for p in bob),
        dim_b,
        dim_b,
    )


def _psd_sqrt(h: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(hermitize(h))
    return hermitize((vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T)
