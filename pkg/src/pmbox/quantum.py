"""Entanglement-assisted protocol evaluation for classical and quantum messages.

A classical-message protocol is a shared state, one encoding POVM per input on
Alice's side and one decoding POVM per message value on Bob's side:

    p(b|x) = sum_m Tr[(A_{m|x} (x) B_{b|m}) psi]

With a qubit message, Alice's encoding becomes a channel (Kraus list) from her
share to the message qubit; Bob first reads the message with a POVM {M_m} and
then decodes with the POVM selected by the read-out:

    p(b|x) = sum_m Tr[(M_m (x) B_{b|m}) tau_x],  tau_x = (Lambda_x (x) 1)[psi]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import dagger, hermitize, kron, partial_trace
from .scenario import Behavior

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def ket(*amplitudes) -> np.ndarray:
    v = np.array(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def observable_povm(obs: np.ndarray) -> list[np.ndarray]:
    """Two-element projective POVM of a +/-1 observable: [P_+, P_-]."""
    return [(np.eye(len(obs)) + obs) / 2, (np.eye(len(obs)) - obs) / 2]


def bloch_observable(bx: float, by: float, bz: float) -> np.ndarray:
    """Unit-normalized qubit observable along a Bloch direction."""
    n = math.sqrt(bx * bx + by * by + bz * bz)
    return (bx * X + by * Y + bz * Z) / n


def _check_povm(povm: Sequence[np.ndarray], dim: int, label: str) -> None:
    total = np.zeros((dim, dim), dtype=complex)
    for e in povm:
        if e.shape != (dim, dim):
            raise ValueError(f"{label}: element shape {e.shape}, expected {(dim, dim)}")
        if np.min(np.linalg.eigvalsh(hermitize(e))) < -1e-10:
            raise ValueError(f"{label}: element not positive semidefinite")
        total = total + e
    if np.max(np.abs(total - np.eye(dim))) > 1e-9:
        raise ValueError(f"{label}: elements do not sum to the identity")


def _check_state(state: np.ndarray, dim: int) -> None:
    if state.shape != (dim, dim):
        raise ValueError(f"state shape {state.shape}, expected {(dim, dim)}")
    if abs(np.trace(state) - 1.0) > 1e-10:
        raise ValueError("state trace is not 1")
    if np.min(np.linalg.eigvalsh(hermitize(state))) < -1e-10:
        raise ValueError("state is not positive semidefinite")


@dataclass(frozen=True)
class CCProtocol:
    """Classical-message protocol: state, Alice POVMs per x, Bob POVMs per m."""

    state: np.ndarray
    alice: tuple[tuple[np.ndarray, ...], ...]
    bob: tuple[tuple[np.ndarray, ...], ...]
    dim_a: int
    dim_b: int

    def __post_init__(self):
        object.__setattr__(self, "state", np.asarray(self.state, dtype=complex))
        object.__setattr__(
            self, "alice", tuple(tuple(np.asarray(e, dtype=complex) for e in p) for p in self.alice)
        )
        object.__setattr__(
            self, "bob", tuple(tuple(np.asarray(e, dtype=complex) for e in p) for p in self.bob)
        )

    @property
    def n_messages(self) -> int:
        return len(self.alice[0])

    def validate(self) -> None:
        _check_state(self.state, self.dim_a * self.dim_b)
        for x, povm in enumerate(self.alice):
            _check_povm(povm, self.dim_a, f"alice[{x}]")
        for m, povm in enumerate(self.bob):
            _check_povm(povm, self.dim_b, f"bob[{m}]")


@dataclass(frozen=True)
class QCProtocol:
    """Qubit-message protocol: per-input channels, read-out POVM, Bob POVMs."""

    state: np.ndarray
    kraus: tuple[tuple[np.ndarray, ...], ...]  # per x, operators dim_a -> 2
    readout: tuple[np.ndarray, ...]
    bob: tuple[tuple[np.ndarray, ...], ...]
    dim_a: int
    dim_b: int

    def __post_init__(self):
        object.__setattr__(self, "state", np.asarray(self.state, dtype=complex))
        object.__setattr__(
            self, "kraus", tuple(tuple(np.asarray(k, dtype=complex) for k in ks) for ks in self.kraus)
        )
        object.__setattr__(self, "readout", tuple(np.asarray(m, dtype=complex) for m in self.readout))
        object.__setattr__(
            self, "bob", tuple(tuple(np.asarray(e, dtype=complex) for e in p) for p in self.bob)
        )

    def validate(self) -> None:
        _check_state(self.state, self.dim_a * self.dim_b)
        for x, ks in enumerate(self.kraus):
            total = sum(dagger(k) @ k for k in ks)
            if np.max(np.abs(total - np.eye(self.dim_a))) > 1e-9:
                raise ValueError(f"kraus[{x}]: operators are not trace-preserving")
        _check_povm(self.readout, 2, "readout")
        for m, povm in enumerate(self.bob):
            _check_povm(povm, self.dim_b, f"bob[{m}]")


Protocol = CCProtocol | QCProtocol


def eval_cc(p: CCProtocol) -> Behavior:
    p.validate()
    n_x, n_b = len(p.alice), len(p.bob[0])
    table = np.zeros((n_x, n_b))
    for x in range(n_x):
        for b in range(n_b):
            val = 0.0
            for m in range(p.n_messages):
                val += np.trace(kron(p.alice[x][m], p.bob[m][b]) @ p.state).real
            table[x, b] = val
    return Behavior(table)


def message_states(p: QCProtocol) -> list[np.ndarray]:
    """The joint message+Bob states tau_x after Alice's encodings."""
    taus = []
    for ks in p.kraus:
        tau = np.zeros((2 * p.dim_b, 2 * p.dim_b), dtype=complex)
        for k in ks:
            op = kron(k, np.eye(p.dim_b))
            tau += op @ p.state @ dagger(op)
        taus.append(hermitize(tau))
    return taus


def eval_qc(p: QCProtocol) -> Behavior:
    p.validate()
    taus = message_states(p)
    n_x, n_b = len(p.kraus), len(p.bob[0])
    table = np.zeros((n_x, n_b))
    for x in range(n_x):
        for b in range(n_b):
            val = 0.0
            for m, readout in enumerate(p.readout):
                val += np.trace(kron(readout, p.bob[m][b]) @ taus[x]).real
            table[x, b] = val
    return Behavior(table)


@dataclass(frozen=True)
class NoiseSpec:
    kind: str  # "depolarizing" | "dephasing"
    v: float

    def __post_init__(self):
        if self.kind not in ("depolarizing", "dephasing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.v <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")


def apply_noise(state: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Mix the state with white noise or with its computational-basis diagonal."""
    state = np.asarray(state, dtype=complex)
    dim = state.shape[0]
    if spec.kind == "depolarizing":
        noise = np.eye(dim, dtype=complex) / dim
    else:
        noise = np.diag(np.diag(state))
    return spec.v * state + (1.0 - spec.v) * noise


def with_state(p: CCProtocol, state: np.ndarray) -> CCProtocol:
    return CCProtocol(state, p.alice, p.bob, p.dim_a, p.dim_b)


def noise_threshold(base: CCProtocol, ineq, kind: str) -> float:
    """Visibility at which the protocol's score crosses the classical bound.

    Bisects evaluate(ineq, eval_cc(noisy protocol)) = bound; the score must be
    affine and increasing in the visibility, which holds for state-mixing
    noise and is verified before bisecting.
    """
    from .scenario import evaluate

    def score(v: float) -> float:
        return evaluate(ineq, eval_cc(with_state(base, apply_noise(base.state, NoiseSpec(kind, v)))))

    bound = float(ineq.bound)
    s0, s_half, s1 = score(0.0), score(0.5), score(1.0)
    if s1 <= bound:
        raise ValueError("protocol does not violate the inequality at v = 1")
    if abs(s_half - (s0 + s1) / 2) > 1e-10 or s1 <= s0:
        raise ValueError("score is not affine increasing in the visibility")
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2
        if score(mid) >= bound:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def is_projective(povm: Sequence[np.ndarray], atol: float = 1e-9) -> bool:
    """True iff every element is a projector and elements are orthogonal."""
    for i, e in enumerate(povm):
        if np.max(np.abs(e @ e - e)) > atol:
            return False
        for f in povm[i + 1 :]:
            if np.max(np.abs(e @ f)) > atol:
                return False
    return True


def embed_strategy(f: Sequence[int], g: Sequence[int], n_messages: int, n_b: int) -> CCProtocol:
    """Deterministic strategy as a diagonal protocol; reproduces it exactly."""
    dim = 1
    state = np.array([[1.0 + 0j]])
    alice = tuple(
        tuple(np.eye(dim, dtype=complex) if f[x] == m else np.zeros((dim, dim), dtype=complex)
              for m in range(n_messages))
        for x in range(len(f))
    )
    bob = tuple(
        tuple(np.eye(dim, dtype=complex) if g[m] == b else np.zeros((dim, dim), dtype=complex)
              for b in range(n_b))
        for m in range(n_messages)
    )
    return CCProtocol(kron(state, state), alice, bob, dim, dim)


# ---------------------------------------------------------------------------
# Protocol (de)serialization. Complex entries are stored as [re, im] pairs and
# matrices as row-major nested lists, so files are plain JSON.
# ---------------------------------------------------------------------------


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def protocol_to_payload(p: Protocol) -> dict:
    if isinstance(p, CCProtocol):
        return {
            "type": "cc",
            "dimA": p.dim_a,
            "dimB": p.dim_b,
            "state": _matrix_to_json(p.state),
            "alice": [[_matrix_to_json(e) for e in povm] for povm in p.alice],
            "bob": [[_matrix_to_json(e) for e in povm] for povm in p.bob],
        }
    return {
        "type": "qc",
        "dimA": p.dim_a,
        "dimB": p.dim_b,
        "state": _matrix_to_json(p.state),
        "kraus": [[_matrix_to_json(k) for k in ks] for ks in p.kraus],
        "readout": [_matrix_to_json(m) for m in p.readout],
        "bob": [[_matrix_to_json(e) for e in povm] for povm in p.bob],
    }


def protocol_from_payload(payload: dict) -> Protocol:
    dim_a, dim_b = payload["dimA"], payload["dimB"]
    state = _matrix_from_json(payload["state"])
    bob = tuple(tuple(_matrix_from_json(e) for e in povm) for povm in payload["bob"])
    if payload["type"] == "cc":
        alice = tuple(tuple(_matrix_from_json(e) for e in povm) for povm in payload["alice"])
        return CCProtocol(state, alice, bob, dim_a, dim_b)
    if payload["type"] == "qc":
        kraus = tuple(tuple(_matrix_from_json(k) for k in ks) for ks in payload["kraus"])
        readout = tuple(_matrix_from_json(m) for m in payload["readout"])
        return QCProtocol(state, kraus, readout, bob, dim_a, dim_b)
    raise ValueError(f"unknown protocol type {payload['type']!r}")


def save_protocol(p: Protocol, path) -> None:
    with open(path, "w") as fh:
        json.dump(protocol_to_payload(p), fh, sort_keys=True)
        fh.write("\n")


def load_protocol(path) -> Protocol:
    with open(path) as fh:
        return protocol_from_payload(json.load(fh))
