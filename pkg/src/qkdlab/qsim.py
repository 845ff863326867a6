"""Exact statevector and density-matrix engine for up to 8 qubits.

Conventions
-----------
* Qubit position 0 is the leftmost ket label, i.e. the most significant
  bit of the basis index.  ``amplitudes[0b0110]`` of a 4-qubit state is
  the coefficient of ``|0110>``.
* Values are immutable: every operation returns a new value and never
  mutates its inputs.  The amplitude/entry arrays are marked read-only.
* Measurement sampling draws a single uniform variate per measurement
  and walks exact cumulative branch probabilities, so outcome sequences
  are reproducible for a fixed generator.

Polarization is modelled the usual way: 0 and 90 degrees are ``|0>`` and
``|1>``; 45 and 135 degrees are ``(|0>+|1>)/sqrt2`` and the image of
``|1>`` under the real 45-degree rotation.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum

import numpy as np

MAX_QUBITS = 8

#: Tolerance for invariant checks (normalization, hermiticity, trace).
NORM_ATOL = 1e-10

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class BellLabel(Enum):
    """The four Bell states.

    Enum values 0..3 follow the two-bit key encoding used by the
    protocols (00, 01, 10, 11 in order).
    """

    PHI_PLUS = 0
    PHI_MINUS = 1
    PSI_PLUS = 2
    PSI_MINUS = 3


class Basis(Enum):
    """Polarization measurement bases."""

    RECT = 0  # {0, 90 deg}  = {|0>, |1>}
    DIAG = 1  # {45, 135 deg} = {(|0>+|1>)/sqrt2, (|0>-|1>)/sqrt2}


class RotationDirection(Enum):
    FORWARD = 0  # 0 -> 45 deg, 90 -> 135 deg
    INVERSE = 1


@dataclass(frozen=True)
class StateVector:
    """Exact pure state of ``num_qubits`` qubits.

    ``amplitudes`` has length ``2**num_qubits`` and unit norm (within
    ``NORM_ATOL``); both are validated at construction, so any value of
    this type satisfies the normalization invariant.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_ATOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def _tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit position."""
        return self.amplitudes.reshape([2] * self.num_qubits)


@dataclass(frozen=True)
class DensityMatrix:
    """Exact mixed state: a hermitian, unit-trace, PSD matrix."""

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        dim = 2**self.num_qubits
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got shape {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > NORM_ATOL:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(entries) - 1.0) > NORM_ATOL:
            raise ValueError(f"trace {np.trace(entries)!r} deviates from 1")
        if np.min(np.linalg.eigvalsh(entries)) < -NORM_ATOL:
            raise ValueError("density matrix has a negative eigenvalue")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        amps = state.amplitudes
        return cls(state.num_qubits, np.outer(amps, amps.conj()))


@dataclass(frozen=True)
class QubitPermutation:
    """Relabeling of qubit positions: ``mapping[i]`` is the new position
    of the qubit currently at position ``i``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        n = len(mapping)
        if sorted(mapping) != list(range(n)):
            raise ValueError(f"mapping {mapping} is not a bijection on 0..{n - 1}")
        object.__setattr__(self, "mapping", mapping)

    def inverse(self) -> "QubitPermutation":
        inv = [0] * len(self.mapping)
        for old, new in enumerate(self.mapping):
            inv[new] = old
        return QubitPermutation(tuple(inv))

    @classmethod
    def swap(cls, num_qubits: int, a: int, b: int) -> "QubitPermutation":
        """Transposition of positions ``a`` and ``b`` on ``num_qubits`` qubits."""
        mapping = list(range(num_qubits))
        mapping[a], mapping[b] = mapping[b], mapping[a]
        return cls(tuple(mapping))


_BELL_AMPLITUDES = {
    BellLabel.PHI_PLUS: (_SQRT_HALF, 0.0, 0.0, _SQRT_HALF),
    BellLabel.PHI_MINUS: (_SQRT_HALF, 0.0, 0.0, -_SQRT_HALF),
    BellLabel.PSI_PLUS: (0.0, _SQRT_HALF, _SQRT_HALF, 0.0),
    BellLabel.PSI_MINUS: (0.0, _SQRT_HALF, -_SQRT_HALF, 0.0),
}

_BASIS_VECTORS = {
    Basis.RECT: (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    Basis.DIAG: (
        np.array([_SQRT_HALF, _SQRT_HALF]),
        np.array([_SQRT_HALF, -_SQRT_HALF]),
    ),
}

# Real rotation by +45 degrees; columns are the images of |0> and |1>.
_ROTATE_FORWARD = np.array(
    [[_SQRT_HALF, -_SQRT_HALF], [_SQRT_HALF, _SQRT_HALF]], dtype=complex
)


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Computational basis state ``|index>`` (position 0 = leftmost bit)."""
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def make_bell(label: BellLabel) -> StateVector:
    """One of the four Bell states.

    Sign convention: ``Phi+- = (|00> +- |11>)/sqrt2`` and
    ``Psi+- = (|01> +- |10>)/sqrt2``.
    """
    return StateVector(2, np.array(_BELL_AMPLITUDES[label], dtype=complex))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; ``a``'s qubits precede ``b``'s."""
    n = a.num_qubits + b.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"tensor product of {n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    return StateVector(n, np.kron(a.amplitudes, b.amplitudes))


def permute_qubits(state: StateVector, perm: QubitPermutation) -> StateVector:
    """Relabel basis positions by ``perm``; unitary, norm-preserving."""
    if len(perm.mapping) != state.num_qubits:
        raise ValueError(
            f"permutation on {len(perm.mapping)} positions applied to {state.num_qubits}-qubit state"
        )
    moved = np.transpose(state._tensor_view(), perm.mapping)
    return StateVector(state.num_qubits, moved.reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>`` with conjugation on ``a``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def partial_trace(state: StateVector | DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on the kept positions.

    ``keep`` is any iterable of distinct positions; kept qubits appear in
    the result in increasing position order.
    """
    kept = sorted(set(int(q) for q in keep))
    if not kept:
        raise ValueError("keep set must be nonempty")
    n = state.num_qubits
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep positions {kept} out of range for {n} qubits")
    k = len(kept)
    if isinstance(state, StateVector):
        psi = np.moveaxis(state._tensor_view(), kept, range(k))
        m = psi.reshape(2**k, -1)
        rho = m @ m.conj().T
    else:
        letters = string.ascii_lowercase
        row = list(letters[:n])
        col = list(letters[n : 2 * n])
        for q in range(n):
            if q not in kept:
                col[q] = row[q]  # tied index = trace over qubit q
        out = "".join(row[q] for q in kept) + "".join(col[q] for q in kept)
        subscript = "".join(row) + "".join(col) + "->" + out
        rho = np.einsum(subscript, state.entries.reshape([2] * (2 * n))).reshape(2**k, 2**k)
    return DensityMatrix(k, rho)


def _sample_branch(probabilities, rng) -> int:
    """Pick a branch index from exact cumulative probabilities."""
    draw = rng.random()
    acc = 0.0
    for i, p in enumerate(probabilities):
        acc += p
        if draw < acc:
            return i
    for i in reversed(range(len(probabilities))):
        if probabilities[i] > 0.0:
            return i
    raise RuntimeError("all branch probabilities are zero")


def _project_out(state: StateVector, vector: np.ndarray, positions) -> tuple[float, np.ndarray]:
    """Contract a bra ``vector`` onto ``positions``.

    Returns the branch probability and the (unnormalized) amplitude
    tensor on the remaining positions, in increasing position order.
    """
    axes = list(positions)
    bra = vector.conj().reshape([2] * len(axes))
    rest = np.tensordot(bra, state._tensor_view(), axes=(list(range(len(axes))), axes))
    prob = float(np.sum(np.abs(rest) ** 2))
    return prob, rest


def _reattach(vector: np.ndarray, rest: np.ndarray, positions, num_qubits: int) -> np.ndarray:
    """Rebuild a full amplitude tensor with ``vector`` at ``positions``."""
    others = [q for q in range(num_qubits) if q not in positions]
    full = np.tensordot(vector.reshape([2] * len(positions)), rest, axes=0)
    current_order = list(positions) + others
    return np.transpose(full, current_order).reshape(-1)


def bell_probabilities(state: StateVector, pair: tuple[int, int]) -> dict[BellLabel, float]:
    """Exact Born-rule probabilities of a Bell measurement on ``pair``."""
    p, q = pair
    if p == q:
        raise ValueError("Bell measurement needs two distinct positions")
    if not (0 <= p < state.num_qubits and 0 <= q < state.num_qubits):
        raise ValueError(f"positions {pair} out of range for {state.num_qubits} qubits")
    probs = {}
    for label in BellLabel:
        prob, _ = _project_out(state, make_bell(label).amplitudes, [p, q])
        probs[label] = prob
    return probs


def bell_measure(
    state: StateVector, pair: tuple[int, int], rng
) -> tuple[BellLabel, StateVector]:
    """Bell-basis measurement of the qubits at ``pair``.

    Branch probabilities are computed exactly before a single uniform
    draw selects the outcome; the returned state is the renormalized
    collapse.
    """
    probs = bell_probabilities(state, pair)
    labels = list(BellLabel)
    index = _sample_branch([probs[l] for l in labels], rng)
    label = labels[index]
    prob, rest = _project_out(state, make_bell(label).amplitudes, list(pair))
    if prob <= 1e-30:
        raise RuntimeError("sampled a zero-probability Bell branch")
    amps = _reattach(make_bell(label).amplitudes, rest, list(pair), state.num_qubits)
    return label, StateVector(state.num_qubits, amps / np.sqrt(prob))


def polarization_probabilities(state: StateVector, qubit: int, basis: Basis) -> tuple[float, float]:
    """Exact probabilities of outcomes 0 and 1 for a polarization measurement."""
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"position {qubit} out of range for {state.num_qubits} qubits")
    p0, _ = _project_out(state, _BASIS_VECTORS[basis][0], [qubit])
    p1, _ = _project_out(state, _BASIS_VECTORS[basis][1], [qubit])
    return p0, p1


def measure_polarization(
    state: StateVector, qubit: int, basis: Basis, rng
) -> tuple[int, StateVector]:
    """Measure one qubit in the rectilinear or diagonal basis.

    Outcome bit 0 corresponds to the first basis direction (0 or 45
    degrees), bit 1 to the second (90 or 135 degrees).
    """
    probs = polarization_probabilities(state, qubit, basis)
    bit = _sample_branch(probs, rng)
    vector = _BASIS_VECTORS[basis][bit]
    prob, rest = _project_out(state, vector, [qubit])
    if prob <= 1e-30:
        raise RuntimeError("sampled a zero-probability polarization branch")
    amps = _reattach(vector, rest, [qubit], state.num_qubits)
    return bit, StateVector(state.num_qubits, amps / np.sqrt(prob))


def rotate_45(state: StateVector, qubit: int, direction: RotationDirection) -> StateVector:
    """Rotate one qubit's polarization by 45 degrees (or back).

    FORWARD maps 0 -> 45 and 90 -> 135 degrees; INVERSE is the exact
    inverse. The real rotation matrix is used, so fixtures are exact.
    """
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"position {qubit} out of range for {state.num_qubits} qubits")
    gate = _ROTATE_FORWARD if direction is RotationDirection.FORWARD else _ROTATE_FORWARD.T
    moved = np.tensordot(gate, state._tensor_view(), axes=([1], [qubit]))
    return StateVector(state.num_qubits, np.moveaxis(moved, 0, qubit).reshape(-1))
