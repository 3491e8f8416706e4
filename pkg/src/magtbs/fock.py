"""Truncated two-mode bosonic Fock space and its number-conserving blocks.

Two coupled bosonic modes with an excitation-conserving Hamiltonian never mix
states of different total occupation N = m1 + m2, so the Hilbert space splits
into invariant blocks of dimension N + 1. Everything in this module is built
around that structure: the basis enumerates states block by block, and
number-conserving operators are stored as one small dense matrix per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp

HERMITIAN_TOL = 1e-12


class FockIndex(NamedTuple):
    """Occupation pair |m1, m2>."""

    m1: int
    m2: int


class DegenerateStateError(ValueError):
    """State construction received an empty or identically zero amplitude list."""


class FockBasis:
    """Ordered basis of all |m1, m2> with m1 + m2 <= n_max.

    States are grouped into blocks of fixed total occupation N; within a block
    they are ordered by descending m1: (N,0), (N-1,1), ..., (0,N). This
    ordering is part of the external contract (flat indices, CSV column order
    and golden outputs all rely on it). Instances are immutable after
    construction and safe to share between workers.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {n_max}")
        self.n_max = int(n_max)
        blocks: list[tuple[FockIndex, ...]] = []
        states: list[FockIndex] = []
        for total in range(self.n_max + 1):
            block = tuple(FockIndex(total - k, k) for k in range(total + 1))
            blocks.append(block)
            states.extend(block)
        self.blocks: tuple[tuple[FockIndex, ...], ...] = tuple(blocks)
        self.states: tuple[FockIndex, ...] = tuple(states)
        self._flat_index = {s: i for i, s in enumerate(states)}

    @property
    def dimension(self) -> int:
        return len(self.states)

    def index_of(self, state) -> int:
        """Flat index of an occupation pair; IndexError if outside the cutoff."""
        key = FockIndex(*state)
        try:
            return self._flat_index[key]
        except KeyError:
            raise IndexError(
                f"state {tuple(key)} is outside the basis with n_max={self.n_max}"
            ) from None

    def __contains__(self, state) -> bool:
        try:
            return FockIndex(*state) in self._flat_index
        except TypeError:
            return False

    def block_slice(self, total: int) -> slice:
        """Slice of the flat index range covered by the fixed-N block."""
        if not 0 <= total <= self.n_max:
            raise IndexError(f"no block with total occupation {total}")
        start = total * (total + 1) // 2
        return slice(start, start + total + 1)

    def __repr__(self) -> str:
        return f"FockBasis(n_max={self.n_max}, dimension={self.dimension})"


def build_basis(n_max: int = 2) -> FockBasis:
    """Basis of occupation pairs with total quanta up to n_max (default 2)."""
    return FockBasis(n_max)


class StateVector:
    """Complex amplitudes over a FockBasis; a value type, one array per state."""

    def __init__(self, basis: FockBasis, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.shape != (basis.dimension,):
            raise ValueError(
                f"amplitude array has shape {amps.shape}, "
                f"expected ({basis.dimension},)"
            )
        self.basis = basis
        self.amplitudes = amps.copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, state) -> complex:
        return complex(self.amplitudes[self.basis.index_of(state)])

    def block(self, total: int) -> np.ndarray:
        """Amplitudes of the fixed-N block (a view, do not mutate)."""
        return self.amplitudes[self.basis.block_slice(total)]

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes)

    def __repr__(self) -> str:
        return f"StateVector(dim={self.basis.dimension}, norm={self.norm():.6f})"


def make_state(basis: FockBasis, terms: Iterable[tuple]) -> StateVector:
    """Normalized superposition from (occupation pair, amplitude) terms.

    Duplicate occupation pairs accumulate. Raises DegenerateStateError for an
    empty term list or one that sums to the zero vector, IndexError for an
    occupation pair outside the basis.
    """
    term_list = list(terms)
    if not term_list:
        raise DegenerateStateError("no amplitude terms given")
    vec = np.zeros(basis.dimension, dtype=np.complex128)
    for index, amp in term_list:
        vec[basis.index_of(index)] += complex(amp)
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise DegenerateStateError("amplitude terms sum to the zero vector")
    return StateVector(basis, vec / nrm)


def fock_state(basis: FockBasis, m1: int, m2: int) -> StateVector:
    """The basis state |m1, m2>."""
    return make_state(basis, [(FockIndex(m1, m2), 1.0)])


def populations(state: StateVector) -> dict[FockIndex, float]:
    """Occupation probabilities |c|^2 keyed by occupation pair, in basis order."""
    probs = np.abs(state.amplitudes) ** 2
    return {s: float(p) for s, p in zip(state.basis.states, probs)}


def _ladder_elements(basis: FockBasis, mode: int, kind: str):
    """Yield (row, col, value, kept) triplets of the single-mode ladder operator.

    kept is False for elements whose target exceeds the total-quanta cutoff;
    those are dropped by the truncation, not an error.
    """
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode!r}")
    if kind not in ("lowering", "raising"):
        raise ValueError(f"kind must be 'lowering' or 'raising', got {kind!r}")
    for col, (m1, m2) in enumerate(basis.states):
        m = m1 if mode == 1 else m2
        if kind == "lowering":
            if m == 0:
                continue  # annihilated, no matrix element
            target = (m1 - 1, m2) if mode == 1 else (m1, m2 - 1)
            value = np.sqrt(m)
        else:
            target = (m1 + 1, m2) if mode == 1 else (m1, m2 + 1)
            value = np.sqrt(m + 1)
        if target in basis:
            yield basis.index_of(target), col, value, True
        else:
            yield -1, col, value, False


def mode_operator_elements(basis: FockBasis, mode: int, kind: str) -> sp.csr_matrix:
    """Sparse ladder operator of one mode over flat indices.

    lowering: |m> -> sqrt(m) |m-1>; raising: |m> -> sqrt(m+1) |m+1>, identity
    on the other mode. Elements whose target exceeds the cutoff are dropped
    silently; truncation_drop_count reports how many.
    """
    rows, cols, vals = [], [], []
    for row, col, value, kept in _ladder_elements(basis, mode, kind):
        if kept:
            rows.append(row)
            cols.append(col)
            vals.append(value)
    dim = basis.dimension
    return sp.csr_matrix(
        (np.asarray(vals, dtype=np.complex128), (rows, cols)), shape=(dim, dim)
    )


def truncation_drop_count(basis: FockBasis, mode: int, kind: str) -> int:
    """Number of ladder matrix elements lost to the total-quanta cutoff.

    Diagnostic for detecting misuse: number-conserving dynamics never reaches
    the dropped rows, so a nonzero count only matters if the operator is used
    on its own.
    """
    return sum(1 for *_, kept in _ladder_elements(basis, mode, kind) if not kept)


class BlockOperator:
    """Block-diagonal operator: one dense matrix per fixed-N block.

    Block-diagonality is structural. The object has no storage that could
    couple different totals, so number conservation cannot be violated even
    numerically. Immutable after construction.
    """

    def __init__(self, basis: FockBasis, blocks, hermitian: bool = False):
        mats = []
        for total, mat in enumerate(blocks):
            arr = np.array(mat, dtype=np.complex128)
            size = total + 1
            if arr.shape != (size, size):
                raise ValueError(
                    f"block {total} has shape {arr.shape}, expected ({size}, {size})"
                )
            if hermitian:
                dev = float(np.max(np.abs(arr - arr.conj().T))) if size else 0.0
                if dev > HERMITIAN_TOL:
                    raise ValueError(
                        f"hermitian flag set but block {total} deviates from its "
                        f"adjoint by {dev:.3e}"
                    )
            mats.append(arr)
        if len(mats) != basis.n_max + 1:
            raise ValueError(
                f"expected {basis.n_max + 1} blocks, got {len(mats)}"
            )
        self.basis = basis
        self.blocks: tuple[np.ndarray, ...] = tuple(mats)
        self.hermitian = bool(hermitian)

    def block(self, total: int) -> np.ndarray:
        return self.blocks[total]

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Matrix-vector product over flat amplitudes, block by block."""
        vec = np.asarray(amplitudes, dtype=np.complex128)
        out = np.empty_like(vec)
        for total, mat in enumerate(self.blocks):
            sl = self.basis.block_slice(total)
            out[sl] = mat @ vec[sl]
        return out

    def apply_state(self, state: StateVector) -> StateVector:
        return StateVector(state.basis, self.apply(state.amplitudes))

    def dagger(self) -> "BlockOperator":
        return BlockOperator(
            self.basis,
            [m.conj().T for m in self.blocks],
            hermitian=self.hermitian,
        )

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        if other.basis is not self.basis and other.basis.n_max != self.basis.n_max:
            raise ValueError("operators act on different bases")
        return BlockOperator(
            self.basis,
            [a @ b for a, b in zip(self.blocks, other.blocks)],
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.basis.dimension,) * 2, dtype=np.complex128)
        for total, mat in enumerate(self.blocks):
            sl = self.basis.block_slice(total)
            dense[sl, sl] = mat
        return dense


@dataclass(frozen=True)
class HopOperator:
    """The excitation-hopping pair, kept as two separately weightable parts.

    forward moves one quantum from mode 2 to mode 1; backward is its adjoint.
    A complex coupling weights them as g * forward + conj(g) * backward.
    """

    forward: BlockOperator
    backward: BlockOperator

    def weighted(self, g: complex) -> BlockOperator:
        g = complex(g)
        blocks = [
            g * f + np.conj(g) * b
            for f, b in zip(self.forward.blocks, self.backward.blocks)
        ]
        return BlockOperator(self.forward.basis, blocks, hermitian=True)


def hop_operator(basis: FockBasis) -> HopOperator:
    """Single-quantum hop between the modes, block-diagonal by construction.

    Within the fixed-N block (states ordered by descending m1), the forward
    part connects neighbouring states with amplitude sqrt(m1 + 1) * sqrt(m2).
    """
    forward_blocks = []
    for total in range(basis.n_max + 1):
        size = total + 1
        mat = np.zeros((size, size), dtype=np.complex128)
        for j in range(1, size):
            # source (total - j, j) -> target (total - j + 1, j - 1)
            mat[j - 1, j] = np.sqrt((total - j + 1) * j)
        forward_blocks.append(mat)
    forward = BlockOperator(basis, forward_blocks)
    return HopOperator(forward=forward, backward=forward.dagger())
