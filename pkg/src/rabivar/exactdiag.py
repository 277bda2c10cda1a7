"""Dense-eigensolver oracle with adaptive truncation and parity-sector solves.

Eigenvectors are returned phase-fixed (largest-magnitude amplitude positive)
so repeated solves are reproducible.  Near-degenerate branches should be
tracked with :func:`solve_parity_sector` rather than by energy ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import TruncationNotConverged
from .fock import build_hamiltonian, parity_diag
from .model import ModelParams, Truncation

N_TR_CAP = 4096


@dataclass
class SpinFockVector:
    """Real state vector on the spin x Fock basis, spin-major ordering."""

    coeffs: np.ndarray
    n_tr: int

    @property
    def up(self) -> np.ndarray:
        return self.coeffs[: self.n_tr + 1]

    @property
    def down(self) -> np.ndarray:
        return self.coeffs[self.n_tr + 1 :]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass
class SpectrumResult:
    """Lowest eigenpairs plus the truncation actually used."""

    energies: list
    vectors: list
    n_tr_used: int
    tail_weight: float


def _phase_fix(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v if v[i] > 0 else -v


def _tail_weight(v: np.ndarray, n_tr: int) -> float:
    """Probability weight on the top five Fock levels, summed over spin."""
    dim = n_tr + 1
    top = min(5, dim)
    up = v[:dim]
    down = v[dim:]
    return float(np.sum(up[dim - top :] ** 2) + np.sum(down[dim - top :] ** 2))


def _solve_dense(h: np.ndarray, k: int):
    vals, vecs = scipy.linalg.eigh(h, subset_by_index=(0, k - 1))
    return vals, vecs


def solve_lowest(params: ModelParams, trunc: Truncation, k: int = 1) -> SpectrumResult:
    """k lowest eigenpairs of the truncated Hamiltonian.

    Doubles n_tr (up to 4096) until the ground vector carries less than
    tail_tol weight on the top five Fock levels; raises
    TruncationNotConverged if the cap is insufficient.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > 2 * trunc.dim:
        raise ValueError(f"k={k} exceeds basis dimension {2 * trunc.dim}")
    n_tr = trunc.n_tr
    while True:
        h = build_hamiltonian(params, Truncation(n_tr, trunc.tail_tol))
        vals, vecs = _solve_dense(h, k)
        tail = _tail_weight(vecs[:, 0], n_tr)
        if tail <= trunc.tail_tol:
            vectors = [SpinFockVector(_phase_fix(vecs[:, i]), n_tr) for i in range(k)]
            return SpectrumResult(list(map(float, vals)), vectors, n_tr, tail)
        if n_tr >= N_TR_CAP:
            raise TruncationNotConverged(
                f"tail weight {tail:.3e} > {trunc.tail_tol:.3e} at n_tr={n_tr}",
                n_tr=n_tr,
                tail_weight=tail,
            )
        n_tr = min(2 * n_tr if n_tr > 0 else 1, N_TR_CAP)


def solve_parity_sector(params: ModelParams, trunc: Truncation, parity: int, k: int = 1) -> SpectrumResult:
    """k lowest eigenpairs restricted to the parity = +-1 subspace.

    Returned vectors live on the full spin x Fock basis with zeros outside
    the sector, so downstream projections apply unchanged.
    """
    if parity not in (+1, -1):
        raise ValueError(f"parity must be +1 or -1, got {parity}")
    if k < 1:
        raise ValueError("k must be >= 1")
    n_tr = trunc.n_tr
    while True:
        t = Truncation(n_tr, trunc.tail_tol)
        h = build_hamiltonian(params, t)
        mask = parity_diag(t) == parity
        idx = np.flatnonzero(mask)
        if k > idx.size:
            raise ValueError(f"k={k} exceeds sector dimension {idx.size}")
        vals, vecs = _solve_dense(h[np.ix_(idx, idx)], k)
        full = np.zeros((h.shape[0], k))
        full[idx, :] = vecs
        tail = _tail_weight(full[:, 0], n_tr)
        if tail <= trunc.tail_tol:
            vectors = [SpinFockVector(_phase_fix(full[:, i]), n_tr) for i in range(k)]
            return SpectrumResult(list(map(float, vals)), vectors, n_tr, tail)
        if n_tr >= N_TR_CAP:
            raise TruncationNotConverged(
                f"tail weight {tail:.3e} > {trunc.tail_tol:.3e} at n_tr={n_tr}",
                n_tr=n_tr,
                tail_weight=tail,
            )
        n_tr = min(2 * n_tr if n_tr > 0 else 1, N_TR_CAP)


def spin_x_projection(v: SpinFockVector):
    """Coefficient lists (c_plus, c_minus) in the sigma_x eigenbasis.

    c_{n,+-} = (c_up(n) +- c_down(n)) / sqrt(2).
    """
    s = 1.0 / np.sqrt(2.0)
    return s * (v.up + v.down), s * (v.up - v.down)


def mean_photon_ed(v: SpinFockVector) -> float:
    """Mode-occupation expectation sum_n n (c_up(n)^2 + c_down(n)^2)."""
    n = np.arange(v.n_tr + 1)
    return float(np.dot(n, v.up**2) + np.dot(n, v.down**2))
