"""Truncated ladder/spin operators and the model Hamiltonian as dense arrays.

Basis ordering is spin-major: index = s*(n_tr+1) + n with s=0 the spin-up
block (sigma_z eigenvalue +1) and s=1 the spin-down block, Fock index n
ascending.  Spin conventions: sigma_z|up> = +|up>, sigma_x|up> = |down>,
|+-x> = (|up> +- |down>)/sqrt(2).  With these choices every matrix built
here is real symmetric.
"""

from __future__ import annotations

import numpy as np

from .model import ModelParams, Truncation

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
I_SIGMA_Y = np.array([[0.0, 1.0], [-1.0, 0.0]])  # sigma_z @ sigma_x
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # |up><down|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |down><up|


def boson_ops(trunc: Truncation):
    """Annihilation, creation and number operators on Fock levels 0..n_tr.

    a[n-1, n] = sqrt(n); creation is the transpose; number is diagonal.
    """
    dim = trunc.dim
    a = np.zeros((dim, dim))
    if dim > 1:
        rt = np.sqrt(np.arange(1.0, dim))
        a[np.arange(dim - 1), np.arange(1, dim)] = rt
    return a, a.T.copy(), np.diag(np.arange(dim, dtype=float))


def build_hamiltonian(params: ModelParams, trunc: Truncation, form: str = "ladder") -> np.ndarray:
    """Dense symmetric Hamiltonian on the spin x Fock basis, size 2(n_tr+1).

    form="ladder" assembles g(a^dag sigma_- + a sigma_+) + g tau (a^dag sigma_+ + a sigma_-);
    form="quadrature" assembles the equivalent alpha (a^dag + a) sigma_x
    + gamma (a^dag - a) i sigma_y.  Both produce the identical matrix.
    """
    a, adag, num = boson_ops(trunc)
    dim = trunc.dim
    h = 0.5 * params.delta * np.kron(SIGMA_Z, np.eye(dim))
    h += params.omega * np.kron(np.eye(2), num)
    if form == "ladder":
        h += params.g * (np.kron(SIGMA_MINUS, adag) + np.kron(SIGMA_PLUS, a))
        h += params.g * params.tau * (np.kron(SIGMA_PLUS, adag) + np.kron(SIGMA_MINUS, a))
    elif form == "quadrature":
        h += params.alpha * np.kron(SIGMA_X, adag + a)
        h += params.gamma * np.kron(I_SIGMA_Y, adag - a)
    else:
        raise ValueError(f"unknown form {form!r}")
    return h


def parity_diag(trunc: Truncation) -> np.ndarray:
    """Diagonal of the parity operator on the spin x Fock basis.

    The entry is (-1)^(n+1) for |up, n> and (-1)^n for |down, n>; the
    operator exponentiates the total excitation number a^dag a + sigma_z/2 + 1/2.
    """
    n = np.arange(trunc.dim)
    even = 1 - 2 * (n % 2)  # (-1)^n
    return np.concatenate([-even, even]).astype(float)
