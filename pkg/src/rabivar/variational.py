"""Closed-form trial-state energies, observables and stationarity residuals.

Single-packet trial state (parity-even):

    |psi_1> = (|+x> (x) |f(+beta)> - |-x> (x) |f(-beta)>) / sqrt(2),

with |f(b)> the squeezed packet displaced to b in the +x projection (see
:mod:`rabivar.states`).  Its energy is

    E_1(beta, xi) = omega (sinh^2 2xi + beta^2) - 2 beta alpha
                    - (delta/2 + 2 gamma beta eta^2) exp(-2 beta^2 eta^2).

Two-packet trial state.  Each spin projection carries a superposition of
two packets; the second branch is parameterized with reflected orientation
so that at a two-packet optimum both displacement parameters come out
positive:

    +x component:  c1 |f(-beta1)> + c2 |f(+beta2)>
    -x component:  c1 |f(+beta1)> + c2 |f(-beta2)>   (times -1 for even parity,
                                                      +1 for odd parity)

The parameterization is redundant under the exact branch relabeling
(c1, c2, beta1, beta2) -> (c2, c1, -beta2, -beta1) and under a global sign
flip of (c1, c2); energies are Rayleigh quotients, so (c1, c2) need not be
normalized.  All closed forms in this module are validated against explicit
Fock-space construction of the same states (the series oracle in
:mod:`rabivar.states`); the oracle is authoritative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateAnsatz, NotIsotropic
from .model import ModelParams, Truncation
from .states import displaced_squeezed_amplitudes

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class Ansatz1Params:
    """Single-packet parameters; xi = 0 gives the plain displaced packet."""

    beta: float
    xi: float = 0.0


@dataclass(frozen=True)
class Ansatz2Params:
    """Two-packet parameters: raw coefficients c1, c2, displacements, shared xi."""

    c1: float
    c2: float
    beta1: float
    beta2: float
    xi: float = 0.0

    @classmethod
    def from_theta(cls, theta: float, beta1: float, beta2: float, xi: float = 0.0):
        """Gauge-fixed coefficients c1 = cos(theta), c2 = sin(theta)."""
        return cls(math.cos(theta), math.sin(theta), beta1, beta2, xi)

    def relabeled(self) -> "Ansatz2Params":
        """The equivalent parameter set with the branches swapped."""
        return Ansatz2Params(self.c2, self.c1, -self.beta2, -self.beta1, self.xi)


class AnsatzKind(Enum):
    CS1 = "CS1"
    CSS1 = "CSS1"
    CS2 = "CS2"
    CSS2 = "CSS2"

    @property
    def two_branch(self) -> bool:
        return self in (AnsatzKind.CS2, AnsatzKind.CSS2)

    @property
    def squeezed(self) -> bool:
        return self in (AnsatzKind.CSS1, AnsatzKind.CSS2)


def _check_parity(parity: str) -> int:
    if parity == "even":
        return +1
    if parity == "odd":
        return -1
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def _pair_overlap(eta: float, d: float) -> float:
    """exp(-(eta d)^2 / 2) with underflow clamped to exactly zero."""
    if d == 0.0:
        return 1.0
    t = eta * d
    arg = 0.5 * t * t
    if arg > 745.0:
        return 0.0
    return math.exp(-arg)


def energy_1css(params: ModelParams, a: Ansatz1Params) -> float:
    """Energy of the single-packet trial state; xi = 0 gives the unsqueezed case."""
    sh = math.sinh(2.0 * a.xi)
    eta = math.exp(-2.0 * a.xi)
    eta2 = eta * eta
    o2 = _pair_overlap(eta, 2.0 * a.beta)
    e = params.omega * (sh * sh + a.beta**2) - 2.0 * a.beta * params.alpha
    e -= 0.5 * params.delta * o2
    if a.beta != 0.0 and o2 != 0.0:
        e -= 2.0 * params.gamma * a.beta * eta2 * o2
    return e


def mean_photon_1css(a: Ansatz1Params) -> float:
    """Mode occupation sinh^2(2 xi) + beta^2 of the single-packet state."""
    sh = math.sinh(2.0 * a.xi)
    return sh * sh + a.beta**2


def stationarity_residuals_iso(params: ModelParams, a: Ansatz1Params):
    """Stationarity residuals (r_xi, r_beta) of the isotropic single-packet energy.

    r_xi  = omega (e^{4xi} - e^{-4xi}) - 4 delta beta^2 e^{-4xi} e^{-2 beta^2 eta^2}
    r_beta = (omega beta - g) + delta beta e^{-4xi} e^{-2 beta^2 eta^2}

    Both vanish at interior minima; r_xi equals dE/dxi and r_beta equals
    dE/dbeta / 2.  Requires tau == 1.
    """
    if params.tau != 1.0:
        raise NotIsotropic(f"stationarity residuals require tau == 1, got {params.tau}")
    eta = math.exp(-2.0 * a.xi)
    em4 = eta * eta
    o2 = _pair_overlap(eta, 2.0 * a.beta)
    r_xi = params.omega * (math.exp(4.0 * a.xi) - em4) - 4.0 * params.delta * a.beta**2 * em4 * o2
    r_beta = (params.omega * a.beta - params.g) + params.delta * a.beta * em4 * o2
    return r_xi, r_beta


def asymptotic_params(params: ModelParams):
    """Large-detuning estimates (beta, xi) = (g/delta, ln(1 + 4g^2/(omega delta))/8).

    Stated for the isotropic case; used as optimizer seeds and for
    large-detuning consistency checks, never as results.
    """
    if params.delta <= 0.0:
        raise ValueError("asymptotic estimates require delta > 0")
    beta = params.g / params.delta
    xi = 0.125 * math.log1p(4.0 * params.g**2 / (params.omega * params.delta))
    return beta, xi


def _bilinear_parts(params: ModelParams, a: Ansatz2Params):
    """Diagonal/cross split of the four energy pieces and the squared norm.

    Returns (atom_d, atom_x, ph_d, ph_x, iso_d, iso_x, ani_d, ani_x, n_d, n_x)
    where *_d collects the c1^2/c2^2 terms and *_x the c1 c2 cross terms of
    <psi|.|psi> for the even combination; the odd combination flips the sign
    of the atom and ani pieces.
    """
    c1, c2, b1, b2 = a.c1, a.c2, a.beta1, a.beta2
    sh = math.sinh(2.0 * a.xi)
    ch = math.cosh(2.0 * a.xi)
    eta = math.exp(-2.0 * a.xi)
    eta2 = eta * eta
    o21 = _pair_overlap(eta, 2.0 * b1)
    o22 = _pair_overlap(eta, 2.0 * b2)
    om = _pair_overlap(eta, b1 - b2)
    op = _pair_overlap(eta, b1 + b2)
    c11, c22, c12 = c1 * c1, c2 * c2, c1 * c2

    atom_d = -params.delta * (c11 * o21 + c22 * o22)
    atom_x = -2.0 * params.delta * c12 * om

    ph_d = 2.0 * params.omega * (c11 * (sh * sh + b1 * b1) + c22 * (sh * sh + b2 * b2))
    ph_x = 0.0
    if op != 0.0:
        ph_x = 4.0 * params.omega * c12 * op * (sh * sh - b1 * b2 + sh * ch * eta2 * (b1 + b2) ** 2)

    iso_d = -4.0 * params.alpha * (c11 * b1 - c22 * b2)
    iso_x = -4.0 * params.alpha * c12 * op * (b1 - b2)

    ani_d = 0.0
    if params.gamma != 0.0:
        t1 = c11 * b1 * o21 if o21 != 0.0 else 0.0
        t2 = c22 * b2 * o22 if o22 != 0.0 else 0.0
        ani_d = -4.0 * params.gamma * eta2 * (t1 - t2)
    ani_x = 0.0
    if params.gamma != 0.0 and om != 0.0:
        ani_x = -4.0 * params.gamma * eta2 * c12 * (b1 - b2) * om

    n_d = 2.0 * (c11 + c22)
    n_x = 4.0 * c12 * op
    return atom_d, atom_x, ph_d, ph_x, iso_d, iso_x, ani_d, ani_x, n_d, n_x


def norm2_2css(a: Ansatz2Params) -> float:
    """Squared norm of the two-packet state, 2(c1^2 + c2^2 + 2 c1 c2 O+)."""
    eta = math.exp(-2.0 * a.xi)
    op = _pair_overlap(eta, a.beta1 + a.beta2)
    return 2.0 * (a.c1**2 + a.c2**2 + 2.0 * a.c1 * a.c2 * op)


def energy_2css(params: ModelParams, a: Ansatz2Params, parity: str = "even") -> float:
    """Rayleigh quotient of the two-packet trial state, either parity.

    Reduces exactly to :func:`energy_1css` at c2 = 0, c1 = 1/sqrt(2),
    beta1 = beta.  Raises DegenerateAnsatz when the squared norm falls
    below 1e-12 (near-cancelling superposition).
    """
    s = _check_parity(parity)
    atom_d, atom_x, ph_d, ph_x, iso_d, iso_x, ani_d, ani_x, n_d, n_x = _bilinear_parts(params, a)
    nrm = n_d + n_x
    if nrm < _NORM_FLOOR:
        raise DegenerateAnsatz(f"squared norm {nrm:.3e} below {_NORM_FLOOR:.0e}")
    num = s * (atom_d + atom_x) + ph_d + ph_x + iso_d + iso_x + s * (ani_d + ani_x)
    return num / nrm


def mean_photon_2css(a: Ansatz2Params) -> float:
    """Mode occupation of the two-packet state (parity independent)."""
    c1, c2, b1, b2 = a.c1, a.c2, a.beta1, a.beta2
    sh = math.sinh(2.0 * a.xi)
    ch = math.cosh(2.0 * a.xi)
    eta = math.exp(-2.0 * a.xi)
    eta2 = eta * eta
    op = _pair_overlap(eta, b1 + b2)
    nrm = 2.0 * (c1 * c1 + c2 * c2 + 2.0 * c1 * c2 * op)
    if nrm < _NORM_FLOOR:
        raise DegenerateAnsatz(f"squared norm {nrm:.3e} below {_NORM_FLOOR:.0e}")
    ph = 2.0 * (c1 * c1 * (sh * sh + b1 * b1) + c2 * c2 * (sh * sh + b2 * b2))
    if op != 0.0:
        ph += 4.0 * c1 * c2 * op * (sh * sh - b1 * b2 + sh * ch * eta2 * (b1 + b2) ** 2)
    return ph / nrm


def parity_splitting_2css(params: ModelParams, a: Ansatz2Params) -> float:
    """E_even(c1, c2, ...) - E_odd(c1, -c2, ...), evaluated in closed form.

    The two parity optima mirror each other through c2 -> -c2 up to terms
    suppressed by the inter-packet overlaps, so this difference at the even
    optimum tracks the level splitting without the catastrophic cancellation
    of subtracting two separately minimized energies.
    """
    atom_d, atom_x, ph_d, ph_x, iso_d, iso_x, ani_d, ani_x, n_d, n_x = _bilinear_parts(params, a)
    dsum = 2.0 * (atom_d + ph_x + iso_x + ani_d)
    ssum = 2.0 * (atom_x + ph_d + iso_d + ani_x)
    denom = n_d * n_d - n_x * n_x
    if denom < _NORM_FLOOR**2:
        raise DegenerateAnsatz(f"norm product {denom:.3e} below {_NORM_FLOOR**2:.0e}")
    return (dsum * n_d - ssum * n_x) / denom


def ansatz2_state_vector(a: Ansatz2Params, parity: str, trunc: Truncation) -> np.ndarray:
    """Explicit spin x Fock vector of the two-packet state (Fock oracle input).

    Spin-major flat layout matching :mod:`rabivar.fock`; the vector is not
    normalized (its squared norm approaches :func:`norm2_2css` as the
    truncation grows).
    """
    s = _check_parity(parity)
    u = a.c1 * displaced_squeezed_amplitudes(-a.beta1, a.xi, trunc)
    u = u + a.c2 * displaced_squeezed_amplitudes(+a.beta2, a.xi, trunc)
    v = a.c1 * displaced_squeezed_amplitudes(+a.beta1, a.xi, trunc)
    v = v + a.c2 * displaced_squeezed_amplitudes(-a.beta2, a.xi, trunc)
    rt = 1.0 / math.sqrt(2.0)
    up = rt * (u - s * v)
    down = rt * (u + s * v)
    return np.concatenate([up, down])


def ansatz1_state_vector(a: Ansatz1Params, trunc: Truncation) -> np.ndarray:
    """Explicit spin x Fock vector of the single-packet (parity-even) state."""
    two = Ansatz2Params(1.0 / math.sqrt(2.0), 0.0, a.beta, a.beta, a.xi)
    return ansatz2_state_vector(two, "even", trunc)
