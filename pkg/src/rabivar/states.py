"""Coherent-squeezed-state amplitudes, overlaps and position-space profiles.

Conventions.  The displacement operator is U(b) = exp(b(a^dag - a)) and the
squeeze operator is S(xi) = exp(xi(a^2 - a^dag^2)), both with real
parameters.  The packet used throughout is

    |f(beta, xi)> = U(beta)^dag S(xi)^dag |0>,

i.e. the vacuum is squeezed first and displaced second.  Its width factor is
eta = cosh(2 xi) - sinh(2 xi) = exp(-2 xi): position variance grows as
eta^{-2} while the displaced-state overlap narrows as

    <f(b, xi)| f(b', xi)> = exp(-eta^2 (b - b')^2 / 2).

The amplitudes produced by the series constructor here are the numerical
oracle against which every closed form in :mod:`rabivar.variational` is
checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationNotConverged
from .model import Truncation

_TERM_TOL = 1e-16
_MAX_TERMS = 200


@dataclass(frozen=True)
class CoherentSqueezedParams:
    """Displacement beta and squeezing xi of a single packet."""

    beta: float
    xi: float = 0.0

    @property
    def eta(self) -> float:
        """Width factor cosh(2 xi) - sinh(2 xi) = exp(-2 xi)."""
        return math.exp(-2.0 * self.xi)


@dataclass
class WavefunctionProfile:
    """Sampled spin-projected wavefunctions and their peak structure."""

    xs: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    peaks_plus: int
    peaks_minus: int

    def norm(self) -> float:
        return float(
            np.trapezoid(self.phi_plus**2 + self.phi_minus**2, self.xs)
        )


def hermite_osc_wavefunction(n: int, x, omega: float = 1.0):
    """Normalized oscillator eigenfunction <x|n> for mode frequency omega.

    Uses the stable recurrence for orthonormal Hermite functions; raw
    Hermite polynomials overflow near n ~ 300 and are never formed.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    y = np.sqrt(omega) * x
    psi_prev = omega**0.25 * np.pi**-0.25 * np.exp(-0.5 * y * y)
    if n == 0:
        return psi_prev
    psi = np.sqrt(2.0) * y * psi_prev
    for k in range(1, n):
        psi, psi_prev = (
            np.sqrt(2.0 / (k + 1.0)) * y * psi - np.sqrt(k / (k + 1.0)) * psi_prev,
            psi,
        )
    return psi


def oscillator_wavefunctions(n_max: int, x, omega: float = 1.0) -> np.ndarray:
    """Matrix psi[n, j] = <x_j|n> for n = 0..n_max, by the same recurrence."""
    x = np.asarray(x, dtype=float)
    y = np.sqrt(omega) * x
    out = np.empty((n_max + 1, x.size))
    out[0] = omega**0.25 * np.pi**-0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * y * out[0]
    for k in range(1, n_max):
        out[k + 1] = np.sqrt(2.0 / (k + 1.0)) * y * out[k] - np.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def count_peaks(density: np.ndarray, floor_frac: float = 0.02) -> int:
    """Strict local maxima of a sampled density above floor_frac of its max.

    The default floor separates genuine secondary packets (tens of percent
    of the main peak in the delocalized regime) from the percent-level
    remnant the main packet leaves behind once it has split off, as well as
    from grid-scale ripple.
    """
    if density.size < 3:
        return 0
    top = float(np.max(density))
    if top <= 0.0:
        return 0
    inner = density[1:-1]
    hits = (inner > density[:-2]) & (inner > density[2:]) & (inner >= floor_frac * top)
    return int(np.count_nonzero(hits))


def position_profile(c_plus, c_minus, xs, omega: float = 1.0) -> WavefunctionProfile:
    """Sampled phi_{+x}, phi_{-x} from sigma_x-basis Fock coefficients.

    phi_{+-x}(x) = sum_n c_{n,+-} <x|n>; peaks are counted on |phi|^2 with a
    2% floor relative to each profile's own maximum.
    """
    c_plus = np.asarray(c_plus, dtype=float)
    c_minus = np.asarray(c_minus, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n_max = max(c_plus.size, c_minus.size) - 1
    basis = oscillator_wavefunctions(n_max, xs, omega)
    phi_p = c_plus @ basis[: c_plus.size]
    phi_m = c_minus @ basis[: c_minus.size]
    return WavefunctionProfile(
        xs=xs,
        phi_plus=phi_p,
        phi_minus=phi_m,
        peaks_plus=count_peaks(phi_p**2),
        peaks_minus=count_peaks(phi_m**2),
    )


def _apply_ladder_down(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    rt = np.sqrt(np.arange(1.0, v.size))
    out[:-1] = rt * v[1:]
    return out


def _apply_ladder_up(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    rt = np.sqrt(np.arange(1.0, v.size))
    out[1:] = rt * v[:-1]
    return out


def _apply_exp_series(apply_op, v: np.ndarray, norm_est: float) -> np.ndarray:
    """exp(A) v by scaled Taylor series with term-norm cutoff.

    apply_op computes A u; norm_est bounds ||A|| so the scaled series has
    terms bounded by 1/k! and converges fast.
    """
    steps = 1
    if norm_est > 1.0:
        steps = 1 << max(0, math.ceil(math.log2(norm_est)))
    w = v.astype(float, copy=True)
    for _ in range(steps):
        term = w.copy()
        acc = w.copy()
        for k in range(1, _MAX_TERMS):
            term = apply_op(term) / (k * steps)
            acc += term
            if np.linalg.norm(term) < _TERM_TOL:
                break
        else:
            raise RuntimeError("exponential series failed to converge")
        w = acc
    return w


def _apply_displacement(v: np.ndarray, c: float) -> np.ndarray:
    """exp(c (a^dag - a)) v."""
    if c == 0.0:
        return v.copy()
    op = lambda u: c * (_apply_ladder_up(u) - _apply_ladder_down(u))
    return _apply_exp_series(op, v, abs(c) * 2.0 * math.sqrt(v.size))


def _apply_squeeze(v: np.ndarray, c: float) -> np.ndarray:
    """exp(c (a^dag^2 - a^2)) v."""
    if c == 0.0:
        return v.copy()

    def op(u):
        return c * (
            _apply_ladder_up(_apply_ladder_up(u)) - _apply_ladder_down(_apply_ladder_down(u))
        )

    return _apply_exp_series(op, v, abs(c) * 2.0 * v.size)


def displaced_squeezed_amplitudes(displacement: float, xi: float, trunc: Truncation) -> np.ndarray:
    """Normalized Fock amplitudes of exp(b(a^dag-a)) exp(xi(a^dag^2-a^2)) |0>.

    The exponentials act on the vacuum vector through scaled Taylor series.
    Truncation inadequacy shows up either as a norm deficit or, because the
    truncated generators stay antisymmetric and their exponentials
    orthogonal, as weight piled against the cutoff; both diagnostics are
    held below trunc.tail_tol or TruncationNotConverged is raised.
    """
    v = np.zeros(trunc.dim)
    v[0] = 1.0
    v = _apply_squeeze(v, xi)
    v = _apply_displacement(v, displacement)
    nrm = float(np.linalg.norm(v))
    top = min(5, trunc.dim)
    deficit = max(abs(1.0 - nrm), float(np.sum(v[trunc.dim - top :] ** 2)) / nrm**2)
    if deficit > trunc.tail_tol:
        raise TruncationNotConverged(
            f"tail weight {deficit:.3e} > {trunc.tail_tol:.3e} at n_tr={trunc.n_tr}",
            n_tr=trunc.n_tr,
            tail_weight=deficit,
        )
    return v / nrm


def css_fock_amplitudes(p: CoherentSqueezedParams, trunc: Truncation) -> np.ndarray:
    """Fock amplitudes of the packet U(beta)^dag S(xi)^dag |0>.

    U(beta)^dag displaces by -beta and S(xi)^dag squeezes with the sign that
    makes the position variance grow as exp(4 xi).
    """
    return displaced_squeezed_amplitudes(-p.beta, p.xi, trunc)


def overlap_css(beta_k: float, beta_kp: float, xi: float, sign: int = +1) -> float:
    """Overlap of two equally squeezed packets, exp(-eta^2 (b_k -+ b_k')^2 / 2).

    sign=+1 pairs equally oriented displacements (difference enters);
    sign=-1 pairs opposite orientations (sum enters).  Symmetric in the two
    displacements and contained in (0, 1].
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    eta = math.exp(-2.0 * xi)
    d = beta_k - sign * beta_kp
    if d == 0.0:
        return 1.0
    return math.exp(-0.5 * (eta * d) ** 2)


def gaussian_packet_profile(xs, displacement: float, xi: float, omega: float = 1.0) -> np.ndarray:
    """Position amplitude of exp(b(a^dag-a)) S(xi)^dag |0>: a Gaussian of
    width eta^{-1}/sqrt(omega) centered at b sqrt(2/omega)."""
    xs = np.asarray(xs, dtype=float)
    eta2 = math.exp(-4.0 * xi)
    x0 = displacement * math.sqrt(2.0 / omega)
    return (omega * eta2 / np.pi) ** 0.25 * np.exp(-0.5 * omega * eta2 * (xs - x0) ** 2)
