import math

import numpy as np
import pytest

import rabivar.exactdiag as ed
from rabivar import (
    ModelParams,
    SpinFockVector,
    Truncation,
    TruncationNotConverged,
    build_hamiltonian,
    mean_photon_ed,
    solve_lowest,
    solve_parity_sector,
    spin_x_projection,
)


def jaynes_cummings_ground(delta, omega, g, n_max=2000):
    """Closed-form ground energy of the pure excitation-conserving model.

    Sector n >= 1 spans {|up, n-1>, |down, n>} with lower eigenvalue
    omega (n - 1/2) - sqrt((delta - omega)^2 / 4 + g^2 n); the vacuum
    candidate is -delta/2.
    """
    best = -0.5 * delta
    for n in range(1, n_max + 1):
        e = omega * (n - 0.5) - math.sqrt(0.25 * (delta - omega) ** 2 + g * g * n)
        best = min(best, e)
    return best


def test_decoupled_ground_state():
    res = solve_lowest(ModelParams(delta=1.0, g=0.0), Truncation(16), k=1)
    assert res.energies[0] == pytest.approx(-0.5, abs=1e-14)
    v = res.vectors[0]
    expected = np.zeros(2 * (res.n_tr_used + 1))
    expected[res.n_tr_used + 1] = 1.0  # |down, 0>
    assert np.allclose(v.coeffs, expected, atol=1e-12)


@pytest.mark.parametrize("g", [0.2, 0.7, 1.2])
def test_pure_rotating_wave_matches_closed_form(g):
    mp = ModelParams(delta=1.0, omega=1.0, g=g, tau=0.0)
    res = solve_lowest(mp, Truncation(64))
    assert res.energies[0] == pytest.approx(jaynes_cummings_ground(1.0, 1.0, g), abs=1e-10)


def test_truncation_self_consistency():
    mp = ModelParams.from_lambda(100.0, 1.1, 1.0, 1.0)
    e1 = solve_lowest(mp, Truncation(128)).energies[0]
    e2 = solve_lowest(mp, Truncation(256)).energies[0]
    assert abs(e1 - e2) <= 1e-10 * abs(e1)


def test_adaptive_truncation_grows():
    mp = ModelParams.from_lambda(100.0, 1.2, 1.0, 1.0)
    res = solve_lowest(mp, Truncation(8))
    assert res.n_tr_used > 8
    assert res.tail_weight <= 1e-12


def test_truncation_cap_raises(monkeypatch):
    monkeypatch.setattr(ed, "N_TR_CAP", 32)
    mp = ModelParams.from_lambda(100.0, 1.4, 1.0, 1.0)
    with pytest.raises(TruncationNotConverged):
        solve_lowest(mp, Truncation(8))


def test_sector_union_matches_full_spectrum():
    rng = np.random.default_rng(11)
    k = 8
    for _ in range(10):
        mp = ModelParams(
            delta=rng.uniform(0.2, 3.0),
            omega=1.0,
            g=rng.uniform(0.0, 1.0),
            tau=float(rng.choice([0.5, 1.0, 1.5])),
        )
        tr = Truncation(40, tail_tol=1e-6)
        full = solve_lowest(mp, tr, k=k)
        even = solve_parity_sector(mp, tr, +1, k=k)
        odd = solve_parity_sector(mp, tr, -1, k=k)
        merged = sorted(even.energies + odd.energies)[:k]
        assert np.allclose(merged, full.energies, atol=1e-10)


def test_eigenpair_residuals():
    mp = ModelParams(delta=2.0, omega=1.0, g=0.8, tau=1.5)
    tr = Truncation(48, tail_tol=1e-8)
    res = solve_lowest(mp, tr, k=3)
    h = build_hamiltonian(mp, Truncation(res.n_tr_used))
    bound = 1e-10 * np.max(np.abs(h))
    for e, v in zip(res.energies, res.vectors):
        assert np.linalg.norm(h @ v.coeffs - e * v.coeffs) <= bound
        assert abs(v.norm() - 1.0) <= 1e-12


def test_phase_fixing_sign():
    res = solve_lowest(ModelParams(delta=1.0, g=0.4), Truncation(24))
    v = res.vectors[0].coeffs
    assert v[np.argmax(np.abs(v))] > 0


def test_k_validation():
    with pytest.raises(ValueError):
        solve_lowest(ModelParams(delta=1.0), Truncation(4), k=0)
    with pytest.raises(ValueError):
        solve_lowest(ModelParams(delta=1.0), Truncation(4), k=11)
    with pytest.raises(ValueError):
        solve_parity_sector(ModelParams(delta=1.0), Truncation(4), parity=0)


def test_decoupled_parity_sectors():
    mp = ModelParams(delta=1.0, omega=1.3, g=0.0)
    tr = Truncation(16)
    even = solve_parity_sector(mp, tr, +1)
    odd = solve_parity_sector(mp, tr, -1)
    assert even.energies[0] == pytest.approx(-0.5, abs=1e-13)
    assert odd.energies[0] == pytest.approx(min(0.5, 1.3 - 0.5), abs=1e-13)


def test_odd_sector_dives_below_even_beyond_crossing():
    # Resolvable detuning: the sector gap at the crossing scale exceeds
    # eigensolver noise, unlike the deep two-packet regime.
    mp0 = ModelParams(delta=8.0, tau=0.5, g=1.0)
    g = 1.05 * mp0.g_c1
    mp = ModelParams(delta=8.0, tau=0.5, g=g)
    tr = Truncation(96)
    even = solve_parity_sector(mp, tr, +1)
    odd = solve_parity_sector(mp, tr, -1)
    assert odd.energies[0] < even.energies[0]


def test_spin_x_projection_basis_change():
    v = SpinFockVector(np.array([0.0, 0.0, 1.0, 0.0]), 1)  # |down, 0>
    c_plus, c_minus = spin_x_projection(v)
    assert c_plus[0] == pytest.approx(1 / math.sqrt(2))
    assert c_minus[0] == pytest.approx(-1 / math.sqrt(2))
    s = 1 / math.sqrt(2)
    v2 = SpinFockVector(np.array([s, 0.0, s, 0.0]), 1)  # |+x> (x) |0>
    c_plus, c_minus = spin_x_projection(v2)
    assert c_plus[0] == pytest.approx(1.0)
    assert abs(c_minus[0]) <= 1e-15


def test_spin_x_projection_preserves_norm():
    rng = np.random.default_rng(5)
    v = rng.normal(size=18)
    v /= np.linalg.norm(v)
    c_plus, c_minus = spin_x_projection(SpinFockVector(v, 8))
    assert np.sum(c_plus**2) + np.sum(c_minus**2) == pytest.approx(1.0, abs=1e-12)


def test_even_sector_projection_parity_pattern():
    mp = ModelParams.from_lambda(100.0, 1.1, 1.0, 1.0)
    res = solve_parity_sector(mp, Truncation(256), +1)
    c_plus, c_minus = spin_x_projection(res.vectors[0])
    n = np.arange(res.n_tr_used + 1)
    assert np.max(np.abs(c_minus - (-1.0) ** (n + 1) * c_plus)) <= 1e-12


def test_mean_photon_fock_states():
    v0 = SpinFockVector(np.array([0.0, 0, 0, 0, 1.0, 0, 0, 0]), 3)  # |down, 0>
    assert mean_photon_ed(v0) == 0.0
    v3 = SpinFockVector(np.array([0.0, 0, 0, 0, 0, 0, 0, 1.0]), 3)  # |down, 3>
    assert mean_photon_ed(v3) == 3.0


def test_mean_photon_matches_packet_estimate():
    from rabivar import AnsatzKind, mean_photon_2css, solve_ansatz

    mp = ModelParams.from_lambda(100.0, 1.5, 1.0, 1.0)
    res = solve_lowest(mp, Truncation(256))
    n_ed = mean_photon_ed(res.vectors[0])
    fit = solve_ansatz(mp, AnsatzKind.CSS2)
    assert abs(mean_photon_2css(fit.params) - n_ed) <= 0.1 * n_ed
