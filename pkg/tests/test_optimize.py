import math

import numpy as np
import pytest

from rabivar import (
    AnsatzKind,
    ModelParams,
    NoConvergence,
    minimize_scalar_field,
    solve_ansatz,
    stationarity_residuals_iso,
)
from rabivar.optimize import canonicalize_2css
from rabivar.variational import Ansatz2Params


def test_quadratic_minimum():
    x, f, tried, grad = minimize_scalar_field(lambda x: (x[0] - 2.0) ** 2, [(0.0,)])
    assert abs(x[0] - 2.0) <= 1e-8
    assert f <= 1e-15
    assert tried == 1


def test_rosenbrock_minimum():
    def rosen(x):
        return (x[0] - 1.0) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2

    x, f, _, grad = minimize_scalar_field(rosen, [(-1.0, 1.0)])
    assert np.max(np.abs(x - 1.0)) <= 1e-6
    assert grad <= 1e-5


def test_no_convergence_carries_best():
    def rosen(x):
        return (x[0] - 1.0) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2

    with pytest.raises(NoConvergence) as exc:
        minimize_scalar_field(rosen, [(-1.5, 2.0)], max_evals=10)
    assert exc.value.best is not None


def test_end_to_end_squeezed_single_packet():
    mp = ModelParams.from_lambda(100.0, 0.5, 1.0, 1.0)
    r = solve_ansatz(mp, AnsatzKind.CSS1)
    assert r.converged and r.grad_norm < 1e-5
    r_xi, r_beta = stationarity_residuals_iso(mp, r.params)
    assert abs(r_xi) < 1e-6 and abs(r_beta) < 1e-6


@pytest.mark.parametrize("kind", list(AnsatzKind))
def test_decoupled_limit(kind):
    mp = ModelParams(delta=3.0, omega=1.0, g=0.0, tau=1.0)
    r = solve_ansatz(mp, kind)
    assert r.energy == pytest.approx(-1.5, abs=1e-9)
    beta = r.params.beta if not kind.two_branch else r.params.beta1
    assert abs(beta) <= 1e-5


def test_squeezing_strictly_improves_near_threshold():
    mp = ModelParams.from_lambda(100.0, 1.0, 1.0, 1.5)
    e_cs1 = solve_ansatz(mp, AnsatzKind.CS1).energy
    e_css1 = solve_ansatz(mp, AnsatzKind.CSS1).energy
    assert e_css1 < e_cs1


def test_family_nesting_single_point():
    mp = ModelParams.from_lambda(100.0, 1.1, 1.0, 1.0)
    e = {k: solve_ansatz(mp, k).energy for k in AnsatzKind}
    slack = 1e-8 * max(1.0, abs(e[AnsatzKind.CSS2]))
    assert e[AnsatzKind.CSS2] <= e[AnsatzKind.CSS1] + slack
    assert e[AnsatzKind.CSS1] <= e[AnsatzKind.CS1] + slack
    assert e[AnsatzKind.CSS2] <= e[AnsatzKind.CS2] + slack


def test_determinism():
    mp = ModelParams.from_lambda(50.0, 1.05, 1.0, 1.0)
    r1 = solve_ansatz(mp, AnsatzKind.CSS2)
    r2 = solve_ansatz(mp, AnsatzKind.CSS2)
    assert r1.energy == r2.energy
    assert r1.params == r2.params
    assert r1.grad_norm == r2.grad_norm


def test_warm_start_never_hurts():
    mp_prev = ModelParams.from_lambda(100.0, 1.18, 1.0, 1.0)
    mp = ModelParams.from_lambda(100.0, 1.2, 1.0, 1.0)
    cold = solve_ansatz(mp, AnsatzKind.CSS2)
    warm = solve_ansatz(mp, AnsatzKind.CSS2, warm=solve_ansatz(mp_prev, AnsatzKind.CSS2).params)
    assert warm.energy <= cold.energy + 1e-10 * max(1.0, abs(cold.energy))


def test_odd_parity_needs_two_packets():
    mp = ModelParams(delta=2.0, g=0.3)
    with pytest.raises(ValueError):
        solve_ansatz(mp, AnsatzKind.CSS1, parity="odd")


def test_structure_selection_below_and_above_threshold():
    below = solve_ansatz(ModelParams.from_lambda(100.0, 0.8, 1.0, 1.0), AnsatzKind.CSS2)
    assert below.reduced and below.params.c2 == 0.0 and below.params.beta1 == below.params.beta2
    above = solve_ansatz(ModelParams.from_lambda(100.0, 1.2, 1.0, 1.0), AnsatzKind.CSS2)
    assert not above.reduced and above.params.c2 > 0.1
    assert above.params.beta1 >= above.params.beta2 > 0.0


def test_canonical_representative_is_gauge_fixed():
    a = Ansatz2Params.from_theta(0.4, 3.0, 2.5, 0.1)
    assert canonicalize_2css(a) == canonicalize_2css(a.relabeled())
    neg = Ansatz2Params(-a.c1, -a.c2, a.beta1, a.beta2, a.xi)
    assert canonicalize_2css(a) == canonicalize_2css(neg)
    c = canonicalize_2css(a)
    assert c.beta1 + c.beta2 >= 0.0
    assert c.c1 > 0.0


def test_string_kind_accepted():
    mp = ModelParams(delta=2.0, g=0.2)
    r = solve_ansatz(mp, "CS1")
    assert r.kind is AnsatzKind.CS1
