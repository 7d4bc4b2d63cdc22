import math

import numpy as np
import pytest
from scipy import special

from spinchain.errors import DomainError
from spinchain.mathieu import (
    characteristic_value,
    inplane_eigenstate,
    inplane_spectrum,
    mathieu_ce,
    mathieu_se,
    offplane_spectrum,
    offplane_wavefunction,
    solve,
    theta_from_field,
)
from spinchain.params import make_params
from spinchain.verify import fd_eigs_richardson, mathieu_residual


# --- characteristic values ------------------------------------------------------


def test_zero_parameter_is_exact():
    for nu in np.arange(0.0, 5.5, 0.5):
        assert characteristic_value(float(nu), 0.0) == float(nu) ** 2


def test_small_q_ground_branch():
    # a_0(q) = -q^2/2 + O(q^4)
    assert characteristic_value(0.0, 0.1) == pytest.approx(-0.005, abs=1e-5)


@pytest.mark.parametrize("q", [0.1, 1.0, 5.0, -0.0625, -3.0])
def test_integer_orders_match_scipy(q):
    for n in range(6):
        assert characteristic_value(n, q, "ce") == pytest.approx(
            special.mathieu_a(n, q), abs=1e-10
        )
        if n >= 1:
            assert characteristic_value(n, q, "se") == pytest.approx(
                special.mathieu_b(n, q), abs=1e-10
            )


def test_fractional_orders_match_fd_oracle():
    # for fractional nu the pi-antiperiodic (nu = 1/2) spectrum is reachable
    # by doubling the period: e^{i x/2} p(x) lives on [0, 4 pi); compare via
    # the ODE residual instead, which is basis independent
    rec = solve(0.5, 1.0)
    assert mathieu_residual(rec).max_rel < 1e-10
    rec = solve(2.5, -0.7, "se")
    assert mathieu_residual(rec).max_rel < 1e-10


def test_continuity_in_q():
    delta = 1e-6
    for nu in (0.5, 1.0, 2.5):
        for q in (0.5, 1.0, 5.0):
            a0 = characteristic_value(nu, q)
            a1 = characteristic_value(nu, q + delta)
            assert abs(a1 - a0) < 10.0 * delta


def test_branch_values_are_deterministic():
    assert characteristic_value(1.5, 2.0) == characteristic_value(1.5, 2.0)


def test_truncation_growth_has_converged():
    from spinchain.mathieu import _fractional_branch, _integer_branch

    rec = solve(2.0, 5.0, "ce")
    n_used = rec.problem.truncation
    a_doubled, _, _ = _integer_branch(2, 5.0, "ce", 2 * n_used)
    assert abs(rec.a_nu - a_doubled) < 1e-12

    rec = solve(1.5, 3.0)
    half_width = (rec.problem.truncation - 1) // 2
    a_doubled, _, _ = _fractional_branch(1.5, 3.0, 2 * half_width)
    assert abs(rec.a_nu - a_doubled) < 1e-12


def test_interlacing_at_positive_q():
    q = 1.0
    a0 = characteristic_value(0, q)
    b1 = characteristic_value(1, q, "se")
    a1 = characteristic_value(1, q, "ce")
    b2 = characteristic_value(2, q, "se")
    a2 = characteristic_value(2, q, "ce")
    assert a0 < b1 < a1 < b2 < a2


def test_invalid_orders_rejected():
    with pytest.raises(DomainError):
        characteristic_value(-1.0, 0.0)
    with pytest.raises(DomainError):
        characteristic_value(0.0, 1.0, "se")
    with pytest.raises(DomainError):
        characteristic_value(1.0, 1.0, "foo")
    with pytest.raises(DomainError):
        characteristic_value(float("nan"), 1.0)


# --- eigenfunctions -------------------------------------------------------------


def test_trig_reduction_at_zero_q():
    for x in (0.0, 0.3, 1.7):
        assert mathieu_ce(2.0, 0.0, x) == pytest.approx(math.cos(2 * x), abs=1e-12)
        assert mathieu_se(1.0, 0.0, x) == pytest.approx(math.sin(x), abs=1e-12)
        assert mathieu_ce(0.5, 0.0, x) == pytest.approx(math.cos(0.5 * x), abs=1e-12)
    assert mathieu_se(1.0, 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-15)


def test_eigenfunction_satisfies_ode():
    rec = solve(1.0, 1.0, "ce")
    assert mathieu_residual(rec).max_rel < 1e-8


def test_coefficients_are_normalized_with_positive_principal():
    rec = solve(3.0, 2.5, "ce")
    assert np.linalg.norm(rec.fourier_coeffs) == pytest.approx(1.0, abs=1e-12)
    principal = int(np.argmin(np.abs(rec.frequencies - 3.0)))
    assert rec.fourier_coeffs[principal] > 0


# --- spectra ---------------------------------------------------------------------


def test_offplane_zero_anisotropy_ladder():
    params = make_params(A=0.0)
    spec = offplane_spectrum(params, range(4))
    for n, e in spec:
        assert e == 2.0 * n**2


def test_offplane_reference_value():
    # frozen from the handbook branch: -0.25 + 2 a_1(-1/16)
    params = make_params(A=2.0)
    (nu, e), = offplane_spectrum(params, [1.0])
    assert e == pytest.approx(1.6240310464670336, abs=1e-10)


def test_offplane_matches_fd_oracle():
    params = make_params(A=2.0)
    q = params.q_offplane
    fd = fd_eigs_richardson(q, 2048, 6)
    engine = [e for _, e in offplane_spectrum(params, [0, 1, 2], "ce")]
    engine += [e for _, e in offplane_spectrum(params, [1, 2], "se")]
    engine = sorted(engine)[:4]
    fd_energies = [2.0 * params.hbar**2 * a - params.A / 8.0 for a in fd[:4]]
    for e_engine, e_fd in zip(engine, fd_energies):
        assert abs(e_engine - e_fd) < 1e-6


def test_inplane_zero_field_ladder_is_exact():
    params = make_params(A=0.0, B=0.0)
    spec = inplane_spectrum(params, range(6))
    assert [e for _, e in spec] == [0.0, 0.5, 2.0, 4.5, 8.0, 12.5]


def test_inplane_with_field():
    # frozen: (1/2) a_1(1/4)
    params = make_params(A=0.0, B=1.0)
    (_, e), = inplane_spectrum(params, [1.0])
    assert e == pytest.approx(0.6209705641214576, abs=1e-10)


# --- coordinate maps -------------------------------------------------------------


def test_theta_map_reference_points():
    assert theta_from_field(0.0) == pytest.approx(math.pi, abs=1e-15)
    assert theta_from_field(1.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert theta_from_field(1e12) < 1e-11  # P -> +inf pushes theta -> 0+
    assert theta_from_field(-1e12) == pytest.approx(2 * math.pi, abs=1e-11)


def test_offplane_wavefunction_uses_theta_map():
    rec = solve(1.0, -0.0625, "ce")
    assert offplane_wavefunction(rec, 0.0) == pytest.approx(float(rec(math.pi)), abs=1e-15)
    assert offplane_wavefunction(rec, 1.0) == pytest.approx(float(rec(math.pi / 2)), abs=1e-15)


def test_inplane_eigenstate_values():
    params = make_params(A=0.0, B=0.0)
    assert inplane_eigenstate(0, 0.3, -0.2, 5.0, params) == pytest.approx(1.0 + 0.0j)
    assert inplane_eigenstate(1, 1.0, 0.0, 0.0, params) == pytest.approx(1.0 + 0.0j)
    # phase advances with z at E_n = hbar^2 n^2 / 2
    val = inplane_eigenstate(2, 1.0, 0.0, 1.0, params)
    assert val == pytest.approx(complex(math.cos(2.0), math.sin(2.0)), abs=1e-15)


def test_inplane_eigenstate_circle_parametrization():
    params = make_params(A=0.0, B=0.0)
    n = 2
    for phi in np.linspace(-0.7, 0.7, 11):
        p, q = math.cos(2 * phi), math.sin(2 * phi)
        val = inplane_eigenstate(n, p, q, 0.0, params)
        assert val.real == pytest.approx(math.cos(n * phi), abs=1e-12)


def test_inplane_eigenstate_domain_errors():
    params = make_params(A=0.0, B=0.0)
    with pytest.raises(DomainError):
        inplane_eigenstate(1, 0.0, 0.0, 0.0, params)
    with pytest.raises(DomainError):
        inplane_eigenstate(-1, 1.0, 0.0, 0.0, params)
    with pytest.raises(DomainError):
        inplane_eigenstate(1, 1.0, 0.0, 0.0, make_params(A=0.0, B=0.5))
