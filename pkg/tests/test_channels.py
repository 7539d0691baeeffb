import math

import numpy as np
import pytest

from cloaksteer import channels, qops
from cloaksteer.channels import Chain, Dephasing, ExchangeCoupling, Identity, IntegratorConfig, Unitary

UP = qops.ket_to_dm([1, 0])
DOWN = qops.ket_to_dm([0, 1])
PLUS = qops.ket_to_dm([1, 1])


def random_spec(rng):
    kind = rng.integers(4)
    if kind == 0:
        return Identity()
    if kind == 1:
        return Dephasing(float(rng.uniform(0, 3)))
    if kind == 2:
        return ExchangeCoupling(float(rng.uniform(0, 3)), qops.random_density(rng))
    return Chain((Unitary(qops.random_unitary(rng)), Dephasing(float(rng.uniform(0, 3)))))


def test_identity_leaves_state():
    rng = np.random.default_rng(0)
    rho = qops.random_density(rng)
    np.testing.assert_array_equal(channels.apply(Identity(), rho, 4.0), rho)


def test_dephasing_ln2():
    g = 0.9
    out = channels.apply(Dephasing(g), PLUS, math.log(2) / g)
    assert out[0, 1] == pytest.approx(0.25, abs=1e-15)
    assert out[1, 0] == pytest.approx(0.25, abs=1e-15)
    assert out[0, 0] == pytest.approx(0.5)


def test_dephasing_keeps_diagonal_states():
    rho = np.diag([0.3, 0.7]).astype(complex)
    np.testing.assert_array_equal(channels.apply(Dephasing(2.0), rho, 5.0), rho)


def test_exchange_half_period_swaps():
    J = 1.3
    out = channels.apply(ExchangeCoupling(J, DOWN), UP, math.pi / (2 * J))
    np.testing.assert_allclose(out, DOWN, atol=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.4, 2.0, 11.0])
def test_exchange_down_down_fixed(t):
    np.testing.assert_allclose(channels.apply(ExchangeCoupling(1.0, DOWN), DOWN, t), DOWN, atol=1e-12)


def test_default_ancilla_is_down():
    np.testing.assert_array_equal(ExchangeCoupling(1.0).ancilla, DOWN)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        channels.apply(Identity(), UP, -1.0)


@pytest.mark.parametrize("bad", [lambda: Dephasing(-0.1), lambda: ExchangeCoupling(-1.0)])
def test_negative_rates_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_lindblad_rhs_values():
    np.testing.assert_array_equal(channels.lindblad_rhs(np.diag([0.2, 0.8]), 1.5), np.zeros((2, 2)))
    g = 1.4
    rhs = channels.lindblad_rhs(PLUS, g)
    np.testing.assert_allclose(rhs, [[0, -g / 2], [-g / 2, 0]], atol=1e-15)


def test_rhs_traceless_hermitian():
    rng = np.random.default_rng(1)
    for _ in range(200):
        rhs = channels.lindblad_rhs(qops.random_density(rng), rng.uniform(0, 5))
        assert abs(np.trace(rhs)) < 1e-14
        np.testing.assert_allclose(rhs, rhs.conj().T, atol=1e-14)
        rhs = channels.liouville_rhs(qops.random_density(rng, 4), rng.uniform(0, 5))
        assert abs(np.trace(rhs)) < 1e-13
        np.testing.assert_allclose(rhs, rhs.conj().T, atol=1e-13)


def test_liouville_rhs_zero_cases():
    dd = np.zeros((4, 4), dtype=complex)
    dd[3, 3] = 1
    np.testing.assert_array_equal(channels.liouville_rhs(dd, 2.0), np.zeros((4, 4)))
    rng = np.random.default_rng(2)
    np.testing.assert_array_equal(channels.liouville_rhs(qops.random_density(rng, 4), 0.0), np.zeros((4, 4)))


def test_integrator_matches_dephasing():
    g = 0.6
    out = channels.integrate_fixed_step(Dephasing(g), PLUS, 1 / g, IntegratorConfig(10_000))
    np.testing.assert_allclose(out, channels.apply(Dephasing(g), PLUS, 1 / g), atol=1e-8)


def test_integrator_matches_exchange():
    J = 0.8
    rng = np.random.default_rng(3)
    rho = qops.random_density(rng)
    spec = ExchangeCoupling(J, qops.random_density(rng))
    out = channels.integrate_fixed_step(spec, rho, math.pi / (2 * J), IntegratorConfig(10_000))
    np.testing.assert_allclose(out, channels.apply(spec, rho, math.pi / (2 * J)), atol=1e-8)


def test_integrator_zero_time_returns_input():
    rng = np.random.default_rng(4)
    rho = qops.random_density(rng)
    np.testing.assert_array_equal(channels.integrate_fixed_step(Dephasing(3.0), rho, 0.0, IntegratorConfig(1)), rho)


def test_integrator_step_size_guard():
    with pytest.raises(channels.StepSizeError, match="at least 101 steps"):
        channels.integrate_fixed_step(Dephasing(1.0), PLUS, 10.0, IntegratorConfig(100))
    channels.integrate_fixed_step(Dephasing(1.0), PLUS, 10.0, IntegratorConfig(101))


def test_propagator_form_equals_stepwise_rk4():
    # the superoperator-power route must reproduce the plain RK4 loop
    rng = np.random.default_rng(5)
    rho = qops.random_density(rng, 4)
    f = lambda r: channels.liouville_rhs(r, 1.1)
    np.testing.assert_allclose(channels.rk4_linear(f, rho, 2.0, 500), channels.rk4(f, rho, 2.0, 500), atol=1e-12)
    f = lambda r: channels.lindblad_rhs(r, 0.7)
    rho = qops.random_density(rng)
    np.testing.assert_allclose(channels.rk4_linear(f, rho, 3.0, 333), channels.rk4(f, rho, 3.0, 333), atol=1e-13)


def test_rk4_is_fourth_order():
    # halving the step should cut the error by ~16
    f = lambda r: channels.lindblad_rhs(r, 1.0)
    exact = channels.apply(Dephasing(1.0), PLUS, 2.0)
    e1 = np.abs(channels.rk4(f, PLUS, 2.0, 20) - exact).max()
    e2 = np.abs(channels.rk4(f, PLUS, 2.0, 40) - exact).max()
    assert 12 < e1 / e2 < 20


def test_channels_preserve_density_properties():
    rng = np.random.default_rng(6)
    for i in range(1000):
        spec = random_spec(rng)
        rho = qops.random_density(rng)
        t = float(rng.uniform(0, 3))
        outs = [channels.apply(spec, rho, t)]
        if i % 10 == 0:
            outs.append(channels.integrate_fixed_step(spec, rho, t, IntegratorConfig(400)))
        for out in outs:
            assert abs(np.trace(out) - 1) <= 1e-10
            np.testing.assert_allclose(out, out.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(out)[0] >= -1e-8


def test_dephasing_semigroup():
    rng = np.random.default_rng(7)
    for _ in range(200):
        spec = Dephasing(float(rng.uniform(0, 3)))
        rho = qops.random_density(rng)
        t1, t2 = rng.uniform(0, 2, size=2)
        twice = channels.apply(spec, channels.apply(spec, rho, t1), t2)
        np.testing.assert_allclose(twice, channels.apply(spec, rho, t1 + t2), atol=1e-12)


def test_exchange_periodicity():
    # At t + pi/J the joint unitary is -1 on {ud, du} but +1 on dd, so
    # populations repeat while coherences flip sign; the full period is 2 pi/J.
    rng = np.random.default_rng(8)
    for _ in range(200):
        J = float(rng.uniform(0.1, 3))
        spec = ExchangeCoupling(J, DOWN)
        rho = qops.random_density(rng)
        t = float(rng.uniform(0, 5))
        now = channels.apply(spec, rho, t)
        half = channels.apply(spec, rho, t + math.pi / J)
        np.testing.assert_allclose(np.diag(half), np.diag(now), atol=1e-10)
        np.testing.assert_allclose(half[0, 1], -now[0, 1], atol=1e-10)
        np.testing.assert_allclose(channels.apply(spec, rho, t + 2 * math.pi / J), now, atol=1e-10)
        diag = np.diag(np.diag(rho))
        np.testing.assert_allclose(channels.apply(spec, diag, t + math.pi / J), channels.apply(spec, diag, t), atol=1e-10)


def test_analytic_vs_numeric_grids():
    rng = np.random.default_rng(9)
    g, J = 0.7, 1.2
    rho = qops.random_density(rng)
    for spec, ts in ((Dephasing(g), np.linspace(0, 3 / g, 50)), (ExchangeCoupling(J), np.linspace(0, 2 * math.pi / J, 50))):
        worst = max(
            np.abs(channels.integrate_fixed_step(spec, rho, t, IntegratorConfig(10_000)) - channels.apply(spec, rho, t)).max()
            for t in ts
        )
        assert worst <= 1e-8
