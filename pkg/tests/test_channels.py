import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryolink.channels import (
    DB_TO_NEPER,
    ConvergenceError,
    GradedWaveguide,
    WaveguideProfile,
    WaveguideSegment,
    compose_loss,
    continuous_stage,
    loss_channel,
    planck_occupation,
    richardson_integrate,
    rk4_integrate,
    waveguide_channel,
    waveguide_continuous,
)
from cryolink.gaussian import coherent_state, log_negativity, mean_photon_number, thermal_state, tmsv_state

etas = st.floats(0, 1)
nbars = st.floats(0, 100)


@pytest.mark.parametrize(
    "freq, temp, expected",
    [
        # frozen from 1/expm1(h f / k T) with CODATA constants
        (5e9, 300.0, 1249.697214),
        (5e9, 0.03, 3.359989533e-4),
        (5e14, 300.0, 1.827764616e-35),
    ],
)
def test_planck_occupation_values(freq, temp, expected):
    assert planck_occupation(freq, temp) == pytest.approx(expected, rel=1e-9)


def test_planck_occupation_edges():
    assert planck_occupation(5e9, 0.0) == 0.0
    # both branches agree where they meet
    h_over_k = 4.799243073366221e-11
    t = h_over_k * 1e12 / 700
    assert planck_occupation(1e12, t * (1 + 1e-12)) == pytest.approx(planck_occupation(1e12, t * (1 - 1e-12)), rel=1e-9)
    # classical limit kT/hf - 1/2
    assert planck_occupation(1e6, 300.0) == pytest.approx(300.0 / (h_over_k * 1e6) - 0.5, rel=1e-6)
    with pytest.raises(ValueError):
        planck_occupation(0.0, 1.0)
    with pytest.raises(ValueError):
        planck_occupation(1e9, -1.0)


def test_loss_channel_limits():
    s = coherent_state(1 + 1j)
    assert loss_channel(s, 0, 1.0, 50.0).allclose(s)
    assert loss_channel(s, 0, 0.0, 2.0).allclose(thermal_state(2.0))
    with pytest.raises(ValueError):
        loss_channel(s, 0, 1.5)
    with pytest.raises(ValueError):
        loss_channel(s, 0, 0.5, -1.0)


@given(nbars, etas, nbars)
def test_loss_channel_photon_balance(n, eta, n_env):
    out = loss_channel(thermal_state(n), 0, eta, n_env)
    assert mean_photon_number(out) == pytest.approx(eta * n + (1 - eta) * n_env, rel=1e-9, abs=1e-12)


@given(etas, nbars, etas, nbars, st.floats(0, 2))
def test_compose_loss_matches_sequential(e1, n1, e2, n2, r):
    s = tmsv_state(r)
    seq = loss_channel(loss_channel(s, 1, e1, n1), 1, e2, n2)
    eta, mu = compose_loss((e1, 2 * n1 + 1), (e2, 2 * n2 + 1))
    once = loss_channel(s, 1, eta, (mu - 1) / 2)
    assert np.allclose(seq.cov, once.cov, rtol=1e-10, atol=1e-10)


def test_compose_loss_lossless():
    assert compose_loss((1.0, 5.0), (1.0, 9.0)) == (1.0, 1.0)
    with pytest.raises(ValueError):
        compose_loss((0.5, 0.5), (0.5, 1.0))


def test_segment_transmissivity():
    seg = WaveguideSegment(2.0, 1.5, 0.01)
    assert seg.loss_db == 3.0
    assert seg.transmissivity == pytest.approx(10 ** -0.3)
    for bad in ((0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, -1.0)):
        with pytest.raises(ValueError):
            WaveguideSegment(*bad)


def test_profile_stages_and_lookup():
    p = WaveguideProfile([(1.0, 2.0, 0.01), (2.0, 0.5, 300.0)], 5e9)
    assert p.length_km == 3.0
    assert p.breakpoints == [0.0, 1.0, 3.0]
    assert p.attenuation_at(0.5) == 2.0 and p.temperature_at(2.0) == 300.0
    stages = p.stages()
    assert stages[1][1] == pytest.approx(1249.697214, rel=1e-9)
    with pytest.raises(ValueError):
        WaveguideProfile([], 5e9)


@given(st.lists(st.tuples(st.floats(0.01, 5), st.floats(0, 3), st.floats(0, 300)), min_size=1, max_size=5))
def test_piecewise_ode_equals_discrete_chain(segs):
    # inside a segment the ODE is solved exactly by the discrete stage
    p = WaveguideProfile(segs, 5e9)
    s = tmsv_state(0.8)
    discrete = waveguide_channel(s, 1, p)
    continuous = waveguide_continuous(s, 1, p)
    scale = max(1.0, float(np.max(np.abs(discrete.cov))))
    assert np.max(np.abs(discrete.cov - continuous.cov)) <= 1e-8 * scale


def test_uniform_line_transmissivity():
    p = WaveguideProfile([(10.0, 0.7, 0.0)], 5e9)
    eta, noise = continuous_stage(p)
    assert eta == pytest.approx(math.exp(-DB_TO_NEPER * 7.0), rel=1e-10)
    assert noise == pytest.approx(1 - eta, rel=1e-9)


def graded_line():
    return GradedWaveguide(
        length_km=1.0,
        attenuation_db_per_km=lambda x: 2.0 + 3.0 * x,
        temperature_k=lambda x: 300.0 * math.exp(-5 * x) + 0.01,
        frequency_hz=5e9,
    )


def _compose_profile(profile):
    eta, mu = 1.0, 1.0
    for e, n in profile.stages():
        eta, mu = compose_loss((eta, mu), (e, 2 * n + 1))
    return eta, (1 - eta) * mu


def test_graded_line_discretization_converges():
    exact_eta, exact_noise = continuous_stage(graded_line())
    errors = []
    for n in (4, 8, 16, 32, 64):
        eta, noise = _compose_profile(graded_line().discretize(n))
        errors.append(abs(noise - exact_noise) + abs(eta - exact_eta))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    # midpoint sampling is second order
    assert errors[-2] / errors[-1] == pytest.approx(4.0, rel=0.1)


def test_graded_transmissivity_closed_form():
    eta, _ = continuous_stage(graded_line())
    # integral of 2 + 3x over [0, 1] is 3.5 dB
    assert eta == pytest.approx(10 ** -0.35, rel=1e-10)


def test_hot_line_kills_entanglement():
    p = WaveguideProfile([(1.0, 3.0, 300.0)], 5e9)
    assert log_negativity(waveguide_channel(tmsv_state(1.0), 1, p)) == 0.0


def test_rk4_exponential():
    y = rk4_integrate(lambda x, y: y, np.array([1.0]), 0.0, 1.0, 200)
    assert y[0] == pytest.approx(math.e, rel=1e-10)


def test_richardson_reaches_tolerance():
    y = richardson_integrate(lambda x, y: -3 * y * x**2, np.array([2.0]), 0.0, 2.0, 1e-12)
    assert y[0] == pytest.approx(2 * math.exp(-8.0), rel=1e-10)


def test_richardson_reports_failure():
    with pytest.raises(ConvergenceError):
        richardson_integrate(lambda x, y: np.cos(200 * x) * y, np.array([1.0]), 0.0, 10.0, 1e-14, max_halvings=2)


@given(st.floats(1e6, 1e12), st.floats(0.01, 300), st.floats(1.01, 3))
def test_planck_monotone(f, t, k):
    assert planck_occupation(f, k * t) > planck_occupation(f, t) or planck_occupation(f, t) == 0.0
    assert planck_occupation(k * f, t) <= planck_occupation(f, t)


def test_compose_loss_fixed_points():
    assert compose_loss((1.0, 3.0), (0.4, 7.0)) == pytest.approx((0.4, 7.0))
    assert compose_loss((0.3, 5.0), (0.6, 5.0)) == pytest.approx((0.18, 5.0))


@given(st.lists(st.tuples(st.floats(0, 0.99), st.floats(1, 100)), min_size=3, max_size=3))
def test_compose_loss_associative(stages):
    a, b, c = stages
    left = compose_loss(compose_loss(a, b), c)
    right = compose_loss(a, compose_loss(b, c))
    assert left == pytest.approx(right, rel=1e-12, abs=1e-12)


def test_entanglement_non_increasing_in_loss_and_noise():
    s = tmsv_state(1.0)
    by_loss = [log_negativity(loss_channel(s, 1, eta, 0.2)) for eta in np.linspace(1, 0, 21)]
    by_noise = [log_negativity(loss_channel(s, 1, 0.5, n)) for n in np.linspace(0, 3, 31)]
    for seq in (by_loss, by_noise):
        assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
        assert seq[-1] == 0.0
    # one arm replaced by the environment
    assert log_negativity(loss_channel(s, 1, 0.0, 0.0)) == 0.0


def test_waveguide_trivial_cases():
    s = tmsv_state(0.5)
    lossless = WaveguideProfile([(3.0, 0.0, 300.0)], 5e9)
    assert waveguide_channel(s, 1, lossless).allclose(s)
    assert waveguide_continuous(s, 1, lossless).allclose(s)
    one = WaveguideProfile([(2.0, 1.5, 4.0)], 5e9)
    direct = loss_channel(s, 1, 10 ** -0.3, planck_occupation(5e9, 4.0))
    assert waveguide_channel(s, 1, one).allclose(direct, atol=1e-12)


def test_two_segment_line_matches_composition():
    s = tmsv_state(0.8)
    p = WaveguideProfile([(1.0, 1.0, 4.0), (1.0, 1.0, 300.0)], 5e9)
    (e1, n1), (e2, n2) = p.stages()
    eta, mu = compose_loss((e1, 2 * n1 + 1), (e2, 2 * n2 + 1))
    assert np.allclose(waveguide_channel(s, 1, p).cov, loss_channel(s, 1, eta, (mu - 1) / 2).cov, atol=1e-10)


def test_uniform_line_closed_form():
    alpha = DB_TO_NEPER * 0.8
    nbar = planck_occupation(5e9, 4.0)
    mu_env, mu0 = 2 * nbar + 1, 3.0
    p = WaveguideProfile([(5.0, 0.8, 4.0)], 5e9)
    out = waveguide_continuous(thermal_state(1.0), 0, p)
    assert out.cov[0, 0] == pytest.approx(mu_env + (mu0 - mu_env) * math.exp(-alpha * 5.0), abs=1e-8)
    displaced = waveguide_continuous(coherent_state(1.0), 0, p)
    assert displaced.mean[0] == pytest.approx(2 * math.exp(-alpha * 5.0 / 2), rel=1e-10)


def test_segmented_error_falls_from_10_to_100():
    exact = continuous_stage(graded_line())
    err = {n: abs(_compose_profile(graded_line().discretize(n))[1] - exact[1]) for n in (10, 100)}
    assert err[100] < err[10]
