"""Thermal occupation and lossy thermal channels for Gaussian states.

A lossy line is a beam splitter of transmissivity ``eta`` that mixes the
signal with a thermal bath mode. On the covariance of the affected mode this
reads ``V -> eta*V + (1 - eta)*mu_env*I`` with ``mu_env = 2*nbar_env + 1``;
cross-covariances with other modes scale by ``sqrt(eta)``.

Attenuation is specified in dB/km. The matching power attenuation
coefficient in nepers/km is ``alpha = ln(10)/10 * dB_per_km``, so that a
length ``L`` transmits ``exp(-alpha*L) = 10**(-dB_per_km*L/10)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.constants

from .gaussian import GaussianState, _quad_slice

DB_TO_NEPER = math.log(10.0) / 10.0


class ConvergenceError(RuntimeError):
    """Step-size control failed to reach the requested tolerance."""


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = scipy.constants.h  # J s
    k_b: float = scipy.constants.k  # J / K


CONSTANTS = PhysicalConstants()


def planck_occupation(frequency: float, temperature: float) -> float:
    """Mean photon number of a bosonic mode at ``frequency`` (Hz) in equilibrium at ``temperature`` (K).

    Bose-Einstein occupation ``1 / (exp(h*nu / (k_b*T)) - 1)``; zero at ``T = 0``.
    """
    frequency, temperature = float(frequency), float(temperature)
    if not frequency > 0:
        raise ValueError(f"frequency must be positive, got {frequency}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    thermal_energy = CONSTANTS.k_b * temperature
    if thermal_energy == 0:
        # T = 0, or so small that k_b * T underflows
        return 0.0
    x = CONSTANTS.h * frequency / thermal_energy
    if x > 700:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def _attenuate(state: GaussianState, mode: int, eta: float, added_noise: float) -> GaussianState:
    # V -> X V X^T + Y with X = sqrt(eta) on the mode's quadratures, Y = added_noise*I there.
    q = _quad_slice(state, mode)
    scale = np.ones(state.cov.shape[0])
    scale[q] = math.sqrt(eta)
    cov = state.cov * np.outer(scale, scale)
    cov[q, q] += added_noise * np.eye(2)
    return GaussianState(state.mean * scale, cov)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    return eta


def loss_channel(state: GaussianState, mode: int, transmissivity: float, nbar_env: float = 0.0) -> GaussianState:
    """Send ``mode`` through a beam splitter coupling it to a thermal bath with ``nbar_env`` photons."""
    eta = _check_eta(transmissivity)
    nbar_env = float(nbar_env)
    if not nbar_env >= 0:
        raise ValueError(f"nbar_env must be >= 0, got {nbar_env}")
    return _attenuate(state, mode, eta, (1 - eta) * (2 * nbar_env + 1))


def compose_loss(first: tuple[float, float], second: tuple[float, float]) -> tuple[float, float]:
    """Combine two thermal-loss stages ``(eta, mu)`` applied in order into one.

    ``mu = 2*nbar + 1`` is the bath variance. If the combined stage is
    lossless the bath never enters, and ``mu`` is reported as 1.
    """
    (e1, m1), (e2, m2) = first, second
    e1, e2 = _check_eta(e1), _check_eta(e2)
    if m1 < 1 or m2 < 1:
        raise ValueError("bath variance mu must be >= 1")
    eta = e1 * e2
    if eta == 1.0:
        return 1.0, 1.0
    mu = (e2 * (1 - e1) * m1 + (1 - e2) * m2) / (1 - eta)
    return eta, mu


@dataclass(frozen=True)
class WaveguideSegment:
    length_km: float
    attenuation_db_per_km: float
    temperature_k: float

    def __post_init__(self):
        if not self.length_km > 0:
            raise ValueError(f"segment length must be > 0 km, got {self.length_km}")
        if self.attenuation_db_per_km < 0:
            raise ValueError(f"attenuation must be >= 0 dB/km, got {self.attenuation_db_per_km}")
        if self.temperature_k < 0:
            raise ValueError(f"temperature must be >= 0 K, got {self.temperature_k}")

    @property
    def loss_db(self) -> float:
        return self.attenuation_db_per_km * self.length_km

    @property
    def transmissivity(self) -> float:
        return 10 ** (-self.loss_db / 10)


@dataclass(frozen=True)
class WaveguideProfile:
    """Piecewise-constant transmission line carrying a signal at ``frequency_hz``."""

    segments: tuple[WaveguideSegment, ...]
    frequency_hz: float

    def __post_init__(self):
        segs = tuple(s if isinstance(s, WaveguideSegment) else WaveguideSegment(*s) for s in self.segments)
        if not segs:
            raise ValueError("a waveguide profile needs at least one segment")
        if not self.frequency_hz > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency_hz}")
        object.__setattr__(self, "segments", segs)

    @property
    def length_km(self) -> float:
        return sum(s.length_km for s in self.segments)

    @property
    def breakpoints(self) -> list[float]:
        return [0.0, *np.cumsum([s.length_km for s in self.segments]).tolist()]

    def _segment_at(self, x: float) -> WaveguideSegment:
        edges = self.breakpoints
        i = int(np.searchsorted(edges, x, side="right")) - 1
        return self.segments[min(max(i, 0), len(self.segments) - 1)]

    def attenuation_at(self, x: float) -> float:
        return self._segment_at(x).attenuation_db_per_km

    def temperature_at(self, x: float) -> float:
        return self._segment_at(x).temperature_k

    def stages(self) -> list[tuple[float, float]]:
        """Per-segment ``(eta, nbar_env)`` in propagation order."""
        return [(s.transmissivity, planck_occupation(self.frequency_hz, s.temperature_k)) for s in self.segments]


@dataclass(frozen=True)
class GradedWaveguide:
    """Transmission line whose attenuation and temperature vary smoothly along its length.

    ``attenuation_db_per_km`` and ``temperature_k`` are callables of the
    position ``x`` in km, ``0 <= x <= length_km``.
    """

    length_km: float
    attenuation_db_per_km: Callable[[float], float]
    temperature_k: Callable[[float], float]
    frequency_hz: float

    @property
    def breakpoints(self) -> list[float]:
        return [0.0, self.length_km]

    def attenuation_at(self, x: float) -> float:
        return float(self.attenuation_db_per_km(x))

    def temperature_at(self, x: float) -> float:
        return float(self.temperature_k(x))

    def discretize(self, n_segments: int) -> WaveguideProfile:
        """Midpoint-sampled piecewise-constant approximation with ``n_segments`` equal pieces."""
        dx = self.length_km / n_segments
        mids = (np.arange(n_segments) + 0.5) * dx
        segs = [WaveguideSegment(dx, self.attenuation_at(x), self.temperature_at(x)) for x in mids]
        return WaveguideProfile(tuple(segs), self.frequency_hz)


def waveguide_channel(state: GaussianState, mode: int, profile: WaveguideProfile) -> GaussianState:
    for eta, nbar in profile.stages():
        state = loss_channel(state, mode, eta, nbar)
    return state


# -- continuous limit -------------------------------------------------------


def rk4_integrate(f: Callable[[float, np.ndarray], np.ndarray], y0, x0: float, x1: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step 4th-order Runge-Kutta from ``x0`` to ``x1``."""
    y = np.array(y0, dtype=float)
    h = (x1 - x0) / n_steps
    x = x0
    for i in range(n_steps):
        k1 = f(x, y)
        k2 = f(x + h / 2, y + h / 2 * k1)
        k3 = f(x + h / 2, y + h / 2 * k2)
        k4 = f(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x = x0 + (x1 - x0) * (i + 1) / n_steps
    return y


def richardson_integrate(f, y0, x0: float, x1: float, tol: float, n_start: int = 4, max_halvings: int = 20) -> np.ndarray:
    """RK4 with step halving until the Richardson error estimate drops below ``tol``.

    The error of the finer solution is estimated as ``|y_h/2 - y_h| / 15``
    and measured relative to ``max(1, |y|)`` per component. The returned value
    is the Richardson-extrapolated solution.
    """
    n = n_start
    coarse = rk4_integrate(f, y0, x0, x1, n)
    for _ in range(max_halvings):
        n *= 2
        fine = rk4_integrate(f, y0, x0, x1, n)
        err = np.abs(fine - coarse) / 15
        if np.all(err <= tol * np.maximum(1.0, np.abs(fine))):
            return fine + (fine - coarse) / 15
        coarse = fine
    raise ConvergenceError(f"RK4 did not reach tol={tol:g} after {n} steps (last error {err.max():.3e})")


def continuous_stage(profile, step_tolerance: float = 1e-10) -> tuple[float, float]:
    """Integrate a line to a single ``(eta, added_noise)`` stage.

    Along the line the affected mode's covariance obeys
    ``dV/dx = -alpha(x) * (V - mu_env(x) * I)``. Writing
    ``V(x) = T(x) V0 + y(x) I`` gives ``dT/dx = -alpha T`` and
    ``dy/dx = -alpha (y - mu_env)`` with ``T(0) = 1``, ``y(0) = 0``.
    """
    freq = profile.frequency_hz

    def rhs(x, v):
        alpha = DB_TO_NEPER * profile.attenuation_at(x)
        mu_env = 2 * planck_occupation(freq, profile.temperature_at(x)) + 1
        return np.array([-alpha * v[0], -alpha * (v[1] - mu_env)])

    v = np.array([1.0, 0.0])
    edges = profile.breakpoints
    for a, b in zip(edges[:-1], edges[1:]):
        # one smooth piece at a time so RK4 keeps its order across jumps
        if isinstance(profile, WaveguideProfile):
            f = lambda x, y, mid=(a + b) / 2: rhs(mid, y)  # noqa: E731
        else:
            f = rhs
        v = richardson_integrate(f, v, a, b, step_tolerance)
    eta = min(max(v[0], 0.0), 1.0)
    return eta, max(v[1], 0.0)


def waveguide_continuous(state: GaussianState, mode: int, profile, step_tolerance: float = 1e-10) -> GaussianState:
    """Propagate ``mode`` through ``profile`` by integrating the continuous-loss ODE.

    ``profile`` is a :class:`WaveguideProfile` (piecewise constant) or a
    :class:`GradedWaveguide` (smooth). The mean decays as ``exp(-alpha*x/2)``.
    """
    eta, added = continuous_stage(profile, step_tolerance)
    return _attenuate(state, mode, eta, added)
