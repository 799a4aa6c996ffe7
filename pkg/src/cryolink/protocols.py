"""Figures of merit for quantum illumination and CV teleportation.

Quantum illumination
--------------------
A target of reflectivity ``eta`` sits in a thermal background of ``n_B``
photons per mode. The transmitter sends ``M`` signal modes of ``N_S``
photons each, either coherent states or one arm of a TMSV (the idler arm is
kept). The return mode is ``sqrt(eta) a_S + sqrt(1 - eta) a_E`` with the
environment at ``n_B / (1 - eta)``, so the background seen by the receiver
is ``n_B`` whether or not the target is present.

Three closed forms are available for the per-mode error exponent ``R``:

``"asymptotic"``
    ``R_C = eta N_S / (4 n_B)``, ``R_Q = eta N_S / n_B``; valid for
    ``N_S << 1``, ``eta << 1``, ``n_B >> 1`` and a ratio of exactly 4 (6.02 dB).
    At ``n_B = 0`` it falls back to the regularized forms.
``"regularized"``
    ``R_C = eta N_S / (4 n_B + 2)``, ``R_Q = eta N_S / (n_B + 1)``; finite at
    ``n_B = 0``.
``"weak_target"``
    Leading order in ``eta`` at any ``N_S``, ``n_B``:
    ``R_C = eta N_S (sqrt(n_B + 1) - sqrt(n_B))**2`` and
    ``R_Q = eta N_S (N_S + 1)**2 (n_B + 1) (1 - sqrt(q_B q_S))**2 / (n_B + N_S + 1)**2``
    with ``q = n / (n + 1)``. This is what the numeric Chernoff oracle
    converges to; the asymptotic forms overestimate ``R_Q`` once
    ``N_S n_B`` is not small.

The error probability after ``M`` mode pairs is bounded by ``exp(-M R) / 2``.

Teleportation
-------------
Unity-gain Braunstein-Kimble protocol: Alice jointly measures ``x_in - x_A``
and ``p_in + p_A``; Bob displaces his arm. The output is the input plus
Gaussian noise ``N = Z A Z + B - (Z C + C^T Z)``, with ``A, B, C`` the
covariance blocks of the resource (Alice's arm first).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channels import loss_channel
from .fock import FockBlocks, fock_blocks
from .gaussian import GaussianState, fidelity_coherent_gaussian, tensor, thermal_state, tmsv_state

PROTOCOLS = ("coherent", "tmsv")
FORMS = ("asymptotic", "regularized", "weak_target")
DEFAULT_CUTOFF = 80
TRACE_TOL = 1e-6

_Z = np.diag([1.0, -1.0])


class TruncationWarning(UserWarning):
    """A truncated Fock representation lost more weight than ``TRACE_TOL``."""


@dataclass(frozen=True)
class IlluminationScenario:
    reflectivity: float
    signal_photons: float
    background_photons: float
    mode_pairs: int = 1

    def __post_init__(self):
        if not 0 < self.reflectivity < 1:
            raise ValueError(f"reflectivity must lie in (0, 1), got {self.reflectivity}")
        if self.signal_photons < 0:
            raise ValueError(f"signal_photons must be >= 0, got {self.signal_photons}")
        if self.background_photons < 0:
            raise ValueError(f"background_photons must be >= 0, got {self.background_photons}")
        if int(self.mode_pairs) != self.mode_pairs or self.mode_pairs < 1:
            raise ValueError(f"mode_pairs must be a positive integer, got {self.mode_pairs}")
        if self.reflectivity > 0.1:
            warnings.warn(
                f"reflectivity {self.reflectivity} > 0.1: the closed-form exponents assume a weak return",
                stacklevel=2,
            )


def qi_error_exponent(protocol: str, scenario: IlluminationScenario, form: str = "asymptotic") -> float:
    """Per-mode-pair error exponent of ``protocol`` ("coherent" or "tmsv")."""
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    eta, ns, nb = scenario.reflectivity, scenario.signal_photons, scenario.background_photons
    if ns == 0:
        return 0.0
    if form == "asymptotic" and nb == 0:
        form = "regularized"
    if form == "asymptotic":
        return eta * ns / (4 * nb) if protocol == "coherent" else eta * ns / nb
    if form == "regularized":
        return eta * ns / (4 * nb + 2) if protocol == "coherent" else eta * ns / (nb + 1)
    if protocol == "coherent":
        # (sqrt(n+1) - sqrt(n))^2 written without cancellation
        return eta * ns / (math.sqrt(nb + 1) + math.sqrt(nb)) ** 2
    q = math.sqrt(nb / (nb + 1) * ns / (ns + 1))
    return eta * ns * (ns + 1) ** 2 * (nb + 1) * (1 - q) ** 2 / (nb + ns + 1) ** 2


def qi_advantage_db(scenario: IlluminationScenario, form: str = "asymptotic") -> float:
    """Ratio of TMSV to coherent-state error exponents, in dB."""
    r_q = qi_error_exponent("tmsv", scenario, form)
    r_c = qi_error_exponent("coherent", scenario, form)
    if r_c == 0:
        raise ValueError("advantage undefined without signal photons")
    return 10 * math.log10(r_q / r_c)


def qi_error_probability_bound(protocol: str, scenario: IlluminationScenario, form: str = "asymptotic") -> float:
    return 0.5 * math.exp(-scenario.mode_pairs * qi_error_exponent(protocol, scenario, form))


def qi_hypothesis_states(protocol: str, scenario: IlluminationScenario) -> tuple[GaussianState, GaussianState]:
    """Receiver states without (``H0``) and with (``H1``) the target.

    Coherent: the return mode alone. TMSV: return mode then idler.
    """
    eta, ns, nb = scenario.reflectivity, scenario.signal_photons, scenario.background_photons
    if protocol == "coherent":
        h0 = thermal_state(nb)
        amp = math.sqrt(eta * ns)
        h1 = GaussianState(np.array([2 * amp, 0.0]), h0.cov)
        return h0, h1
    if protocol == "tmsv":
        h0 = tensor(thermal_state(nb), thermal_state(ns))
        h1 = loss_channel(tmsv_state(math.asinh(math.sqrt(ns))), 0, eta, nb / (1 - eta))
        return h0, h1
    raise ValueError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")


# -- numeric Chernoff oracle ------------------------------------------------


@dataclass(frozen=True)
class ChernoffResult:
    exponent: float
    s_opt: float
    trace0: float
    trace1: float


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    # the optimum may sit on an endpoint (e.g. pure states)
    candidates = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)]
    fx, x = min(candidates)
    return x, fx


def _spectra(rho0: FockBlocks, rho1: FockBlocks):
    if rho0.blocks.keys() != rho1.blocks.keys():
        raise ValueError("states have incompatible Fock block structures")
    t0, t1 = rho0.trace, rho1.trace
    out = []
    for k in rho0.blocks:
        lam, u = np.linalg.eigh(rho0.blocks[k] / t0)
        mu, v = np.linalg.eigh(rho1.blocks[k] / t1)
        overlap = np.abs(u.conj().T @ v) ** 2
        out.append((lam, mu, overlap))
    return out


def _power(w: np.ndarray, s: float, floor: float) -> np.ndarray:
    # w**s on the support only, so that s = 0 gives the support projector
    return np.where(w > floor, np.clip(w, floor, None) ** s, 0.0)


def qcb_numeric(state0: GaussianState, state1: GaussianState, fock_cutoff: int = DEFAULT_CUTOFF) -> ChernoffResult:
    """Quantum Chernoff exponent ``-ln min_s Tr(rho0^s rho1^(1-s))`` from truncated Fock matrices.

    Both states are truncated to ``fock_cutoff`` levels per mode and
    renormalized. A :class:`TruncationWarning` reports when either lost more
    than ``TRACE_TOL`` of its weight; the result is then biased low.
    """
    rho0, rho1 = fock_blocks(state0, fock_cutoff), fock_blocks(state1, fock_cutoff)
    t0, t1 = rho0.trace, rho1.trace
    if min(t0, t1) < 1 - TRACE_TOL:
        warnings.warn(
            f"Fock cutoff {fock_cutoff} keeps trace {t0:.8f} / {t1:.8f}; increase the cutoff for a converged exponent",
            TruncationWarning,
            stacklevel=2,
        )
    spectra = _spectra(rho0, rho1)
    floor = 1e-15

    def q(s):
        return float(sum(_power(lam, s, floor) @ w @ _power(mu, 1 - s, floor) for lam, mu, w in spectra))

    s_opt, q_min = golden_section_min(q, 0.0, 1.0)
    exponent = -math.log(min(q_min, 1.0))
    return ChernoffResult(max(exponent, 0.0), s_opt, t0, t1)


def qcb_exponent_numeric(state0: GaussianState, state1: GaussianState, fock_cutoff: int = DEFAULT_CUTOFF) -> float:
    return qcb_numeric(state0, state1, fock_cutoff).exponent


# -- teleportation ----------------------------------------------------------


@dataclass(frozen=True)
class TeleportResource:
    """Two-mode entangled resource; mode 0 is Alice's arm, mode 1 is Bob's."""

    resource: GaussianState
    gain: float = 1.0

    def __post_init__(self):
        if self.resource.n_modes != 2:
            raise ValueError(f"teleportation resource must have two modes, got {self.resource.n_modes}")
        if not self.gain > 0:
            raise ValueError(f"gain must be positive, got {self.gain}")


def teleport_added_noise(resource: TeleportResource | GaussianState) -> np.ndarray:
    """Noise matrix added to the teleported mode.

    For gain ``g`` the output is ``g**2 V_in + N`` with
    ``N = g**2 Z A Z + B - g (Z C + C^T Z)``.
    """
    if isinstance(resource, GaussianState):
        resource = TeleportResource(resource)
    v, g = resource.resource.cov, resource.gain
    a, b, c = v[:2, :2], v[2:, 2:], v[:2, 2:]
    n = g**2 * _Z @ a @ _Z + b - g * (_Z @ c + c.T @ _Z)
    return (n + n.T) / 2


def teleport_state(state_in: GaussianState, resource: TeleportResource | GaussianState) -> GaussianState:
    """Bob's output state when teleporting a single-mode ``state_in``."""
    if isinstance(resource, GaussianState):
        resource = TeleportResource(resource)
    if state_in.n_modes != 1:
        raise ValueError("only single-mode inputs can be teleported")
    g = resource.gain
    return GaussianState(g * state_in.mean, g**2 * state_in.cov + teleport_added_noise(resource))


def teleport_fidelity_coherent(noise: np.ndarray) -> float:
    """Unity-gain fidelity for coherent inputs, ``2 / sqrt(det(2 I + N))``."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (2, 2):
        raise ValueError(f"noise must be 2x2, got shape {noise.shape}")
    if np.max(np.abs(noise - noise.T)) > 1e-12 * max(1.0, np.max(np.abs(noise))):
        raise ValueError("noise matrix must be symmetric")
    if np.linalg.eigvalsh(noise)[0] < -1e-12:
        raise ValueError("noise matrix must be positive semidefinite")
    return float(2.0 / math.sqrt(np.linalg.det(2 * np.eye(2) + noise)))


def teleport_fidelity(state_in: GaussianState, resource: TeleportResource | GaussianState) -> float:
    """Fidelity between input and teleported output for any single-mode Gaussian input and gain."""
    out = teleport_state(state_in, resource)
    return fidelity_coherent_gaussian(state_in.cov, out.cov, state_in.mean, out.mean)
