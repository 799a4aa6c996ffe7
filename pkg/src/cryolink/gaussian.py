"""Gaussian continuous-variable states and symplectic transformations.

Conventions
-----------
* Quadratures are interleaved: ``(x1, p1, x2, p2, ...)``.
* The vacuum has unit quadrature variance, ``cov(vacuum) = I``. With this
  choice ``x = a + a^dagger`` and ``p = -i(a - a^dagger)``, so a coherent
  state ``|alpha>`` has mean ``(2 Re alpha, 2 Im alpha)``.
* The symplectic form is block diagonal with per-mode blocks ``[[0, 1], [-1, 0]]``.

Every state is validated on construction: the covariance must be symmetric
and satisfy the uncertainty relation ``cov + i*Omega >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

SYMPLECTIC_TOL = 1e-9
SYMMETRY_RTOL = 1e-12
MAX_SQUEEZING = 30.0
# PT eigenvalues this close to 1 are round-off, not entanglement
NEGATIVITY_TOL = 1e-12

_Z = np.diag([1.0, -1.0])


class PhysicalityError(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the ``2n x 2n`` symplectic form for interleaved quadratures."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_uncertainty(cov: np.ndarray) -> None:
    # cov + i*Omega >= 0 is equivalent to all symplectic eigenvalues >= 1.
    # Scaling the tolerance with the norm keeps strongly squeezed states
    # (entries ~cosh 2r) from failing on round-off alone.
    n = cov.shape[0] // 2
    herm = cov + 1j * symplectic_form(n)
    lowest = np.linalg.eigvalsh(herm)[0]
    scale = max(1.0, float(np.linalg.norm(cov, 2)))
    if lowest < -SYMPLECTIC_TOL * scale:
        raise PhysicalityError(
            f"covariance violates the uncertainty relation (min eigenvalue of cov + i*Omega = {lowest:.3e})"
        )


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``n``-mode Gaussian state.

    Arrays are copied and made read-only; use the module functions to build
    new states rather than mutating these.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _freeze(self.mean).reshape(-1)
        cov = _freeze(self.cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.shape[0] == 0:
            raise ValueError(f"cov must be a non-empty 2N x 2N matrix, got shape {cov.shape}")
        if mean.shape[0] != cov.shape[0]:
            raise ValueError(f"mean has length {mean.shape[0]}, expected {cov.shape[0]}")
        if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(mean))):
            raise ValueError("state contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise ValueError("cov is not symmetric")
        _check_uncertainty(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def mode_cov(self, mode: int) -> np.ndarray:
        i = _quad_slice(self, mode)
        return self.cov[i, i]

    def mode_mean(self, mode: int) -> np.ndarray:
        return self.mean[_quad_slice(self, mode)]

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        """Marginal state on ``modes`` (tracing out the rest)."""
        idx = _quad_indices(self, modes)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def allclose(self, other: "GaussianState", atol: float = 1e-10) -> bool:
        return (
            self.cov.shape == other.cov.shape
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """A ``2k x 2k`` symplectic matrix acting on ``k`` designated modes."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        s = _freeze(self.matrix)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2 or s.shape[0] == 0:
            raise ValueError(f"symplectic matrix must be 2k x 2k, got shape {s.shape}")
        omega = symplectic_form(s.shape[0] // 2)
        err = np.max(np.abs(s @ omega @ s.T - omega))
        if err > 1e-10 * max(1.0, float(np.max(np.abs(s))) ** 2):
            raise ValueError(f"matrix is not symplectic (|S Omega S^T - Omega| = {err:.2e})")
        object.__setattr__(self, "matrix", s)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


def _quad_slice(state: GaussianState, mode: int) -> slice:
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range for a {state.n_modes}-mode state")
    return slice(2 * mode, 2 * mode + 2)


def _quad_indices(state: GaussianState, modes: Sequence[int]) -> list[int]:
    modes = [int(m) for m in modes]
    if len(set(modes)) != len(modes):
        raise ValueError(f"mode indices must be distinct, got {modes}")
    for m in modes:
        _quad_slice(state, m)
    return [q for m in modes for q in (2 * m, 2 * m + 1)]


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not lo <= value <= hi:
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


# -- constructors -----------------------------------------------------------


def vacuum_state(n_modes: int = 1) -> GaussianState:
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes}")
    n_modes = int(n_modes)
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def thermal_state(nbar: float) -> GaussianState:
    """Single-mode thermal state with mean occupation ``nbar``."""
    nbar = float(nbar)
    if not (np.isfinite(nbar) and nbar >= 0):
        raise ValueError(f"nbar must be finite and >= 0, got {nbar}")
    return GaussianState(np.zeros(2), (2 * nbar + 1) * np.eye(2))


def coherent_state(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(2 * np.array([alpha.real, alpha.imag]), np.eye(2))


def tmsv_state(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter ``r``.

    Each arm carries ``sinh(r)**2`` photons; the x quadratures are
    correlated and the p quadratures anti-correlated.
    """
    r = _check_range("r", r, 0.0, MAX_SQUEEZING)
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    cov = np.block([[ch * np.eye(2), sh * _Z], [sh * _Z, ch * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


def tensor(*states: GaussianState) -> GaussianState:
    """Product state of independent subsystems, modes in argument order."""
    mean = np.concatenate([s.mean for s in states])
    return GaussianState(mean, block_diag(*[s.cov for s in states]))


# -- symplectic operations --------------------------------------------------


def beam_splitter_symplectic(transmissivity: float) -> SymplecticOp:
    """Two-mode beam splitter with power transmissivity ``eta``.

    Sign convention: ``a1' = sqrt(eta) a1 + sqrt(1-eta) a2`` and
    ``a2' = -sqrt(1-eta) a1 + sqrt(eta) a2``. At ``eta = 0`` the modes are
    swapped, with mode 1's field arriving in mode 2 with a minus sign.
    """
    eta = _check_range("transmissivity", transmissivity, 0.0, 1.0)
    t, r = np.sqrt(eta), np.sqrt(1 - eta)
    i2 = np.eye(2)
    return SymplecticOp(np.block([[t * i2, r * i2], [-r * i2, t * i2]]), "beam-splitter")


def two_mode_squeezer_symplectic(r: float) -> SymplecticOp:
    """``exp(r (a^dag b^dag - a b))``; maps two vacua onto ``tmsv_state(r)``."""
    r = _check_range("r", r, 0.0, MAX_SQUEEZING)
    ch, sh = np.cosh(r), np.sinh(r)
    return SymplecticOp(np.block([[ch * np.eye(2), sh * _Z], [sh * _Z, ch * np.eye(2)]]), "two-mode-squeezer")


def squeezer_symplectic(r: float) -> SymplecticOp:
    """Single-mode squeezer, ``x -> e^{-r} x``, ``p -> e^{r} p``."""
    r = _check_range("|r|", abs(r), 0.0, MAX_SQUEEZING) * np.sign(r)
    return SymplecticOp(np.diag([np.exp(-r), np.exp(r)]), "squeezer")


def rotation_symplectic(theta: float) -> SymplecticOp:
    """Phase rotation ``a -> a e^{-i theta}``."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(np.array([[c, s], [-s, c]]), "rotation")


def apply_symplectic(state: GaussianState, op: SymplecticOp, modes: Sequence[int]) -> GaussianState:
    """Apply ``op`` to the listed modes, leaving all other modes untouched."""
    idx = _quad_indices(state, modes)
    if len(idx) != op.matrix.shape[0]:
        raise ValueError(f"op acts on {op.n_modes} modes but {len(idx)//2} were given")
    full = np.eye(state.cov.shape[0])
    full[np.ix_(idx, idx)] = op.matrix
    return GaussianState(full @ state.mean, full @ state.cov @ full.T)


# -- figures of merit -------------------------------------------------------


def mean_photon_number(state: GaussianState, mode: int = 0) -> float:
    v = state.mode_cov(mode)
    d = state.mode_mean(mode)
    n = (np.trace(v) / 2 - 1) / 2 + float(d @ d) / 4
    return max(float(n), 0.0)


def symplectic_eigenvalues(state_or_cov) -> np.ndarray:
    """Sorted symplectic spectrum, one value per mode."""
    cov = state_or_cov.cov if isinstance(state_or_cov, GaussianState) else np.asarray(state_or_cov, float)
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * max(1.0, float(np.max(np.abs(cov)))):
        raise ValueError("cov is not symmetric")
    n = cov.shape[0] // 2
    omega = symplectic_form(n)
    w, u = np.linalg.eigh(cov)
    if w[0] > 0:
        # i V^1/2 Omega V^1/2 is Hermitian with eigenvalues +/- nu; this keeps
        # the small eigenvalues accurate for strongly squeezed states
        root = (u * np.sqrt(w)) @ u.T
        ev = np.abs(np.linalg.eigvalsh(1j * root @ omega @ root))
    else:
        ev = np.abs(np.linalg.eigvals(1j * omega @ cov))
    # eigenvalues come in +/- pairs; keep one of each
    return np.sort(ev)[::2]


def partial_transpose(cov: np.ndarray, mode: int) -> np.ndarray:
    """Flip the sign of ``p`` on ``mode`` (Simon's partial transposition)."""
    flip = np.ones(cov.shape[0])
    flip[2 * mode + 1] = -1.0
    return cov * np.outer(flip, flip)


def log_negativity(state: GaussianState) -> float:
    """Logarithmic negativity (base 2) across the 1|1 bipartition."""
    if state.n_modes != 2:
        raise ValueError(f"log_negativity needs a two-mode state, got {state.n_modes} modes")
    nu_min = symplectic_eigenvalues(partial_transpose(state.cov, 1))[0]
    if nu_min >= 1.0 - NEGATIVITY_TOL:
        return 0.0
    return float(-np.log2(nu_min))


def fidelity_coherent_gaussian(cov_a, cov_b, mean_a=None, mean_b=None) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2`` of two single-mode Gaussians.

    In the unit-vacuum-variance convention, with ``D = det(Va + Vb)`` and
    ``P = (det Va - 1)(det Vb - 1)``::

        F = 2 / (sqrt(D + P) - sqrt(P)) * exp(-d^T (Va + Vb)^{-1} d / 2)

    where ``d`` is the difference of the mean vectors. ``P`` vanishes when
    either state is pure, recovering ``F = 2/sqrt(D) * exp(...)``.
    """
    va, vb = np.asarray(cov_a, float), np.asarray(cov_b, float)
    if va.shape != (2, 2) or vb.shape != (2, 2):
        raise ValueError("fidelity_coherent_gaussian takes single-mode (2x2) covariances")
    ma = np.zeros(2) if mean_a is None else np.asarray(mean_a, float)
    mb = np.zeros(2) if mean_b is None else np.asarray(mean_b, float)
    if ma.shape != (2,) or mb.shape != (2,):
        raise ValueError("means must be length-2 vectors")
    vsum = va + vb
    d = ma - mb
    det_sum = np.linalg.det(vsum)
    p = max(np.linalg.det(va) - 1.0, 0.0) * max(np.linalg.det(vb) - 1.0, 0.0)
    pref = 2.0 / (np.sqrt(det_sum + p) - np.sqrt(p))
    f = pref * np.exp(-0.5 * d @ np.linalg.solve(vsum, d))
    return float(min(f, 1.0))
