"""Truncated Fock-basis density matrices for a few Gaussian families.

Used as an independent route to quantities otherwise computed from
covariance matrices. Supported inputs:

* single-mode states with isotropic covariance (thermal, coherent,
  displaced thermal);
* two-mode zero-mean states with covariance blocks ``A = a I``,
  ``B = b I``, ``C = c Z`` (TMSV, products of thermal states, TMSV with
  an arm through a thermal-loss channel).

Two-mode states of the second kind commute with ``n1 - n2``, so they are
returned as blocks labelled by the photon-number difference. This keeps a
cutoff of 80 per mode down to matrices of size <= 80.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .gaussian import GaussianState

_Z = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class FockBlocks:
    """Block-diagonal truncated density matrix.

    ``blocks[k]`` is the matrix on the sector labelled ``k``; ``basis[k]``
    lists the Fock labels (tuples of photon numbers) of that sector.
    """

    blocks: dict
    basis: dict

    @property
    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks.values()))

    def dense(self) -> np.ndarray:
        labels = sorted(lab for k in self.basis for lab in self.basis[k])
        pos = {lab: i for i, lab in enumerate(labels)}
        out = np.zeros((len(labels), len(labels)), dtype=complex)
        for k, b in self.blocks.items():
            idx = [pos[lab] for lab in self.basis[k]]
            out[np.ix_(idx, idx)] = b
        return out


def thermal_weights(nbar: float, size: int) -> np.ndarray:
    n = np.arange(size)
    if nbar == 0:
        return (n == 0).astype(float)
    return np.exp(n * math.log(nbar / (1 + nbar)) - math.log1p(nbar))


def displacement_matrix(alpha: complex, size: int) -> np.ndarray:
    """``<m|D(alpha)|n>`` for ``m, n < size`` from the Laguerre closed form."""
    if alpha == 0:
        return np.eye(size, dtype=complex)
    x = abs(alpha) ** 2
    m, n = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    lo, hi = np.minimum(m, n), np.maximum(m, n)
    k = hi - lo
    # |<m|D|n>| = sqrt(lo!/hi!) |alpha|^k e^{-x/2} |L_lo^{(k)}(x)|
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + k * math.log(abs(alpha)) - x / 2
    lag = eval_genlaguerre(lo, k, x)
    # unit phase from the angle; alpha / |alpha| overflows for subnormal alpha
    u = np.exp(1j * np.angle(alpha))
    phase_up = u**k  # m >= n: alpha^k
    phase_down = (-np.conj(u)) ** k  # m < n: (-alpha*)^k
    phase = np.where(m >= n, phase_up, phase_down)
    return np.exp(log_mag) * lag * phase


def _single_mode(state: GaussianState, cutoff: int, pad: int) -> FockBlocks:
    v = state.cov
    if abs(v[0, 1]) > 1e-12 * v[0, 0] or abs(v[0, 0] - v[1, 1]) > 1e-12 * v[0, 0]:
        raise ValueError("Fock construction supports only isotropic single-mode covariances")
    nbar = (v[0, 0] - 1) / 2
    alpha = complex(state.mean[0], state.mean[1]) / 2
    size = cutoff + pad
    d = displacement_matrix(alpha, size)
    rho = (d * thermal_weights(nbar, size)) @ d.conj().T
    rho = rho[:cutoff, :cutoff]
    if alpha == 0:
        rho = rho.real
    return FockBlocks({0: rho}, {0: [(n,) for n in range(cutoff)]})


def _two_mode_squeeze_block(r: float, k: int, size: int) -> np.ndarray:
    # exp(r (a^dag b^dag - a b)) on the sector n1 - n2 = k, basis |j + k+, j + k->, j = 0..size-1
    kp = abs(k)
    j = np.arange(size - 1)
    off = np.sqrt((j + kp + 1.0) * (j + 1.0))
    gen = np.diag(off, -1) - np.diag(off, 1)
    return expm(r * gen)


def _two_mode(state: GaussianState, cutoff: int, pad: int) -> FockBlocks:
    v = state.cov
    a, b, c = v[0, 0], v[2, 2], v[0, 2]
    expected = np.block([[a * np.eye(2), c * _Z], [c * _Z, b * np.eye(2)]])
    if np.any(state.mean != 0) or not np.allclose(v, expected, rtol=1e-12, atol=1e-12 * a):
        raise ValueError("Fock construction supports only zero-mean two-mode states with A=aI, B=bI, C=cZ")
    # V = S2(r) [nu1 I (+) nu2 I] S2(r)^T
    r = 0.5 * math.atanh(2 * c / (a + b))
    nu_sum = math.sqrt((a + b) ** 2 - 4 * c * c)
    nu1, nu2 = (nu_sum + a - b) / 2, (nu_sum - a + b) / 2
    n1, n2 = max((nu1 - 1) / 2, 0.0), max((nu2 - 1) / 2, 0.0)
    size = cutoff + pad
    p1, p2 = thermal_weights(n1, 2 * size), thermal_weights(n2, 2 * size)
    blocks, basis = {}, {}
    j = np.arange(size)
    for k in range(-(cutoff - 1), cutoff):
        kp = abs(k)
        w = p1[j + kp] * p2[j] if k >= 0 else p1[j] * p2[j + kp]
        s = _two_mode_squeeze_block(r, k, size) if r != 0 else np.eye(size)
        rho = (s * w) @ s.T
        keep = cutoff - kp
        blocks[k] = rho[:keep, :keep]
        basis[k] = [(i + kp, i) if k >= 0 else (i, i + kp) for i in range(keep)]
    return FockBlocks(blocks, basis)


def fock_blocks(state: GaussianState, cutoff: int, pad: int | None = None) -> FockBlocks:
    """Truncated Fock representation of ``state`` with photon numbers ``< cutoff`` per mode.

    Internally the construction runs on a padded space of ``cutoff + pad``
    levels before truncating, so truncation only removes population above
    the cutoff instead of distorting the retained elements.
    """
    cutoff = int(cutoff)
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    pad = cutoff if pad is None else int(pad)
    if state.n_modes == 1:
        return _single_mode(state, cutoff, pad)
    if state.n_modes == 2:
        return _two_mode(state, cutoff, pad)
    raise ValueError(f"Fock construction supports 1 or 2 modes, got {state.n_modes}")


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2`` for dense density matrices."""
    w, u = np.linalg.eigh(rho)
    sq = (u * np.sqrt(np.clip(w, 0, None))) @ u.conj().T
    inner = np.linalg.eigvalsh(sq @ sigma @ sq)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)
