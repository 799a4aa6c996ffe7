"""Open-air link budget: Friis path loss, aperture gains, absorption, impedance mismatch.

Budget in dB (positive numbers are losses)::

    L = L_P + L_A - G_t - G_r

with the isotropic path loss ``L_P = -20 log10(lambda / (4 pi d))``, the
atmospheric absorption ``L_A`` and the aperture gains
``G = 10 log10(e * 4 pi D**2 / lambda**2)``. The gain follows from
``G = 4 pi / Omega`` with beam solid angle ``Omega = theta**2`` and
divergence ``theta = lambda / D``; ``e`` is an aperture efficiency (1 for
an ideal lossless parabola). Using ``Omega = pi theta**2 / 4`` instead would
raise every gain by 1.05 dB.

A negative total is a net gain and is reported as such.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.constants

ATMOS_ENV_VAR = "CRYOLINK_ATMOS_PATH"
CSV_HEADER = ("frequency_ghz", "attenuation_db_per_km")
SATELLITE_ABSORPTION_CEILING_KM = 10.0
SPEED_OF_LIGHT = scipy.constants.c


class AtmosphereRangeError(ValueError):
    """Requested frequency lies outside the ingested attenuation table."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def free_space_path_loss_db(wavelength: float, distance_km: float) -> float:
    """Isotropic free-space path loss for ``wavelength`` in m and ``distance_km`` in km."""
    wavelength = _positive("wavelength", wavelength)
    d = _positive("distance", distance_km) * 1e3
    return -20 * math.log10(wavelength / (4 * math.pi * d))


def antenna_gain_db(wavelength: float, aperture_diameter: float, efficiency: float = 1.0) -> float:
    wavelength = _positive("wavelength", wavelength)
    diameter = _positive("aperture diameter", aperture_diameter)
    efficiency = _positive("efficiency", efficiency)
    if efficiency > 1:
        raise ValueError(f"efficiency must be <= 1, got {efficiency}")
    theta = wavelength / diameter
    return 10 * math.log10(efficiency * 4 * math.pi / theta**2)


def impedance_reflection(z_source: float, z_load: float) -> tuple[float, float]:
    """Reflection coefficient and mismatch loss (dB) at a resistive impedance step."""
    z_source = _positive("source impedance", z_source)
    z_load = _positive("load impedance", z_load)
    gamma = (z_load - z_source) / (z_load + z_source)
    return gamma, -10 * math.log10(1 - gamma**2)


def loss_to_transmissivity(loss_db: float) -> float:
    loss_db = float(loss_db)
    if loss_db < 0:
        raise ValueError(f"loss must be >= 0 dB to map to a transmissivity, got {loss_db}")
    return 10 ** (-loss_db / 10)


def transmissivity_to_loss_db(eta: float) -> float:
    if not 0 < eta <= 1:
        raise ValueError(f"transmissivity must lie in (0, 1], got {eta}")
    return -10 * math.log10(eta)


# -- atmosphere --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AtmosphereTable:
    """Attenuation (dB/km) sampled on a strictly increasing frequency grid (GHz)."""

    frequency_ghz: np.ndarray
    attenuation_db_per_km: np.ndarray
    metadata: str = ""

    def __post_init__(self):
        f = np.array(self.frequency_ghz, dtype=float)
        a = np.array(self.attenuation_db_per_km, dtype=float)
        if f.ndim != 1 or f.shape != a.shape or f.size == 0:
            raise ValueError("frequency and attenuation columns must be non-empty and equal length")
        if np.any(np.diff(f) <= 0):
            raise ValueError("table frequencies must be strictly increasing")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise ValueError("attenuations must be finite and >= 0")
        f.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "frequency_ghz", f)
        object.__setattr__(self, "attenuation_db_per_km", a)

    def attenuation_at(self, frequency_ghz: float) -> float:
        f = float(frequency_ghz)
        lo, hi = self.frequency_ghz[0], self.frequency_ghz[-1]
        if not lo <= f <= hi:
            raise AtmosphereRangeError(f"{f:g} GHz is outside the table range [{lo:g}, {hi:g}] GHz")
        return float(np.interp(f, self.frequency_ghz, self.attenuation_db_per_km))

    def band(self, lo_ghz: float, hi_ghz: float) -> tuple[np.ndarray, np.ndarray]:
        """Rows with ``lo_ghz <= f <= hi_ghz``, in table order."""
        if lo_ghz > hi_ghz:
            raise ValueError(f"empty band [{lo_ghz}, {hi_ghz}]")
        if hi_ghz < self.frequency_ghz[0] or lo_ghz > self.frequency_ghz[-1]:
            raise AtmosphereRangeError(
                f"band [{lo_ghz:g}, {hi_ghz:g}] GHz does not overlap the table range "
                f"[{self.frequency_ghz[0]:g}, {self.frequency_ghz[-1]:g}] GHz"
            )
        mask = (self.frequency_ghz >= lo_ghz) & (self.frequency_ghz <= hi_ghz)
        if not mask.any():
            raise AtmosphereRangeError(f"no table rows inside [{lo_ghz:g}, {hi_ghz:g}] GHz")
        return self.frequency_ghz[mask], self.attenuation_db_per_km[mask]


def parse_atmosphere_csv(text: str) -> AtmosphereTable:
    comments, rows = [], []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            comments.append(line.lstrip()[1:].strip())
        elif line.strip():
            rows.append(line)
    if not rows:
        raise ValueError("atmosphere CSV has no header")
    reader = csv.reader(io.StringIO("\n".join(rows)))
    header = tuple(h.strip() for h in next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"atmosphere CSV header must be {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
    freq, att = [], []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != 2:
            raise ValueError(f"atmosphere CSV data row {lineno}: expected 2 columns, got {len(rec)}")
        freq.append(float(rec[0]))
        att.append(float(rec[1]))
    return AtmosphereTable(np.array(freq), np.array(att), "\n".join(c for c in comments if c))


def load_atmosphere_csv(path) -> AtmosphereTable:
    return parse_atmosphere_csv(Path(path).read_text(encoding="utf-8"))


def default_atmosphere() -> AtmosphereTable:
    """Bundled coarse table, or the file named by ``CRYOLINK_ATMOS_PATH`` when set."""
    override = os.environ.get(ATMOS_ENV_VAR)
    if override:
        return load_atmosphere_csv(override)
    text = resources.files("cryolink.data").joinpath("atmosphere_default.csv").read_text(encoding="utf-8")
    return parse_atmosphere_csv(text)


def absorption_db(frequency_hz: float, path_km: float, table: AtmosphereTable) -> float:
    """Atmospheric absorption over ``path_km`` at ``frequency_hz``; no extrapolation."""
    frequency_hz = _positive("frequency", frequency_hz)
    path_km = float(path_km)
    if path_km < 0:
        raise ValueError(f"path length must be >= 0, got {path_km}")
    return table.attenuation_at(frequency_hz / 1e9) * path_km


# -- full link ---------------------------------------------------------------


@dataclass(frozen=True)
class LinkGeometry:
    """Open-air link. ``absorption_path_km`` defaults to ``min(distance, 10 km)``."""

    wavelength: float
    distance_km: float
    tx_aperture: float
    rx_aperture: float
    atmosphere: AtmosphereTable | None = None
    absorption_path_km: float | None = None
    efficiency: float = 1.0

    def __post_init__(self):
        for name in ("wavelength", "distance_km", "tx_aperture", "rx_aperture"):
            _positive(name, getattr(self, name))
        if self.absorption_path_km is None:
            object.__setattr__(self, "absorption_path_km", min(self.distance_km, SATELLITE_ABSORPTION_CEILING_KM))
        if not 0 <= self.absorption_path_km <= self.distance_km:
            raise ValueError(f"absorption path {self.absorption_path_km} km must lie in [0, distance]")

    @property
    def frequency_hz(self) -> float:
        return SPEED_OF_LIGHT / self.wavelength


@dataclass(frozen=True)
class LinkBudget:
    path_loss_db: float
    absorption_db: float
    tx_gain_db: float
    rx_gain_db: float
    total_db: float = field(init=False)

    def __post_init__(self):
        total = self.path_loss_db + self.absorption_db - self.tx_gain_db - self.rx_gain_db
        object.__setattr__(self, "total_db", total)


def link_budget(geometry: LinkGeometry) -> LinkBudget:
    g = geometry
    l_a = 0.0 if g.atmosphere is None else absorption_db(g.frequency_hz, g.absorption_path_km, g.atmosphere)
    return LinkBudget(
        path_loss_db=free_space_path_loss_db(g.wavelength, g.distance_km),
        absorption_db=l_a,
        tx_gain_db=antenna_gain_db(g.wavelength, g.tx_aperture, g.efficiency),
        rx_gain_db=antenna_gain_db(g.wavelength, g.rx_aperture, g.efficiency),
    )


def total_link_loss_db(geometry: LinkGeometry) -> float:
    return link_budget(geometry).total_db
