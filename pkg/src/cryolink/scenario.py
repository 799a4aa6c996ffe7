"""Config-driven scenarios: source -> channel chain -> metric, with optional sweeps.

Configs are YAML documents validated against ``data/scenario.schema.json``.
Units live in key names (``length_km``, ``temperature_k``, ...), and in
strict mode unknown keys are rejected, so a mistyped unit fails loudly
instead of silently falling back to a default.

Reports hold one flat record per sweep point plus a short human summary.
Record keys obey the same unit-suffix rule; :func:`lint_report` enforces it.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import channels, gaussian, linkbudget, protocols

SCHEMA = json.loads(resources.files("cryolink.data").joinpath("scenario.schema.json").read_text(encoding="utf-8"))

UNIT_SUFFIXES = ("_db", "_db_per_km", "_km", "_m", "_hz", "_ghz", "_k", "_ohm", "_photons", "_ebits")
DIMENSIONLESS_SUFFIXES = ("_transmissivity", "_fidelity", "_exponent", "_probability", "_r", "_index", "_count")
MEASURED_DOWNLINK_NOTE = (
    "context: losses measured on a real optical satellite downlink were ~65-82 dB; "
    "this ideal model omits pointing, turbulence and detector imperfections"
)


class ConfigError(ValueError):
    """Scenario config failed schema or semantic validation."""


class ReportLintError(ValueError):
    """A report field carries no recognised unit suffix."""


# -- reports -----------------------------------------------------------------


def _fmt_number(value):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(f"{float(value):.10g}") + 0.0


@dataclass
class Report:
    title: str
    records: list[dict] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)
    sweep_parameter: str | None = None
    passed: bool = True

    def formatted_records(self) -> list[dict]:
        return [{k: _fmt_number(v) for k, v in rec.items()} for rec in self.records]

    def to_json(self) -> str:
        doc = {"title": self.title, "records": self.formatted_records()}
        if self.sweep_parameter:
            doc["sweep_parameter"] = self.sweep_parameter
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        recs = self.formatted_records()
        if not recs:
            return ""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = list(recs[0])
        writer.writerow(keys)
        for rec in recs:
            row = []
            for k in keys:
                v = rec.get(k, "")
                if isinstance(v, bool):
                    v = "true" if v else "false"
                row.append(v)
            writer.writerow(row)
        return buf.getvalue()

    def summary_text(self) -> str:
        return "\n".join([self.title, "=" * len(self.title), *self.summary]) + "\n"


def lint_report(report: Report) -> None:
    """Reject numeric record fields whose name carries no unit or dimensionless suffix."""
    allowed = UNIT_SUFFIXES + DIMENSIONLESS_SUFFIXES
    for i, rec in enumerate(report.records):
        for key, value in rec.items():
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                continue
            if key == "sweep_value":
                last = (report.sweep_parameter or "").rsplit(".", 1)[-1]
                if last.endswith(allowed) or last in ("mode_pairs",):
                    continue
            if not key.endswith(allowed):
                raise ReportLintError(f"record {i}: field {key!r} has no unit suffix")


def db(x: float) -> str:
    return f"{x:.2f} dB"


# -- config loading ----------------------------------------------------------


def _node_line(root, path) -> int | None:
    node = root
    for part in path:
        if isinstance(node, yaml.MappingNode):
            match = [v for k, v in node.value if k.value == part]
            if not match:
                break
            node = match[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
        else:
            break
    return None if node is None else node.start_mark.line + 1


def _field_name(path) -> str:
    return ".".join(str(p) for p in path) or "<root>"


def _schema_errors(data) -> list[jsonschema.ValidationError]:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    return sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))


def _strip_unknown(data, errors) -> list[str]:
    dropped = []
    for err in errors:
        if err.validator != "additionalProperties":
            continue
        target = data
        for part in err.absolute_path:
            target = target[part]
        allowed = set(err.schema.get("properties", {}))
        for key in [k for k in target if k not in allowed]:
            del target[key]
            dropped.append(_field_name([*err.absolute_path, key]))
    return dropped


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario. ``data`` is the plain config mapping."""

    data: dict
    source_text: str | None = None

    @property
    def name(self) -> str:
        return self.data.get("name", "scenario")

    @property
    def source(self) -> dict:
        return self.data["source"]

    @property
    def channels(self) -> list[dict]:
        return self.data.get("channels", [])

    @property
    def metric(self) -> dict:
        return self.data["metric"]

    @property
    def sweep(self) -> dict | None:
        return self.data.get("sweep")

    @classmethod
    def from_dict(cls, data: dict, strict: bool = True, source_text: str | None = None) -> "ScenarioConfig":
        data = copy.deepcopy(data)
        root = yaml.compose(source_text) if source_text else None
        errors = _schema_errors(data)
        if errors and not strict:
            for name in _strip_unknown(data, errors):
                warnings.warn(f"ignoring unknown config key {name}", stacklevel=2)
            errors = _schema_errors(data)
        if errors:
            lines = []
            for err in errors:
                path = list(err.absolute_path)
                message = err.message
                if err.validator == "additionalProperties":
                    # point at the first offending key rather than its parent
                    extra = [k for k in err.instance if k not in err.schema.get("properties", {})]
                    path.append(extra[0])
                    message = f"unknown key (allowed: {', '.join(sorted(err.schema.get('properties', {})))})"
                line = _node_line(root, path) if root is not None else None
                where = f"line {line}: " if line else ""
                lines.append(f"{where}field {_field_name(path)}: {message}")
            raise ConfigError("invalid scenario config:\n  " + "\n  ".join(lines))
        cfg = cls(data, source_text)
        cfg._check_semantics()
        return cfg

    def _check_semantics(self) -> None:
        n_modes = _source_modes(self.source)
        for i, ch in enumerate(self.channels):
            if ch.get("mode", 0) >= n_modes:
                raise ConfigError(f"field channels.{i}.mode: mode {ch['mode']} out of range for a {n_modes}-mode source")
        kind = self.metric["kind"]
        if kind in ("log_negativity", "teleport_fidelity") and n_modes != 2:
            raise ConfigError(f"field metric.kind: {kind} needs a two-mode source")
        if kind == "occupation" and self.metric.get("mode", 0) >= n_modes:
            raise ConfigError("field metric.mode: out of range for the source")
        if self.sweep:
            path = self.sweep["parameter"].split(".")
            try:
                value = _get_path(self.data, path)
            except (KeyError, IndexError, TypeError):
                raise ConfigError(f"field sweep.parameter: {self.sweep['parameter']!r} does not name a config value")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"field sweep.parameter: {self.sweep['parameter']!r} is not numeric")
            if self.sweep.get("spacing") == "log" and (self.sweep["start"] <= 0 or self.sweep["stop"] <= 0):
                raise ConfigError("field sweep: log spacing needs positive start and stop")


def load_config(path, strict: bool = True) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text, strict=strict)


def parse_config(text: str, strict: bool = True) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    return ScenarioConfig.from_dict(data, strict=strict, source_text=text)


def _get_path(data, path):
    for part in path:
        data = data[int(part)] if isinstance(data, list) else data[part]
    return data


def _set_path(data, path, value):
    for part in path[:-1]:
        data = data[int(part)] if isinstance(data, list) else data[part]
    last = path[-1]
    if isinstance(data, list):
        data[int(last)] = value
    else:
        data[last] = value


def _source_modes(source: dict) -> int:
    if source["kind"] == "tmsv":
        return 2
    if source["kind"] == "thermal":
        return 1
    return source.get("modes", 1)


# -- execution ---------------------------------------------------------------


def _build_source(source: dict) -> gaussian.GaussianState:
    if source["kind"] == "tmsv":
        return gaussian.tmsv_state(source["squeezing_r"])
    if source["kind"] == "thermal":
        return gaussian.thermal_state(source["nbar_photons"])
    return gaussian.vacuum_state(source.get("modes", 1))


def resolve_atmosphere(name: str):
    if name == "none":
        return None
    if name == "bundled":
        return linkbudget.default_atmosphere()
    return linkbudget.load_atmosphere_csv(name)


def _apply_channel(state, ch: dict, prefix: str, rec: dict):
    mode = ch.get("mode", 0)
    kind = ch["kind"]
    if kind == "waveguide":
        profile = channels.WaveguideProfile(
            tuple(
                channels.WaveguideSegment(s["length_km"], s["attenuation_db_per_km"], s["temperature_k"])
                for s in ch["segments"]
            ),
            ch["frequency_hz"],
        )
        eta_tot, mu_tot = 1.0, 1.0
        for j, (seg, (eta, nbar)) in enumerate(zip(profile.segments, profile.stages())):
            rec[f"{prefix}seg{j}_loss_db"] = seg.loss_db
            rec[f"{prefix}seg{j}_transmissivity"] = eta
            rec[f"{prefix}seg{j}_env_nbar_photons"] = nbar
            eta_tot, mu_tot = channels.compose_loss((eta_tot, mu_tot), (eta, 2 * nbar + 1))
        rec[f"{prefix}loss_db"] = sum(s.loss_db for s in profile.segments)
        rec[f"{prefix}transmissivity"] = eta_tot
        rec[f"{prefix}effective_env_nbar_photons"] = (mu_tot - 1) / 2
        return channels.waveguide_channel(state, mode, profile), rec[f"{prefix}loss_db"]
    if kind == "open_air":
        geometry = linkbudget.LinkGeometry(
            wavelength=ch["wavelength_m"],
            distance_km=ch["distance_km"],
            tx_aperture=ch["tx_aperture_m"],
            rx_aperture=ch["rx_aperture_m"],
            atmosphere=resolve_atmosphere(ch["atmosphere"]),
            absorption_path_km=ch.get("absorption_path_km"),
            efficiency=ch.get("aperture_efficiency", 1.0),
        )
        budget = linkbudget.link_budget(geometry)
        mismatch = 0.0
        if "source_impedance_ohm" in ch:
            # one impedance step at each antenna
            mismatch = 2 * linkbudget.impedance_reflection(ch["source_impedance_ohm"], ch["load_impedance_ohm"])[1]
        total = budget.total_db + mismatch
        # a budget below 0 dB means the receiver captures the whole beam
        eta = linkbudget.loss_to_transmissivity(max(total, 0.0))
        nbar = channels.planck_occupation(geometry.frequency_hz, ch["environment_temperature_k"])
        rec.update(
            {
                f"{prefix}path_loss_db": budget.path_loss_db,
                f"{prefix}absorption_db": budget.absorption_db,
                f"{prefix}tx_gain_db": budget.tx_gain_db,
                f"{prefix}rx_gain_db": budget.rx_gain_db,
                f"{prefix}mismatch_db": mismatch,
                f"{prefix}loss_db": total,
                f"{prefix}capture_limited": total < 0,
                f"{prefix}transmissivity": eta,
                f"{prefix}env_nbar_photons": nbar,
            }
        )
        return channels.loss_channel(state, mode, eta, nbar), total
    # explicit loss
    if "environment_temperature_k" in ch:
        nbar = channels.planck_occupation(ch["frequency_hz"], ch["environment_temperature_k"])
    else:
        nbar = ch.get("environment_nbar_photons", 0.0)
    eta = linkbudget.loss_to_transmissivity(ch["loss_db"])
    rec[f"{prefix}loss_db"] = ch["loss_db"]
    rec[f"{prefix}transmissivity"] = eta
    rec[f"{prefix}env_nbar_photons"] = nbar
    return channels.loss_channel(state, mode, eta, nbar), ch["loss_db"]


def _evaluate_metric(state, metric: dict, total_loss: float, rec: dict) -> None:
    kind = metric["kind"]
    if kind == "occupation":
        rec["metric_occupation_photons"] = gaussian.mean_photon_number(state, metric.get("mode", 0))
    elif kind == "log_negativity":
        rec["metric_log_negativity_ebits"] = gaussian.log_negativity(state)
    elif kind == "teleport_fidelity":
        noise = protocols.teleport_added_noise(state)
        rec["metric_teleport_fidelity"] = protocols.teleport_fidelity_coherent(noise)
        rec["classical_limit_fidelity"] = 0.5
    elif kind == "link_loss":
        rec["metric_total_loss_db"] = total_loss
    elif kind == "qi_advantage":
        sc = protocols.IlluminationScenario(
            metric["reflectivity"], metric["signal_photons"], metric["background_photons"], metric.get("mode_pairs", 1)
        )
        form = metric.get("form", "asymptotic")
        for p in protocols.PROTOCOLS:
            rec[f"{p}_exponent"] = protocols.qi_error_exponent(p, sc, form)
            rec[f"{p}_error_bound_probability"] = protocols.qi_error_probability_bound(p, sc, form)
        rec["metric_qi_advantage_db"] = protocols.qi_advantage_db(sc, form)


def run_point(config: ScenarioConfig) -> dict:
    """Evaluate one configuration; returns the flat record of every intermediate quantity."""
    rec: dict = {}
    state = _build_source(config.source)
    total_loss = 0.0
    for i, ch in enumerate(config.channels):
        rec[f"ch{i}_kind"] = ch["kind"]
        state, loss = _apply_channel(state, ch, f"ch{i}_", rec)
        total_loss += loss
    rec["total_loss_db"] = total_loss
    for m in range(state.n_modes):
        rec[f"out_mode{m}_occupation_photons"] = gaussian.mean_photon_number(state, m)
    _evaluate_metric(state, config.metric, total_loss, rec)
    return rec


def sweep_values(sweep: dict) -> np.ndarray:
    if sweep.get("spacing", "linear") == "log":
        return np.geomspace(sweep["start"], sweep["stop"], sweep["steps"])
    return np.linspace(sweep["start"], sweep["stop"], sweep["steps"])


def run_scenario(config: ScenarioConfig) -> Report:
    """Run every sweep point in order. Physics violations propagate as :class:`PhysicalityError`."""
    report = Report(title=f"scenario: {config.name}")
    sweep = config.sweep

    if sweep is None:
        points = [(None, config)]
    else:
        path = sweep["parameter"].split(".")
        report.sweep_parameter = sweep["parameter"]
        points = []
        for value in sweep_values(sweep):
            data = copy.deepcopy(config.data)
            original = _get_path(data, path)
            _set_path(data, path, int(round(value)) if isinstance(original, int) and not isinstance(original, bool) else float(value))
            try:
                points.append((value, ScenarioConfig.from_dict(data)))
            except ConfigError as exc:
                raise ConfigError(f"sweep value {value:g} for {sweep['parameter']}: {exc}") from exc
    for idx, (value, cfg) in enumerate(points):
        rec = {"point_index": idx}
        if value is not None:
            rec["sweep_value"] = float(value)
        rec.update(run_point(cfg))
        report.records.append(rec)
    metric_key = next(k for k in report.records[0] if k.startswith("metric_"))
    report.summary.append(f"metric: {config.metric['kind']} ({len(report.records)} point(s))")
    for rec in report.formatted_records():
        head = f"  point {rec['point_index']}"
        if "sweep_value" in rec:
            head += f"  {sweep['parameter']} = {rec['sweep_value']:g}"
        val = rec[metric_key]
        shown = db(val) if metric_key.endswith("_db") else f"{val:.6g}"
        report.summary.append(f"{head}  total loss {db(rec['total_loss_db'])}  {metric_key} = {shown}")
    return report


# -- reproductions -----------------------------------------------------------

TABLE1_DISTANCES_KM = (1.0, 100.0, 1000.0)
TABLE1_BANDS = {
    # band: (wavelength m, nominal frequency Hz, published L_P dB, published L_A dB)
    "optics": (810e-9, 370e12, (204.0, 244.0, 264.0), (3e-2, 3.0, 30.0)),
    "microwave": (60e-3, 5e9, (106.0, 146.0, 166.0), (9e-3, 0.9, 9.0)),
}
TABLE1_LP_TOL_DB = 0.5
TABLE1_LA_RTOL = 0.05


def reproduce_table1(table: linkbudget.AtmosphereTable | None = None) -> Report:
    """Isotropic path loss and absorption for two bands at 1, 100 and 1000 km, checked against published values.

    ``table`` defaults to :func:`~cryolink.linkbudget.default_atmosphere`, so
    ``CRYOLINK_ATMOS_PATH`` applies. ``report.passed`` is False when any
    cell misses its tolerance.
    """
    table = linkbudget.default_atmosphere() if table is None else table
    report = Report(title="isotropic path loss L_P and absorption L_A")
    report.summary.append(f"{'band':<10}{'d (km)':>8}{'L_P (dB)':>10}{'ref':>7}{'L_A (dB)':>11}{'ref':>9}  ok")
    for band, (wl, freq, lp_ref, la_ref) in TABLE1_BANDS.items():
        for d, lp0, la0 in zip(TABLE1_DISTANCES_KM, lp_ref, la_ref):
            lp = linkbudget.free_space_path_loss_db(wl, d)
            la = linkbudget.absorption_db(freq, d, table)
            ok = abs(lp - lp0) <= TABLE1_LP_TOL_DB and abs(la - la0) <= TABLE1_LA_RTOL * la0
            report.passed &= ok
            report.records.append(
                {
                    "band": band,
                    "wavelength_m": wl,
                    "distance_km": d,
                    "path_loss_db": lp,
                    "reference_path_loss_db": lp0,
                    "absorption_db": la,
                    "reference_absorption_db": la0,
                    "within_tolerance": ok,
                }
            )
            report.summary.append(
                f"{band:<10}{d:>8g}{lp:>10.2f}{lp0:>7g}{la:>11.4g}{la0:>9g}  {'yes' if ok else 'NO'}"
            )
    report.summary.append(
        f"tolerance: L_P within {TABLE1_LP_TOL_DB} dB, L_A within {TABLE1_LA_RTOL:.0%}; "
        + ("all cells pass" if report.passed else "SOME CELLS FAIL")
    )
    return report


def emit_attenuation_curve(table: linkbudget.AtmosphereTable, lo_ghz: float, hi_ghz: float) -> Report:
    """Two-column (frequency, dB/km) slice of ``table`` over ``[lo_ghz, hi_ghz]``."""
    freq, att = table.band(lo_ghz, hi_ghz)
    report = Report(title=f"atmospheric attenuation {lo_ghz:g}-{hi_ghz:g} GHz")
    report.records = [
        {"frequency_ghz": float(f), "attenuation_db_per_km": float(a)} for f, a in zip(freq, att)
    ]
    report.summary.append(f"{len(freq)} rows from {freq[0]:g} to {freq[-1]:g} GHz")
    if table.metadata:
        report.summary.extend("  " + line for line in table.metadata.splitlines())
    return report
