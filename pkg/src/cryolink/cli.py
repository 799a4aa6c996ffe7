"""Command-line front end.

Every subcommand builds a :class:`~cryolink.scenario.Report`. Records go to
``--out`` (or stdout) as CSV or JSON, the human summary to
``<out stem>.summary.txt`` (or stderr).

Exit codes: 0 success, 2 bad config or arguments, 3 physics-invariant
violation, 4 reproduction outside tolerance.
"""

from __future__ import annotations

import functools
from pathlib import Path

import click

from . import channels, gaussian, linkbudget, protocols, scenario

EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_TOLERANCE = 4


def _output_options(func):
    func = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True,
                        help="Record format.")(func)
    func = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                        help="Write records here and the summary next to it.")(func)
    return func


def _guarded(func):
    """Map library exceptions onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (gaussian.PhysicalityError, channels.ConvergenceError) as exc:
            click.echo(f"physics error: {exc}", err=True)
            raise SystemExit(EXIT_PHYSICS)
        except (scenario.ConfigError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(EXIT_CONFIG)

    return wrapper


def emit(report: scenario.Report, out: Path | None, fmt: str) -> None:
    scenario.lint_report(report)
    body = report.to_json() if fmt == "json" else report.to_csv()
    summary = report.summary_text()
    if out is None:
        click.echo(body, nl=False)
        click.echo(summary, nl=False, err=True)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(body, encoding="utf-8")
    out.with_name(out.stem + ".summary.txt").write_text(summary, encoding="utf-8")


@click.group()
def main():
    """Gaussian-state models of cryogenic and open-air quantum microwave links."""


@main.command()
@click.option("--frequency-hz", type=float, multiple=True, required=True)
@click.option("--temperature-k", type=float, multiple=True, required=True)
@_output_options
@_guarded
def occupancy(frequency_hz, temperature_k, out, fmt):
    """Thermal photon occupation for every (frequency, temperature) pair."""
    report = scenario.Report(title="thermal occupation")
    for f in frequency_hz:
        for t in temperature_k:
            n = channels.planck_occupation(f, t)
            report.records.append({"frequency_hz": f, "temperature_k": t, "occupation_photons": n})
            report.summary.append(f"  {f:.4g} Hz at {t:g} K: nbar = {n:.4g}")
    emit(report, out, fmt)


@main.command()
@click.option("--wavelength-m", type=float, required=True)
@click.option("--distance-km", type=float, required=True)
@click.option("--tx-aperture-m", type=float, required=True)
@click.option("--rx-aperture-m", type=float, required=True)
@click.option("--absorption-path-km", type=float, default=None, help="Defaults to min(distance, 10 km).")
@click.option("--atmosphere", default="bundled", show_default=True, help="'bundled', 'none' or a CSV path.")
@click.option("--aperture-efficiency", type=float, default=1.0, show_default=True)
@_output_options
@_guarded
def linkbudget_cmd(wavelength_m, distance_km, tx_aperture_m, rx_aperture_m, absorption_path_km, atmosphere,
                   aperture_efficiency, out, fmt):
    """Friis budget of a single open-air hop."""
    geometry = linkbudget.LinkGeometry(
        wavelength_m, distance_km, tx_aperture_m, rx_aperture_m,
        atmosphere=scenario.resolve_atmosphere(atmosphere),
        absorption_path_km=absorption_path_km,
        efficiency=aperture_efficiency,
    )
    b = linkbudget.link_budget(geometry)
    report = scenario.Report(title="open-air link budget")
    report.records.append(
        {
            "wavelength_m": wavelength_m,
            "distance_km": distance_km,
            "absorption_path_km": geometry.absorption_path_km,
            "path_loss_db": b.path_loss_db,
            "absorption_db": b.absorption_db,
            "tx_gain_db": b.tx_gain_db,
            "rx_gain_db": b.rx_gain_db,
            "total_loss_db": b.total_db,
        }
    )
    report.summary += [
        f"  path loss       {scenario.db(b.path_loss_db)}",
        f"  absorption      {scenario.db(b.absorption_db)} over {geometry.absorption_path_km:g} km",
        f"  tx gain         {scenario.db(b.tx_gain_db)}",
        f"  rx gain         {scenario.db(b.rx_gain_db)}",
        f"  total           {scenario.db(b.total_db)}" + ("  (net gain)" if b.total_db < 0 else ""),
        scenario.MEASURED_DOWNLINK_NOTE,
    ]
    emit(report, out, fmt)


main.add_command(linkbudget_cmd, name="linkbudget")


def _parse_segment(text: str) -> channels.WaveguideSegment:
    try:
        length, att, temp = (float(x) for x in text.split(":"))
    except ValueError:
        raise click.BadParameter(f"expected LENGTH_KM:DB_PER_KM:TEMPERATURE_K, got {text!r}")
    return channels.WaveguideSegment(length, att, temp)


@main.command()
@click.option("--frequency-hz", type=float, required=True)
@click.option("--segment", "segments", multiple=True, required=True, metavar="LENGTH_KM:DB_PER_KM:TEMPERATURE_K",
              help="Repeat for each segment, in order.")
@click.option("--squeezing-r", type=float, default=1.0, show_default=True,
              help="TMSV squeezing; one arm travels the waveguide.")
@_output_options
@_guarded
def waveguide(frequency_hz, segments, squeezing_r, out, fmt):
    """Piecewise waveguide: per-segment loss and noise, continuous limit, surviving entanglement."""
    profile = channels.WaveguideProfile(tuple(_parse_segment(s) for s in segments), frequency_hz)
    report = scenario.Report(title="waveguide")
    for j, (seg, (eta, nbar)) in enumerate(zip(profile.segments, profile.stages())):
        report.records.append(
            {
                "segment_index": j,
                "length_km": seg.length_km,
                "attenuation_db_per_km": seg.attenuation_db_per_km,
                "temperature_k": seg.temperature_k,
                "loss_db": seg.loss_db,
                "segment_transmissivity": eta,
                "env_nbar_photons": nbar,
            }
        )
        report.summary.append(f"  segment {j}: {scenario.db(seg.loss_db)}, eta = {eta:.6g}, nbar = {nbar:.4g}")
    eta, noise = channels.continuous_stage(profile)
    state = channels.waveguide_channel(gaussian.tmsv_state(squeezing_r), 1, profile)
    report.summary += [
        f"  end to end: eta = {eta:.6g}, added noise = {noise:.4g} (vacuum units)",
        f"  TMSV r = {squeezing_r:g}: log-negativity {gaussian.log_negativity(gaussian.tmsv_state(squeezing_r)):.4f}"
        f" -> {gaussian.log_negativity(state):.4f} ebits",
    ]
    emit(report, out, fmt)


@main.command()
@click.option("--reflectivity", type=float, required=True)
@click.option("--signal-photons", type=float, required=True)
@click.option("--background-photons", type=float, required=True)
@click.option("--mode-pairs", type=int, default=1, show_default=True)
@click.option("--form", type=click.Choice(protocols.FORMS), default="asymptotic", show_default=True)
@click.option("--oracle/--no-oracle", default=False, help="Also evaluate the numeric Chernoff bound.")
@click.option("--cutoff", type=int, default=protocols.DEFAULT_CUTOFF, show_default=True)
@_output_options
@_guarded
def illuminate(reflectivity, signal_photons, background_photons, mode_pairs, form, oracle, cutoff, out, fmt):
    """Quantum-illumination error exponents and advantage."""
    sc = protocols.IlluminationScenario(reflectivity, signal_photons, background_photons, mode_pairs)
    report = scenario.Report(title="quantum illumination")
    for p in protocols.PROTOCOLS:
        rec = {
            "protocol": p,
            "closed_form_exponent": protocols.qi_error_exponent(p, sc, form),
            "error_bound_probability": protocols.qi_error_probability_bound(p, sc, form),
        }
        line = f"  {p:<9} exponent {rec['closed_form_exponent']:.6g}"
        if oracle:
            rec["numeric_exponent"] = protocols.qcb_exponent_numeric(*protocols.qi_hypothesis_states(p, sc), cutoff)
            line += f", numeric {rec['numeric_exponent']:.6g}"
        report.records.append(rec)
        report.summary.append(line)
    report.summary.append(f"  advantage {scenario.db(protocols.qi_advantage_db(sc, form))} ({form} form)")
    emit(report, out, fmt)


@main.command()
@click.option("--squeezing-r", type=float, multiple=True, required=True)
@click.option("--loss-db", type=float, default=0.0, show_default=True, help="Loss on the receiver's arm.")
@click.option("--env-nbar-photons", type=float, default=0.0, show_default=True)
@_output_options
@_guarded
def teleport(squeezing_r, loss_db, env_nbar_photons, out, fmt):
    """Unity-gain coherent-state teleportation fidelity."""
    eta = linkbudget.loss_to_transmissivity(loss_db)
    report = scenario.Report(title="coherent-state teleportation")
    for r in squeezing_r:
        resource = channels.loss_channel(gaussian.tmsv_state(r), 1, eta, env_nbar_photons)
        f = protocols.teleport_fidelity_coherent(protocols.teleport_added_noise(resource))
        report.records.append({"squeezing_r": r, "loss_db": loss_db, "teleport_fidelity": f})
        report.summary.append(f"  r = {r:g}: F = {f:.6f}" + ("  (beats classical 1/2)" if f > 0.5 + 1e-12 else ""))
    emit(report, out, fmt)


@main.command()
@_output_options
@_guarded
def table1(out, fmt):
    """Path loss and absorption table, compared against published values."""
    report = scenario.reproduce_table1()
    emit(report, out, fmt)
    if not report.passed:
        raise SystemExit(EXIT_TOLERANCE)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--strict/--no-strict", default=True, show_default=True, help="Reject unknown config keys.")
@_output_options
@_guarded
def run(config, strict, out, fmt):
    """Run a scenario config."""
    emit(scenario.run_scenario(scenario.load_config(config, strict=strict)), out, fmt)


@main.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--lo-ghz", type=float, required=True)
@click.option("--hi-ghz", type=float, required=True)
@_output_options
@_guarded
def attenuation(csv_path, lo_ghz, hi_ghz, out, fmt):
    """Slice an attenuation table to a band, as plot data."""
    emit(scenario.emit_attenuation_curve(linkbudget.load_atmosphere_csv(csv_path), lo_ghz, hi_ghz), out, fmt)


if __name__ == "__main__":
    main()
