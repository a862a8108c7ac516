"""Command-line surface: fidelity evaluation, factor optimization, sweeps,
and LG mode decomposition with machine-readable JSON/CSV output.

Exit codes: 0 success, 2 validation failure, 3 numerical non-convergence.
All physical inputs are SI; *-mm/-um/-ps convenience flags convert at parse
time.  Numbers are serialized with 12 significant digits and the payload
carries no timestamps or randomness, so identical configurations produce
byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
from typing import Optional

import click

from . import __version__
from .fidelity import (
    ALPHA_BETA_BOUNDS,
    ALPHA_BOUNDS,
    SPECTRAL_ALPHA_BOUNDS,
    default_t0_grid,
    fidelity_report,
    optimize_factors,
    sweep as run_sweep_points,
)
from .lgdecomp import amplitude_table, schmidt_number, spiral_spectrum
from .model import ApproxSpec, CrystalOptics, PumpSpec, load_preset
from .numerics import NonConvergenceError, QuadSpec

MODES = ("spatial", "spectral", "spatio-temporal")
EXIT_NUMERICAL = 3


def _sig12(x):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _sig12(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sig12(v) for v in x]
    return x


def _emit(payload: str, output: Optional[str]):
    if output is None:
        click.echo(payload, nl=False)
        return
    out_dir = os.environ.get("SINCGAUSS_OUTPUT_DIR", "")
    if out_dir and not os.path.isabs(output):
        output = os.path.join(out_dir, output)
    with open(output, "w") as fh:
        fh.write(payload)


def _emit_json(obj: dict, output: Optional[str]):
    _emit(json.dumps(_sig12(obj), indent=2, sort_keys=False) + "\n", output)


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise click.UsageError("--config must contain a JSON object")
    return cfg


def _merged(cfg: dict, key: str, value, default=None):
    """CLI flag wins over config file, config over default."""
    if value is not None:
        return value
    return cfg.get(key, default)


def _build_crystal(cfg: dict, preset, length, length_mm, k_pump,
                   u_pump, u_signal, u_idler) -> Optional[CrystalOptics]:
    preset = _merged(cfg, "preset", preset)
    base = None
    if preset:
        base, _ = load_preset(preset)
    length = _merged(cfg, "length", length)
    if length_mm is not None:
        length = length_mm * 1e-3
    k_pump = _merged(cfg, "k_pump", k_pump)
    u_pump = _merged(cfg, "u_pump", u_pump)
    u_signal = _merged(cfg, "u_signal", u_signal)
    u_idler = _merged(cfg, "u_idler", u_idler)
    if base is None and all(v is None for v in (length, k_pump, u_pump, u_signal, u_idler)):
        return None
    if base is None:
        missing = [n for n, v in (("length", length), ("k-pump", k_pump),
                                  ("u-pump", u_pump), ("u-signal", u_signal),
                                  ("u-idler", u_idler)) if v is None]
        if missing:
            raise click.UsageError(
                "crystal parameters incomplete; missing --" + ", --".join(missing))
        return CrystalOptics(length, k_pump, u_pump, u_signal, u_idler)
    return CrystalOptics(
        length if length is not None else base.length,
        k_pump if k_pump is not None else base.k_pump,
        u_pump if u_pump is not None else base.u_pump,
        u_signal if u_signal is not None else base.u_signal,
        u_idler if u_idler is not None else base.u_idler)


def _build_pump(cfg: dict, preset, waist, waist_um, pump_p, pump_l,
                t0, t0_ps) -> Optional[PumpSpec]:
    preset = _merged(cfg, "preset", preset)
    base = None
    if preset:
        _, base = load_preset(preset)
    waist = _merged(cfg, "waist", waist)
    if waist_um is not None:
        waist = waist_um * 1e-6
    t0 = _merged(cfg, "t0", t0)
    if t0_ps is not None:
        t0 = t0_ps * 1e-12
    pump_p = _merged(cfg, "pump_p", pump_p, 0)
    pump_l = _merged(cfg, "pump_l", pump_l, 0)
    if base is None and waist is None:
        return None
    if base is None:
        return PumpSpec(waist=waist, p=int(pump_p), l=int(pump_l),
                        t0=t0 if t0 is not None else 1e-12)
    return PumpSpec(waist=waist if waist is not None else base.waist,
                    p=int(pump_p), l=int(pump_l),
                    t0=t0 if t0 is not None else base.t0)


def _build_quadspec(cfg: dict, rel_tol, abs_tol, max_subdivisions) -> QuadSpec:
    return QuadSpec(
        rel_tol=_merged(cfg, "rel_tol", rel_tol, 1e-9),
        abs_tol=_merged(cfg, "abs_tol", abs_tol, 1e-12),
        max_subdivisions=int(_merged(cfg, "max_subdivisions", max_subdivisions, 4096)))


def _validated_approx(family: str, alpha, beta) -> ApproxSpec:
    try:
        return ApproxSpec(family, alpha if alpha is not None else 0.0,
                          beta if beta is not None else 0.0)
    except ValueError as exc:
        flag = "--alpha" if "alpha" in str(exc) else (
            "--beta" if "beta" in str(exc) else "--family")
        raise click.UsageError(f"{flag}: {exc}")


# shared option stacks -------------------------------------------------------

def crystal_options(fn):
    for opt in reversed([
        click.option("--preset", type=str, default=None,
                     help="Named crystal+pump preset (e.g. typical-ppktp-like)."),
        click.option("--length", type=float, default=None, help="Crystal length [m]."),
        click.option("--length-mm", type=float, default=None, help="Crystal length [mm]."),
        click.option("--k-pump", type=float, default=None, help="Pump wavenumber [rad/m]."),
        click.option("--u-pump", type=float, default=None, help="Pump group velocity [m/s]."),
        click.option("--u-signal", type=float, default=None, help="Signal group velocity [m/s]."),
        click.option("--u-idler", type=float, default=None, help="Idler group velocity [m/s]."),
    ]):
        fn = opt(fn)
    return fn


def pump_options(fn):
    for opt in reversed([
        click.option("--waist", type=float, default=None, help="Pump waist [m]."),
        click.option("--waist-um", type=float, default=None, help="Pump waist [um]."),
        click.option("--pump-p", type=int, default=None, help="Pump LG radial index."),
        click.option("--pump-l", type=int, default=None, help="Pump LG OAM index."),
        click.option("--t0", type=float, default=None, help="Pump pulse duration [s]."),
        click.option("--t0-ps", type=float, default=None, help="Pump pulse duration [ps]."),
    ]):
        fn = opt(fn)
    return fn


def quad_options(fn):
    for opt in reversed([
        click.option("--rel-tol", type=float, default=None, help="Relative quadrature tolerance."),
        click.option("--abs-tol", type=float, default=None, help="Absolute quadrature tolerance."),
        click.option("--max-subdivisions", type=int, default=None),
    ]):
        fn = opt(fn)
    return fn


def io_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                     help="JSON config with the same keys as the flags."),
        click.option("--output", type=str, default=None,
                     help="Output file (default stdout; relative paths honor "
                          "SINCGAUSS_OUTPUT_DIR)."),
    ]):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="sincgauss")
def main():
    """Gaussian-family approximations to sinc phase matching in SPDC."""


# fidelity -------------------------------------------------------------------

@main.command("fidelity")
@click.option("--family", required=True,
              type=click.Choice(["gaussian", "super-gaussian", "cosine-gaussian",
                                 "cosine-super-gaussian"]))
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=None)
@click.option("--mode", type=click.Choice(MODES), default="spatial")
@click.option("--method", type=click.Choice(["auto", "closed", "oracle"]), default="auto")
@crystal_options
@pump_options
@quad_options
@io_options
def cli_fidelity(family, alpha, beta, mode, method, preset, length, length_mm,
                 k_pump, u_pump, u_signal, u_idler, waist, waist_um, pump_p,
                 pump_l, t0, t0_ps, rel_tol, abs_tol, max_subdivisions,
                 config_path, output):
    """Evaluate the fidelity of one approximation at fixed factors."""
    cfg = _load_config(config_path)
    approx = _validated_approx(family, _merged(cfg, "alpha", alpha),
                               _merged(cfg, "beta", beta, 0.0))
    mode = _merged(cfg, "mode", mode, "spatial")
    spec = _build_quadspec(cfg, rel_tol, abs_tol, max_subdivisions)
    opt = _build_crystal(cfg, preset, length, length_mm, k_pump, u_pump, u_signal, u_idler)
    pump = _build_pump(cfg, preset, waist, waist_um, pump_p, pump_l, t0, t0_ps)
    if mode != "spatial" and (opt is None or pump is None):
        raise click.UsageError(f"{mode} mode needs crystal and pump parameters "
                               "(--preset or explicit flags)")
    try:
        rep = fidelity_report(approx, mode, opt, pump, spec, method)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except NonConvergenceError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    _emit_json({
        "family": rep.family, "alpha": rep.alpha, "beta": rep.beta,
        "mode": mode, "fidelity": rep.fidelity, "method": rep.method,
        "oracle_error_estimate": rep.oracle_error_estimate,
    }, output)


# optimize -------------------------------------------------------------------

@main.command("optimize")
@click.option("--family", required=True,
              type=click.Choice(["sinc-exact", "gaussian", "super-gaussian",
                                 "cosine-gaussian", "cosine-super-gaussian"]))
@click.option("--mode", type=click.Choice(MODES), default="spatial")
@click.option("--alpha-min", type=float, default=None)
@click.option("--alpha-max", type=float, default=None)
@click.option("--xtol", type=float, default=1e-5)
@crystal_options
@pump_options
@quad_options
@io_options
def cli_optimize(family, mode, alpha_min, alpha_max, xtol, preset, length,
                 length_mm, k_pump, u_pump, u_signal, u_idler, waist, waist_um,
                 pump_p, pump_l, t0, t0_ps, rel_tol, abs_tol, max_subdivisions,
                 config_path, output):
    """Find the factor(s) maximizing the fidelity."""
    cfg = _load_config(config_path)
    if family == "sinc-exact":
        raise click.UsageError("--family sinc-exact has no optimization factors")
    mode = _merged(cfg, "mode", mode, "spatial")
    spec = _build_quadspec(cfg, rel_tol, abs_tol, max_subdivisions)
    opt = _build_crystal(cfg, preset, length, length_mm, k_pump, u_pump, u_signal, u_idler)
    pump = _build_pump(cfg, preset, waist, waist_um, pump_p, pump_l, t0, t0_ps)
    bounds = None
    if alpha_min is not None or alpha_max is not None:
        base = SPECTRAL_ALPHA_BOUNDS if mode != "spatial" else ALPHA_BOUNDS
        bounds = (alpha_min if alpha_min is not None else base[0],
                  alpha_max if alpha_max is not None else base[1])
        if family in ("cosine-gaussian", "cosine-super-gaussian") and mode == "spatial":
            bounds = (bounds, ALPHA_BETA_BOUNDS[1])
    try:
        res = optimize_factors(family, mode, opt, pump, spec, bounds=bounds, xtol=xtol)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except NonConvergenceError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    payload = {
        "family": family, "mode": mode,
        "argmax": list(res.argmax), "value": res.value,
        "evaluations": res.evaluations, "converged": res.converged,
    }
    _emit_json(payload, output)
    if not res.converged:
        click.echo("optimizer did not converge; partial result emitted", err=True)
        sys.exit(EXIT_NUMERICAL)


# sweep ----------------------------------------------------------------------

def _parse_grid(text: str, log: bool):
    try:
        start_s, stop_s, count_s = text.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise click.UsageError("--grid must be start:stop:count")
    if count < 1 or start <= 0 and log:
        raise click.UsageError("--grid needs count >= 1 (and positive start for --log)")
    if count == 1:
        return [start]
    import numpy as np
    if log:
        return list(np.logspace(np.log10(start), np.log10(stop), count))
    return list(np.linspace(start, stop, count))


@main.command("sweep")
@click.option("--family", required=True,
              type=click.Choice(["sinc-exact", "gaussian", "super-gaussian",
                                 "cosine-gaussian", "cosine-super-gaussian"]))
@click.option("--mode", type=click.Choice(MODES), default="spatial")
@click.option("--variable", type=click.Choice(["alpha", "beta", "t0"]), default="alpha")
@click.option("--grid", "grid_text", type=str, default=None,
              help="start:stop:count (omit for the default t0 grid).")
@click.option("--log/--linear", "log_grid", default=False)
@click.option("--alpha", type=float, default=None, help="Fixed alpha for beta/t0 sweeps.")
@click.option("--beta", type=float, default=None, help="Fixed beta.")
@click.option("--method", type=click.Choice(["auto", "closed", "oracle"]), default="auto")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv")
@crystal_options
@pump_options
@quad_options
@io_options
def cli_sweep(family, mode, variable, grid_text, log_grid, alpha, beta, method,
              fmt, preset, length, length_mm, k_pump, u_pump, u_signal, u_idler,
              waist, waist_um, pump_p, pump_l, t0, t0_ps, rel_tol, abs_tol,
              max_subdivisions, config_path, output):
    """Fidelity on a grid of alpha, beta, or t0 values (plot-ready table)."""
    cfg = _load_config(config_path)
    if family == "sinc-exact":
        raise click.UsageError("--family sinc-exact has no factor grid")
    mode = _merged(cfg, "mode", mode, "spatial")
    spec = _build_quadspec(cfg, rel_tol, abs_tol, max_subdivisions)
    opt = _build_crystal(cfg, preset, length, length_mm, k_pump, u_pump, u_signal, u_idler)
    pump = _build_pump(cfg, preset, waist, waist_um, pump_p, pump_l, t0, t0_ps)
    grid_text = _merged(cfg, "grid", grid_text)
    if grid_text is None:
        if variable != "t0":
            raise click.UsageError("--grid is required for alpha/beta sweeps")
        if opt is None:
            raise click.UsageError("the default t0 grid needs crystal parameters")
        grid = list(default_t0_grid(opt))
    else:
        grid = _parse_grid(grid_text, log_grid)
    try:
        points = run_sweep_points(family, mode, grid, variable,
                                  alpha=_merged(cfg, "alpha", alpha),
                                  beta=_merged(cfg, "beta", beta, 0.0),
                                  opt=opt, pump=pump, spec=spec, method=method)
    except ValueError as exc:
        raise click.UsageError(str(exc))

    rows = []
    for pt in points:
        rows.append({
            "variable": pt.variable, "value": pt.value,
            "alpha": pt.report.alpha if pt.report else None,
            "beta": pt.report.beta if pt.report else None,
            "fidelity": pt.report.fidelity if pt.report else None,
            "method": pt.report.method if pt.report else None,
            "error_estimate": pt.report.oracle_error_estimate if pt.report else None,
            "error": pt.error,
        })
    if not any(r["fidelity"] is not None for r in rows):
        click.echo("every sweep point failed", err=True)
        sys.exit(EXIT_NUMERICAL)

    if fmt == "json":
        _emit_json({"family": family, "mode": mode, "points": rows}, output)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variable", "value", "alpha", "beta", "fidelity",
                     "method", "error_estimate", "error"])
    for r in rows:
        writer.writerow([
            r["variable"], f"{r['value']:.12g}",
            "" if r["alpha"] is None else f"{r['alpha']:.12g}",
            "" if r["beta"] is None else f"{r['beta']:.12g}",
            "" if r["fidelity"] is None else f"{r['fidelity']:.12g}",
            r["method"] or "",
            "" if r["error_estimate"] is None else f"{r['error_estimate']:.12g}",
            r["error"] or ""])
    _emit(buf.getvalue(), output)


# decompose ------------------------------------------------------------------

@main.command("decompose")
@click.option("--family", type=click.Choice(["gaussian", "cosine-gaussian"]),
              default="gaussian")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=None)
@click.option("--p-max", type=int, default=2)
@click.option("--l-max", type=int, default=2)
@click.option("--w-signal", type=float, default=None, help="Detection waist, signal [m].")
@click.option("--w-idler", type=float, default=None, help="Detection waist, idler [m].")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@crystal_options
@pump_options
@quad_options
@io_options
def cli_decompose(family, alpha, beta, p_max, l_max, w_signal, w_idler, fmt,
                  preset, length, length_mm, k_pump, u_pump, u_signal, u_idler,
                  waist, waist_um, pump_p, pump_l, t0, t0_ps, rel_tol, abs_tol,
                  max_subdivisions, config_path, output):
    """LG coincidence amplitudes, captured weight, Schmidt number, spiral spectrum."""
    cfg = _load_config(config_path)
    approx = _validated_approx(family, _merged(cfg, "alpha", alpha),
                               _merged(cfg, "beta", beta, 0.0))
    opt = _build_crystal(cfg, preset, length, length_mm, k_pump, u_pump, u_signal, u_idler)
    pump = _build_pump(cfg, preset, waist, waist_um, pump_p, pump_l, t0, t0_ps)
    if opt is None or pump is None:
        raise click.UsageError("decompose needs crystal and pump parameters "
                               "(--preset or explicit flags)")
    if p_max < 0 or l_max < 0:
        raise click.UsageError("--p-max and --l-max must be >= 0")
    try:
        table = amplitude_table(pump, opt, approx.complex_alpha, p_max, l_max,
                                w_s=w_signal, w_i=w_idler)
        import warnings as _warnings
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            schmidt = schmidt_number(table)
        spiral = spiral_spectrum(table)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except NonConvergenceError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)

    entries = []
    for key in sorted(table.entries):
        c = table.entries[key]
        entries.append({
            "p_s": key[0], "l_s": key[1], "p_i": key[2], "l_i": key[3],
            "re": c.real, "im": c.imag, "prob": abs(c) ** 2,
            "invalid": key in table.failures,
        })
    if fmt == "json":
        _emit_json({
            "family": family, "alpha": approx.alpha, "beta": approx.beta,
            "pump": {"p": pump.p, "l": pump.l, "waist": pump.waist},
            "p_max": p_max, "l_max": l_max,
            "captured_weight": table.captured_weight,
            "schmidt_number": schmidt,
            "spiral_spectrum": {str(k): v for k, v in spiral.items()},
            "entries": entries,
            "failures": {str(k): v for k, v in sorted(table.failures.items())},
        }, output)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p_s", "l_s", "p_i", "l_i", "re", "im", "prob", "invalid"])
    for e in entries:
        writer.writerow([e["p_s"], e["l_s"], e["p_i"], e["l_i"],
                         f"{e['re']:.12g}", f"{e['im']:.12g}", f"{e['prob']:.12g}",
                         "1" if e["invalid"] else "0"])
    _emit(buf.getvalue(), output)


if __name__ == "__main__":
    main()
