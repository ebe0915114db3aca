"""Command line front end.

Exit codes: 0 on success, 1 when a run fails (failed transactions, failed
verification under --strict, warnings under --strict), 2 for bad input
(malformed config, infeasible spec, usage errors).

Heavy imports happen inside the commands so startup stays fast.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

_CONFIG_ERRORS: tuple[type[Exception], ...] | None = None


def _config_errors() -> tuple[type[Exception], ...]:
    global _CONFIG_ERRORS
    if _CONFIG_ERRORS is None:
        import yaml

        from .protocol import ProtocolError
        from .simulate import TopologyError
        from .synthesis import InfeasibleConfigError, SynthesisError
        from .units import UnitError

        _CONFIG_ERRORS = (
            UnitError,
            InfeasibleConfigError,
            SynthesisError,
            ProtocolError,
            TopologyError,
            yaml.YAMLError,
            KeyError,
            FileNotFoundError,
        )
    return _CONFIG_ERRORS


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _loss_from_flags(lossless: bool, q: float | None):
    from .loss import LOSSLESS, LossModel

    if lossless and q is not None:
        raise click.UsageError("--lossless and --q are mutually exclusive")
    if lossless:
        return LOSSLESS
    if q is not None:
        if q <= 0:
            raise click.UsageError("--q must be positive")
        return LossModel(inductor_q=q)
    return LossModel()


def _complex_dict(z: complex) -> dict:
    from .elements import is_pole

    if is_pole(z):
        return {"pole": True}
    import cmath

    return {"abs": abs(z), "arg_deg": cmath.phase(z) * 180.0 / 3.141592653589793}


def _report_dict(r) -> dict:
    return {
        "which": r.which,
        "lossless": r.lossless,
        "experimental": r.experimental,
        "zin_h_at_f_mod": _complex_dict(r.zin_h_fmod),
        "zin_l_at_f_mod": _complex_dict(r.zin_l_fmod),
        "zin_h_at_f_stop": _complex_dict(r.zin_h_fstop),
        "zin_l_at_f_stop": _complex_dict(r.zin_l_fstop),
        "ratio_at_f_mod": None if r.ratio_fmod is None else float(r.ratio_fmod),
        "h_state_poles_hz": list(r.h_poles),
        "h_state_zeros_hz": list(r.h_zeros),
        "zero_pole_separation": r.zero_pole_separation,
        "cancellation_risk": r.cancellation_risk,
        "checks": dict(r.checks),
        "passed": r.passed,
    }


def _spec_from_file(path: str):
    import yaml

    from .simulate import _filter_from_dict

    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict):
        raise click.UsageError(f"{path}: spec must be a mapping")
    return _filter_from_dict(raw, raw.get("eseries", "E12"))


@click.group()
def main() -> None:
    """Design and simulate carrier-keyed I2C links over a shared DC line."""


@main.command()
@click.argument("specfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write design JSON here.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--lossless", is_flag=True, help="Verify with ideal elements.")
@click.option("--q", type=float, default=None, help="Inductor Q for verification (default 40).")
@click.option("--strict", is_flag=True, help="Exit 1 when verification fails.")
def design(specfile: str, out: str | None, fmt: str, lossless: bool, q: float | None, strict: bool) -> None:
    """Synthesize a filter from SPECFILE (YAML) and verify it."""
    try:
        spec = _spec_from_file(specfile)
        from .synthesis import design_to_dict, synthesize, verify_design
        from .units import format_quantity

        d = synthesize(spec)
        loss = _loss_from_flags(lossless, q)
        report = verify_design(d, loss=loss, which="snapped" if d.snapped else "exact")
        doc = {
            "design": design_to_dict(d),
            "verification": _report_dict(report),
        }
    except click.UsageError:
        raise
    except _config_errors() as exc:
        _fail(2, str(exc))
        return

    payload = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(payload)
    if fmt == "json":
        click.echo(payload, nl=False)
    else:
        click.echo(f"configuration: {d.config.value}")
        click.echo(f"alpha (f_mod/f_stop): {d.alpha:.6g}")
        unit_for = lambda name: "H" if name.startswith("l") else "F"
        click.echo("elements (exact):")
        for name, value in d.values("exact").items():
            click.echo(f"  {name:6s} {format_quantity(value, unit_for(name))}")
        click.echo(f"elements ({spec.eseries}):")
        for name, value in d.values("snapped").items():
            click.echo(f"  {name:6s} {format_quantity(value, unit_for(name))}")
        click.echo(f"dc blockers: {', '.join(d.dcb) if d.dcb else 'none'}")
        if report.ratio_fmod is not None:
            click.echo(f"keying impedance ratio at f_mod: {report.ratio_fmod:.4g}")
        click.echo("checks:")
        for name, ok in report.checks.items():
            click.echo(f"  {name:32s} {'PASS' if ok else 'FAIL'}")
        if report.experimental:
            click.echo("note: negative-coupling configuration, treat as experimental")
        if out:
            click.echo(f"wrote {out}")
    if strict and not report.passed:
        sys.exit(1)


@main.command()
@click.argument("designfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--flo", default="1MHz", help="Sweep start (frequency quantity).")
@click.option("--fhi", default="100MHz", help="Sweep stop (frequency quantity).")
@click.option("--points", type=int, default=501, show_default=True)
@click.option("--lossless", is_flag=True)
@click.option("--q", type=float, default=None, help="Inductor Q (default 40).")
@click.option("--which", type=click.Choice(["exact", "snapped"]), default="exact")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV output path.")
def sweep(designfile: str, flo: str, fhi: str, points: int, lossless: bool, q: float | None, which: str, out: str | None) -> None:
    """Sweep both keying states of a saved design over frequency."""
    try:
        from .analysis import sweep as run_sweep
        from .synthesis import design_from_dict
        from .units import parse_quantity

        doc = json.loads(Path(designfile).read_text())
        d = design_from_dict(doc.get("design", doc))
        loss = _loss_from_flags(lossless, q)
        f_lo = parse_quantity(flo, "Hz")
        f_hi = parse_quantity(fhi, "Hz")
        if points < 2:
            raise click.UsageError("--points must be at least 2")
        result = run_sweep(d, loss=loss, f_lo=f_lo, f_hi=f_hi, points=points, which=which)
    except click.UsageError:
        raise
    except (json.JSONDecodeError, *_config_errors()) as exc:
        _fail(2, str(exc))
        return

    csv_text = result.to_csv()
    if out:
        Path(out).write_text(csv_text)
        click.echo(f"wrote {out} ({points} points)")
    else:
        click.echo(csv_text, nl=False)
    ratio = result.ratio_at(d.spec.f_mod)
    click.echo(f"keying impedance ratio at {d.spec.f_mod:.6g} Hz: {ratio:.4g}", err=out is None)


def _parse_impedance(text: str) -> complex:
    from .units import UnitError, parse_quantity

    try:
        return complex(parse_quantity(text, "ohm"))
    except UnitError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise click.UsageError(f"cannot read impedance {text!r}: use '8897', '1+2j', or '2kohm'")


@main.command()
@click.option("--zh", required=True, help="Released-state node impedance (ohm, complex ok).")
@click.option("--zl", required=True, help="Pulled-state node impedance.")
@click.option("--zp", default=None, help="Pull-up impedance (omit for ratio-only form).")
@click.option("--n", "n_values", type=int, multiple=True, help="Node counts to tabulate.")
@click.option("--min-depth-db", type=float, default=6.0, show_default=True)
def budget(zh: str, zl: str, zp: str | None, n_values: tuple[int, ...], min_depth_db: float) -> None:
    """Modulation-depth budget for one carrier as nodes are added."""
    from .analysis import budget as run_budget

    z_h = _parse_impedance(zh)
    z_l = _parse_impedance(zl)
    z_p = _parse_impedance(zp) if zp is not None else None
    kwargs = {"min_depth_db": min_depth_db}
    if n_values:
        kwargs["n_values"] = tuple(n_values)
    result = run_budget(z_h, z_l, z_p=z_p, **kwargs)
    click.echo(json.dumps(result.to_dict(), indent=2))


def _write_traces(path: str, traces: dict) -> None:
    import numpy as np

    keys = list(traces)
    cols = [np.asarray(traces[k]) for k in keys]
    with open(path, "w") as fh:
        fh.write("# schema_version: 1\n")
        fh.write(",".join(keys) + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.9g}" if isinstance(v, float) else str(v) for v in row) + "\n")


@main.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Metrics JSON path.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--strict", is_flag=True, help="Escalate link warnings to errors.")
@click.option("--traces", type=click.Path(dir_okay=False), default=None,
              help="Write per-sample detector/reference traces as CSV.")
def simulate(scenario: str, out: str | None, seed: int | None, strict: bool, traces: str | None) -> None:
    """Run a scenario file end to end and report link metrics."""
    import warnings

    try:
        from .simulate import load_scenario

        sc = load_scenario(scenario)
        sink: dict | None = {} if traces else None
        with warnings.catch_warnings():
            if strict:
                warnings.simplefilter("error")
            metrics, _ = sc.run(seed=seed, trace_sink=sink)
    except _config_errors() as exc:
        _fail(2, str(exc))
        return
    except Warning as exc:
        _fail(1, f"strict: {exc}")
        return

    if traces and sink:
        _write_traces(traces, sink)

    payload = metrics.to_json()
    if out:
        Path(out).write_text(payload)
    else:
        click.echo(payload, nl=False)
    for line in sorted(metrics.bit_errors):
        click.echo(
            f"{line}: depth {metrics.depth_db[line]:.2f} dB, "
            f"{metrics.bit_errors[line]} bit errors / {metrics.bits_checked[line]} checked, "
            f"eye margin {metrics.eye_margin_v[line] * 1e3:.1f} mV",
            err=out is None,
        )
    click.echo(
        f"transactions: {metrics.transactions_completed}/{metrics.transactions_attempted} completed",
        err=out is None,
    )
    if not metrics.error_free:
        sys.exit(1)


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Metrics JSON path.")
@click.option("--emit-configs", type=click.Path(file_okay=False), default=None,
              help="Copy the packaged scenario files into this directory.")
@click.option("--seed", type=int, default=None)
def demo(out: str | None, emit_configs: str | None, seed: int | None) -> None:
    """Run the packaged two-carrier, eight-slave reference scenario."""
    from importlib import resources

    data = resources.files("fdmlink") / "data"
    if emit_configs:
        dest = Path(emit_configs)
        dest.mkdir(parents=True, exist_ok=True)
        for name in ("filter_a.yaml", "filter_b.yaml", "demo_scenario.yaml", "demo_script.i2c"):
            (dest / name).write_text((data / name).read_text())
        click.echo(f"wrote configs to {dest}")
        if out is None:
            return
    try:
        from .simulate import load_scenario

        sc = load_scenario(Path(str(data / "demo_scenario.yaml")))
        metrics, _ = sc.run(seed=seed)
    except _config_errors() as exc:
        _fail(2, str(exc))
        return

    if out:
        Path(out).write_text(metrics.to_json())
        click.echo(f"wrote {out}")
    for line in sorted(metrics.bit_errors):
        click.echo(
            f"{line}: depth {metrics.depth_db[line]:.2f} dB, "
            f"{metrics.bit_errors[line]} bit errors / {metrics.bits_checked[line]} checked, "
            f"eye margin {metrics.eye_margin_v[line] * 1e3:.1f} mV"
        )
    click.echo(
        f"transactions: {metrics.transactions_completed}/{metrics.transactions_attempted} completed"
    )
    if not metrics.error_free:
        sys.exit(1)


if __name__ == "__main__":
    main()
