"""Command-line entry points."""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from .completion import (
    BoundaryStatus,
    CompletionConfig,
    CompletionVariant,
    completion_table,
    drp as drp_value,
    drp_i as drp_i_value,
    format_completion_table,
)
from .design import (
    DesignKind,
    DesignParams,
    boin_boundaries,
    decision_table,
    retainment_set,
)
from . import engine
from .engine import apply_cohort
from .isotonic import bivariate_isotonic
from .scenarios import all_builtin_scenarios, load_scenarios
from .simulate import DesignArm, SimConfig, metrics_to_csv, metrics_to_records, simulate


def _params(design: str, phi: float, **kw) -> DesignParams:
    return DesignParams(kind=DesignKind(design), phi=phi, **kw)


design_opt = click.option(
    "--design",
    type=click.Choice([k.value for k in DesignKind]),
    default="boin",
    show_default=True,
)
phi_opt = click.option("--phi", type=float, default=0.3, show_default=True)
json_opt = click.option("--json", "as_json", is_flag=True, help="machine-readable output")


@click.group()
def main():
    """Dose-finding engine for two-drug combination trials."""


@main.command()
@design_opt
@phi_opt
@json_opt
def boundaries(design, phi, as_json):
    """Escalation/de-escalation boundaries and the proper dosing interval."""
    params = _params(design, phi)
    lo, hi = params.proper_interval()
    if as_json:
        click.echo(json.dumps({"design": design, "phi": phi, "lower": lo, "upper": hi}))
    elif params.kind is DesignKind.BOIN:
        b = boin_boundaries(params)
        # truncate for display: reference tables print 0.358519 as 0.358
        trunc = lambda x: math.floor(x * 1000) / 1000  # noqa: E731
        click.echo(f"{trunc(b.lambda_e):.3f} {trunc(b.lambda_d):.3f}")
    else:
        click.echo(f"target key ({lo:.3f}, {hi:.3f})")


@main.command()
@design_opt
@phi_opt
@click.option("--n-max", type=int, default=18, show_default=True)
@click.option("--cohort", type=int, default=3, show_default=True)
@json_opt
def table(design, phi, n_max, cohort, as_json):
    """Retainment-set decision table over patient counts."""
    params = _params(design, phi)
    grid = list(range(cohort, n_max + 1, cohort))
    sets = decision_table(params, grid)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "design": design,
                    "phi": phi,
                    "rows": [{"n": r.total_n, "retain": list(r.members)} for r in sets],
                }
            )
        )
        return
    click.echo(f"{'n':>4}  retain")
    for r in sets:
        members = "-".join(map(str, [min(r.members), max(r.members)])) if r.members else "-"
        if len(r.members) == 1:
            members = str(r.members[0])
        click.echo(f"{r.total_n:>4}  {members}")


@main.command("ec-table")
@design_opt
@phi_opt
@click.option("--N", "n_total", type=int, required=True, help="planned sample size")
@click.option("--tau", type=float, default=0.4, show_default=True)
@click.option("--cohort", type=int, default=3, show_default=True)
@json_opt
def ec_table(design, phi, n_total, tau, cohort, as_json):
    """Pre-trial early-completion decision table."""
    params = _params(design, phi)
    config = CompletionConfig(variant=CompletionVariant.DRP, tau=tau, cohort_size=cohort)
    rows = completion_table(params, n_total, config)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "design": design,
                    "phi": phi,
                    "N": n_total,
                    "tau": tau,
                    "rows": [
                        {
                            "n": r.n,
                            "m": r.m,
                            "max_l": r.max_l,
                            "sub_cohort_only": r.sub_cohort_only,
                        }
                        for r in rows
                    ],
                }
            )
        )
        return
    click.echo(format_completion_table(rows, cohort))


@main.command()
@design_opt
@phi_opt
@click.option("-n", "n", type=int, required=True, help="patients at current dose")
@click.option("-m", "m", type=int, required=True, help="DLTs at current dose")
@click.option("-l", "l", type=int, required=True, help="remaining patients")
@click.option("--isotonic-rate", type=float, default=None, help="adjusted rate for DRP-I")
@click.option(
    "--boundary",
    type=click.Choice(["max", "min"]),
    default=None,
    help="current dose is the max/min combination",
)
@json_opt
def drp(design, phi, n, m, l, isotonic_rate, boundary, as_json):
    """Dose retainment probability (DRP, or DRP-I with --isotonic-rate)."""
    params = _params(design, phi)
    status = BoundaryStatus(boundary) if boundary else BoundaryStatus.INTERIOR
    R = retainment_set(params, n + l)
    if isotonic_rate is None:
        value = drp_value(n, m, l, R, status, params)
    else:
        value = drp_i_value(n, m, l, isotonic_rate, R, status, params)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "design": design,
                    "phi": phi,
                    "n": n,
                    "m": m,
                    "remaining": l,
                    "isotonic_rate": isotonic_rate,
                    "boundary": status.value,
                    "value": value,
                }
            )
        )
    else:
        click.echo(f"{value:.3f}")


@main.command()
@click.option("--matrix", "matrix_file", type=click.Path(exists=True), default=None,
              help="JSON file with {values, weights}; defaults to stdin")
def adjust(matrix_file):
    """Bivariate isotonic regression of a rate matrix (JSON in, JSON out)."""
    raw = Path(matrix_file).read_text() if matrix_file else sys.stdin.read()
    doc = json.loads(raw)
    values = np.asarray(doc["values"], dtype=float)
    weights = np.asarray(doc["weights"], dtype=float)
    adjusted = bivariate_isotonic(values, weights)
    out = [[None if np.isnan(v) else round(float(v), 10) for v in row] for row in adjusted]
    click.echo(json.dumps({"adjusted": out}))


@main.command("decide")
@click.option("--state", "state_file", type=click.Path(exists=True), required=True)
@click.option("--dlt", type=int, required=True, help="DLT count in the new cohort")
@json_opt
def decide_cmd(state_file, dlt, as_json):
    """Apply one cohort to a saved trial state and write it back."""
    doc = json.loads(Path(state_file).read_text())
    cfg = doc["config"]
    params = DesignParams(
        kind=DesignKind(cfg["design"]),
        phi=cfg["phi"],
        phi1=cfg.get("phi1"),
        phi2=cfg.get("phi2"),
    )
    completion = CompletionConfig(
        variant=CompletionVariant(cfg.get("variant", "off")),
        tau=cfg.get("tau", 0.4),
        runtime_smoothing=cfg.get("runtime_smoothing", False),
        cohort_size=cfg["cohort_size"],
    )
    rng = np.random.default_rng(cfg.get("seed", 0) + doc["state"]["enrolled"])
    state = engine.state_from_dict(doc["state"])
    prev_len = len(state.log)
    state = apply_cohort(state, dlt, params, completion, cfg["N"], rng)
    doc["state"] = engine.state_to_dict(state)
    Path(state_file).write_text(json.dumps(doc, indent=2))
    events = state.log[prev_len:]
    drp_event = next((e for e in events if e["event"] == "drp"), None)
    decision_event = next(
        (e for e in events if e["event"] == "decision"), None
    )
    summary = {
        "status": state.status.value,
        "current": list(state.current),
        "decision": decision_event["decision"] if decision_event else None,
        "next": decision_event["next"] if decision_event else list(state.current),
        "drp": drp_event["value"] if drp_event else None,
    }
    if as_json:
        click.echo(json.dumps(summary))
    else:
        click.echo(
            f"status={summary['status']} decision={summary['decision']} "
            f"next={summary['next']} drp={summary['drp']}"
        )


@main.command("simulate")
@design_opt
@phi_opt
@click.option("--scenarios", "scenario_path", type=click.Path(exists=True), default=None,
              help="scenario file or directory; defaults to the built-in set")
@click.option("--grid", type=click.Choice(["3x4", "5x6", "all"]), default="3x4",
              show_default=True, help="built-in scenario grid when no path is given")
@click.option("--ec", type=click.Choice([v.value for v in CompletionVariant]),
              default="off", show_default=True)
@click.option("--tau", type=float, default=0.4, show_default=True)
@click.option("--N", "n_total", type=int, default=45, show_default=True)
@click.option("--cohort", type=int, default=3, show_default=True)
@click.option("--reps", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV output path")
@json_opt
def simulate_cmd(design, phi, scenario_path, grid, ec, tau, n_total, cohort, reps,
                 seed, workers, out, as_json):
    """Monte Carlo operating characteristics over scenarios."""
    if scenario_path:
        scenario_list = load_scenarios(scenario_path)
    elif grid == "all":
        scenario_list = all_builtin_scenarios()
    else:
        from .scenarios import builtin_scenarios

        scenario_list = builtin_scenarios(grid)
    params = _params(design, phi)
    arm = DesignArm(
        label=f"{design}" + ("" if ec == "off" else f"-{ec}"),
        params=params,
        completion=CompletionConfig(
            variant=CompletionVariant(ec), tau=tau, cohort_size=cohort
        ),
    )
    config = SimConfig(
        designs=(arm,),
        N=n_total,
        cohort_size=cohort,
        replications=reps,
        base_seed=seed,
        workers=workers,
    )
    rows = simulate(scenario_list, config)
    csv_text = metrics_to_csv(rows)
    if out:
        Path(out).write_text(csv_text)
    if as_json:
        click.echo(json.dumps(metrics_to_records(rows)))
    elif not out:
        click.echo(csv_text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, envvar="COMBODOSE_HOST")
@click.option("--port", type=int, default=8000, show_default=True, envvar="COMBODOSE_PORT")
@click.option("--data-dir", type=click.Path(), default="./combodose-data",
              show_default=True, envvar="COMBODOSE_DATA_DIR")
def serve(host, port, data_dir):
    """Run the JSON-over-HTTP trial service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
