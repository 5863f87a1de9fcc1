"""Command-line interface over the campaign store.

Typical flow:

    mixopt init my-campaign --example
    mixopt ingest my-campaign measurements.csv --batch batch-1-human
    mixopt propose my-campaign --q 6 --seed 0
    mixopt pareto my-campaign --age 28 --format csv
    mixopt infer my-campaign --scenario scenario.json
    mixopt cv my-campaign --folds 10
"""

from __future__ import annotations

import csv as _csv
import io
import json
from pathlib import Path

import click

from mixopt import gp
from mixopt.campaign import (
    Campaign,
    CampaignStore,
    empirical_pareto,
    example_constraints,
    example_gwp_table,
    fit_campaign_model,
    inferred_pareto,
    ingest_csv,
    load_campaign,
    propose_batch,
    save_campaign,
)
from mixopt.design_space import Constraints
from mixopt.exceptions import MixoptError
from mixopt.objectives import GwpTable, ObjectiveSpec
from mixopt.strength import cross_validate


def _echo(payload, fmt: str, csv_rows=None):
    if fmt == "csv" and csv_rows is not None:
        rows = list(csv_rows)
        if not rows:
            return
        buf = io.StringIO()
        writer = _csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        click.echo(buf.getvalue().rstrip("\n"))
    else:
        click.echo(json.dumps(payload, indent=2))


def _load(ctx) -> tuple[CampaignStore, str]:
    return ctx.obj["store"]


@click.group()
@click.option("--store", envvar="MIXOPT_STORE", default="./campaign-store",
              show_default=True, help="Campaign store directory.")
@click.pass_context
def main(ctx, store):
    """Design sustainable concrete mixtures with model-guided batches."""
    ctx.ensure_object(dict)
    ctx.obj["store"] = CampaignStore(store)


def _wrap_errors(fn):
    import functools

    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (MixoptError, FileNotFoundError) as err:
            raise click.ClickException(str(err))

    return inner


@main.command()
@click.argument("campaign_id")
@click.option("--constraints", "constraints_file", type=click.Path(exists=True),
              help="Constraints JSON (bounds, wb_window, binder_window, exclude).")
@click.option("--gwp", "gwp_file", type=click.Path(exists=True),
              help="GWP coefficient file (JSON or CSV).")
@click.option("--reference", default=None,
              help="Objective reference point, e.g. '0,0,-600'.")
@click.option("--ages", default=None, help="Strength objective ages, e.g. '1,28'.")
@click.option("--example", is_flag=True, help="Use the packaged example configuration.")
@click.pass_context
@_wrap_errors
def init(ctx, campaign_id, constraints_file, gwp_file, reference, ages, example):
    """Create a campaign in the store."""
    store = ctx.obj["store"]
    if store.exists(campaign_id):
        raise click.ClickException(f"campaign {campaign_id!r} already exists")
    if example and not constraints_file:
        constraints = example_constraints()
    elif constraints_file:
        constraints = Constraints.from_dict(json.loads(Path(constraints_file).read_text()))
    else:
        raise click.ClickException("provide --constraints FILE or --example")
    if example and not gwp_file:
        table = example_gwp_table()
    elif gwp_file:
        table = GwpTable.from_file(gwp_file)
    else:
        raise click.ClickException("provide --gwp FILE or --example")
    spec_kwargs = {}
    if reference:
        spec_kwargs["reference_point"] = tuple(float(v) for v in reference.split(","))
    if ages:
        spec_kwargs["ages"] = tuple(float(v) for v in ages.split(","))
    campaign = Campaign(id=campaign_id, constraints=constraints, gwp_table=table,
                        objective_spec=ObjectiveSpec(**spec_kwargs))
    save_campaign(campaign, store)
    click.echo(f"initialized campaign {campaign_id!r} in {store.root}")


@main.command()
@click.argument("campaign_id")
@click.argument("csv_file", type=click.Path(exists=True))
@click.option("--strict", is_flag=True, help="Abort on any malformed row.")
@click.option("--batch", default=None, help="Batch label for rows without one.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
@_wrap_errors
def ingest(ctx, campaign_id, csv_file, strict, batch, fmt):
    """Append measurements from an observation CSV."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    rows, report = ingest_csv(csv_file, ingredients=campaign.constraints.ingredients,
                              strict=strict)
    records = campaign.add_observations(rows, batch_id=batch)
    store.append_observations(campaign_id, records)
    _echo(report.to_dict(), fmt,
          csv_rows=[{"line": l, "message": m} for l, m in report.errors] or
                   [{"line": "", "message": f"accepted {report.n_accepted} rows"}])


@main.command()
@click.argument("campaign_id")
@click.option("--seed", default=0, show_default=True)
@click.option("--restarts", default=4, show_default=True)
@click.pass_context
@_wrap_errors
def fit(ctx, campaign_id, seed, restarts):
    """Fit the strength model on all measurements and snapshot it."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    config = gp.FitConfig(restarts=restarts, seed=seed)
    model, digest = fit_campaign_model(campaign, seed=seed, fit_config=config, store=store)
    click.echo(json.dumps({
        "snapshot_digest": digest,
        "n_observations": len(campaign.measured()),
        "noise_sd_mpa": model.noise_sd_mpa(),
    }, indent=2))


@main.command()
@click.argument("campaign_id")
@click.option("--q", default=6, show_default=True, help="Batch size.")
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
@_wrap_errors
def propose(ctx, campaign_id, q, seed, fmt):
    """Propose the next batch of mixtures via the acquisition optimizer."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    batch = propose_batch(campaign, q=q, seed=seed, store=store)
    payload = batch.to_dict()
    rows = []
    for m, mean, sd in zip(batch.mixtures, batch.predicted["means"], batch.predicted["sds"]):
        row = {k: round(v, 3) for k, v in m.to_dict().items()}
        row.update({
            "pred_strength_1d": round(mean[0], 2), "sd_1d": round(sd[0], 2),
            "pred_strength_28d": round(mean[1], 2), "sd_28d": round(sd[1], 2),
            "gwp": round(-mean[2], 1),
        })
        rows.append(row)
    _echo(payload, fmt, csv_rows=rows)


@main.command()
@click.argument("campaign_id")
@click.option("--age", type=float, required=True, help="Curing age in days (1 or 28).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
@_wrap_errors
def pareto(ctx, campaign_id, age, fmt):
    """Empirical Pareto frontier of measured strength vs GWP."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    result = empirical_pareto(campaign, age)
    payload = result.to_dict()
    _echo(payload, fmt, csv_rows=[
        {"strength_mpa": p["strength_mpa"], "gwp_kgco2e_m3": p["gwp_kgco2e_m3"],
         "dominated": p["dominated"], "batch_id": p["batch_id"]}
        for p in payload["points"]
    ])


@main.command()
@click.argument("campaign_id")
@click.option("--scenario", "scenario_file", type=click.Path(exists=True), default=None,
              help="Scenario JSON: bound overrides, exclude list, wb_window, gwp_scale...")
@click.option("--candidates", default=20000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
@_wrap_errors
def infer(ctx, campaign_id, scenario_file, candidates, seed, fmt):
    """Inferred (model-predicted) Pareto frontier under a scenario."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    scenario = json.loads(Path(scenario_file).read_text()) if scenario_file else {}
    result = inferred_pareto(campaign, scenario, n_candidates=candidates, seed=seed)
    payload = result.to_dict()
    _echo(payload, fmt, csv_rows=[
        {
            "strength_1d": round(p["objectives"][0], 2),
            "strength_28d": round(p["objectives"][1], 2),
            "gwp": round(-p["objectives"][2], 1),
            "sd_1d": round(p["sd"][0], 2),
            "sd_28d": round(p["sd"][1], 2),
            **{k: round(v, 2) for k, v in p["mixture"].items()},
        }
        for p in payload["points"]
    ])


@main.command()
@click.argument("campaign_id")
@click.option("--folds", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
@_wrap_errors
def cv(ctx, campaign_id, folds, seed, fmt):
    """Grouped cross-validation of the strength model on campaign data."""
    store = ctx.obj["store"]
    campaign = load_campaign(campaign_id, store)
    result = cross_validate(
        campaign.measured(), folds=folds, seed=seed,
        constraints=campaign.constraints,
        fit_config=gp.FitConfig(restarts=2, max_iter=100),
    )
    payload = result.to_dict()
    summary = {"rmse": payload["rmse"], "coverage95": payload["coverage95"],
               "folds": payload["folds"], "n_points": len(payload["records"])}
    _echo({**summary, "records": payload["records"]}, fmt, csv_rows=[
        {"age_days": r["age_days"], "predicted_mean": round(r["predicted_mean"], 3),
         "predicted_sd": round(r["predicted_sd"], 3), "actual": r["actual"], "fold": r["fold"]}
        for r in payload["records"]
    ])


@main.command("example-config")
@click.argument("directory", type=click.Path())
def example_config(directory):
    """Write the packaged example constraints and GWP files for editing."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "constraints.json").write_text(
        json.dumps(example_constraints().to_dict(), indent=2)
    )
    (out / "gwp.json").write_text(json.dumps(example_gwp_table().to_dict(), indent=2))
    click.echo(f"wrote {out / 'constraints.json'} and {out / 'gwp.json'}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--token", default=None, help="Optional static bearer token.")
@click.option("--ui", "ui_dir", envvar="MIXOPT_UI_DIR", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Directory with the built web UI (serves it at /).")
@click.pass_context
def serve(ctx, host, port, token, ui_dir):
    """Run the HTTP API (and UI, if built) over this store."""
    try:
        import uvicorn
    except ImportError:
        raise click.ClickException("uvicorn is required: pip install 'mixopt[serve]'")
    from mixopt.service import create_app

    app = create_app(ctx.obj["store"], token=token, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
