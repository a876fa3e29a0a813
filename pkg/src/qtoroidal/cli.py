"""Command line entry point: ``verify <campaign>`` and ``verify explain <name>``."""

from __future__ import annotations

import sys
from typing import Any

import click

from .campaigns import CAMPAIGN_NAMES, EXPLAIN
from .errors import ConfigError, EnvelopeError
from .harness import CampaignConfig, load_config_file, parse_seeds, run_campaign

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def explain(name: str) -> str:
    if name not in EXPLAIN:
        raise KeyError(f"unknown check {name!r}; valid names: {', '.join(CAMPAIGN_NAMES)}")
    return f"{name}: {EXPLAIN[name]}"


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("campaign")
@click.argument("name", required=False)
@click.option("--n", "n", type=int, help="Rank n (number of colours).")
@click.option("--M", "M", type=int, help="Size M of the first group of variables.")
@click.option("--N", "N", type=int, help="Size N of the second group of variables.")
@click.option("--ell", type=int, help="Number of Fock factors in the wheel module.")
@click.option("--seeds", help="Comma-separated seeds (default 0,1,2).")
@click.option("--trunc-order", type=int, help="Number of factors kept in q-Pochhammer products.")
@click.option("--tol", type=float, help="Override the tolerance of every identity check.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.option("--jobs", type=int, help="Worker processes.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON config; flags override it.")
def main(campaign: str, name: str | None, config_path: str | None, **flags: Any) -> None:
    """Run a verification CAMPAIGN, or `explain NAME` for what a check does.

    Campaigns: all, special, structfn, fusion, thetaspace, wheel, boundary,
    theta-identity, residue-lemmas.
    """
    if campaign == "explain":
        if name is None:
            click.echo(f"usage: verify explain NAME; valid names: {', '.join(CAMPAIGN_NAMES)}", err=True)
            sys.exit(EXIT_CONFIG)
        try:
            click.echo(explain(name))
        except KeyError as exc:
            click.echo(exc.args[0], err=True)
            sys.exit(EXIT_CONFIG)
        return
    if name is not None:
        click.echo(f"unexpected extra argument {name!r}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        data = load_config_file(config_path) if config_path else {}
        data["campaign"] = campaign
        for key, value in flags.items():
            if value is not None:
                data[key] = parse_seeds(value) if key == "seeds" else value
        config = CampaignConfig.from_mapping(data)
    except (ConfigError, EnvelopeError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    report = run_campaign(config)
    click.echo(report.render_text())
    for record in report.failures():
        click.echo(f"FAILED {record.name} seed={record.seed} residual={record.residual:.3e} "
                   f"tolerance={record.tolerance:.1e} {record.detail}")
    sys.exit(EXIT_OK if report.all_passed else EXIT_FAILED)
