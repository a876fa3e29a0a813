"""Campaign configuration, execution across seeds and report assembly."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from . import __version__
from .campaigns import CAMPAIGN_NAMES, CAMPAIGNS, CampaignOptions, expand
from .errors import ConfigError
from .kernels import check_envelope
from .params import DEFAULT_TRUNC, TruncationConfig
from .report import VerificationReport

DEFAULT_SEEDS = (0, 1, 2)
MAX_SEED = 2**64 - 1
CONFIG_KEYS = frozenset({"campaign", "seeds", "n", "M", "N", "ell", "trunc_order", "tol", "out", "jobs"})


@dataclass(frozen=True)
class CampaignConfig:
    campaign: str
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    n: int | None = None
    M: int | None = None
    N: int | None = None
    ell: int = 3
    trunc: TruncationConfig = DEFAULT_TRUNC
    tol: float | None = None
    output_path: str | None = None
    jobs: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        if self.campaign not in CAMPAIGN_NAMES:
            raise ConfigError(f"unknown campaign {self.campaign!r}; valid: {', '.join(CAMPAIGN_NAMES)}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        for seed in self.seeds:
            if not (isinstance(seed, int) and 0 <= seed <= MAX_SEED):
                raise ConfigError(f"seed {seed!r} is not a 64-bit unsigned integer")
        for name in ("n", "M", "N"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.ell < 3:
            raise ConfigError("ell must be at least 3")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for n, M, N in self.options().identity_sizes():
            check_envelope(n, M, N)

    def options(self) -> CampaignOptions:
        return CampaignOptions(n=self.n, M=self.M, N=self.N, ell=self.ell, trunc=self.trunc)

    def echo(self) -> dict[str, Any]:
        """The configuration as written into reports; parallelism is left out."""
        return {
            "campaign": self.campaign,
            "seeds": list(self.seeds),
            "n": self.n,
            "M": self.M,
            "N": self.N,
            "ell": self.ell,
            "trunc": self.trunc.to_dict(),
            "tol": self.tol,
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "CampaignConfig":
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "campaign" not in data:
            raise ConfigError("config needs a campaign")
        seeds = data.get("seeds", DEFAULT_SEEDS)
        if isinstance(seeds, str):
            seeds = parse_seeds(seeds)
        trunc = DEFAULT_TRUNC
        if data.get("trunc_order") is not None:
            try:
                trunc = replace(trunc, product_order=int(data["trunc_order"]))
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return cls(
            campaign=data["campaign"],
            seeds=tuple(seeds),
            n=data.get("n"),
            M=data.get("M"),
            N=data.get("N"),
            ell=data.get("ell", 3),
            trunc=trunc,
            tol=data.get("tol"),
            output_path=data.get("out"),
            jobs=data.get("jobs", 1),
        )


def parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"seeds must be comma-separated integers, got {text!r}") from exc


def load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return {key.replace("-", "_"): value for key, value in data.items()}


def _run_task(task: tuple[str, int, CampaignOptions]) -> VerificationReport:
    name, seed, options = task
    return CAMPAIGNS[name](seed, options)


def run_campaign(config: CampaignConfig) -> VerificationReport:
    """Run every selected campaign for every seed and assemble one report.

    Tasks are ordered by campaign then seed, and results are folded in that
    order whatever the worker count, so reports do not depend on ``jobs``.
    """
    start = time.perf_counter()
    options = config.options()
    tasks = [(name, seed, options) for name in expand(config.campaign) for seed in config.seeds]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            parts = list(pool.map(_run_task, tasks))
    else:
        parts = [_run_task(task) for task in tasks]
    report = VerificationReport(config=config.echo(), tool_version=__version__)
    for part in parts:
        for record in part.records:
            if config.tol is not None and not record.control:
                record = replace(record, tolerance=config.tol)
            report.add(record)
    report.total_wall_time = time.perf_counter() - start
    if config.output_path:
        report.write(config.output_path)
    return report
