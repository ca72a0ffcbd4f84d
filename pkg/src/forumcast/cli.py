"""Command-line pipeline: generate, indicators, forecast, granger, weights.

Every command resolves its configuration as defaults, then command-line
flags, then a JSON config file (the file wins), logs the result and writes it
into a manifest next to its outputs together with package versions and input
digests. Exit status is 0 on success, 2 for invalid input or configuration
and 3 when a computation fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from . import __version__
from .evaluation import (
    accuracy_table,
    dumitrescu_hurlin,
    granger_table,
    weight_quartiles,
    weight_table,
    write_table,
)
from .fileio import atomic_write_text, sha256_file
from .indicators import (
    FORUM_VARIABLES,
    TARGET,
    PanelSchemaError,
    compute_panel,
    export_panel,
    import_panel,
)
from .ingest import (
    IngestError,
    load_external_series,
    load_posts,
    load_profiles,
    write_external_series,
    write_posts,
    write_profiles,
)
from .models.rolling import (
    HORIZONS,
    MODEL_KINDS,
    ForecastRecord,
    ForecastRun,
    ModelConfig,
    run_grid,
)
from .months import month_range
from .synthetic import SyntheticConfig, TargetDGP, generate_synthetic_forum
from .tsprep import DIFF, LEVEL, apply_transform, deseasonalize, interpolate_single_gaps

log = logging.getLogger("forumcast")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_COMPUTE = 3

SERIES_KINDS = ("arrivals", "trend_flights", "trend_holidays")
FORECAST_COLUMNS = ["city", "model", "h", "origin", "forecast", "actual", "p", "q", "R"]
WEIGHT_SIDECAR_COLUMNS = ["city", "model", "h", "origin", "component", "variable", "weight"]
PLOT_COLUMNS = ["city", "model", "h", "month", "actual", "forecast"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    cities: list[str] = field(default_factory=lambda: ["Synthetica"])
    start: str = "2007-01"
    end: str = "2016-12"
    eval_start: str = "2013-06"
    eval_end: str = "2016-12"
    horizons: list[int] = field(default_factory=lambda: list(HORIZONS))
    window: int = 60
    models: list[str] = field(default_factory=lambda: list(MODEL_KINDS))
    p_max: int = 13
    q_max: int = 13
    r_max: int = 10
    threshold: float = 0.20
    alpha: float = 0.10
    n_boot: int = 5000
    seed: int = 0
    granger_lags: list[int] = field(default_factory=lambda: [1, 2, 3])
    granger_transform: str = DIFF
    deseasonalize: str = "classical_additive"
    weights_horizon: int = 1
    data_dir: str = "data"
    out_dir: str = "out"
    jobs: int = 1
    # synthetic corpus, one per city
    n_users: int = 300
    mean_posts_per_user_month: float = 0.3
    hub_fraction: float = 0.1
    vocabulary_size: int = 400
    factor_loading: float = 1.0
    gf_loading: float = 0.5

    def validate(self) -> None:
        months = month_range(self.start, self.end)
        if not self.cities:
            raise ConfigError("at least one city is required")
        bad = [h for h in self.horizons if h not in HORIZONS]
        if bad or not self.horizons:
            raise ConfigError(f"horizons must be a non-empty subset of {HORIZONS}, got {bad}")
        bad = [m for m in self.models if m not in MODEL_KINDS]
        if bad or not self.models:
            raise ConfigError(f"unknown model kinds {bad}; choose from {MODEL_KINDS}")
        if self.eval_start not in months or self.eval_end not in months:
            raise ConfigError("the evaluation span must lie inside the month range")
        if self.window < 2 or self.p_max < 1 or self.q_max < 0 or self.r_max < 1:
            raise ConfigError("window, p_max, q_max and r_max must be positive")
        if not 0 < self.alpha < 1 or not 0 < self.threshold < 1:
            raise ConfigError("alpha and threshold must lie in (0, 1)")
        if self.n_boot < 1 or self.jobs < 1:
            raise ConfigError("n_boot and jobs must be positive")
        if self.granger_transform not in (LEVEL, DIFF):
            raise ConfigError(f"granger_transform must be {LEVEL!r} or {DIFF!r}")
        if self.deseasonalize not in ("stl_loess", "classical_additive"):
            raise ConfigError("deseasonalize must be 'stl_loess' or 'classical_additive'")

    @property
    def months(self) -> list[str]:
        return month_range(self.start, self.end)

    @property
    def eval_months(self) -> list[str]:
        return month_range(self.eval_start, self.eval_end)

    def model_config(self) -> ModelConfig:
        return ModelConfig(window=self.window, p_max=self.p_max, q_max=self.q_max,
                           r_max=self.r_max, threshold=self.threshold)

    def synthetic_config(self, city: str, index: int) -> SyntheticConfig:
        return SyntheticConfig(
            seed=self.seed + index,
            months=len(self.months),
            start=self.start,
            city=city,
            n_users=self.n_users,
            mean_posts_per_user_month=self.mean_posts_per_user_month,
            hub_fraction=self.hub_fraction,
            vocabulary_size=self.vocabulary_size,
            target_dgp=TargetDGP(factor_loading=self.factor_loading,
                                 gf_loading=self.gf_loading),
        )


_LIST_FIELDS = {"cities": str, "horizons": int, "models": str, "granger_lags": int}


def resolve_config(flags: dict[str, Any], config_file: str | None) -> RunConfig:
    """Defaults, overridden by explicit flags, overridden by the config file."""
    values = dataclasses.asdict(RunConfig())
    values.update({k: v for k, v in flags.items() if v is not None})
    if config_file:
        try:
            loaded = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_file}: {exc}") from exc
        unknown = sorted(set(loaded) - set(values))
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        values.update(loaded)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _versions() -> dict[str, str]:
    import scipy
    import statsmodels

    return {"forumcast": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "pandas": pd.__version__, "scipy": scipy.__version__,
            "statsmodels": statsmodels.__version__}


def write_manifest(cfg: RunConfig, command: str, inputs: Sequence[Path],
                   outputs: Sequence[Path]) -> Path:
    manifest = {
        "command": command,
        "config": dataclasses.asdict(cfg),
        "versions": _versions(),
        "inputs": {str(p): sha256_file(p) for p in sorted(inputs)},
        "outputs": {str(p): sha256_file(p) for p in sorted(outputs)},
    }
    path = Path(cfg.out_dir) / f"{command}_manifest.json"
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _posts_path(cfg: RunConfig) -> Path:
    return Path(cfg.data_dir) / "posts.txt"


def _profiles_path(cfg: RunConfig) -> Path:
    return Path(cfg.data_dir) / "profiles.csv"


def _series_path(cfg: RunConfig, city: str, kind: str) -> Path:
    return Path(cfg.data_dir) / "series" / f"{city}_{kind}.csv"


def _panel_path(cfg: RunConfig) -> Path:
    return Path(cfg.out_dir) / "panel.csv"


def cmd_generate(cfg: RunConfig) -> list[Path]:
    posts, profiles, written = [], {}, []
    for i, city in enumerate(cfg.cities):
        forum = generate_synthetic_forum(cfg.synthetic_config(city, i))
        posts.extend(forum.posts)
        # users are city-specific; prefix to keep ids unique across cities
        for uid, prof in forum.profiles.items():
            profiles[f"{city}:{uid}"] = dataclasses.replace(prof, user_id=f"{city}:{uid}")
        for series in [forum.target, *forum.trends]:
            path = _series_path(cfg, city, series.kind)
            path.parent.mkdir(parents=True, exist_ok=True)
            write_external_series(series, path)
            written.append(path)
    posts = [dataclasses.replace(p, author_id=f"{p.city}:{p.author_id}") for p in posts]
    posts.sort(key=lambda p: (p.timestamp, p.post_id))
    Path(cfg.data_dir).mkdir(parents=True, exist_ok=True)
    write_posts(posts, _posts_path(cfg))
    write_profiles(profiles.values(), _profiles_path(cfg))
    written += [_posts_path(cfg), _profiles_path(cfg)]
    write_manifest(cfg, "generate", [], written)
    log.info("generated %d posts and %d profiles", len(posts), len(profiles))
    return written


def cmd_indicators(cfg: RunConfig) -> Path:
    inputs = [_posts_path(cfg), _profiles_path(cfg)]
    for path in inputs:
        if not path.exists():
            raise FileNotFoundError(f"missing input {path}")
    posts = load_posts(inputs[0]).raise_on_error()
    profiles = load_profiles(inputs[1]).raise_on_error()
    external = []
    for city in cfg.cities:
        for kind in SERIES_KINDS:
            path = _series_path(cfg, city, kind)
            if not path.exists():
                raise FileNotFoundError(f"missing {kind} series for {city}: {path}")
            external.append(load_external_series(path, kind, city))
            inputs.append(path)
    panel = compute_panel(posts, profiles, external, cfg.months, cities=cfg.cities)
    for note in panel.notes:
        log.warning(note)
    out = _panel_path(cfg)
    out.parent.mkdir(parents=True, exist_ok=True)
    export_panel(panel, out)
    write_manifest(cfg, "indicators", inputs, [out])
    return out


def _load_panel(cfg: RunConfig):
    path = _panel_path(cfg)
    if not path.exists():
        raise FileNotFoundError(f"missing panel {path}; run the indicators command first")
    return import_panel(path), path


def _records_frame(runs: Sequence[ForecastRun]) -> tuple[pd.DataFrame, pd.DataFrame]:
    rows, weights = [], []
    for run in runs:
        for r in run.records:
            rows.append((run.city, run.kind, run.h, r.origin, r.forecast, r.actual, r.p,
                         "" if r.q is None else r.q, r.R))
            if r.weights is not None:
                for comp in range(r.weights.shape[1]):
                    for var, w in zip(run.predictor_names, r.weights[:, comp]):
                        weights.append((run.city, run.kind, run.h, r.origin, comp + 1, var,
                                        float(w)))
    return (pd.DataFrame(rows, columns=FORECAST_COLUMNS),
            pd.DataFrame(weights, columns=WEIGHT_SIDECAR_COLUMNS))


def _plot_frame(runs: Sequence[ForecastRun]) -> pd.DataFrame:
    rows = [(run.city, run.kind, run.h, r.target_month, r.actual, r.forecast)
            for run in runs for r in run.records]
    return pd.DataFrame(rows, columns=PLOT_COLUMNS)


@dataclass
class _CityJob:
    frame: pd.DataFrame
    cfg: RunConfig
    city: str

    def __call__(self, kind: str) -> list[ForecastRun]:
        return run_grid(self.frame, [kind], self.cfg.horizons, self.cfg.eval_months,
                        self.cfg.model_config(), self.city)


def cmd_forecast(cfg: RunConfig) -> list[Path]:
    panel, panel_path = _load_panel(cfg)
    runs: list[ForecastRun] = []
    for city in cfg.cities:
        if city not in panel.cities:
            raise ConfigError(f"city {city} not in panel")
        job = _CityJob(panel.city(city), cfg, city)
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                results = list(pool.map(job, cfg.models))
        else:
            results = [job(kind) for kind in cfg.models]
        for kind_runs in results:
            for run in kind_runs:
                for note in run.diagnostics:
                    log.info("%s %s h=%d: %s", city, run.kind, run.h, note)
            runs.extend(kind_runs)
    runs.sort(key=lambda r: (r.city, r.kind, r.h))
    records, weights = _records_frame(runs)
    out = Path(cfg.out_dir)
    paths = [out / "forecasts.csv", out / "forecast_weights.csv", out / "table4.csv",
             out / "plot_data.csv"]
    write_table(records, paths[0])
    write_table(weights, paths[1])
    table = accuracy_table(runs, alpha=cfg.alpha, n_boot=cfg.n_boot, seed=cfg.seed)
    write_table(table, paths[2])
    write_table(_plot_frame(runs), paths[3])
    write_manifest(cfg, "forecast", [panel_path], paths)
    return paths


def _granger_series(values: np.ndarray, cfg: RunConfig) -> np.ndarray | None:
    v = interpolate_single_gaps(np.asarray(values, dtype=float))
    if np.isnan(v).any():
        return None
    v = deseasonalize(v, cfg.deseasonalize)
    return apply_transform(v, cfg.granger_transform) if cfg.granger_transform == DIFF else v


def cmd_granger(cfg: RunConfig) -> Path:
    panel, panel_path = _load_panel(cfg)
    results = {}
    for var in FORUM_VARIABLES:
        pairs, units = [], []
        for city in cfg.cities:
            frame = panel.city(city)
            y = _granger_series(frame[TARGET].to_numpy(), cfg)
            x = _granger_series(frame[var].to_numpy(), cfg)
            if y is None or x is None:
                log.warning("%s %s: unfillable gaps, unit skipped", city, var)
                continue
            pairs.append((y, x))
            units.append(city)
        if not pairs:
            log.warning("%s: no usable unit", var)
            continue
        for lag in cfg.granger_lags:
            try:
                results[(var, lag)] = dumitrescu_hurlin(pairs, lag, units)
            except ValueError as exc:
                log.warning("%s lag %d: %s", var, lag, exc)
    if not results:
        raise RuntimeError("no Granger test could be computed")
    out = Path(cfg.out_dir) / "table3.csv"
    write_table(granger_table(results), out)
    write_manifest(cfg, "granger", [panel_path], [out])
    return out


def _faar_runs(cfg: RunConfig, horizon: int) -> tuple[list[ForecastRun], list[Path]]:
    out = Path(cfg.out_dir)
    paths = [out / "forecasts.csv", out / "forecast_weights.csv"]
    for path in paths:
        if not path.exists():
            raise FileNotFoundError(f"missing {path}; run the forecast command first")
    records = pd.read_csv(paths[0], dtype={"origin": str})
    weights = pd.read_csv(paths[1], dtype={"origin": str})
    records = records[(records.model == "FAAR") & (records.h == horizon)]
    if records.empty:
        raise ConfigError(f"no FAAR forecasts at h={horizon}; the weights table needs FAAR runs")
    weights = weights[(weights.model == "FAAR") & (weights.h == horizon)]
    names = list(FORUM_VARIABLES)
    runs = []
    for city, group in records.groupby("city", sort=True):
        w_city = weights[weights.city == city]
        recs = []
        for row in group.itertuples(index=False):
            w = w_city[w_city.origin == row.origin]
            mat = np.zeros((len(names), int(row.R)))
            for item in w.itertuples(index=False):
                mat[names.index(item.variable), int(item.component) - 1] = item.weight
            recs.append(ForecastRecord(row.origin, "", row.forecast, row.actual, int(row.p),
                                       None, int(row.R), mat))
        runs.append(ForecastRun(str(city), "FAAR", horizon, cfg.window, recs, names))
    return runs, paths


def cmd_weights(cfg: RunConfig) -> Path:
    runs, inputs = _faar_runs(cfg, cfg.weights_horizon)
    table = weight_quartiles(runs, cfg.weights_horizon)
    out = Path(cfg.out_dir) / "table5.csv"
    write_table(weight_table(table), out)
    write_manifest(cfg, "weights", inputs, [out])
    return out


COMMANDS = {
    "generate": cmd_generate,
    "indicators": cmd_indicators,
    "forecast": cmd_forecast,
    "granger": cmd_granger,
    "weights": cmd_weights,
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _LIST_FIELDS:
            p.add_argument(flag, dest=f.name, nargs="+", type=_LIST_FIELDS[f.name],
                           default=None)
        else:
            kind = type(getattr(RunConfig(), f.name))
            p.add_argument(flag, dest=f.name, type=kind, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--config", help="JSON file; its keys override flags")
    _add_config_flags(common)
    parser = argparse.ArgumentParser(prog="forumcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    sub.add_parser("pipeline", parents=[common], help="run every command in order")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {f.name: getattr(args, f.name) for f in dataclasses.fields(RunConfig)}
    try:
        cfg = resolve_config(flags, args.config)
        log.info("resolved config: %s", json.dumps(dataclasses.asdict(cfg), sort_keys=True))
        steps = list(COMMANDS) if args.command == "pipeline" else [args.command]
        for step in steps:
            COMMANDS[step](cfg)
    except (ConfigError, IngestError, PanelSchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - any numerical failure maps to one exit code
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
