"""Experiment registry and seeded Monte Carlo driver.

Each experiment writes one CSV table. The random stream of trial t at
grid point index p is np.random.default_rng([seed, p, t]), so results do
not depend on execution order or on how trials are distributed over
worker processes; schemes under comparison share each drop.
"""

from __future__ import annotations

import dataclasses
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache
from itertools import repeat

import numpy as np

from .channel import (RateRecord, SystemConfig, cell_metrics, generate_channels,
                      interference_covariance, postfilter, user_rate)
from .complexity import (FlopReport, flops_ia_individual, flops_ia_joint,
                         flops_oia_1bit)
from .errors import (ConfigError, DegenerateChannel, IoError, TooFewUsers,
                     UnknownExperiment)
from .grassmann import ManifoldParams
from .ia import closed_form_ia, ia_link_rates, quantized_channel_set
from .oia import select_conventional, select_one_bit
from .threshold import (optimal_threshold_d1, threshold_asymptotic,
                        threshold_lambert, threshold_numeric)

_SNR_DEFAULT = tuple(float(s) for s in range(0, 45, 5))
_THRESHOLD_METHODS = ("closed_form_d1", "lambert", "asymptotic", "numeric")
_MAX_REDRAWS = 1000
_RVQ_BIT_LIMIT = 24


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: grids, dimensions, trial count, seed, output."""

    experiment: str
    snr_db_grid: tuple = _SNR_DEFAULT
    K_rule: str = "ceil_P"
    d: int = 1
    nr: int = 2
    nt: int = 1
    trials: int = 2000
    seed: int = 12345
    threshold_method: str = "closed_form_d1"
    output_path: str = ""

    def __post_init__(self):
        grid = tuple(float(s) for s in self.snr_db_grid)
        if not grid:
            raise ConfigError("snr_db_grid must not be empty")
        object.__setattr__(self, "snr_db_grid", grid)
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if min(self.d, self.nr, self.nt) < 1:
            raise ConfigError("d, nr, nt must be at least 1")
        if self.threshold_method not in _THRESHOLD_METHODS:
            raise ConfigError(f"unknown threshold_method {self.threshold_method!r}")
        kind, payload = parse_k_rule(self.K_rule)
        if kind == "ceil_P_pow" and payload % self.d:
            raise ConfigError(
                f"ceil_P_pow exponent {payload} is not a multiple of d={self.d}")
        if not self.output_path:
            object.__setattr__(self, "output_path",
                               os.path.join("results", f"{self.experiment}.csv"))


@dataclass(frozen=True)
class ResultRow:
    """One CSV row: one scheme at one grid point."""

    experiment: str
    snr_db: float
    K: int
    scheme: str
    mean_sum_rate: float
    stderr: float
    outage_rate: float
    mean_eligible: float
    threshold_used: float
    trials: int

    def __post_init__(self):
        if self.stderr == self.stderr and self.stderr < 0:
            raise ConfigError("stderr must be nonnegative")
        if self.outage_rate == self.outage_rate and not 0 <= self.outage_rate <= 1:
            raise ConfigError("outage_rate must lie in [0, 1]")


@dataclass(frozen=True)
class SchemeTrial:
    """Per-cell records of one scheme on one drop; eligible counts are
    present only for the 1-bit scheme."""

    records: tuple
    eligible: tuple = ()


@dataclass(frozen=True)
class TrialOutput:
    """Everything run_trial produced: records per (scheme, K), redraw count."""

    schemes: dict
    redraws: int = 0


def parse_k_rule(rule: str):
    """Split a K_rule string into (kind, payload).

    "ceil_P" couples K to power as K = ceil(P); "ceil_P_pow:E" as
    K = ceil(P^E) with integer E; "fixed:10,50,100" evaluates the listed
    K values (ascending) at every SNR point. For the OIA-vs-IA
    comparison the fixed values double as the per-cell feedback bit
    budgets, with K = n_bits users.
    """
    parts = rule.split(":", 1)
    kind = parts[0].strip()
    if kind == "ceil_P":
        if len(parts) > 1 and parts[1].strip():
            raise ConfigError("ceil_P takes no argument")
        return "ceil_P", None
    if kind == "ceil_P_pow":
        if len(parts) != 2:
            raise ConfigError("ceil_P_pow requires an exponent, e.g. ceil_P_pow:2")
        try:
            exponent = int(parts[1])
        except ValueError as exc:
            raise ConfigError(f"bad ceil_P_pow exponent {parts[1]!r}") from exc
        if exponent < 1:
            raise ConfigError("ceil_P_pow exponent must be at least 1")
        return "ceil_P_pow", exponent
    if kind == "fixed":
        if len(parts) != 2:
            raise ConfigError("fixed requires a value list, e.g. fixed:10,50,100")
        try:
            values = tuple(sorted(int(v) for v in parts[1].split(",")))
        except ValueError as exc:
            raise ConfigError(f"bad fixed K list {parts[1]!r}") from exc
        if not values or values[0] < 1:
            raise ConfigError("fixed K values must be positive integers")
        return "fixed", values
    raise ConfigError(f"unknown K_rule {rule!r}")


def _point_k_values(cfg: ExperimentConfig, P: float) -> tuple:
    kind, payload = parse_k_rule(cfg.K_rule)
    if kind == "ceil_P":
        return (math.ceil(P),)
    if kind == "ceil_P_pow":
        return (math.ceil(P**payload),)
    return payload


@lru_cache(maxsize=None)
def _cached_threshold(method: str, K: int, n: int, d: int) -> float:
    params = ManifoldParams(n, d)
    if method == "closed_form_d1":
        if d != 1 or n != 2:
            raise ConfigError("closed_form_d1 threshold requires d=1, nr=2")
        return optimal_threshold_d1(K).x
    if method == "lambert":
        return threshold_lambert(K, params).x
    if method == "asymptotic":
        return threshold_asymptotic(K, params).x
    return threshold_numeric(K, params).x


def threshold_value(cfg: ExperimentConfig, K: int) -> float:
    """The 1-bit threshold this configuration uses for K candidate users."""
    return _cached_threshold(cfg.threshold_method, K, cfg.nr, cfg.d)


def _draw_ia_channels(rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((3, 3, 2, 2)) + 1j * rng.standard_normal((3, 3, 2, 2))
    return g / np.sqrt(2.0)


def _oia_drop(cfg: ExperimentConfig, P: float, kmax: int,
              rng: np.random.Generator):
    """One non-degenerate OIA channel drop with its per-cell metric arrays."""
    sys_cfg = SystemConfig(d=cfg.d, nr=cfg.nr, nt=cfg.nt, K=kmax, P=P)
    redraws = 0
    while True:
        try:
            ch = generate_channels(rng, sys_cfg)
            metrics = [cell_metrics(ch, i) for i in range(3)]
            return ch, metrics, sys_cfg, redraws
        except DegenerateChannel:
            redraws += 1
            if redraws > _MAX_REDRAWS:
                raise


def _oia_cell_record(ch, sys_cfg, i, k, metric, outage) -> RateRecord:
    R = interference_covariance(ch, i, k)
    U = postfilter(R, sys_cfg.d)
    return user_rate(ch, i, k, U, sys_cfg, metric=metric, outage=outage)


def _oia_schemes(cfg, P, rng, ks, include_perfect):
    """Evaluate the 1-bit scheme (and optionally perfect feedback) for each
    K in ks on one shared drop, smaller K as prefixes of the largest."""
    ch, metrics, sys_cfg, redraws = _oia_drop(cfg, P, max(ks), rng)
    schemes = {}
    for K in ks:
        x = threshold_value(cfg, K)
        perfect = []
        one_bit = []
        eligible = []
        for i in range(3):
            m = metrics[i][:K]
            if include_perfect:
                k_star = select_conventional(m)
                perfect.append(_oia_cell_record(ch, sys_cfg, i, k_star,
                                                float(m[k_star]), False))
            sel = select_one_bit(m, x, rng)
            eligible.append(sel.eligible_count)
            one_bit.append(_oia_cell_record(ch, sys_cfg, i, sel.selected,
                                            float(m[sel.selected]), sel.outage))
        if include_perfect:
            schemes[("oia_perfect", K)] = SchemeTrial(records=tuple(perfect))
        schemes[("oia_1bit", K)] = SchemeTrial(records=tuple(one_bit),
                                               eligible=tuple(eligible))
    return schemes, redraws


def _ia_records(rates) -> tuple:
    return tuple(RateRecord(cell=i, user=0, rate=r, rate_gain=r, rate_loss=0.0,
                            metric=float("nan"), outage=False)
                 for i, r in enumerate(rates))


def _trial_fig2(cfg, P, rng):
    ks = _point_k_values(cfg, P)
    schemes, redraws = _oia_schemes(cfg, P, rng, ks, include_perfect=True)
    while True:
        ch2 = _draw_ia_channels(rng)
        try:
            sol = closed_form_ia(ch2)
            break
        except DegenerateChannel:
            redraws += 1
            if redraws > _MAX_REDRAWS:
                raise
    schemes[("ia_closed_form", 1)] = SchemeTrial(
        records=_ia_records(ia_link_rates(ch2, sol, P)))
    return TrialOutput(schemes=schemes, redraws=redraws)


def _trial_oia_only(cfg, P, rng):
    ks = _point_k_values(cfg, P)
    schemes, redraws = _oia_schemes(cfg, P, rng, ks, include_perfect=False)
    return TrialOutput(schemes=schemes, redraws=redraws)


def _trial_fig6(cfg, P, rng):
    bit_values = _point_k_values(cfg, P)
    schemes, redraws = _oia_schemes(cfg, P, rng, bit_values,
                                    include_perfect=False)
    ch2 = _draw_ia_channels(rng)
    for b in bit_values:
        mode = "rvq" if b <= _RVQ_BIT_LIMIT else "perturbation"
        while True:
            try:
                quantized = quantized_channel_set(ch2, b, mode, rng)
                sol = closed_form_ia(quantized)
                break
            except DegenerateChannel:
                redraws += 1
                if redraws > _MAX_REDRAWS:
                    raise
        schemes[("ia_individual", b)] = SchemeTrial(
            records=_ia_records(ia_link_rates(ch2, sol, P)))
    return TrialOutput(schemes=schemes, redraws=redraws)


_TRIAL_BUILDERS = {
    "fig2_sumrate_d1": _trial_fig2,
    "fig3_eligible_users": _trial_oia_only,
    "fig5_sumrate_d2": _trial_oia_only,
    "fig6_oia_vs_ia": _trial_fig6,
}


def run_trial(cfg: ExperimentConfig, snr_db: float, trial_index: int) -> TrialOutput:
    """One Monte Carlo drop at one SNR grid point, all schemes evaluated.

    The rng derives from (seed, grid index of snr_db, trial_index), so the
    same triple always reproduces the same records.
    """
    try:
        builder = _TRIAL_BUILDERS[cfg.experiment]
    except KeyError:
        raise UnknownExperiment(cfg.experiment) from None
    point = cfg.snr_db_grid.index(float(snr_db))
    rng = np.random.default_rng([cfg.seed, point, trial_index])
    P = 10.0 ** (float(snr_db) / 10.0)
    return builder(cfg, P, rng)


def _map_trials(cfg, snr_db, workers):
    if workers <= 1:
        return [run_trial(cfg, snr_db, t) for t in range(cfg.trials)]
    chunk = max(1, cfg.trials // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, repeat(cfg), repeat(snr_db),
                             range(cfg.trials), chunksize=chunk))


def _aggregate_point(cfg, snr_db, outputs) -> list:
    rows = []
    n = len(outputs)
    for key in outputs[0].schemes:
        scheme, K = key
        sums = np.array([sum(r.rate for r in o.schemes[key].records)
                         for o in outputs])
        stderr = float(sums.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        flags = [r.outage for o in outputs for r in o.schemes[key].records]
        eligible = [e for o in outputs for e in o.schemes[key].eligible]
        rows.append(ResultRow(
            experiment=cfg.experiment,
            snr_db=float(snr_db),
            K=K,
            scheme=scheme,
            mean_sum_rate=float(sums.mean()),
            stderr=stderr,
            outage_rate=float(np.mean(flags)),
            mean_eligible=float(np.mean(eligible)) if eligible else float("nan"),
            threshold_used=(threshold_value(cfg, K) if scheme == "oia_1bit"
                            else float("nan")),
            trials=n,
        ))
    return rows


def _run_monte_carlo(cfg: ExperimentConfig, workers: int = 1) -> list:
    rows = []
    redraws = 0
    for point, snr_db in enumerate(cfg.snr_db_grid):
        outputs = _map_trials(cfg, snr_db, workers)
        redraws += sum(o.redraws for o in outputs)
        rows.extend(_aggregate_point(cfg, snr_db, outputs))
        print(f"{cfg.experiment}: point {point + 1}/{len(cfg.snr_db_grid)} "
              f"(snr {snr_db:g} dB) done", file=sys.stderr)
    total = cfg.trials * len(cfg.snr_db_grid)
    if redraws > 0.001 * total:
        print(f"{cfg.experiment}: {redraws} degenerate redraws over "
              f"{total} trials", file=sys.stderr)
    return rows


def _run_fig4(cfg: ExperimentConfig, workers: int = 1) -> list:
    kind, ks = parse_k_rule(cfg.K_rule)
    if kind != "fixed":
        raise ConfigError("fig4_threshold_compare requires K_rule fixed:...")
    params = ManifoldParams(cfg.nr, cfg.d)
    rows = []
    for K in ks:
        for method, solver in (("numeric", threshold_numeric),
                               ("lambert", threshold_lambert),
                               ("asymptotic", threshold_asymptotic)):
            try:
                x = solver(K, params).x
            except TooFewUsers:
                x = float("nan")
            rows.append(ResultRow(
                experiment=cfg.experiment, snr_db=float("nan"), K=K,
                scheme=method, mean_sum_rate=float("nan"), stderr=float("nan"),
                outage_rate=float("nan"), mean_eligible=float("nan"),
                threshold_used=x, trials=0))
    return rows


def _run_fig7(cfg: ExperimentConfig, workers: int = 1) -> list:
    kind, bit_values = parse_k_rule(cfg.K_rule)
    if kind != "fixed":
        raise ConfigError("fig7_complexity_table requires K_rule fixed:...")
    rows = []
    for b in bit_values:
        rows.append(FlopReport("oia_1bit", b, flops_oia_1bit(cfg.nr, cfg.d, b)))
        rows.append(FlopReport("ia_joint", b, flops_ia_joint(cfg.nr, cfg.nt, b)))
        rows.append(FlopReport("ia_individual", b,
                               flops_ia_individual(cfg.nr, cfg.nt, b)))
    return rows


@dataclass(frozen=True)
class Experiment:
    """Registry entry: CLI description, config defaults, row producer."""

    description: str
    defaults: dict
    runner: object


EXPERIMENTS = {
    "fig2_sumrate_d1": Experiment(
        description="d=1 sum rate vs SNR, K=ceil(P): 1-bit OIA against "
                    "perfect-feedback OIA and closed-form IA",
        defaults=dict(K_rule="ceil_P", d=1, nr=2, nt=1, trials=2000,
                      threshold_method="closed_form_d1"),
        runner=_run_monte_carlo),
    "fig3_eligible_users": Experiment(
        description="d=1 eligible-user counts vs SNR under the 1-bit "
                    "threshold, K=ceil(P)",
        defaults=dict(K_rule="ceil_P", d=1, nr=2, nt=1, trials=2000,
                      threshold_method="closed_form_d1"),
        runner=_run_monte_carlo),
    "fig4_threshold_compare": Experiment(
        description="d=2 threshold design table: numeric vs Lambert vs "
                    "asymptotic over a K grid (no Monte Carlo)",
        defaults=dict(snr_db_grid=(30.0,), K_rule="fixed:100,316,1000,3162,10000",
                      d=2, nr=4, nt=2, trials=1, threshold_method="numeric"),
        runner=_run_fig4),
    "fig5_sumrate_d2": Experiment(
        description="d=2 sum rate vs SNR for K in {10,50,100}, 1-bit "
                    "feedback with the numeric threshold",
        # below 10 dB the noise-limited rates of the three K values
        # coincide, so the grid starts where user scaling matters
        defaults=dict(snr_db_grid=tuple(float(s) for s in range(10, 45, 5)),
                      K_rule="fixed:10,50,100", d=2, nr=4, nt=2, trials=500,
                      threshold_method="numeric"),
        runner=_run_monte_carlo),
    "fig6_oia_vs_ia": Experiment(
        description="1-bit OIA with K=n_bits users against limited-feedback "
                    "IA at the same per-cell bit budget",
        defaults=dict(K_rule="fixed:10,16,24,28,32,36,40", d=1, nr=2, nt=1,
                      trials=500, threshold_method="closed_form_d1"),
        runner=_run_monte_carlo),
    "fig7_complexity_table": Experiment(
        description="feedback FLOP counts per cell: 1-bit OIA vs joint and "
                    "individual IA quantization (no Monte Carlo)",
        defaults=dict(snr_db_grid=(0.0,),
                      K_rule="fixed:" + ",".join(str(b) for b in range(2, 42, 2)),
                      d=1, nr=2, nt=2, trials=1, threshold_method="numeric"),
        runner=_run_fig7),
}

_FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ExperimentConfig))
_INT_FIELDS = ("d", "nr", "nt", "trials", "seed")


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    value = value.strip()
    try:
        if key in _INT_FIELDS:
            return int(value)
        if key == "snr_db_grid":
            return tuple(float(v) for v in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad value {value!r} for {key}") from exc
    return value


def load_config_file(path: str) -> dict:
    """Parse a flat key=value config file into an override dict.

    Blank lines and '#' comments are ignored; keys must be
    ExperimentConfig field names.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_NAMES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        overrides[key] = value
    return overrides


def make_config(experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Registry defaults for an experiment with overrides applied on top."""
    try:
        spec = EXPERIMENTS[experiment]
    except KeyError:
        raise UnknownExperiment(experiment) from None
    values = dict(spec.defaults)
    values["experiment"] = experiment
    for key, value in (overrides or {}).items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {key!r}")
        if key == "experiment" and value != experiment:
            raise ConfigError(
                f"config file names experiment {value!r}, running {experiment!r}")
        values[key] = _coerce(key, value)
    return ExperimentConfig(**values)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def write_csv(path: str, rows: list) -> None:
    """Write rows atomically: temp file in the target directory, then rename.

    The first line is a '# generated_at=...' comment; the rest is the
    header (field names of the row type) and one line per row, floats
    with 9 significant digits.
    """
    if not rows:
        raise ConfigError("refusing to write an empty table")
    names = tuple(f.name for f in dataclasses.fields(type(rows[0])))
    lines = [",".join(names)]
    for row in rows:
        lines.append(",".join(_format_cell(getattr(row, n)) for n in names))
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    content = f"# generated_at={stamp}\n" + "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    tmp_name = None
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=".oiasim-", suffix=".csv")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        os.replace(tmp_name, path)
        tmp_name = None
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    finally:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list:
    """Produce all rows of one experiment and write them to cfg.output_path."""
    try:
        spec = EXPERIMENTS[cfg.experiment]
    except KeyError:
        raise UnknownExperiment(cfg.experiment) from None
    rows = spec.runner(cfg, workers)
    write_csv(cfg.output_path, rows)
    return rows
