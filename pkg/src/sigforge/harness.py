"""Experiment orchestration: configuration, per-sample dispatch, outputs.

Sample ``i`` always draws from ``RngStream(seed, i)``, and results are
aggregated in index order, so the worker count never changes an output.
One-off setup (the discrete-log group, say) draws from a reserved stream.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from sigforge import dlog, groups, plots, stats
from sigforge.numtheory import is_prime
from sigforge.primegen import PrimeGenConfig, generate_prime
from sigforge.sampling import (
    DEFAULT_SEED,
    SETUP_STREAM,
    RngStream,
    SumOfTwoUniform,
    UniformPow,
    parse_seed,
)
from sigforge.timing import clock, gc_paused
from sigforge.walks import Birthday, GammaN, PollardRho, UniformGamma, run_to_collision

KINDS = ("primegen", "walk", "dlog", "keygen", "analyze")
WALK_VARIANTS = ("birthday", "rho", "uniform-gamma", "gamma-n")
DEFAULT_SAMPLES = {"primegen": 10_000, "walk": 100_000, "dlog": 10_000, "keygen": 10_000}
DEFAULT_NORMALIZATION = {"primegen": "eq1", "walk": "eq4", "dlog": "eq4", "keygen": "eq1", "analyze": "eq4"}
DEFAULT_REFERENCE = {
    "primegen": "shifted-exponential",
    "walk": "rayleigh",
    "dlog": "rayleigh",
    "keygen": "none",
    "analyze": "rayleigh",
}
DEFAULT_RANGE = {"rayleigh": (0.0, 4.0), "shifted-exponential": (-1.5, 5.0)}
CHUNK = 512


class ConfigError(ValueError):
    """The experiment configuration is invalid; nothing was run."""


class SampleError(RuntimeError):
    """A single sample failed; the message names its index."""


@dataclass
class ExperimentConfig:
    """Flat experiment description mirroring the CLI flags."""

    kind: str
    samples: Optional[int] = None
    seed: int = DEFAULT_SEED
    workers: int = 1
    out: Optional[str] = None
    normalization: Optional[str] = None
    reference: Optional[str] = None
    bins: int = 50
    range: Optional[list] = None
    measure: str = "steps"
    # primegen
    log2_n: Optional[int] = None
    base: int = 2
    m_rounds: Optional[int] = None
    mu: str = "uniform"
    c: float = 1.0
    # walk
    variant: Optional[str] = None
    modulus: Optional[int] = None
    h: Optional[int] = None
    x1: Optional[int] = None
    # dlog
    group: str = "zp"
    order_near: Optional[int] = None
    algo: str = "rho-floyd"
    # keygen
    scheme: Optional[str] = None
    x: Optional[int] = None
    kappa: float = 2.0
    # analyze
    raw: Optional[str] = None
    compare: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.samples is None and self.kind in DEFAULT_SAMPLES:
            self.samples = DEFAULT_SAMPLES[self.kind]
        if self.normalization is None:
            self.normalization = DEFAULT_NORMALIZATION[self.kind]
        if self.reference is None:
            self.reference = DEFAULT_REFERENCE[self.kind]
        try:
            self.seed = parse_seed(self.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        clean = {}
        for k, v in data.items():
            k = k.replace("-", "_")
            if k not in names:
                raise ConfigError(f"unknown config field {k!r}")
            clean[k] = v
        if "kind" not in clean:
            raise ConfigError("config needs a 'kind'")
        return cls(**clean)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        """Check every precondition the target module will rely on."""
        if self.normalization not in stats.NORMALIZATIONS:
            raise ConfigError("normalization must be eq1 or eq4")
        if self.reference not in ("rayleigh", "shifted-exponential", "none"):
            raise ConfigError("reference must be rayleigh, shifted-exponential or none")
        if self.bins < 1:
            raise ConfigError("bins must be >= 1")
        if self.range is not None and (len(self.range) != 2 or not self.range[0] < self.range[1]):
            raise ConfigError("range must be two increasing numbers")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.kind == "analyze":
            if not self.raw:
                raise ConfigError("analyze needs a raw CSV file")
            return
        if self.samples is None or self.samples < 2:
            raise ConfigError("samples must be >= 2 (normalization needs two values)")
        check = getattr(self, f"_validate_{self.kind}")
        check()

    def _validate_primegen(self):
        if self.log2_n is None or self.log2_n < 2:
            raise ConfigError("primegen needs --log2-n >= 2")
        if self.base < 2:
            raise ConfigError("base must be >= 2")
        if self.mu not in ("uniform", "sum2"):
            raise ConfigError("mu must be uniform or sum2")
        if self.mu == "sum2" and self.base != 2:
            raise ConfigError("the sum2 law is defined for base 2 only")
        if self.m_rounds is not None and self.m_rounds < 1:
            raise ConfigError("m-rounds must be >= 1")
        if self.c < 0:
            raise ConfigError("c must be >= 0")
        if self.measure not in ("steps", "seconds"):
            raise ConfigError("measure must be steps or seconds")

    def _validate_walk(self):
        if self.variant not in WALK_VARIANTS:
            raise ConfigError(f"variant must be one of {', '.join(WALK_VARIANTS)}")
        if self.modulus is None or self.modulus < 2:
            raise ConfigError("walk needs --modulus >= 2")
        for name in ("h", "x1"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < self.modulus:
                raise ConfigError(f"{name} must lie in [0, modulus)")
        if self.variant == "gamma-n" and (self.modulus <= 3 or not is_prime(self.modulus)):
            raise ConfigError("gamma-n needs a prime modulus > 3")
        if self.variant == "uniform-gamma" and self.h is None:
            pass  # h is then drawn per sample
        if self.measure != "steps":
            raise ConfigError("walks measure steps only")

    def _validate_dlog(self):
        if self.group not in ("zp", "ec"):
            raise ConfigError("group must be zp or ec")
        if self.algo not in dlog.SOLVERS:
            raise ConfigError(f"algo must be one of {', '.join(dlog.SOLVERS)}")
        if self.order_near is None or self.order_near < 5:
            raise ConfigError("dlog needs --order-near >= 5")
        if self.group == "ec" and self.order_near > groups.POINT_COUNT_BOUND // 2:
            raise ConfigError("curve groups are limited to p <= 5e6 (brute-force point counting)")
        if self.measure not in ("steps", "seconds"):
            raise ConfigError("measure must be steps or seconds")

    def _validate_keygen(self):
        if self.scheme not in ("rsa", "ecc"):
            raise ConfigError("scheme must be rsa or ecc")
        if self.x is None or self.x < 2:
            raise ConfigError("keygen needs --x >= 2")
        if not self.kappa > 1:
            raise ConfigError("kappa must be > 1")
        try:
            lo, hi = groups._interval(self.x, self.kappa)
            if self.scheme == "ecc" and hi >= groups.POINT_COUNT_BOUND:
                raise ConfigError("ecc keygen needs kappa*X below the point-counting bound")
            groups._check_two_primes(lo, hi)
        except groups.DomainError as exc:
            raise ConfigError(str(exc)) from None
        if self.measure not in ("steps", "seconds"):
            raise ConfigError("measure must be steps or seconds")

    @property
    def unit(self) -> stats.Unit:
        if self.kind == "keygen" or self.measure == "seconds":
            return stats.Unit.SECONDS
        if self.kind == "primegen":
            return stats.Unit.MODEL_UNITS
        return stats.Unit.STEPS


@dataclass
class ExperimentResult:
    raw: stats.SampleSet
    normalized: stats.SampleSet
    summary: dict
    histogram: stats.Histogram
    details: Optional[list] = None
    details_header: Optional[list] = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------- sampling


def prepare(cfg: ExperimentConfig) -> dict:
    """Experiment-wide setup, drawn from the reserved setup stream."""
    if cfg.kind != "dlog":
        return {}
    rng = RngStream(cfg.seed, SETUP_STREAM)
    if cfg.group == "zp":
        G, g = groups.zp_group_near(cfg.order_near, rng)
    else:
        G, g = groups.curve_group_near(cfg.order_near, rng)
    return {"group": G, "generator": g}


def _sample(cfg: ExperimentConfig, ctx: dict, i: int) -> tuple[Any, Optional[tuple]]:
    rng = RngStream(cfg.seed, i)
    kind = cfg.kind
    if kind == "walk":
        N = cfg.modulus
        if cfg.variant == "birthday":
            return run_to_collision(Birthday(N), rng).first_collision_index, None
        if cfg.variant == "gamma-n":
            x1 = cfg.x1 if cfg.x1 is not None else rng.uniform_below(N)
            return run_to_collision(GammaN(N, x1), rng).first_collision_index, None
        h = cfg.h if cfg.h is not None else rng.uniform_below(N)
        x1 = cfg.x1 if cfg.x1 is not None else rng.uniform_below(N)
        if cfg.variant == "rho":
            spec = PollardRho(N, h, x1, rng.next_u64())
            return run_to_collision(spec).first_collision_index, None
        return run_to_collision(UniformGamma(N, h, x1), rng).first_collision_index, None
    if kind == "primegen":
        mu = UniformPow(cfg.base, cfg.log2_n) if cfg.mu == "uniform" else SumOfTwoUniform(cfg.log2_n)
        rec = generate_prime(PrimeGenConfig(mu, cfg.m_rounds), rng)
        value = rec.wall_seconds if cfg.measure == "seconds" else rec.signature_time(cfg.c)
        return value, (rec.prime, rec.tau, rec.mr_rounds_total, rec.wall_seconds)
    if kind == "dlog":
        G, g = ctx["group"], ctx["generator"]
        secret = rng.uniform_int(1, G.order)
        h = G.pow(g, secret)
        key = rng.next_u64()
        with gc_paused():
            t0 = clock()
            res = dlog.SOLVERS[cfg.algo](G, g, h, key)
            wall = clock() - t0
        if G.pow(g, res.x) != h:
            raise dlog.DlogFailure(f"returned exponent {res.x} does not verify")
        value = wall if cfg.measure == "seconds" else res.steps
        return value, (res.steps, wall, res.x, res.retries)
    if kind == "keygen":
        if cfg.scheme == "rsa":
            key, wall = groups.rsa_keygen(cfg.x, cfg.kappa, rng)
            return wall, (key.n.bit_length(), wall)
        rec = groups.ecc_keygen(cfg.x, cfg.kappa, rng)
        return rec.wall_seconds, (rec.curve.p, rec.order, rec.wall_seconds)
    raise ConfigError(f"cannot sample kind {kind!r}")


DETAIL_HEADERS = {
    "primegen": ["sample_index", "prime", "tau", "mr_rounds_total", "wall_seconds"],
    "dlog": ["sample_index", "steps", "wall_seconds", "x", "retries"],
    "keygen": None,
    "walk": None,
}


def _run_chunk(args) -> list:
    cfg, ctx, start, stop = args
    out = []
    for i in range(start, stop):
        try:
            out.append(_sample(cfg, ctx, i))
        except ConfigError:
            raise
        except Exception as exc:  # noqa: BLE001 - re-raised with the sample index
            raise SampleError(f"sample {i} failed: {type(exc).__name__}: {exc}") from None
    return out


def _chunks(n: int, size: int):
    for start in range(0, n, size):
        yield start, min(n, start + size)


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Generate ``cfg.samples`` values, normalize, compare to the reference, write outputs."""
    if cfg.kind == "analyze":
        return analyze(cfg.raw, cfg)
    cfg.validate()
    workers = workers or cfg.workers
    out_dir = _prepare_out(cfg.out) if cfg.out else None
    t0 = time.perf_counter()
    ctx = prepare(cfg)
    values: list = []
    details: list = []
    raw_file = open(out_dir / "raw.csv", "w", newline="") if out_dir else None
    try:
        if raw_file:
            raw_file.write("sample_index,raw_value,unit\n")
        jobs = [(cfg, ctx, a, b) for a, b in _chunks(cfg.samples, CHUNK)]
        if workers == 1:
            results = map(_run_chunk, jobs)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_run_chunk, jobs)
        try:
            for chunk in results:
                for value, detail in chunk:
                    idx = len(values)
                    values.append(value)
                    if detail is not None:
                        details.append((idx, *detail))
                    if raw_file:
                        raw_file.write(f"{idx},{_fmt(value)},{cfg.unit.value}\n")
                if raw_file:
                    raw_file.flush()
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    finally:
        if raw_file:
            raw_file.close()
    raw = stats.SampleSet(values, cfg.unit, {"kind": cfg.kind, "seed": cfg.seed})
    res = _finish(raw, cfg, time.perf_counter() - t0)
    if details:
        res.details = details
        res.details_header = DETAIL_HEADERS.get(cfg.kind)
    if out_dir:
        emit_outputs(res, cfg, skip_raw=True)
    return res


def _prepare_out(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    return out


def _finish(raw: stats.SampleSet, cfg: ExperimentConfig, runtime: float) -> ExperimentResult:
    normalized = stats.NORMALIZATIONS[cfg.normalization](raw)
    law = None if cfg.reference == "none" else stats.ReferenceLaw(cfg.reference)
    if law is not None:
        D = stats.ks_one_sample(normalized, law)
        p = stats.kolmogorov_pvalue(D, len(raw))
    else:
        D = p = None
    lo, hi = _hist_range(cfg, normalized)
    hist = stats.histogram(normalized, cfg.bins, (lo, hi))
    summary = {
        "mean": raw.mean(),
        "std": raw.std(),
        "ks_distance": D,
        "ks_pvalue": p,
        "samples": len(raw),
        "runtime_seconds": runtime,
        "unit": raw.unit.value,
        "config": cfg.to_dict(),
    }
    return ExperimentResult(raw, normalized, summary, hist)


def _hist_range(cfg: ExperimentConfig, normalized: stats.SampleSet) -> tuple[float, float]:
    if cfg.range is not None:
        return float(cfg.range[0]), float(cfg.range[1])
    if cfg.reference in DEFAULT_RANGE:
        return DEFAULT_RANGE[cfg.reference]
    v = normalized.sorted
    lo, hi = float(v[0]), float(v[-1])
    return (lo, hi) if lo < hi else (lo - 0.5, hi + 0.5)


def emit_outputs(res: ExperimentResult, cfg: ExperimentConfig, skip_raw: bool = False) -> Path:
    """Write raw/normalized/histogram CSVs, summary.json and the two SVG plots."""
    out = _prepare_out(cfg.out)
    if not skip_raw:
        with open(out / "raw.csv", "w", newline="") as f:
            f.write("sample_index,raw_value,unit\n")
            unit = res.raw.unit.value
            for i, v in enumerate(res.extra.get("raw_values", res.raw.values.tolist())):
                f.write(f"{i},{_fmt(v)},{unit}\n")
    with open(out / "normalized.csv", "w", newline="") as f:
        f.write("sample_index,value\n")
        for i, v in enumerate(res.normalized.values.tolist()):
            f.write(f"{i},{v!r}\n")
    with open(out / "histogram.csv", "w", newline="") as f:
        f.write("bin_left,bin_right,density\n")
        for lo, hi, d in res.histogram.rows():
            f.write(f"{lo!r},{hi!r},{d!r}\n")
    if res.details and res.details_header:
        with open(out / "details.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(res.details_header)
            for row in res.details:
                w.writerow([_fmt(v) for v in row])
    with open(out / "summary.json", "w") as f:
        json.dump(res.summary, f, indent=2, sort_keys=True)
        f.write("\n")
    law = None if cfg.reference == "none" else stats.ReferenceLaw(cfg.reference)
    title = f"{cfg.kind} ({cfg.normalization})"
    (out / "histogram.svg").write_text(plots.histogram_svg(res.histogram, law, title))
    (out / "cdf.svg").write_text(plots.cdf_svg(res.normalized, law, title))
    return out


# ---------------------------------------------------------------- analyze


def read_raw_csv(path) -> tuple[list, stats.Unit]:
    """Parse ``sample_index,raw_value,unit`` rows; errors carry line numbers."""
    path = Path(path)
    values: list = []
    unit = None
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        if [h.strip() for h in header] != ["sample_index", "raw_value", "unit"]:
            raise ValueError(f"{path}:1: expected header sample_index,raw_value,unit")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            try:
                text = row[1].strip()
                v = int(text) if text.lstrip("-").isdigit() else float(text)
                row_unit = stats.Unit(row[2].strip())
            except ValueError:
                raise ValueError(f"{path}:{line}: malformed row {row!r}") from None
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{path}:{line}: raw value must be finite and >= 0")
            if unit is not None and row_unit != unit:
                raise ValueError(f"{path}:{line}: unit {row_unit.value} differs from {unit.value}")
            unit = row_unit
            values.append(v)
    if not values:
        raise ValueError(f"{path}: no data rows")
    return values, unit


def analyze(raw_csv_path, cfg: Optional[ExperimentConfig] = None) -> ExperimentResult:
    """Re-run normalization and KS on externally produced raw timings."""
    cfg = cfg or ExperimentConfig(kind="analyze", raw=str(raw_csv_path))
    t0 = time.perf_counter()
    values, unit = read_raw_csv(raw_csv_path)
    raw = stats.SampleSet(values, unit, {"source": str(raw_csv_path)})
    res = _finish(raw, cfg, 0.0)
    res.extra["raw_values"] = values
    if cfg.compare:
        other_values, other_unit = read_raw_csv(cfg.compare)
        other = stats.SampleSet(other_values, other_unit)
        other_norm = stats.NORMALIZATIONS[cfg.normalization](other)
        res.summary["compare_samples"] = len(other)
        res.summary["ks_two_sample"] = stats.ks_two_sample(res.normalized, other_norm)
        res.extra["compare"] = other_norm
    res.summary["runtime_seconds"] = time.perf_counter() - t0
    if cfg.out:
        emit_outputs(res, cfg)
    return res


def load_config_file(path) -> dict:
    """Flat JSON config; a summary.json is accepted through its config echo."""
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def recompute_summary(raw_values, cfg: ExperimentConfig) -> dict:
    """Summary fields derived from raw values alone (runtime excluded)."""
    raw = stats.SampleSet(np.asarray(raw_values, dtype=np.float64), cfg.unit)
    summary = _finish(raw, cfg, 0.0).summary
    summary.pop("runtime_seconds")
    return summary


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
