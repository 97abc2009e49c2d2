"""Declarative experiment runner behind the ``plancherel`` command."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import bessel, kerov
from .fluctuations import (
    column_index, count_interval, delta_rotated, delta_vertical_many, kerov_functional,
)
from .limit_shape import rotate_profile, shape_comparison, sup_distance, theta_of_u, theta_of_x
from .partitions import (
    EXACT_MAX_WEIGHT, conjugate, dimension, enumerate_partitions, format_partition,
)
from .samplers import SAMPLER_KINDS, SampleBatch, SeededStream, sample_batch, sample_longest_increasing
from .stats import (
    empirical_cov, lattice_normal_test, mean_stderr, strictly_increasing, summarize,
    two_sample_discrete, two_sample_ks, variance_stderr,
)

EXPERIMENTS = ("exact", "sample", "shape", "clt", "cov", "kerov", "edge", "kernel", "series", "tightness")

EXIT_OK, EXIT_INVALID, EXIT_CHECK_FAILED, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    n: list[int] = field(default_factory=list)
    t: float | None = None
    x: list[float] = field(default_factory=list)
    u: list[float] = field(default_factory=list)
    s: list[float] = field(default_factory=list)
    x0: float = 1.0
    z: float = 0.0
    k_max: int = 3
    m: int | None = None
    sep_scale: float = 0.5
    du: float = 0.5
    eps: float = 0.5
    sampler: str = "rsk"
    replicas: int = 100
    master_seed: int = 0
    thread_count: int | None = None
    out: str | None = None
    reproducible: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.thread_count is not None and self.thread_count < 1:
            raise ConfigError("threads must be >= 1")
        if self.sampler not in SAMPLER_KINDS[:2]:
            raise ConfigError(f"sampler must be one of {SAMPLER_KINDS[:2]}")
        if any(v <= 0 or v >= 2 for v in self.x):
            raise ConfigError("x values must lie in (0, 2)")
        if any(v <= -2 or v >= 2 for v in self.u):
            raise ConfigError("u values must lie in (-2, 2)")
        if any(v < 0 or v > 1 for v in self.s):
            raise ConfigError("s values must lie in [0, 1]")
        if any(v < 0 for v in self.n):
            raise ConfigError("n must be nonnegative")
        if self.k_max < 1:
            raise ConfigError("k-max must be >= 1")
        needs_n = {"exact", "sample", "shape", "clt", "cov", "kerov", "edge", "tightness"}
        if self.experiment in needs_n and not self.n:
            raise ConfigError(f"{self.experiment} needs --n")
        if self.experiment == "exact" and max(self.n) > EXACT_MAX_WEIGHT:
            raise ConfigError(f"exact arithmetic is limited to n <= {EXACT_MAX_WEIGHT}")
        if self.experiment in {"clt", "cov", "kerov", "tightness"} and min(self.n) < 3:
            raise ConfigError("normalisation by sqrt(log n) needs n >= 3")
        if self.experiment == "kernel":
            if self.t is None or self.t < 2:
                raise ConfigError("kernel needs --t >= 2")
            if len(self.x) != 1:
                raise ConfigError("kernel needs exactly one --x")
        if self.experiment == "cov":
            if not 0 < self.x0 < 2 or not self.s:
                raise ConfigError("cov needs --x0 in (0, 2) and --s")
            if self.x0 + self.sep_scale >= 2:
                raise ConfigError("x0 + sep-scale must stay below 2")
        if self.experiment == "edge" and self.z < 0:
            raise ConfigError("edge needs z >= 0")
        if self.experiment == "tightness" and (not self.u or any(abs(v + self.du) >= 2 for v in self.u)):
            raise ConfigError("tightness needs --u with u + du inside (-2, 2)")
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class ExperimentResult:
    exit_code: int
    summary: dict
    files: list[str] = field(default_factory=list)


def derive_seed(master_seed: int, *labels: int) -> int:
    """A 64-bit seed for one sub-experiment, so different n never share streams."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(v) for v in labels))
    return int(seq.generate_state(1, np.uint64)[0])


class _Writer:
    """Collects output files; removes them all if the experiment fails."""

    def __init__(self, out: str | None, reproducible: bool):
        self.dir = Path(out) if out else None
        self.reproducible = reproducible
        self.files: list[str] = []
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def _stamp(self) -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")

    def _write(self, name: str, text: str) -> None:
        if self.dir is None:
            return
        path = self.dir / name
        self.files.append(str(path))
        path.write_text(text, encoding="utf-8")

    def csv(self, name: str, header: list[str], rows) -> None:
        buf = io.StringIO()
        if not self.reproducible:
            buf.write(f"# generated {self._stamp()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self._write(name, buf.getvalue())

    def json(self, name: str, payload: dict) -> None:
        body = dict(payload)
        if not self.reproducible:
            body["generated"] = self._stamp()
        self._write(name, json.dumps(body, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def dat(self, name: str, columns: list[str], table) -> None:
        lines = ["# " + " ".join(columns)]
        lines += [" ".join(f"{v:.10g}" for v in row) for row in table]
        self._write(name, "\n".join(lines) + "\n")

    def cleanup(self) -> None:
        for f in self.files:
            try:
                os.remove(f)
            except OSError:
                pass
        self.files.clear()


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _batch(cfg: ExperimentConfig, n: int, kind: str | None = None) -> SampleBatch:
    kind = kind or cfg.sampler
    return sample_batch(kind, n, cfg.replicas, derive_seed(cfg.master_seed, n), threads=cfg.thread_count)


def _y_factor(n: int, x: float) -> float:
    return 2.0 * theta_of_x(x) / math.sqrt(math.log(n))


def _run_exact(cfg, w):
    summary, checks = {}, {}
    for n in cfg.n:
        rows, total = [], 0
        for lam in enumerate_partitions(n):
            d = dimension(lam)
            total += d * d
            rows.append([format_partition(lam), d, f"{d * d}/{math.factorial(n)}"])
        ok = total == math.factorial(n)
        w.csv(f"exact_pmf_n{n}.csv", ["lambda", "dimension", "probability"], rows)
        print(f"n={n}: sum d^2 = {total} {'=' if ok else '!='} {n}! = {math.factorial(n)}")
        summary[str(n)] = {"sum_d2": total, "factorial": math.factorial(n), "partitions": len(rows)}
        checks[f"burnside_n{n}"] = ok
    return summary, checks


def _run_sample(cfg, w):
    summary = {}
    for n in cfg.n:
        batch = _batch(cfg, n)
        comment = None if cfg.reproducible else f"generated {w._stamp()}"
        if w.dir is not None:
            path = w.dir / f"sample_n{n}.csv"
            w.files.append(str(path))
            batch.write_csv(path, header_comment=comment)
        lam1 = np.array([lam.part(1) for lam in batch.draws], dtype=float)
        summary[str(n)] = {"sampler": cfg.sampler, "replicas": len(batch),
                           "mean_lambda1": float(lam1.mean()), "mean_lambda1_over_2sqrt_n": float(lam1.mean() / (2 * math.sqrt(n))) if n else 0.0}
    w.json("sample_summary.json", summary)
    return summary, {}


def _run_shape(cfg, w):
    summary, medians = {}, []
    for n in cfg.n:
        batch = _batch(cfg, n)
        d = [sup_distance(lam, n) for lam in batch.draws]
        w.csv(f"shape_n{n}.csv", ["replica_index", "n", "sup_distance"],
              [[i, n, f"{v:.12g}"] for i, v in zip(batch.replica_indices, d)])
        w.dat(f"shape_n{n}.dat", ["x", "lambda_bar", "omega", "diff"], shape_comparison(batch.draws[0], n))
        medians.append(float(np.median(d)))
        summary[str(n)] = {"median_sup_distance": medians[-1], "max_sup_distance": float(np.max(d))}
    w.json("shape_summary.json", summary)
    return summary, {"median_decreasing": all(b < a for a, b in zip(medians, medians[1:]))}


def _histogram_dat(w, name, values):
    vals, counts = np.unique(np.asarray(values), return_counts=True)
    w.dat(name, ["value", "count"], np.column_stack([vals, counts]))


def _run_clt(cfg, w):
    summary = {}
    xs = cfg.x or ([] if cfg.u else [1.0])
    for n in cfg.n:
        batch = _batch(cfg, n)
        for x in xs:
            delta = delta_vertical_many(batch.draws, n, x)
            y = delta * _y_factor(n, x)
            heights = np.array([lam.part(column_index(n, x)) for lam in batch.draws])
            w.csv(f"clt_n{n}_x{x:g}.csv", ["replica_index", "n", "x", "delta", "y"],
                  [[i, n, x, f"{d:.12g}", f"{v:.12g}"] for i, d, v in zip(batch.replica_indices, delta, y)])
            summary[f"n{n}_x{x:g}"] = _clt_summary(y, heights)
            _histogram_dat(w, f"clt_n{n}_x{x:g}.dat", heights)
        for u in cfg.u:
            y = np.array([math.pi * delta_rotated(rotate_profile(lam, math.sqrt(n)), n, u)
                          for lam in batch.draws]) / math.sqrt(math.log(n))
            w.csv(f"clt_rotated_n{n}_u{u:g}.csv", ["replica_index", "n", "u", "delta", "y"],
                  [[i, n, u, f"{v * math.sqrt(math.log(n)) / math.pi:.12g}", f"{v:.12g}"]
                   for i, v in zip(batch.replica_indices, y)])
            summary[f"n{n}_u{u:g}"] = _clt_summary(y, None)
    w.json("clt_summary.json", summary)
    return summary, {}


def _clt_summary(y, lattice):
    s = summarize(y)
    out = {"mean": s.mean, "variance": s.variance, "skewness": s.skewness,
           "excess_kurtosis": s.excess_kurtosis, "count": s.count}
    if lattice is not None and len(set(np.asarray(lattice).tolist())) > 3:
        try:
            fit = lattice_normal_test(lattice)
        except ValueError:
            # too few draws to leave enough cells after pooling
            out["lattice_chi2_p"] = None
        else:
            out["lattice_chi2_p"] = fit.chi2.p_value
            out["cell_counts"] = {str(k): int(c) for k, c in
                                  zip(range(fit.support[0], fit.support[1] + 1), fit.cell_counts)}
    return out


def separation_points(n: int, x0: float, s_values, scale: float) -> list[float]:
    """x0 + scale * n^(-s/2) for each s."""
    return [x0 + scale * n ** (-s / 2.0) for s in s_values]


def _run_cov(cfg, w):
    summary, checks = {}, {}
    for n in cfg.n:
        batch = _batch(cfg, n)
        y0 = delta_vertical_many(batch.draws, n, cfg.x0) * _y_factor(n, cfg.x0)
        rows, est = [], []
        for s, xi in zip(cfg.s, separation_points(n, cfg.x0, cfg.s, cfg.sep_scale)):
            yi = delta_vertical_many(batch.draws, n, xi) * _y_factor(n, xi)
            c = empirical_cov(y0, yi)
            est.append(c.estimate)
            rows.append([n, cfg.x0, s, f"{xi:.12g}", f"{c.estimate:.12g}", f"{c.stderr:.12g}"])
        w.csv(f"cov_n{n}.csv", ["n", "x0", "s", "x", "cov", "stderr"], rows)
        summary[str(n)] = {"s": cfg.s, "cov": est}
        checks[f"monotone_n{n}"] = strictly_increasing(est)
    w.json("cov_summary.json", summary)
    return summary, checks


def _run_kerov(cfg, w):
    summary, checks = {}, {}
    for n in cfg.n:
        batch = _batch(cfg, n)
        vals = np.array([[kerov_functional(rotate_profile(lam, math.sqrt(n)), n, k)
                          for k in range(1, cfg.k_max + 1)] for lam in batch.draws])
        w.csv(f"kerov_n{n}.csv", ["replica_index", "n", "k", "value"],
              [[i, n, k + 1, f"{vals[r, k]:.12g}"] for r, i in enumerate(batch.replica_indices)
               for k in range(cfg.k_max)])
        per_k = {}
        for k in range(1, cfg.k_max + 1):
            var, se = variance_stderr(vals[:, k - 1]) if len(batch) > 3 else (float("nan"), float("nan"))
            per_k[str(k)] = {"mean": float(vals[:, k - 1].mean()), "variance": var, "variance_se": se,
                             "limit_variance": 0.0 if k == 1 else 4.0 / k}
        summary[str(n)] = per_k
        checks[f"area_n{n}"] = bool(np.max(np.abs(vals[:, 0])) <= 1e-8)
    w.json("kerov_summary.json", summary)
    return summary, checks


def edge_identity(lam, n: int, z: float) -> tuple[bool, bool]:
    """(Delta_n(2) <= z, lambda'_{floor(z)+1} < 2 sqrt(n)), both in integer arithmetic."""
    lhs = lam.part(column_index(n, 2.0)) <= z
    col = conjugate(lam).part(math.floor(z) + 1)
    return lhs, col * col < 4 * n


def _run_edge(cfg, w):
    summary, checks = {}, {}
    for n in cfg.n:
        batch = _batch(cfg, n)
        pairs = [edge_identity(lam, n, cfg.z) for lam in batch.draws]
        agree = sum(a == b for a, b in pairs)
        half = len(batch) // 2
        lam1 = [lam.part(1) for lam in batch.draws[:half]]
        col1 = [len(lam) for lam in batch.draws[half:]]
        res = {"draws": len(batch), "identity_agreement": agree / len(batch),
               "event_frequency": sum(a for a, _ in pairs) / len(batch)}
        if half >= 10:
            try:
                res["lambda1_vs_conjugate_p"] = two_sample_discrete(lam1, col1).p_value
            except ValueError:
                pass
        w.csv(f"edge_n{n}.csv", ["replica_index", "n", "lambda1", "lambda1_conjugate", "delta_at_2_le_z", "column_event"],
              [[i, n, lam.part(1), len(lam), int(a), int(b)]
               for i, lam, (a, b) in zip(batch.replica_indices, batch.draws, pairs)])
        summary[str(n)] = res
        checks[f"identity_n{n}"] = agree == len(batch)
    if len(cfg.n) >= 2:
        scaled = [edge_scaled_samples(n, cfg.replicas, derive_seed(cfg.master_seed, n, 1)) for n in cfg.n[:2]]
        ks, p = two_sample_ks(*scaled)
        summary["cross_n"] = {"n": cfg.n[:2], "ks": ks, "p": p}
    w.json("edge_summary.json", summary)
    return summary, checks


def edge_scaled_samples(n: int, replicas: int, seed: int) -> np.ndarray:
    """(lambda_1 - 2 sqrt n) / n^(1/6) from the longest increasing subsequence."""
    lam1 = np.array([sample_longest_increasing(n, SeededStream(seed, i)) for i in range(replicas)], dtype=float)
    return (lam1 - 2.0 * math.sqrt(n)) / n ** (1.0 / 6.0)


def _run_kernel(cfg, w):
    t, x = cfg.t, cfg.x[0]
    pred = bessel.predict_counts(t, x, cfg.z)
    batch = sample_batch("poissonized", t, cfg.replicas, derive_seed(cfg.master_seed, int(t)),
                         threads=cfg.thread_count)
    counts = np.array([count_interval(lam, t, x, cfg.z) for lam in batch.draws], dtype=float)
    w.csv("kernel_counts.csv", ["replica_index", "N", "count"],
          [[i, size, int(c)] for i, size, c in zip(batch.replica_indices, batch.sizes, counts)])
    m, m_se = mean_stderr(counts)
    v, v_se = variance_stderr(counts)
    summary = {"prediction": pred.to_json(), "mc_mean": m, "mc_mean_se": m_se,
               "mc_variance": v, "mc_variance_se": v_se}
    w.json("kernel_prediction.json", summary)
    checks = {"mean_within_3se": abs(m - pred.mean) <= 3 * m_se,
              "variance_within_3se": abs(v - pred.variance) <= 3 * v_se}
    return summary, checks


def _run_series(cfg, w):
    n = cfg.n[0] if cfg.n else 10**6
    m = cfg.m or kerov.degrees_of_freedom(n)
    thetas = [theta_of_u(u) for u in (cfg.u or [0.0, 1.0])]
    rng = np.random.default_rng(np.random.SeedSequence(cfg.master_seed))
    vals = kerov.sample_partial_sums(max(m, 2), thetas, cfg.replicas, rng)
    w.csv("series.csv", ["replica_index", "theta", "s_m_value"],
          [[r, f"{th:.12g}", f"{vals[r, j]:.12g}"] for r in range(cfg.replicas) for j, th in enumerate(thetas)])
    checks, cov_rows = {}, []
    if cfg.replicas >= 10:
        for a in range(len(thetas)):
            for b in range(a, len(thetas)):
                c = empirical_cov(vals[:, a], vals[:, b])
                target = kerov.cov_partial_sum(thetas[a], thetas[b], m)
                cov_rows.append({"theta": thetas[a], "theta_prime": thetas[b], "cov": c.estimate,
                                 "stderr": c.stderr, "target": target})
                checks[f"series_cov_{a}_{b}"] = abs(c.estimate - target) <= 3 * c.stderr
    summary = {"m": m, "covariances": cov_rows}
    if cfg.s:
        spec = kerov.GaussianVectorSpec(tuple(sorted(cfg.s)))
        z = kerov.sample_limit_vector(spec, rng, size=cfg.replicas)
        zs = []
        if cfg.replicas >= 10:
            for a in range(len(spec.s_values)):
                for b in range(a, len(spec.s_values)):
                    c = empirical_cov(z[:, a], z[:, b])
                    target = spec.covariance[a, b]
                    zs.append({"s": spec.s_values[a], "s_prime": spec.s_values[b], "cov": c.estimate,
                               "stderr": c.stderr, "target": target})
                    checks[f"limit_cov_{a}_{b}"] = abs(c.estimate - target) <= 3 * c.stderr
        summary["limit_vector"] = zs
    w.json("series_summary.json", summary)
    return summary, checks


def tightness_probability(draws, n: int, u: float, du: float, eps: float) -> float:
    factor = math.pi / math.sqrt(math.log(n))
    hits = 0
    for lam in draws:
        prof = rotate_profile(lam, math.sqrt(n))
        d = delta_rotated(prof, n, np.array([u, u + du]))
        hits += abs(d[0] - d[1]) * factor >= eps
    return hits / len(draws)


def _run_tightness(cfg, w):
    summary, checks, rows = {}, {}, []
    for n in cfg.n:
        batch = _batch(cfg, n)
        for u in cfg.u:
            p = tightness_probability(batch.draws, n, u, cfg.du, cfg.eps)
            rows.append([n, u, u + cfg.du, cfg.eps, f"{p:.12g}"])
            summary[f"n{n}_u{u:g}"] = p
            checks[f"n{n}_u{u:g}"] = p >= 0.2
    w.csv("tightness.csv", ["n", "u", "u_prime", "eps", "probability"], rows)
    w.json("tightness_summary.json", summary)
    return summary, checks


_RUNNERS: dict[str, Callable] = {
    "exact": _run_exact, "sample": _run_sample, "shape": _run_shape, "clt": _run_clt,
    "cov": _run_cov, "kerov": _run_kerov, "edge": _run_edge, "kernel": _run_kernel,
    "series": _run_series, "tightness": _run_tightness,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment; exit code 0 ok, 1 invalid config, 2 failed check, 3 I/O error."""
    try:
        cfg.validate()
    except ConfigError as exc:
        return ExperimentResult(EXIT_INVALID, {"error": str(exc)})
    try:
        writer = _Writer(cfg.out, cfg.reproducible)
    except OSError as exc:
        return ExperimentResult(EXIT_IO, {"error": str(exc)})
    try:
        summary, checks = _RUNNERS[cfg.experiment](cfg, writer)
        if checks:
            writer.json(f"{cfg.experiment}_checks.json", {k: bool(v) for k, v in checks.items()})
    except OSError as exc:
        writer.cleanup()
        return ExperimentResult(EXIT_IO, {"error": str(exc)})
    except (ValueError, MemoryError) as exc:
        writer.cleanup()
        return ExperimentResult(EXIT_INVALID, {"error": str(exc)})
    except BaseException:
        writer.cleanup()
        raise
    summary = {"experiment": cfg.experiment, "results": summary, "checks": {k: bool(v) for k, v in checks.items()}}
    code = EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED
    return ExperimentResult(code, summary, list(writer.files))
