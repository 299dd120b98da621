"""Monte Carlo experiment harness.

One :class:`ExperimentSpec` describes a single model configuration (one
set of spikes and matching curve names) and the grid of methods and
target dimensions to evaluate on it. Replicate ``r`` always uses seed
``base_seed + r``, so replicates can run in parallel and a rerun of the
same spec reproduces the report byte for byte.

Replicate pipeline: generate data from the orthonormalized test curves,
optionally move every observation to the wavelet domain, rescale by the
estimated noise standard deviation, build the sample covariance, run the
screening initialization, record the data-driven spike count and target
dimension, then fit and score every (method, m) cell against the true
basis in the domain where fitting happens.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .diagnostics import oracle_quantities
from .errors import ExperimentFailedError, InvalidInputError, ItspcaError
from .iterate import FitConfig, Stopping, itspca
from .linalg import thin_qr
from .metrics import LossRecord, subspace_loss
from .model import DataSet, SampleCov, SpikedModel, estimate_noise_var, generate, sample_cov
from .rank import DEFAULT_KAPPA_BAR, estimate_nspike, select_m
from .screening import dtspca
from .thresholding import SOFT, ThresholdKind
from .wavelet import SIGNAL_NAMES, WaveletSpec, default_levels, dwt, test_signal

__all__ = [
    "MethodSpec",
    "ExperimentSpec",
    "CellStats",
    "ExperimentReport",
    "true_basis",
    "run_experiment",
    "run_suite",
    "emit_report",
    "write_suite",
    "table1_specs",
    "table2_specs",
    "DEFAULT_BASE_SEED",
]

DEFAULT_BASE_SEED = 20130901
MAX_FAILURE_FRACTION = 0.2

MLabel = Union[int, str]  # target dimension or "auto"


@dataclass(frozen=True)
class MethodSpec:
    """One estimator column: plain screening ("dtspca") or the full
    iterative fit ("itspca") with its shrinkage rule and stopping mode."""

    name: str
    threshold: ThresholdKind = SOFT
    stop: str = "empirical"

    def __post_init__(self):
        if self.name not in ("itspca", "dtspca"):
            raise InvalidInputError(f"unknown method {self.name!r}")
        if self.stop not in ("empirical", "theoretical"):
            raise InvalidInputError(f"unknown stopping mode {self.stop!r}")

    @classmethod
    def from_json(cls, entry) -> "MethodSpec":
        if isinstance(entry, str):
            return cls(name=entry)
        if isinstance(entry, dict):
            unknown = set(entry) - {"name", "threshold", "stop"}
            if unknown:
                raise InvalidInputError(f"unknown method keys {sorted(unknown)}")
            kwargs = {"name": entry.get("name")}
            if "threshold" in entry:
                kwargs["threshold"] = ThresholdKind.parse(entry["threshold"])
            if "stop" in entry:
                kwargs["stop"] = entry["stop"]
            return cls(**kwargs)
        raise InvalidInputError(f"bad method entry {entry!r}")

    def to_json(self):
        if self.name == "dtspca":
            return "dtspca"
        return {"name": self.name, "threshold": str(self.threshold), "stop": self.stop}


_SPEC_FIELDS = (
    "p",
    "n",
    "spikes",
    "eigvec_sources",
    "replicates",
    "methods",
    "wavelet",
    "alpha",
    "gamma",
    "kappa_bar",
    "base_seed",
    "m_values",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one Monte Carlo experiment."""

    p: int
    n: int
    spikes: tuple
    eigvec_sources: tuple
    replicates: int
    methods: tuple = (MethodSpec("itspca"), MethodSpec("dtspca"))
    wavelet: bool = True
    alpha: float = 3.0
    gamma: float = 1.5
    kappa_bar: float = DEFAULT_KAPPA_BAR
    base_seed: int = DEFAULT_BASE_SEED
    m_values: tuple = ("auto",)

    def __post_init__(self):
        object.__setattr__(self, "spikes", tuple(float(s) for s in self.spikes))
        object.__setattr__(self, "eigvec_sources", tuple(self.eigvec_sources))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "m_values", tuple(self.m_values))
        if self.replicates < 1:
            raise InvalidInputError("replicates must be >= 1")
        spikes = np.asarray(self.spikes)
        if spikes.size < 1 or np.any(spikes <= 0) or np.any(np.diff(spikes) > 0):
            raise InvalidInputError("spikes must be positive and nonincreasing")
        if len(self.eigvec_sources) != spikes.size:
            raise InvalidInputError("need one eigvec source per spike")
        for name in self.eigvec_sources:
            if name not in SIGNAL_NAMES:
                raise InvalidInputError(f"unknown eigvec source {name!r}")
        if not self.methods:
            raise InvalidInputError("need at least one method")
        for m in self.m_values:
            if m == "auto":
                continue
            if not isinstance(m, int) or m < 1:
                raise InvalidInputError(f"m_values entries must be positive ints or 'auto', got {m!r}")

    @property
    def config_label(self) -> str:
        return "+".join(self.eigvec_sources)

    @property
    def spikes_label(self) -> str:
        return ",".join(f"{s:g}" for s in self.spikes)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "spikes": list(self.spikes),
            "eigvec_sources": list(self.eigvec_sources),
            "replicates": self.replicates,
            "methods": [m.to_json() for m in self.methods],
            "wavelet": self.wavelet,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "kappa_bar": self.kappa_bar,
            "base_seed": self.base_seed,
            "m_values": list(self.m_values),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - set(_SPEC_FIELDS)
        if unknown:
            raise InvalidInputError(f"unknown experiment keys {sorted(unknown)}")
        missing = {"p", "n", "spikes", "eigvec_sources", "replicates"} - set(d)
        if missing:
            raise InvalidInputError(f"missing experiment keys {sorted(missing)}")
        kwargs = dict(d)
        if "methods" in kwargs:
            kwargs["methods"] = tuple(MethodSpec.from_json(e) for e in kwargs["methods"])
        kwargs["spikes"] = tuple(kwargs["spikes"])
        kwargs["eigvec_sources"] = tuple(kwargs["eigvec_sources"])
        if "m_values" in kwargs:
            kwargs["m_values"] = tuple(kwargs["m_values"])
        return cls(**kwargs)


def true_basis(spec: ExperimentSpec) -> np.ndarray:
    """Orthonormalized test curves, in source order, in the original domain.

    Gram-Schmidt is realized as thin QR with positive diagonal, so each
    column keeps the orientation of its source curve.
    """
    cols = np.column_stack(
        [test_signal(name, spec.p).values for name in spec.eigvec_sources]
    )
    q, _ = thin_qr(cols)
    return q


@lru_cache(maxsize=8)
def _prepared_truth(spec: ExperimentSpec):
    # (truth for generation, truth in the estimation domain, wavelet spec or None)
    basis = true_basis(spec)
    if spec.wavelet:
        wspec = WaveletSpec(default_levels(spec.p))
        return basis, dwt(basis.T, wspec).T, wspec
    return basis, basis, None


@dataclass
class _ReplicateOutcome:
    seed: int
    fatal: Optional[str] = None
    nspike_hat: Optional[int] = None
    m_selected: Optional[int] = None
    records: dict = field(default_factory=dict)  # (method name, m label) -> LossRecord
    failures: dict = field(default_factory=dict)  # (method name, m label) -> message


def _stopping_for(method: MethodSpec) -> Stopping:
    if method.stop == "theoretical":
        return Stopping.theoretical()
    return Stopping.empirical()


def _run_replicate(spec: ExperimentSpec, r: int) -> _ReplicateOutcome:
    seed = spec.base_seed + r
    out = _ReplicateOutcome(seed=seed)
    gen_basis, est_basis, wspec = _prepared_truth(spec)
    try:
        model = SpikedModel(spec.p, np.asarray(spec.spikes), gen_basis, 1.0)
        data = generate(model, spec.n, seed)
        rows = data.rows
        if wspec is not None:
            rows = dwt(rows, wspec)
        scaled = DataSet(rows=rows, rng_seed=seed)
        sigma2_hat = estimate_noise_var(scaled)
        scaled = DataSet(rows=rows / np.sqrt(sigma2_hat), rng_seed=seed)
        cov = sample_cov(scaled)
        init = dtspca(cov, spec.p, spec.alpha, 1.0)
        out.nspike_hat = estimate_nspike(init, spec.n, spec.p)
        out.m_selected = select_m(init, out.nspike_hat, spec.kappa_bar)
    except ItspcaError as exc:
        out.fatal = f"{type(exc).__name__}: {exc}"
        return out

    for method in spec.methods:
        for m_label in spec.m_values:
            key = (method.name, m_label)
            m = out.m_selected if m_label == "auto" else m_label
            if m == 0:
                out.failures[key] = "no signal selected (m = 0)"
                continue
            try:
                truth_m = est_basis[:, :m]
                if method.name == "dtspca":
                    est = init.q0[:, : min(m, init.card)]
                    loss = subspace_loss(truth_m, est)
                    record = LossRecord(loss, init.card, 0, seed)
                else:
                    cfg = FitConfig(
                        m=m,
                        kind=method.threshold,
                        gamma=spec.gamma,
                        stopping=_stopping_for(method),
                    )
                    fit = itspca(cov, init, cfg)
                    loss = subspace_loss(truth_m, fit.basis)
                    record = LossRecord(loss, int(fit.support.size), fit.iterations, seed)
                out.records[key] = record
            except ItspcaError as exc:
                out.failures[key] = f"{type(exc).__name__}: {exc}"
    return out


@dataclass
class CellStats:
    """Aggregated results of one (method, target dimension) cell."""

    method: str
    m: MLabel
    mean_loss: float
    se_loss: float
    mean_size: float
    mean_iters: float
    n_fail: int
    records: list
    failures: list

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "m": self.m,
            "mean_loss": self.mean_loss,
            "se_loss": self.se_loss,
            "mean_size": self.mean_size,
            "mean_iters": self.mean_iters,
            "n_fail": self.n_fail,
            "records": [
                {
                    "loss": rec.loss,
                    "support_size": rec.support_size,
                    "iterations": rec.iterations,
                    "seed": rec.seed,
                }
                for rec in self.records
            ],
            "failures": list(self.failures),
        }


@dataclass
class ExperimentReport:
    """Aggregated losses plus everything needed to recompute them."""

    spec: ExperimentSpec
    cells: list
    nspike_counts: dict
    m_counts: dict
    n_fatal: int
    diagnostics: Optional[dict] = None

    def cell(self, method: str, m: MLabel) -> CellStats:
        for cell in self.cells:
            if cell.method == method and cell.m == m:
                return cell
        raise KeyError(f"no cell ({method!r}, {m!r}) in report")

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "cells": [c.to_json_dict() for c in self.cells],
            "nspike_counts": {str(k): v for k, v in sorted(self.nspike_counts.items())},
            "m_counts": {str(k): v for k, v in sorted(self.m_counts.items())},
            "n_fatal": self.n_fatal,
            "diagnostics": self.diagnostics,
        }


CSV_HEADER = (
    "config",
    "spikes",
    "method",
    "m",
    "mean_loss",
    "se_loss",
    "mean_size",
    "mean_iters",
    "n_fail",
)


def _csv_rows(report: ExperimentReport) -> list:
    rows = []
    for cell in report.cells:
        rows.append(
            (
                report.spec.config_label,
                report.spec.spikes_label,
                cell.method,
                str(cell.m),
                f"{cell.mean_loss:.10g}",
                f"{cell.se_loss:.10g}",
                f"{cell.mean_size:.10g}",
                f"{cell.mean_iters:.10g}",
                str(cell.n_fail),
            )
        )
    return rows


def _diagnostics_block(spec: ExperimentSpec) -> dict:
    _, est_basis, _ = _prepared_truth(spec)
    model = SpikedModel(spec.p, np.asarray(spec.spikes), est_basis, 1.0)
    oq = oracle_quantities(model, spec.n, spec.gamma, m=model.n_spikes)
    return {
        "beta": oq.beta,
        "tau": [float(t) for t in oq.tau],
        "eps": [float(e) for e in oq.eps],
        "m_n": oq.m_n,
        "card_h": int(oq.h_set.size),
    }


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    """Run all replicates of one experiment and aggregate.

    Replicates may execute on a process pool (``threads > 1``); results
    are always aggregated in seed order, so the report is identical
    regardless of scheduling. A cell with more than 20% failed
    replicates aborts the whole experiment.
    """
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_run_replicate, [spec] * spec.replicates, range(spec.replicates)))
    else:
        outcomes = [_run_replicate(spec, r) for r in range(spec.replicates)]
    outcomes.sort(key=lambda o: o.seed)

    cells = []
    for method in spec.methods:
        for m_label in spec.m_values:
            key = (method.name, m_label)
            records = [o.records[key] for o in outcomes if key in o.records]
            failures = [
                f"seed={o.seed}: {o.fatal if o.fatal else o.failures.get(key)}"
                for o in outcomes
                if key not in o.records
            ]
            n_fail = spec.replicates - len(records)
            if n_fail > MAX_FAILURE_FRACTION * spec.replicates:
                raise ExperimentFailedError(
                    f"cell ({method.name}, m={m_label}) failed {n_fail}/{spec.replicates} "
                    f"replicates; first failure: {failures[0] if failures else 'n/a'}"
                )
            losses = np.array([rec.loss for rec in records])
            sizes = np.array([rec.support_size for rec in records])
            iters = np.array([rec.iterations for rec in records])
            se = float(np.std(losses, ddof=1) / np.sqrt(losses.size)) if losses.size > 1 else 0.0
            cells.append(
                CellStats(
                    method=method.name,
                    m=m_label,
                    mean_loss=float(losses.mean()) if losses.size else float("nan"),
                    se_loss=se,
                    mean_size=float(sizes.mean()) if sizes.size else float("nan"),
                    mean_iters=float(iters.mean()) if iters.size else float("nan"),
                    n_fail=n_fail,
                    records=records,
                    failures=failures,
                )
            )

    nspike_counts: dict = {}
    m_counts: dict = {}
    n_fatal = 0
    for o in outcomes:
        if o.fatal is not None:
            n_fatal += 1
            continue
        nspike_counts[o.nspike_hat] = nspike_counts.get(o.nspike_hat, 0) + 1
        m_counts[o.m_selected] = m_counts.get(o.m_selected, 0) + 1

    return ExperimentReport(
        spec=spec,
        cells=cells,
        nspike_counts=nspike_counts,
        m_counts=m_counts,
        n_fatal=n_fatal,
        diagnostics=_diagnostics_block(spec),
    )


def run_suite(specs, threads: int = 1) -> list:
    """Run several experiments in order."""
    return [run_experiment(spec, threads=threads) for spec in specs]


def _render_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerows(_csv_rows(report))
    return buf.getvalue()


def _render_json(reports) -> str:
    payload = [r.to_json_dict() for r in reports]
    if len(payload) == 1:
        return json.dumps(payload[0], indent=2) + "\n"
    return json.dumps(payload, indent=2) + "\n"


def emit_report(report: ExperimentReport, fmt: str, path) -> None:
    """Write one report as ``csv`` (aggregates only) or ``json`` (everything)."""
    if fmt not in ("csv", "json"):
        raise InvalidInputError(f"unknown report format {fmt!r}")
    text = _render_csv([report]) if fmt == "csv" else _render_json([report])
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def write_suite(reports, out_dir) -> None:
    """Write ``report.csv`` and ``report.json`` for a list of reports."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    json_path = os.path.join(out_dir, "report.json")
    try:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(_render_csv(reports))
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(_render_json(reports))
    except OSError as exc:
        raise OSError(f"cannot write reports under {out_dir}: {exc}") from exc


SINGLE_SPIKE_VALUES = (100.0, 25.0, 10.0, 5.0, 2.0)
MULTI_SPIKE_CONFIGS = (
    (100.0, 75.0, 50.0, 25.0),
    (60.0, 55.0, 50.0, 45.0),
    (30.0, 27.0, 25.0, 22.0),
    (30.0, 20.0, 10.0, 5.0),
)
_MULTI_SOURCES = ("step", "poly", "peak", "sing")


def table1_specs(replicates: int = 100, base_seed: int = DEFAULT_BASE_SEED) -> list:
    """Single-spike benchmark grid: four curves times five spike values."""
    specs = []
    for name in _MULTI_SOURCES:
        for lam2 in SINGLE_SPIKE_VALUES:
            specs.append(
                ExperimentSpec(
                    p=2048,
                    n=1024,
                    spikes=(lam2,),
                    eigvec_sources=(name,),
                    replicates=replicates,
                    m_values=(1,),
                    base_seed=base_seed,
                )
            )
    return specs


def table2_specs(replicates: int = 100, base_seed: int = DEFAULT_BASE_SEED) -> list:
    """Multi-spike benchmark grid: four spike configurations, m = 1..4."""
    specs = []
    for spikes in MULTI_SPIKE_CONFIGS:
        specs.append(
            ExperimentSpec(
                p=2048,
                n=1024,
                spikes=spikes,
                eigvec_sources=_MULTI_SOURCES,
                replicates=replicates,
                m_values=(1, 2, 3, 4),
                base_seed=base_seed,
            )
        )
    return specs
