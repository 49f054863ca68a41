"""Monte-Carlo aggregation of relay simulations and CSV/JSON emission."""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ratelessrelay.sim import SimConfig, SimTrace, run_simulation

CSV_COLUMNS = ("slot", "mean_frac_relay", "se_relay", "mean_frac_dest", "se_dest")
SUMMARY_FRACTIONS = (0.25, 0.5, 0.75, 0.9, 0.97)
COMPLETION_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
WORKERS_ENV = "RATELESSRELAY_WORKERS"


class ExperimentIOError(OSError):
    pass


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class ExperimentConfig:
    """A simulation setup plus Monte-Carlo settings.

    ``sim.seed`` is ignored; trial ``i`` runs with ``trial_seed(master_seed, i)``.
    """

    sim: SimConfig = field(default_factory=SimConfig)
    trials: int = 1000
    master_seed: int = 0
    workers: int = 1
    out_csv: str | None = None
    out_json: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


def trial_seed(master_seed: int, trial: int) -> int:
    """First 64-bit word of ``numpy.random.SeedSequence(master_seed, spawn_key=(trial,))``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class AggregateTrace:
    """Per-slot mean recovered fraction and its standard error, per hop.

    Traces shorter than the longest one are extended flat at their final
    count before averaging, so incomplete (capped) and early-finishing trials
    both contribute at every slot.
    """

    k: int
    trials: int
    mean_frac_relay: np.ndarray
    se_relay: np.ndarray
    mean_frac_dest: np.ndarray
    se_dest: np.ndarray
    completion_slots: list[int | None]
    relay_completion_slots: list[int | None]
    traces: list[SimTrace] | None = None

    @property
    def slots(self) -> int:
        return len(self.mean_frac_dest)

    @property
    def incomplete(self) -> int:
        return sum(1 for c in self.completion_slots if c is None)

    def curve(self, hop: str) -> np.ndarray:
        if hop == "relay":
            return self.mean_frac_relay
        if hop == "dest":
            return self.mean_frac_dest
        raise ValueError(f"hop must be 'relay' or 'dest', got {hop!r}")

    def se(self, hop: str) -> np.ndarray:
        return self.se_relay if hop == "relay" else self.se_dest


def _padded(series: list[list[int]], length: int) -> np.ndarray:
    out = np.empty((len(series), length), dtype=np.int64)
    for row, s in zip(out, series):
        row[: len(s)] = s
        row[len(s):] = s[-1] if s else 0
    return out


def _mean_se(counts: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = counts.shape[0]
    # integer sums keep the mean independent of trial order
    mean = counts.sum(axis=0) / (n * k)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, counts.std(axis=0, ddof=1) / np.sqrt(n) / k


def aggregate(traces: list[SimTrace], keep_traces: bool = False) -> AggregateTrace:
    if not traces:
        raise ValueError("nothing to aggregate")
    k = traces[0].k
    length = max(t.slots for t in traces)
    relay_mean, relay_se = _mean_se(_padded([t.relay_recovered for t in traces], length), k)
    dest_mean, dest_se = _mean_se(_padded([t.dest_recovered for t in traces], length), k)
    return AggregateTrace(
        k=k,
        trials=len(traces),
        mean_frac_relay=relay_mean,
        se_relay=relay_se,
        mean_frac_dest=dest_mean,
        se_dest=dest_se,
        completion_slots=[t.completion_slot for t in traces],
        relay_completion_slots=[t.relay_completion_slot for t in traces],
        traces=list(traces) if keep_traces else None,
    )


def _run_trial(args: tuple[SimConfig, int, int]) -> SimTrace:
    sim, master_seed, i = args
    return run_simulation(replace(sim, seed=trial_seed(master_seed, i)))


def run_trials(cfg: ExperimentConfig) -> list[SimTrace]:
    jobs = [(cfg.sim, cfg.master_seed, i) for i in range(cfg.trials)]
    if cfg.workers == 1:
        return [_run_trial(j) for j in jobs]
    chunk = max(1, cfg.trials // (4 * cfg.workers))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        # map preserves trial order whatever the scheduling
        return list(pool.map(_run_trial, jobs, chunksize=chunk))


def monte_carlo(cfg: ExperimentConfig, keep_traces: bool = False) -> AggregateTrace:
    return aggregate(run_trials(cfg), keep_traces=keep_traces)


def t_at_fraction(agg: AggregateTrace, hop: str, p: float) -> int | None:
    """Smallest 1-based slot whose mean recovered fraction reaches ``p``; ``None`` if never."""
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    hits = np.flatnonzero(agg.curve(hop) >= p)
    return int(hits[0]) + 1 if hits.size else None


def slot_stats(slots: list[int | None]) -> dict:
    done = np.array([s for s in slots if s is not None], dtype=float)
    if done.size == 0:
        return {"count": 0, "mean": None, "std": None, "quantiles": None}
    return {
        "count": int(done.size),
        "mean": float(done.mean()),
        "std": float(done.std(ddof=1)) if done.size > 1 else 0.0,
        "quantiles": {str(q): float(np.quantile(done, q)) for q in COMPLETION_QUANTILES},
    }


def emit_csv(agg: AggregateTrace, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for t in range(agg.slots):
                writer.writerow(
                    (
                        t + 1,
                        repr(float(agg.mean_frac_relay[t])),
                        repr(float(agg.se_relay[t])),
                        repr(float(agg.mean_frac_dest[t])),
                        repr(float(agg.se_dest[t])),
                    )
                )
    except OSError as exc:
        raise ExperimentIOError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = {name: np.array([float(r[name]) for r in rows]) for name in CSV_COLUMNS}
    out["slot"] = out["slot"].astype(int)
    return out


def summary(agg: AggregateTrace, cfg: ExperimentConfig | None = None) -> dict:
    hops = ("relay", "dest")
    return {
        "config": _config_echo(cfg) if cfg is not None else None,
        "k": agg.k,
        "trials": agg.trials,
        "slots": agg.slots,
        "t_at_fraction": {h: {str(p): t_at_fraction(agg, h, p) for p in SUMMARY_FRACTIONS} for h in hops},
        "completion": slot_stats(agg.completion_slots),
        "relay_completion": slot_stats(agg.relay_completion_slots),
        "incomplete_trials": agg.incomplete,
    }


def _config_echo(cfg: ExperimentConfig) -> dict:
    sim = asdict(cfg.sim)
    sim.pop("seed")
    return {"sim": sim, "trials": cfg.trials, "master_seed": cfg.master_seed}


def emit_json_summary(agg: AggregateTrace, path, cfg: ExperimentConfig | None = None) -> None:
    text = json.dumps(summary(agg, cfg), indent=2, sort_keys=True) + "\n"
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExperimentIOError(f"cannot write JSON summary to {path}: {exc}") from exc
