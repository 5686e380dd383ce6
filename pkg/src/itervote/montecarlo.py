"""Impartial Culture sampling and expected adversarial-loss estimation.

Profiles are drawn i.i.d. uniform over all rankings.  Each sample owns a
counter-based RNG stream keyed by (master seed, sample index), so the stream
never depends on how samples are partitioned across workers, and per-sample
losses are accumulated as exact scaled integers, so merge order cannot
perturb a digit: a run is a pure function of (m, n, samples, master_seed).

Samples are bucketed by the size of their potential-winner set (1, 2, 3, or
4-and-up); one-way samples contribute an exact zero, two-way samples resolve
by pairwise majority, and larger ties run the equilibrium engine.  Per-class
means carry normal-approximation 95% confidence intervals.
"""

from __future__ import annotations

import json
import math
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Optional

import numpy as np

from .core import (
    Profile,
    UtilityVector,
    _potential_winners_of_counts,
    _winner_of_counts,
)
from .dynamics import DEFAULT_MAX_STATES, ExplorationBudgetExceeded, equilibrium_winners

_BLOCK = 4096
_MASK64 = (1 << 64) - 1

_CLASS_KEYS = (1, 2, 3, 4)  # 4 buckets every tie of four or more alternatives
_CLASS_LABELS = {1: "1", 2: "2", 3: "3", 4: "4+"}


@dataclass(frozen=True)
class SamplerConfig:
    m: int
    n: int
    samples: int
    master_seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if self.m < 2 or self.n < 1 or self.samples < 1 or self.workers < 1:
            raise ValueError("need m >= 2, n >= 1, samples >= 1, workers >= 1")


@dataclass(frozen=True)
class TieClassStats:
    count: int
    mean_loss: Optional[float]
    ci95_halfwidth: Optional[float]


@dataclass(frozen=True)
class RunSummary:
    m: int
    n: int
    samples: int
    per_class: dict[int, TieClassStats]
    overall: TieClassStats
    budget_failures: int


def rng_for_sample(master_seed: int, sample_index: int) -> np.random.Generator:
    """The dedicated stream of one sample: Philox keyed by (seed, index)."""
    key = np.array([master_seed & _MASK64, sample_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_ic_profile(m: int, n: int, rng: np.random.Generator) -> Profile:
    """Draw n independent uniform rankings of 1..m."""
    base = np.tile(np.arange(1, m + 1, dtype=np.int8), (n, 1))
    mat = rng.permuted(base, axis=1)
    return Profile(tuple(tuple(row) for row in mat.tolist()))


def scaled_utilities(u: UtilityVector) -> tuple[tuple[int, ...], int]:
    """Represent utilities as exact integers U_i = u_i * D (D the common denominator)."""
    fractions = [Fraction(v) for v in u.values]
    denom = math.lcm(*(f.denominator for f in fractions))
    return tuple(int(f * denom) for f in fractions), denom


def _block_accumulate(
    m: int,
    n: int,
    u_scaled: Optional[tuple[int, ...]],
    master_seed: int,
    start: int,
    stop: int,
    max_states: int,
) -> dict:
    """Process samples [start, stop); exact integer accumulators per tie class."""
    counts = {a: 0 for a in _CLASS_KEYS}
    sums = {a: 0 for a in _CLASS_KEYS}
    sumsqs = {a: 0 for a in _CLASS_KEYS}
    failures = 0
    base = np.tile(np.arange(1, m + 1, dtype=np.int8), (n, 1))
    u_arr = np.array(u_scaled, dtype=np.int64) if u_scaled is not None else None
    for idx in range(start, stop):
        rng = rng_for_sample(master_seed, idx)
        mat = rng.permuted(base, axis=1)
        tops = np.bincount(mat[:, 0], minlength=m + 1)
        scores = tops[1:].tolist()
        pw = _potential_winners_of_counts(scores)
        bucket = min(len(pw), 4)
        if u_arr is None:
            counts[bucket] += 1
            continue
        loss = 0
        if bucket == 2:
            a, b = pw
            pos_a = np.argmax(mat == a, axis=1)
            pos_b = np.argmax(mat == b, axis=1)
            prefers_a = int((pos_a < pos_b).sum())
            ew = a if 2 * prefers_a >= n else b
            r = _winner_of_counts(scores)
            if ew != r:
                pos_r, pos_e = (pos_a, pos_b) if r == a else (pos_b, pos_a)
                loss = int((u_arr[pos_r] - u_arr[pos_e]).sum())
        elif bucket >= 3:
            profile = Profile(tuple(tuple(row) for row in mat.tolist()))
            try:
                winners = equilibrium_winners(profile, max_states).winners
            except ExplorationBudgetExceeded:
                failures += 1
                continue
            r = _winner_of_counts(scores)
            if winners != {r}:
                sw = {
                    a: int(u_arr[np.argmax(mat == a, axis=1)].sum())
                    for a in winners | {r}
                }
                loss = sw[r] - min(sw[a] for a in winners)
        counts[bucket] += 1
        sums[bucket] += loss
        sumsqs[bucket] += loss * loss
    return {"counts": counts, "sums": sums, "sumsqs": sumsqs, "failures": failures}


def _block_worker(args: tuple) -> dict:
    return _block_accumulate(*args)


def _run_blocks(
    config: SamplerConfig, u_scaled: Optional[tuple[int, ...]], max_states: int
) -> dict:
    blocks = [
        (
            config.m,
            config.n,
            u_scaled,
            config.master_seed,
            start,
            min(start + _BLOCK, config.samples),
            max_states,
        )
        for start in range(0, config.samples, _BLOCK)
    ]
    if config.workers == 1 or len(blocks) == 1:
        results = [_block_accumulate(*block) for block in blocks]
    else:
        with multiprocessing.Pool(processes=config.workers) as pool:
            results = pool.map(_block_worker, blocks, chunksize=1)
    merged = results[0]
    for extra in results[1:]:
        for a in _CLASS_KEYS:
            merged["counts"][a] += extra["counts"][a]
            merged["sums"][a] += extra["sums"][a]
            merged["sumsqs"][a] += extra["sumsqs"][a]
        merged["failures"] += extra["failures"]
    return merged


def _stats(count: int, total: int, total_sq: int, denom: int) -> TieClassStats:
    if count == 0:
        return TieClassStats(0, None, None)
    mean = float(Fraction(total, count * denom))
    if count < 2:
        return TieClassStats(count, mean, None)
    variance = Fraction(total_sq * count - total * total, denom * denom * count * (count - 1))
    ci = 1.96 * math.sqrt(float(variance) / count)
    return TieClassStats(count, mean, ci)


def estimate_eadpoa(
    config: SamplerConfig, u: UtilityVector, max_states: int = DEFAULT_MAX_STATES
) -> RunSummary:
    """Monte Carlo estimate of the expected adversarial loss under IC.

    Samples that exceed the exploration budget are excluded from every mean
    and reported in ``budget_failures`` rather than silently dropped.
    """
    if u.m != config.m:
        raise ValueError("utility vector length must match m")
    u_scaled, denom = scaled_utilities(u)
    merged = _run_blocks(config, u_scaled, max_states)
    counts, sums, sumsqs = merged["counts"], merged["sums"], merged["sumsqs"]
    failures = merged["failures"]
    assert sum(counts.values()) + failures == config.samples
    per_class = {
        a: _stats(counts[a], sums[a], sumsqs[a], denom) for a in _CLASS_KEYS
    }
    overall = _stats(
        sum(counts.values()), sum(sums.values()), sum(sumsqs.values()), denom
    )
    return RunSummary(
        m=config.m,
        n=config.n,
        samples=config.samples,
        per_class=per_class,
        overall=overall,
        budget_failures=failures,
    )


def tie_statistics(config: SamplerConfig) -> dict[int, float]:
    """Empirical probability of each potential-winner class (1, 2, 3, 4+)."""
    merged = _run_blocks(config, None, DEFAULT_MAX_STATES)
    counts = merged["counts"]
    return {a: counts[a] / config.samples for a in _CLASS_KEYS}


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, int):
        return str(x)
    return f"{x:.10g}"


def summary_rows(summary: RunSummary) -> list[dict]:
    """One row per tie class plus an overall row, ready for CSV or JSON."""
    rows = []
    for a in _CLASS_KEYS:
        stats = summary.per_class[a]
        rows.append(
            {
                "n": summary.n,
                "alpha": _CLASS_LABELS[a],
                "count": stats.count,
                "mean_loss": stats.mean_loss,
                "ci95": stats.ci95_halfwidth,
                "probability": float(Fraction(stats.count, summary.samples)),
                "budget_failures": summary.budget_failures,
            }
        )
    rows.append(
        {
            "n": summary.n,
            "alpha": "overall",
            "count": summary.overall.count,
            "mean_loss": summary.overall.mean_loss,
            "ci95": summary.overall.ci95_halfwidth,
            "probability": float(Fraction(summary.overall.count, summary.samples)),
            "budget_failures": summary.budget_failures,
        }
    )
    return rows


CSV_HEADER = "n,alpha,count,mean_loss,ci95,probability,budget_failures"


def write_csv(rows: list[dict], stream: IO[str]) -> None:
    stream.write(CSV_HEADER + "\n")
    for row in rows:
        stream.write(
            ",".join(
                [
                    str(row["n"]),
                    row["alpha"],
                    str(row["count"]),
                    _fmt(row["mean_loss"]),
                    _fmt(row["ci95"]),
                    _fmt(row["probability"]),
                    str(row["budget_failures"]),
                ]
            )
            + "\n"
        )


def write_json(rows: list[dict], stream: IO[str]) -> None:
    json.dump(rows, stream, indent=2)
    stream.write("\n")
