"""Wall-clock and operation-count benchmarking of the two paths.

Timing methodology:

* a fixed scenario per combination — central quarter-size loss block,
  seeded uniform random signal — so rows are reproducible;
* Gram tables are built before any clock starts; the fast path's numbers
  never include table generation (amortization is reported separately by
  the closed forms);
* every timed run repeats ``repeats`` times after one warmup and the
  median is kept;
* measured operation counts come from one instrumented run so counter
  overhead never pollutes the timings.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .dictionary import parse_dict_spec
from .errors import ParameterError
from .fast import build_gram_tables, fase_extrapolate
from .grid import ExtrapConfig, build_weight_field
from .opcount import OpCounts, counted_run, predict_op_counts
from .reference import se_extrapolate
from .verify import central_loss_mask

CSV_FIELDS = (
    "algo",
    "M",
    "N",
    "dict",
    "iters",
    "seconds",
    "mul_pred",
    "add_pred",
    "other_pred",
    "mul_meas",
    "add_meas",
    "other_meas",
)


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    m_rows: int
    n_cols: int
    dict_size: int
    iterations: int
    seconds: float
    predicted: OpCounts
    measured: OpCounts

    def as_record(self) -> dict:
        return {
            "algo": self.algorithm,
            "M": self.m_rows,
            "N": self.n_cols,
            "dict": self.dict_size,
            "iters": self.iterations,
            "seconds": f"{self.seconds:.6g}",
            "mul_pred": self.predicted.mul,
            "add_pred": self.predicted.add,
            "other_pred": self.predicted.other,
            "mul_meas": self.measured.mul,
            "add_meas": self.measured.add,
            "other_meas": self.measured.other,
        }


def median_time(fn, *, repeats: int = 3, warmup: int = 1) -> float:
    """Median wall time of ``fn()`` over ``repeats`` runs after warmups."""
    if repeats < 1:
        raise ParameterError(f"repeats must be positive, got {repeats}")
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def run_benchmark(
    *,
    sizes=((64, 64),),
    dict_specs=("dft",),
    iters_list=(25, 250),
    gamma: float = 0.5,
    rho_hat: float = 0.8,
    repeats: int = 3,
    seed: int = 0,
    single_thread: bool = False,
    algorithms=("se", "fase"),
) -> list[BenchRow]:
    """Time both algorithms over a grid of scenarios.

    The loss block is the centred quarter of the area (at least 1x1).
    Returns one row per (size, dict, iters, algorithm).
    """
    rows: list[BenchRow] = []
    for m_rows, n_cols in sizes:
        mask = central_loss_mask(
            m_rows, n_cols, max(1, m_rows // 4), max(1, n_cols // 4)
        )
        for spec in dict_specs:
            dictionary = parse_dict_spec(spec, m_rows, n_cols)
            rng = np.random.default_rng([seed, m_rows, n_cols, len(dictionary)])
            signal = rng.uniform(0.0, 255.0, size=(m_rows, n_cols))
            weight = build_weight_field(mask, rho_hat)
            tables = build_gram_tables(dictionary, weight)
            for iters in iters_list:
                config = ExtrapConfig(iterations=iters, gamma=gamma, rho_hat=rho_hat)
                for algorithm in algorithms:
                    if algorithm == "se":
                        job = lambda: se_extrapolate(signal, mask, dictionary, config)
                    elif algorithm == "fase":
                        job = lambda: fase_extrapolate(
                            signal, mask, dictionary, tables, config
                        )
                    else:
                        raise ParameterError(f"unknown algorithm {algorithm!r}")
                    if single_thread:
                        with threadpool_limits(limits=1):
                            seconds = median_time(job, repeats=repeats)
                    else:
                        seconds = median_time(job, repeats=repeats)
                    _, measured = counted_run(
                        algorithm, signal, mask, dictionary, config, tables=tables
                    )
                    predicted = predict_op_counts(
                        algorithm, m_rows, n_cols, len(dictionary), iters
                    )
                    rows.append(
                        BenchRow(
                            algorithm=algorithm,
                            m_rows=m_rows,
                            n_cols=n_cols,
                            dict_size=len(dictionary),
                            iterations=iters,
                            seconds=seconds,
                            predicted=predicted,
                            measured=measured,
                        )
                    )
    return rows


def write_csv(rows: list[BenchRow], fh) -> None:
    """Emit rows with the documented header."""
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
