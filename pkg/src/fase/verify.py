"""Equivalence harness: reference loop vs scalar-product recursion.

Both paths are run on identical seeded random signals and compared three
ways per trial:

* the selected atom index sequences must match exactly;
* coefficients must agree within a relative tolerance (deviation is
  measured against the largest coefficient magnitude of the run);
* the recursion state must stay faithful — after every iteration the
  carried R vector is checked against a from-scratch evaluation of the
  weighted products of the reference path's residual field, with the
  deviation measured against the largest product magnitude the run
  attains. Rounding in both paths accumulates on that scale while the
  products themselves decay by orders of magnitude over a long run, so
  an instantaneous per-iteration ratio would report the decay, not the
  fidelity.

The Gram tables and weight are built once per harness call; only signals
vary across trials, which is also how the tables are meant to be used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import ParameterError
from .fast import build_gram_tables, fase_extrapolate
from .grid import ExtrapConfig, build_weight_field
from .reference import se_extrapolate

_NORM_FLOOR = 1e-300


def central_loss_mask(m_rows: int, n_cols: int, loss_rows: int, loss_cols: int) -> np.ndarray:
    """Boolean mask with a centred loss_rows x loss_cols block set True."""
    if not (1 <= loss_rows <= m_rows and 1 <= loss_cols <= n_cols):
        raise ParameterError(
            f"loss block {loss_rows}x{loss_cols} does not fit inside {m_rows}x{n_cols}"
        )
    if loss_rows == m_rows and loss_cols == n_cols:
        raise ParameterError("loss block covers the whole area; no support left")
    mask = np.zeros((m_rows, n_cols), dtype=bool)
    r0 = (m_rows - loss_rows) // 2
    c0 = (n_cols - loss_cols) // 2
    mask[r0 : r0 + loss_rows, c0 : c0 + loss_cols] = True
    return mask


def _rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)), _NORM_FLOOR)
    return float(np.abs(a - b).max(initial=0.0)) / scale


def _products_dev(phi, w_flat, residuals, products_log) -> float:
    """Worst run-scale deviation of carried products vs direct evaluation."""
    dev = 0.0
    scale = _NORM_FLOOR
    for residual, products in zip(residuals, products_log):
        direct = np.conj(phi @ np.conj(residual.ravel() * w_flat))
        dev = max(dev, float(np.abs(direct - products).max(initial=0.0)))
        scale = max(
            scale,
            float(np.abs(direct).max(initial=0.0)),
            float(np.abs(products).max(initial=0.0)),
        )
    return dev / scale


@dataclass(frozen=True)
class EquivalenceTrial:
    """Comparison outcome for one random signal."""

    seed: int
    selections_equal: bool
    max_coefficient_dev: float
    max_recursion_dev: float

    def passed(self, tol: float = 1e-9) -> bool:
        return (
            self.selections_equal
            and self.max_coefficient_dev <= tol
            and self.max_recursion_dev <= tol
        )


def run_equivalence_trials(
    dictionary: Dictionary,
    mask,
    config: ExtrapConfig = ExtrapConfig(),
    *,
    trials: int = 10,
    seed: int = 0,
) -> list[EquivalenceTrial]:
    """Run both paths on ``trials`` seeded random signals and compare.

    Trial t draws its signal from default_rng([seed, t]), so any single
    trial can be reproduced in isolation.
    """
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    m_rows, n_cols = dictionary.shape
    weight = build_weight_field(mask, config.rho_hat)
    tables = build_gram_tables(dictionary, weight)
    phi = dictionary.matrix()

    results: list[EquivalenceTrial] = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        signal = rng.standard_normal((m_rows, n_cols))
        _, ref_trace = se_extrapolate(
            signal, mask, dictionary, config, record_residuals=True
        )
        _, fast_trace = fase_extrapolate(
            signal, mask, dictionary, tables, config, record_products=True
        )
        selections_equal = bool(
            np.array_equal(ref_trace.selected, fast_trace.selected)
        )
        coeff_dev = _rel_dev(ref_trace.coefficients, fast_trace.coefficients)
        recursion_dev = _products_dev(
            phi, weight.ravel(), ref_trace.residuals, fast_trace.products
        )
        results.append(
            EquivalenceTrial(
                seed=t,
                selections_equal=selections_equal,
                max_coefficient_dev=coeff_dev,
                max_recursion_dev=recursion_dev,
            )
        )
    return results


def recursion_fidelity(dictionary: Dictionary, mask, signal, config: ExtrapConfig) -> float:
    """Worst run-scale deviation of the carried products on one signal.

    Convenience wrapper around the same check ``run_equivalence_trials``
    performs, for callers that bring their own signal. Deviation is
    normalized by the largest product magnitude of the run.
    """
    weight = build_weight_field(mask, config.rho_hat)
    tables = build_gram_tables(dictionary, weight)
    _, ref_trace = se_extrapolate(signal, mask, dictionary, config, record_residuals=True)
    _, fast_trace = fase_extrapolate(
        signal, mask, dictionary, tables, config, record_products=True
    )
    return _products_dev(
        dictionary.matrix(), weight.ravel(), ref_trace.residuals, fast_trace.products
    )


def summarize_trials(trials: list[EquivalenceTrial], tol: float = 1e-9) -> dict:
    """Aggregate view used by the CLI and the acceptance suite."""
    return {
        "trials": len(trials),
        "failures": sum(0 if t.passed(tol) else 1 for t in trials),
        "all_selections_equal": all(t.selections_equal for t in trials),
        "max_coefficient_dev": max((t.max_coefficient_dev for t in trials), default=0.0),
        "max_recursion_dev": max((t.max_recursion_dev for t in trials), default=0.0),
        "tolerance": tol,
    }
