"""Reference path: greedy selective extrapolation with an explicit residual.

One iteration does, in order:

1. project the residual onto every atom over the weighted support,
       p_k = sum(r * conj(phi_k) * w) / sum(phi_k * conj(phi_k) * w);
2. select the atom whose weighted approximation error drops the most,
   i.e. the largest |p_k|^2 * sum(conj(phi_k) * w * phi_k) — ranked via
   its square root |p_k| * sqrt(energy), the same order — with metrics
   inside an absolute tie quantum of the maximum resolving to the lowest
   index;
3. scale the winning projection by gamma and add that term to the model,
   subtracting the same field from the residual.

The loop always runs exactly ``config.iterations`` times; atoms may be
selected repeatedly, each pick contributing its own term. Atoms whose
weighted energy falls below a relative threshold (1e-12 of the largest)
are excluded from selection rather than raising mid-run.

This module keeps the residual as a real field in memory and recomputes
every projection from it each iteration. It is the semantic yardstick the
fast path in :mod:`fase.fast` is tested against, and it is deliberately
plain; speed lives over there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import Atom, Dictionary
from .errors import DegenerateAtomError, NoSelectableAtomError, ShapeError
from .grid import ExtrapConfig, as_field, as_mask, build_weight_field

DEGENERACY_RTOL = 1e-12

# Metric values within SELECTION_TIE_RTOL * (largest top metric seen so
# far in the run) of the current maximum count as tied, and the lowest
# index wins. Ties are structural whenever a dictionary holds
# proportional atoms — every union of real families shares at least the
# constant atom, and cosine bases meet Walsh patterns again at half the
# sampling rate. Exact arithmetic makes such metrics identical forever;
# floating point leaves them a few ulp apart, and a *different* few ulp
# in each path. The slack must be an absolute quantum anchored at the
# run's metric scale, not a fraction of the current maximum: the running
# products of the recursive path accumulate rounding that stays bounded
# on that scale while the residual (hence the metric top) decays by many
# orders, so any window relative to the current top is eventually
# outgrown. Measured on 8x8 and 16x16 cosine+Walsh unions at gamma=1.0
# over 250 iterations, proportional-pair gaps reach ~5e-9 of the
# *current* top yet never exceed ~7e-16 of the *initial* top, while the
# closest genuine distinct-atom gap stays above ~9e-12 of it; 1e-13 sits
# two orders above the former and one below the latter.
SELECTION_TIE_RTOL = 1e-13


def select_from_metric(metric: np.ndarray, quantum: float) -> int:
    """Lowest index whose metric lies within ``quantum`` of the maximum.

    ``quantum`` is an absolute slack in metric units. Iterative callers
    keep the running maximum of :func:`tie_quantum` over their iterations
    so far, anchoring the slack at the run's metric scale so that
    proportional-atom ties keep resolving to the same index late in a
    run; one-shot callers use ``tie_quantum`` of their only metric
    vector. Entries at ``-inf`` (degenerate atoms) never tie.
    """
    u = int(np.argmax(metric))
    if quantum > 0.0:
        top = metric[u]
        if np.isfinite(top):
            return int(np.argmax(metric >= top - quantum))
    return u


def tie_quantum(metric: np.ndarray) -> float:
    """Absolute tie slack anchored at this metric vector's maximum.

    Loops take the running maximum of this over their iterations, which
    ratchets the anchor onto the largest metric scale the run has seen.
    """
    top = float(np.max(metric))
    if not np.isfinite(top) or top <= 0.0:
        return 0.0
    return SELECTION_TIE_RTOL * top


@dataclass
class IterationTrace:
    """Per-iteration record of one extrapolation run.

    Attributes:
        selected: (I,) atom index chosen at each iteration.
        projections: (I,) unscaled projection p of the chosen atom.
        coefficients: (I,) model coefficient gamma * p actually applied.
        residuals: optional list of (M, N) residual fields, one per
            iteration, captured after the update (reference path only).
        products: optional list of (K,) scalar-product vectors, one per
            iteration, captured after the recursion update (fast path only).
    """

    selected: np.ndarray
    projections: np.ndarray
    coefficients: np.ndarray
    residuals: list[np.ndarray] | None = None
    products: list[np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.selected)


@dataclass
class SparseModel:
    """Weighted atom superposition g = sum of c * phi over selected terms."""

    shape: tuple[int, int]
    terms: list[tuple[int, complex]]
    dictionary: Dictionary

    def materialize(self) -> np.ndarray:
        """Evaluate the model on its full (M, N) area."""
        g = np.zeros(self.shape, dtype=np.complex128)
        for k, c in self.terms:
            g += c * self.dictionary.values[k]
        return g


def weighted_atom_energies(dictionary: Dictionary, weight) -> np.ndarray:
    """sum(|phi_k|^2 * w) for every atom, as an (K,) float vector."""
    w = np.asarray(weight, dtype=np.float64).ravel()
    phi = dictionary.matrix()
    if phi.shape[1] != w.size:
        raise ShapeError(f"weight has {w.size} samples, atoms have {phi.shape[1]}")
    # blockwise so we never materialize a |phi|^2 copy of the whole dictionary
    energies = np.empty(len(dictionary), dtype=np.float64)
    step = max(1, (1 << 22) // max(1, phi.shape[1]))
    for lo in range(0, phi.shape[0], step):
        block = phi[lo : lo + step]
        energies[lo : lo + step] = (block.real**2 + block.imag**2) @ w
    return energies


def _degeneracy_threshold(energies: np.ndarray) -> float:
    top = float(energies.max()) if energies.size else 0.0
    if top <= 0.0:
        raise NoSelectableAtomError("every atom has zero weighted energy")
    return DEGENERACY_RTOL * top


def weighted_projection(residual, atom, weight) -> complex:
    """Projection coefficient of one atom onto a residual over weighted support.

    ``atom`` may be an :class:`Atom` or a bare (M, N) array.

    Raises:
        DegenerateAtomError: the atom's weighted energy is zero.
    """
    r = as_field(residual)
    phi = np.asarray(atom.values if isinstance(atom, Atom) else atom)
    w = np.asarray(weight, dtype=np.float64)
    if phi.shape != r.shape or w.shape != r.shape:
        raise ShapeError(f"residual {r.shape}, atom {phi.shape}, weight {w.shape} must agree")
    denom = float(np.sum((phi.real**2 + phi.imag**2) * w))
    if denom == 0.0:
        raise DegenerateAtomError()
    numer = complex(np.sum(r * np.conj(phi) * w))
    return numer / denom


def _selection_metric(projections: np.ndarray, root_energies: np.ndarray, alive) -> np.ndarray:
    """|p_k| * sqrt(energy_k) with degenerate atoms forced to -inf.

    The square of this metric is the drop in weighted approximation error
    that committing fully to atom k would buy, so both express the same
    preference order; the root form is shared with the recursive path,
    whose running products make |R_k| / sqrt(energy_k) the natural shape,
    which keeps one tie quantum meaningful for both.
    """
    metric = np.abs(projections) * root_energies
    metric[~alive] = -np.inf
    return metric


def se_select(projections, dictionary: Dictionary, weight) -> int:
    """Pick the atom whose removal lowers the weighted error the most.

    Equivalent to the argmin over the explicit weighted error sums: the
    error of candidate k equals the residual energy minus
    |p_k|^2 * sum(|phi_k|^2 w), so maximizing the root of that product is
    the same decision. Ties resolve to the lowest index.

    Raises:
        NoSelectableAtomError: all atoms are degenerate under this weight.
    """
    p = np.asarray(projections, dtype=np.complex128).ravel()
    if p.size != len(dictionary):
        raise ShapeError(f"{p.size} projections for {len(dictionary)} atoms")
    energies = weighted_atom_energies(dictionary, weight)
    eps = _degeneracy_threshold(energies)
    metric = _selection_metric(p, np.sqrt(energies), energies > eps)
    return select_from_metric(metric, tie_quantum(metric))


def se_extrapolate(
    signal,
    mask,
    dictionary: Dictionary,
    config: ExtrapConfig = ExtrapConfig(),
    *,
    record_residuals: bool = False,
    counter=None,
) -> tuple[SparseModel, IterationTrace]:
    """Run the reference algorithm for exactly ``config.iterations`` steps.

    Args:
        signal: (M, N) field; lost samples may hold anything, they are
            multiplied by a zero weight and never influence the result.
        mask: boolean (M, N), True = lost.
        dictionary: atoms over the same area.
        config: iteration count, gamma, weight decay.
        record_residuals: capture the residual field after every iteration
            into the trace (used by equivalence checks).
        counter: optional operation counter; must provide the hooks
            ``se_projection_pass``, ``se_selection`` and ``se_update``.

    Returns:
        (model, trace). The model holds one term per iteration in
        selection order.
    """
    s = as_field(signal)
    mask = as_mask(mask)
    if mask.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs mask {mask.shape}")
    if dictionary.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs dictionary area {dictionary.shape}")
    w = build_weight_field(mask, config.rho_hat).ravel()
    phi = dictionary.matrix()
    n_atoms = len(dictionary)
    mn = s.size

    energies = weighted_atom_energies(dictionary, w)
    eps = _degeneracy_threshold(energies)
    alive = energies > eps
    root_energies = np.sqrt(energies)

    iters = config.iterations
    quantum = 0.0
    r = s.ravel().copy()
    selected = np.empty(iters, dtype=np.intp)
    projections = np.empty(iters, dtype=np.complex128)
    coefficients = np.empty(iters, dtype=np.complex128)
    residual_log: list[np.ndarray] | None = [] if record_residuals else None
    terms: list[tuple[int, complex]] = []

    for it in range(iters):
        # conj(phi) @ x as conj(phi @ conj(x)): same sums, no conjugated
        # copy of the dictionary block
        numer = np.conj(phi @ np.conj(r * w))
        p = np.zeros(n_atoms, dtype=np.complex128)
        np.divide(numer, energies, out=p, where=alive)
        metric = _selection_metric(p, root_energies, alive)
        quantum = max(quantum, tie_quantum(metric))
        u = select_from_metric(metric, quantum)
        c = complex(config.gamma * p[u])
        r -= c * phi[u]
        selected[it] = u
        projections[it] = p[u]
        coefficients[it] = c
        terms.append((u, c))
        if residual_log is not None:
            residual_log.append(r.reshape(s.shape).copy())
        if counter is not None:
            counter.se_projection_pass(mn, n_atoms)
            counter.se_selection(mn, n_atoms)
            counter.se_update(mn)

    model = SparseModel(shape=s.shape, terms=terms, dictionary=dictionary)
    trace = IterationTrace(
        selected=selected,
        projections=projections,
        coefficients=coefficients,
        residuals=residual_log,
    )
    return model, trace
