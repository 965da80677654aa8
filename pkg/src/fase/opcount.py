"""Operation-count model of the three algorithm cores.

``predict_op_counts`` gives closed-form totals; ``OpCounter`` is the
instrumentation the extrapolation loops feed so measured totals can be
compared against the predictions. Counts model the canonical algorithm
structure — what a straightforward scalar implementation executes — not
incidental vectorization details of this package.

Conventions behind every formula (L = number of area samples touched):

* a weighted L-term scalar product costs 2L multiplications and L
  additions (value * conjugate-partner, then * weight; accumulate);
* "other" pools the cheap remaining ops: divisions, magnitudes,
  comparisons, conjugations;
* reference path, per iteration and atom: projection numerator +
  denominator (4MN mul, 2MN add, 1 division) and selection metric
  (2MN + 1 mul, MN add, magnitude + compare); the model/residual update
  adds 2MN + 1 mul and 2MN add once per iteration;
* fast path: initial products once (2MN|D| mul, MN|D| add); per
  iteration the metric pass (|D| mul, 2|D| other), the coefficient
  (1 mul) and the model + product-recursion update (MN + |D| mul,
  MN + |D| add). Divisions: none, which ``OpCounter`` can prove because
  it tracks division events separately;
* table generation: (|D|^2 + |D|)/2 stored entries (Hermitian half),
  each one weighted product over MN samples with MN conjugations, plus
  |D| normalizer evaluations.

Totals are exact integers; Python's arbitrary-precision ints mean no
overflow for any argument size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .fast import build_gram_tables, fase_extrapolate
from .grid import ExtrapConfig, build_weight_field
from .reference import se_extrapolate

ALGORITHMS = ("se", "fase", "table_gen")


@dataclass(frozen=True)
class OpCounts:
    """Multiplication / addition / other-operation totals."""

    mul: int
    add: int
    other: int

    def total(self) -> int:
        return self.mul + self.add + self.other


def predict_op_counts(
    algorithm: str, m_rows: int, n_cols: int, dict_size: int, iterations: int
) -> OpCounts:
    """Closed-form operation totals for one run.

    ``table_gen`` does not depend on ``iterations`` but validates it all
    the same, so a sweep can call every algorithm uniformly.
    """
    for name, value in (
        ("m_rows", m_rows),
        ("n_cols", n_cols),
        ("dict_size", dict_size),
        ("iterations", iterations),
    ):
        if not isinstance(value, int) or value < 1:
            raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    mn = m_rows * n_cols
    k = dict_size
    i = iterations
    if algorithm == "se":
        return OpCounts(
            mul=i * (6 * mn * k + k + 2 * mn + 1),
            add=i * (3 * mn * k + 2 * mn),
            other=3 * i * k,
        )
    if algorithm == "fase":
        return OpCounts(
            mul=2 * mn * k + i * (2 * k + mn + 1),
            add=mn * k + i * (k + mn),
            other=2 * i * k,
        )
    if algorithm == "table_gen":
        pairs = (k * k + k) // 2
        return OpCounts(mul=2 * mn * pairs, add=mn * pairs, other=mn * pairs + k)
    raise ParameterError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


class OpCounter:
    """Tally fed by the extrapolation loops; one instance per counted run.

    ``divisions_in_iterations`` counts division events inside iteration
    loops only (the fast path must keep it at zero; table normalizers and
    anything outside the loops don't belong to it).
    """

    def __init__(self):
        self.mul = 0
        self.add = 0
        self.other = 0
        self.divisions_in_iterations = 0

    # reference-path hooks, called once per iteration

    def se_projection_pass(self, mn: int, n_atoms: int) -> None:
        self.mul += 4 * mn * n_atoms
        self.add += 2 * mn * n_atoms
        self.other += n_atoms
        self.divisions_in_iterations += n_atoms

    def se_selection(self, mn: int, n_atoms: int) -> None:
        self.mul += (2 * mn + 1) * n_atoms
        self.add += mn * n_atoms
        self.other += 2 * n_atoms

    def se_update(self, mn: int) -> None:
        self.mul += 2 * mn + 1
        self.add += 2 * mn

    # fast-path hooks

    def fase_initial(self, mn: int, n_atoms: int) -> None:
        self.mul += 2 * mn * n_atoms
        self.add += mn * n_atoms

    def fase_selection(self, n_atoms: int) -> None:
        self.mul += n_atoms
        self.other += 2 * n_atoms

    def fase_update(self, mn: int, n_atoms: int) -> None:
        self.mul += mn + n_atoms + 1
        self.add += mn + n_atoms

    # table-generation hooks

    def table_pair_products(self, mn: int, n_pairs: int) -> None:
        self.mul += 2 * mn * n_pairs
        self.add += mn * n_pairs
        self.other += mn * n_pairs

    def table_normalizers(self, n_atoms: int) -> None:
        self.other += n_atoms

    def snapshot(self) -> OpCounts:
        return OpCounts(mul=self.mul, add=self.add, other=self.other)


def counted_run(
    algorithm: str,
    signal,
    mask,
    dictionary,
    config: ExtrapConfig = ExtrapConfig(),
    tables=None,
):
    """Run one extrapolation with instrumentation attached.

    Returns (model, OpCounts). For ``fase`` the tables are built on the
    fly when not supplied; table generation is counted separately (see
    ``predict_op_counts("table_gen", ...)``), never folded into a run.
    """
    counter = OpCounter()
    if algorithm == "se":
        model, _ = se_extrapolate(signal, mask, dictionary, config, counter=counter)
    elif algorithm == "fase":
        if tables is None:
            weight = build_weight_field(mask, config.rho_hat)
            tables = build_gram_tables(dictionary, weight)
        model, _ = fase_extrapolate(signal, mask, dictionary, tables, config, counter=counter)
    else:
        raise ParameterError(
            f"counted_run handles 'se' and 'fase', got {algorithm!r}; "
            "count table generation via build_gram_tables(counter=...)"
        )
    return model, counter.snapshot()
