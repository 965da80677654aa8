"""Sparse selective extrapolation of 2-D signals.

Missing signal regions are estimated as a sparse weighted superposition
of dictionary atoms fitted greedily on the known samples. Two
mathematically identical engines are provided: a reference loop that
carries an explicit residual field (:mod:`fase.reference`) and a fast
reformulation that carries one scalar product per atom and precomputed
cross-energy tables (:mod:`fase.fast`), plus FFT shortcuts for tagged
exponential dictionaries (:mod:`fase.transform`), a closed-form operation
model (:mod:`fase.opcount`) and block-wise image concealment
(:mod:`fase.conceal`).
"""

from .bench import BenchRow, run_benchmark, write_csv
from .conceal import conceal_image
from .dictionary import (
    Atom,
    Dictionary,
    generate_dictionary,
    load_dictionary,
    parse_dict_spec,
    save_dictionary,
    union_dictionaries,
)
from .errors import (
    DegenerateAtomError,
    FormatError,
    MaskError,
    NoSelectableAtomError,
    ParameterError,
    ShapeError,
    StaleTableError,
    UnsupportedDictionaryError,
)
from .fast import (
    GramTable,
    apply_model,
    build_gram_tables,
    fase_extrapolate,
    initial_scalar_products,
    load_gram_table,
    provenance_hash,
    save_gram_table,
)
from .grid import (
    ExtrapConfig,
    as_field,
    as_mask,
    build_weight_field,
    center_distances,
    psnr_over_region,
)
from .opcount import OpCounter, OpCounts, counted_run, predict_op_counts
from .reference import (
    IterationTrace,
    SparseModel,
    se_extrapolate,
    se_select,
    select_from_metric,
    tie_quantum,
    weighted_atom_energies,
    weighted_projection,
)
from .pgm import read_pgm, write_pgm
from .transform import fft_gram_table, fft_initial_products
from .verify import (
    EquivalenceTrial,
    central_loss_mask,
    recursion_fidelity,
    run_equivalence_trials,
    summarize_trials,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BenchRow",
    "Dictionary",
    "DegenerateAtomError",
    "EquivalenceTrial",
    "ExtrapConfig",
    "FormatError",
    "GramTable",
    "IterationTrace",
    "MaskError",
    "NoSelectableAtomError",
    "OpCounter",
    "OpCounts",
    "ParameterError",
    "ShapeError",
    "SparseModel",
    "StaleTableError",
    "UnsupportedDictionaryError",
    "apply_model",
    "as_field",
    "as_mask",
    "build_gram_tables",
    "build_weight_field",
    "center_distances",
    "central_loss_mask",
    "conceal_image",
    "counted_run",
    "fase_extrapolate",
    "fft_gram_table",
    "fft_initial_products",
    "generate_dictionary",
    "initial_scalar_products",
    "load_dictionary",
    "load_gram_table",
    "parse_dict_spec",
    "predict_op_counts",
    "provenance_hash",
    "psnr_over_region",
    "read_pgm",
    "recursion_fidelity",
    "run_benchmark",
    "run_equivalence_trials",
    "save_dictionary",
    "save_gram_table",
    "se_extrapolate",
    "se_select",
    "select_from_metric",
    "summarize_trials",
    "tie_quantum",
    "union_dictionaries",
    "weighted_atom_energies",
    "weighted_projection",
    "write_csv",
    "write_pgm",
    "__version__",
]
