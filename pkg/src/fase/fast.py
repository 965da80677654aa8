"""Fast path: extrapolation driven entirely by scalar products.

The reference loop recomputes every atom projection from the residual
field each iteration. All of those sums can instead be carried along
recursively: keep one complex number per atom,

    R_k = sum over the area of (residual * conj(phi_k) * w),

initialize it from the signal, and after selecting atom u with
coefficient c update every entry as

    R_k <- R_k - c * C(k, u),

where C(k, l) = sum(conj(phi_k) * w * phi_l) is the weighted cross-energy
table of the dictionary. Together with D_k = 1 / sqrt(C(k, k)) the whole
iteration needs no residual field, no per-iteration sums over the area,
and no divisions at all:

    select  u = argmax |R_k| * D_k          (degenerate atoms sit at -inf)
    apply   c = gamma * R_u * D_u * D_u
    recurse R -= c * conj(C(u, :))          (Hermitian column access)

Selections and coefficients are identical to the reference path up to
floating-point rounding; the equivalence harness in :mod:`fase.verify`
checks that at 1e-9.

C and D only depend on (dictionary, weight), so they are built once and
shared across any number of signals — that amortization is the entire
speed story. Tables are bound to their inputs by a provenance hash and
refuse to run against anything else (StaleTableError).
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import FormatError, NoSelectableAtomError, ShapeError, StaleTableError
from .grid import ExtrapConfig, as_field, as_mask, build_weight_field
from .reference import (
    DEGENERACY_RTOL,
    IterationTrace,
    SparseModel,
    select_from_metric,
    tie_quantum,
)

_FGRM_MAGIC = b"FGRM v1\n"


@dataclass
class GramTable:
    """Precomputed weighted cross-energies of a (dictionary, weight) pair.

    Attributes:
        c: (K, K) complex table, C(k, l) = sum(conj(phi_k) * w * phi_l).
            Exactly Hermitian; diagonal real and non-negative.
        d: (K,) float, 1/sqrt(C(k, k)); exactly 0.0 marks a degenerate atom.
        provenance: 64-bit hash binding the table to dictionary + weight.
    """

    c: np.ndarray
    d: np.ndarray
    provenance: int

    def __post_init__(self):
        if self.c.ndim != 2 or self.c.shape[0] != self.c.shape[1]:
            raise ShapeError(f"table must be square, got {self.c.shape}")
        if self.d.shape != (self.c.shape[0],):
            raise ShapeError(
                f"{self.d.shape[0] if self.d.ndim == 1 else self.d.shape} "
                f"normalizers for a {self.c.shape[0]}-atom table"
            )

    @property
    def size(self) -> int:
        return self.c.shape[0]

    def degenerate(self) -> np.ndarray:
        return self.d == 0.0


def provenance_hash(dictionary: Dictionary, weight) -> int:
    """64-bit digest of the exact (dictionary, weight) pair a table serves."""
    w = np.ascontiguousarray(weight, dtype=np.float64).ravel()
    h = hashlib.blake2b(digest_size=8)
    h.update(b"gram-tables/1")
    h.update(struct.pack("<2Q", dictionary.content_hash(), w.size))
    h.update(w.tobytes())
    return int.from_bytes(h.digest(), "little")


def _finish_tables(c: np.ndarray, provenance: int) -> GramTable:
    """Force an exactly real diagonal and derive D with degeneracy cutoff."""
    diag = c.diagonal().real.copy()
    np.fill_diagonal(c, diag)
    top = float(diag.max(initial=0.0))
    d = np.zeros(diag.shape, dtype=np.float64)
    if top > 0.0:
        alive = diag > DEGENERACY_RTOL * top
        d[alive] = 1.0 / np.sqrt(diag[alive])
    return GramTable(c=c, d=d, provenance=provenance)


def build_gram_tables(
    dictionary: Dictionary, weight, *, block: int = 256, counter=None
) -> GramTable:
    """Evaluate C and D directly, exploiting Hermitian symmetry.

    Only the upper triangle (l >= k) is computed — (K^2 + K) / 2 entries in
    row blocks of GEMMs — and the strict lower triangle is mirrored from it,
    so C(l, k) == conj(C(k, l)) holds exactly, not just within rounding.

    ``counter`` optionally tallies the canonical cost via its
    ``table_pair_products`` and ``table_normalizers`` hooks.
    """
    w = np.asarray(weight, dtype=np.float64).ravel()
    phi = dictionary.matrix()
    n_atoms = len(dictionary)
    if phi.shape[1] != w.size:
        raise ShapeError(f"weight has {w.size} samples, atoms have {phi.shape[1]}")
    if block < 1:
        raise ShapeError(f"block must be positive, got {block}")
    c = np.empty((n_atoms, n_atoms), dtype=np.complex128)
    for lo in range(0, n_atoms, block):
        hi = min(lo + block, n_atoms)
        rows = np.conj(phi[lo:hi]) * w
        c[lo:hi, lo:] = rows @ phi[lo:].T
    for lo in range(0, n_atoms, block):
        hi = min(lo + block, n_atoms)
        c[hi:, lo:hi] = np.conj(c[lo:hi, hi:]).T
        sub = c[lo:hi, lo:hi]
        low = np.tril_indices(hi - lo, k=-1)
        sub[low] = np.conj(sub.T[low])
    if counter is not None:
        counter.table_pair_products(w.size, (n_atoms * n_atoms + n_atoms) // 2)
        counter.table_normalizers(n_atoms)
    return _finish_tables(c, provenance_hash(dictionary, w))


def initial_scalar_products(signal, weight, dictionary: Dictionary, *, counter=None) -> np.ndarray:
    """R at iteration zero: weighted products of the raw signal with every atom."""
    s = as_field(signal)
    w = np.asarray(weight, dtype=np.float64)
    if w.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs weight {w.shape}")
    if dictionary.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs dictionary area {dictionary.shape}")
    phi = dictionary.matrix()
    products = np.conj(phi @ np.conj((s * w).ravel()))
    if counter is not None:
        counter.fase_initial(s.size, len(dictionary))
    return products


def fase_extrapolate(
    signal,
    mask,
    dictionary: Dictionary,
    tables: GramTable,
    config: ExtrapConfig = ExtrapConfig(),
    *,
    products: np.ndarray | None = None,
    record_products: bool = False,
    counter=None,
) -> tuple[SparseModel, IterationTrace]:
    """Run the scalar-product recursion for exactly ``config.iterations`` steps.

    Args:
        signal, mask, dictionary, config: as in the reference path.
        tables: Gram tables built for exactly this dictionary and the weight
            implied by (mask, config.rho_hat).
        products: optional precomputed initial scalar products (e.g. from the
            transform shortcut); computed directly when omitted.
        record_products: capture the R vector after every iteration.
        counter: optional operation counter with ``fase_initial``,
            ``fase_selection`` and ``fase_update`` hooks.

    Returns:
        (model, trace) — same structures the reference path yields; the
        trace carries no residual fields because none exist here.

    Raises:
        StaleTableError: tables were built for a different dictionary,
            weight, mask, or decay.
        NoSelectableAtomError: every atom is degenerate under this weight.
    """
    s = as_field(signal)
    mask = as_mask(mask)
    if mask.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs mask {mask.shape}")
    if dictionary.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs dictionary area {dictionary.shape}")
    if tables.size != len(dictionary):
        raise StaleTableError(
            f"tables hold {tables.size} atoms, dictionary has {len(dictionary)}"
        )
    w = build_weight_field(mask, config.rho_hat)
    expected = provenance_hash(dictionary, w)
    if tables.provenance != expected:
        raise StaleTableError(
            "table provenance mismatch: tables were built for a different "
            "dictionary/weight combination"
        )

    degenerate = tables.degenerate()
    if degenerate.all():
        raise NoSelectableAtomError("every atom has zero weighted energy")

    if products is None:
        r_products = initial_scalar_products(s, w, dictionary, counter=counter)
    else:
        r_products = np.asarray(products, dtype=np.complex128).copy()
        if r_products.shape != (len(dictionary),):
            raise ShapeError(
                f"products shape {r_products.shape}, expected ({len(dictionary)},)"
            )

    c_table = tables.c
    d = tables.d
    gamma = config.gamma
    iters = config.iterations
    mn = s.size
    n_atoms = len(dictionary)

    selected = np.empty(iters, dtype=np.intp)
    projections = np.empty(iters, dtype=np.complex128)
    coefficients = np.empty(iters, dtype=np.complex128)
    product_log: list[np.ndarray] | None = [] if record_products else None
    terms: list[tuple[int, complex]] = []
    any_degenerate = bool(degenerate.any())

    quantum = 0.0
    for it in range(iters):
        metric = np.abs(r_products) * d
        if any_degenerate:
            metric[degenerate] = -np.inf
        quantum = max(quantum, tie_quantum(metric))
        u = select_from_metric(metric, quantum)
        p_u = r_products[u] * (d[u] * d[u])
        c = complex(gamma * p_u)
        r_products -= c * np.conj(c_table[u])
        selected[it] = u
        projections[it] = p_u
        coefficients[it] = c
        terms.append((u, c))
        if product_log is not None:
            product_log.append(r_products.copy())
        if counter is not None:
            counter.fase_selection(n_atoms)
            counter.fase_update(mn, n_atoms)

    model = SparseModel(shape=s.shape, terms=terms, dictionary=dictionary)
    trace = IterationTrace(
        selected=selected,
        projections=projections,
        coefficients=coefficients,
        products=product_log,
    )
    return model, trace


def apply_model(signal, model: SparseModel, mask) -> tuple[np.ndarray, float]:
    """Replace the lost samples of a signal with the model's real part.

    Support samples pass through untouched. Returns the patched field and
    the largest absolute imaginary part the model carried over the lost
    samples — a diagnostic that should sit at rounding level whenever the
    model represents a real-valued signal (e.g. conjugate-paired DFT terms).
    """
    s = np.asarray(signal)
    mask = as_mask(mask)
    if s.shape != mask.shape:
        raise ShapeError(f"signal {s.shape} vs mask {mask.shape}")
    if model.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs model area {model.shape}")
    out = s.astype(np.complex128 if np.iscomplexobj(s) else np.float64, copy=True)
    if not mask.any():
        return out, 0.0
    g = model.materialize()
    out[mask] = g.real[mask]
    return out, float(np.abs(g.imag[mask]).max())


# -- FGRM file format ---------------------------------------------------------
#
#   bytes 0..7    magic  "FGRM v1\n"
#   bytes 8..15   u64 LE  K (atom count)
#   bytes 16..23  u64 LE  provenance hash
#   then          K*K complex entries, row-major, each (re, im) as f64 LE
#   then          K float64 LE entries of D
#
# File size is therefore exactly 24 + 16*K^2 + 8*K bytes.


def save_gram_table(tables: GramTable, path) -> None:
    """Write Gram tables in the FGRM layout."""
    k = tables.size
    pairs = np.empty((k * k, 2), dtype="<f8")
    pairs[:, 0] = tables.c.real.ravel()
    pairs[:, 1] = tables.c.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(_FGRM_MAGIC)
        fh.write(struct.pack("<2Q", k, tables.provenance))
        fh.write(pairs.tobytes())
        fh.write(tables.d.astype("<f8").tobytes())


def load_gram_table(path) -> GramTable:
    """Read an FGRM file; raises FormatError on any layout violation."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 24 or blob[:8] != _FGRM_MAGIC:
        raise FormatError(f"{path}: not an FGRM v1 file")
    k, provenance = struct.unpack_from("<2Q", blob, 8)
    if k < 1:
        raise FormatError(f"{path}: atom count must be positive, got {k}")
    expected = 24 + 16 * k * k + 8 * k
    if len(blob) != expected:
        raise FormatError(f"{path}: {len(blob)} bytes, layout implies {expected}")
    pairs = np.frombuffer(blob, dtype="<f8", count=2 * k * k, offset=24).reshape(k * k, 2)
    c = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(k, k)
    d = np.frombuffer(blob, dtype="<f8", count=k, offset=24 + 16 * k * k).copy()
    return GramTable(c=c, d=d, provenance=int(provenance))
