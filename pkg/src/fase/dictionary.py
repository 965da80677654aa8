"""Basis-function dictionaries over a fixed 2-D area.

A dictionary is an ordered set of K atoms, each an (M, N) complex field.
Separable families generated here:

* ``dft``  — complex exponentials exp(+j 2 pi mu m / M) exp(+j 2 pi eta n / N),
  ordered k = mu * N + eta; these carry (mu, eta) frequency tags that the
  transform shortcuts rely on;
* ``dct``  — orthonormal type-II cosine atoms, same (p, q) -> p * N + q order;
* ``wht``  — Walsh-Hadamard atoms (Sylvester order, entries +-1),
  power-of-two sizes only;
* ``bdft`` — the DFT atoms binarized componentwise: real and imaginary part
  replaced by their sign (sign(0) = 0). Binarized atoms are NOT exact
  exponentials, so they carry no frequency tag.

Atoms never need to be orthogonal, or even linearly independent; unions of
families are explicitly supported. The only construction rule is that no
atom may be identically zero.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from .errors import FormatError, ParameterError, ShapeError

GENERATED_KINDS = ("dft", "dct", "wht", "bdft")

# parts of a unit-modulus exponential that are zero up to rounding get
# snapped before sign(), so e.g. cos(pi/2) ~ 6e-17 binarizes to 0, not +1
_BINARIZE_SNAP = 1e-12

_FDIC_MAGIC = "FDIC v1"


@dataclass(frozen=True)
class Atom:
    """One dictionary entry: its field, optional DFT frequency tag, family label."""

    values: np.ndarray
    freq: tuple[int, int] | None = None
    family: str = "custom"


class Dictionary:
    """Ordered atom set stored as one (K, M, N) complex block.

    Args:
        values: array-like of shape (K, M, N); copied/coerced to complex128.
        families: per-atom family label (one string broadcasts to all atoms).
        freqs: per-atom (mu, eta) tag or None; length K.
    """

    def __init__(self, values, families=None, freqs=None):
        arr = np.array(values, dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ShapeError(f"dictionary values must be (K, M, N) with K >= 1, got {arr.shape}")
        k = arr.shape[0]
        if families is None:
            families = ("custom",) * k
        elif isinstance(families, str):
            families = (families,) * k
        else:
            families = tuple(families)
        if len(families) != k:
            raise ShapeError(f"{len(families)} family labels for {k} atoms")
        if freqs is None:
            freqs = (None,) * k
        else:
            freqs = tuple(None if f is None else (int(f[0]), int(f[1])) for f in freqs)
        if len(freqs) != k:
            raise ShapeError(f"{len(freqs)} frequency tags for {k} atoms")
        zero = ~arr.reshape(k, -1).any(axis=1)
        if zero.any():
            raise ParameterError(f"atom {int(np.flatnonzero(zero)[0])} is identically zero")
        arr.setflags(write=False)  # views handed out stay read-only
        self.values = arr
        self.families = families
        self.freqs = freqs
        self._content_hash: int | None = None

    # -- basic introspection -------------------------------------------------

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        """(M, N) of the area the atoms live on."""
        return self.values.shape[1], self.values.shape[2]

    def atom(self, k: int) -> Atom:
        return Atom(values=self.values[k], freq=self.freqs[k], family=self.families[k])

    def __iter__(self):
        return (self.atom(k) for k in range(len(self)))

    def matrix(self) -> np.ndarray:
        """(K, M*N) row-per-atom view of the same storage (no copy)."""
        return self.values.reshape(len(self), -1)

    def tagged_indices(self) -> np.ndarray:
        """Indices of atoms that carry a DFT frequency tag."""
        return np.array([k for k, f in enumerate(self.freqs) if f is not None], dtype=np.intp)

    def content_hash(self) -> int:
        """64-bit digest of shape + atom values; memoized (atoms are immutable by convention)."""
        if self._content_hash is None:
            h = hashlib.blake2b(digest_size=8)
            k = len(self)
            m, n = self.shape
            h.update(struct.pack("<3Q", k, m, n))
            h.update(np.ascontiguousarray(self.values).view(np.float64).tobytes())
            self._content_hash = int.from_bytes(h.digest(), "little")
        return self._content_hash


# -- generated families -----------------------------------------------------


def _dft_atoms(m_rows: int, n_cols: int):
    em = np.exp(2j * np.pi * np.outer(np.arange(m_rows), np.arange(m_rows)) / m_rows)
    en = np.exp(2j * np.pi * np.outer(np.arange(n_cols), np.arange(n_cols)) / n_cols)
    atoms = np.einsum("um,vn->uvmn", em, en).reshape(m_rows * n_cols, m_rows, n_cols)
    freqs = [(mu, eta) for mu in range(m_rows) for eta in range(n_cols)]
    return atoms, freqs


def _dct_rows(length: int) -> np.ndarray:
    grid = np.pi * (2.0 * np.arange(length) + 1.0) / (2.0 * length)
    rows = np.cos(np.outer(np.arange(length), grid))
    rows[0] *= np.sqrt(1.0 / length)
    rows[1:] *= np.sqrt(2.0 / length)
    return rows


def _binarize(values: np.ndarray) -> np.ndarray:
    re = values.real.copy()
    im = values.imag.copy()
    re[np.abs(re) < _BINARIZE_SNAP] = 0.0
    im[np.abs(im) < _BINARIZE_SNAP] = 0.0
    return np.sign(re) + 1j * np.sign(im)


def generate_dictionary(kind: str, m_rows: int, n_cols: int) -> Dictionary:
    """Generate one separable family over an M x N area.

    Every family yields K = M * N atoms in k = row_freq * N + col_freq order.

    Raises:
        ParameterError: unknown kind, non-positive size, or a non-power-of-two
            size for ``wht``.
    """
    if m_rows < 1 or n_cols < 1:
        raise ParameterError(f"area must be at least 1x1, got {m_rows}x{n_cols}")
    if kind == "dft":
        atoms, freqs = _dft_atoms(m_rows, n_cols)
        return Dictionary(atoms, families="dft", freqs=freqs)
    if kind == "bdft":
        atoms, _ = _dft_atoms(m_rows, n_cols)
        return Dictionary(_binarize(atoms), families="bdft")
    if kind == "dct":
        rm = _dct_rows(m_rows)
        rn = _dct_rows(n_cols)
        atoms = np.einsum("um,vn->uvmn", rm, rn).reshape(m_rows * n_cols, m_rows, n_cols)
        return Dictionary(atoms, families="dct")
    if kind == "wht":
        if m_rows & (m_rows - 1) or n_cols & (n_cols - 1):
            raise ParameterError(f"wht needs power-of-two sizes, got {m_rows}x{n_cols}")
        hm = hadamard(m_rows).astype(np.float64)
        hn = hadamard(n_cols).astype(np.float64)
        atoms = np.einsum("um,vn->uvmn", hm, hn).reshape(m_rows * n_cols, m_rows, n_cols)
        return Dictionary(atoms, families="wht")
    raise ParameterError(f"unknown dictionary kind {kind!r}; expected one of {GENERATED_KINDS}")


def union_dictionaries(parts) -> Dictionary:
    """Concatenate dictionaries over the same area, preserving order and tags."""
    parts = list(parts)
    if not parts:
        raise ParameterError("union of zero dictionaries")
    shape = parts[0].shape
    for p in parts[1:]:
        if p.shape != shape:
            raise ShapeError(f"cannot union areas {shape} and {p.shape}")
    values = np.concatenate([p.values for p in parts], axis=0)
    families = tuple(f for p in parts for f in p.families)
    freqs = tuple(f for p in parts for f in p.freqs)
    return Dictionary(values, families=families, freqs=freqs)


def parse_dict_spec(spec: str, m_rows: int, n_cols: int) -> Dictionary:
    """Resolve a textual dictionary spec against an M x N area.

    Accepted forms:
        ``dft`` | ``dct`` | ``wht`` | ``bdft``   one generated family
        ``union:dct+wht``                        '+'-joined generated families
        ``file:PATH``                            an FDIC file (area must match)
    """
    spec = spec.strip()
    if spec.startswith("file:"):
        loaded = load_dictionary(spec[5:])
        if loaded.shape != (m_rows, n_cols):
            raise ShapeError(
                f"dictionary file covers {loaded.shape[0]}x{loaded.shape[1]}, "
                f"area is {m_rows}x{n_cols}"
            )
        return loaded
    if spec.startswith("union:"):
        names = [part.strip() for part in spec[6:].split("+")]
        if len(names) < 2 or any(not name for name in names):
            raise ParameterError(f"union spec needs '+'-joined family names, got {spec!r}")
        return union_dictionaries(generate_dictionary(name, m_rows, n_cols) for name in names)
    return generate_dictionary(spec, m_rows, n_cols)


# -- FDIC file format ---------------------------------------------------------
#
#   line 1 (ASCII, '\n'-terminated):   FDIC v1 <M> <N> <K> <complex|real>
#   payload: K*M*N little-endian float64 (re, im) pairs, atom-major, then
#   row-major inside each atom. The 'real' flag only asserts that every
#   imaginary part is zero; the payload width never changes.
#
# Frequency tags and family labels are not part of the format; loaded
# dictionaries therefore never qualify for the transform shortcuts.


def save_dictionary(dictionary: Dictionary, path) -> None:
    """Write a dictionary as an FDIC file."""
    m, n = dictionary.shape
    is_real = not dictionary.values.imag.any()
    flag = "real" if is_real else "complex"
    header = f"{_FDIC_MAGIC} {m} {n} {len(dictionary)} {flag}\n"
    pairs = np.empty((dictionary.values.size, 2), dtype="<f8")
    pairs[:, 0] = dictionary.values.real.ravel()
    pairs[:, 1] = dictionary.values.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(pairs.tobytes())


def load_dictionary(path) -> Dictionary:
    """Read an FDIC file back into a Dictionary.

    Raises:
        FormatError: bad magic, malformed header, truncated/oversized payload,
            nonzero imaginary data under the 'real' flag, or an identically
            zero atom (the message names its index).
    """
    with open(path, "rb") as fh:
        header = fh.readline(256)
        payload = fh.read()
    try:
        text = header.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: header is not ASCII") from exc
    if not text.endswith("\n"):
        raise FormatError(f"{path}: unterminated header line")
    fields = text.split()
    if len(fields) != 6 or " ".join(fields[:2]) != _FDIC_MAGIC:
        raise FormatError(f"{path}: expected '{_FDIC_MAGIC} M N K complex|real' header")
    try:
        m, n, k = int(fields[2]), int(fields[3]), int(fields[4])
    except ValueError as exc:
        raise FormatError(f"{path}: non-integer dimension in header") from exc
    flag = fields[5]
    if flag not in ("complex", "real"):
        raise FormatError(f"{path}: value flag must be 'complex' or 'real', got {flag!r}")
    if m < 1 or n < 1 or k < 1:
        raise FormatError(f"{path}: dimensions must be positive, got M={m} N={n} K={k}")
    expected = k * m * n * 16
    if len(payload) != expected:
        raise FormatError(f"{path}: payload holds {len(payload)} bytes, header implies {expected}")
    pairs = np.frombuffer(payload, dtype="<f8").reshape(k * m * n, 2)
    values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(k, m, n)
    if flag == "real" and values.imag.any():
        raise FormatError(f"{path}: flagged 'real' but carries nonzero imaginary parts")
    zero = ~values.reshape(k, -1).any(axis=1)
    if zero.any():
        raise FormatError(f"{path}: atom {int(np.flatnonzero(zero)[0])} is identically zero")
    return Dictionary(values, families="file")
