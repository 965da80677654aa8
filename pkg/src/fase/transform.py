"""FFT shortcuts for dictionaries of tagged complex exponentials.

A tagged atom is phi[m, n] = exp(+j 2 pi mu m / M) * exp(+j 2 pi eta n / N).
Two identities make the expensive sums collapse into one 2-D FFT:

* initial scalar products: sum(s * conj(phi) * w) is the forward DFT of
  (s * w) evaluated at bin (mu, eta) — numpy's unnormalized fft2 matches
  term for term;
* cross-energies: conj(phi_k) * phi_l is itself an exponential at the
  difference frequency, so C(k, l) = What[(mu_k - mu_l) mod M,
  (eta_k - eta_l) mod N] where What = fft2(w). One small FFT plus a gather
  replaces (K^2 + K)/2 area sums.

The gather source is symmetrized first — What is averaged with its
conjugate mirror — which costs nothing at M x N size and guarantees the
assembled table is exactly Hermitian (w is real, so the mirror identity
holds mathematically; floating-point FFTs only honor it approximately).

Worth it only when many products are needed at once: below
``min_tagged`` tagged atoms the plain per-atom sums win, which is why
``fft_initial_products`` falls back to the direct path there.
"""

from __future__ import annotations

import numpy as np

from .dictionary import Dictionary
from .errors import ShapeError, UnsupportedDictionaryError
from .fast import GramTable, _finish_tables, initial_scalar_products, provenance_hash
from .grid import as_field

FFT_MIN_TAGGED = 64


def _tag_arrays(dictionary: Dictionary) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tagged = dictionary.tagged_indices()
    mu = np.array([dictionary.freqs[k][0] for k in tagged], dtype=np.intp)
    eta = np.array([dictionary.freqs[k][1] for k in tagged], dtype=np.intp)
    return tagged, mu, eta


def fft_initial_products(
    signal, weight, dictionary: Dictionary, *, min_tagged: int = FFT_MIN_TAGGED
) -> np.ndarray:
    """Initial scalar products, batching all tagged atoms through one fft2.

    Untagged atoms (cosines, Walsh patterns, binarized exponentials, file
    dictionaries) are evaluated directly; with fewer than ``min_tagged``
    tagged atoms the whole call defers to the direct path. Results agree
    with :func:`fase.fast.initial_scalar_products` to rounding.
    """
    s = as_field(signal)
    w = np.asarray(weight, dtype=np.float64)
    if w.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs weight {w.shape}")
    if dictionary.shape != s.shape:
        raise ShapeError(f"signal {s.shape} vs dictionary area {dictionary.shape}")
    tagged, mu, eta = _tag_arrays(dictionary)
    if tagged.size < min_tagged:
        return initial_scalar_products(s, w, dictionary)
    products = np.empty(len(dictionary), dtype=np.complex128)
    spectrum = np.fft.fft2(s * w)
    products[tagged] = spectrum[mu % s.shape[0], eta % s.shape[1]]
    rest = np.setdiff1d(np.arange(len(dictionary), dtype=np.intp), tagged)
    if rest.size:
        sub = dictionary.matrix()[rest]
        products[rest] = np.conj(sub @ np.conj((s * w).ravel()))
    return products


def fft_gram_table(weight, dictionary: Dictionary) -> GramTable:
    """Assemble Gram tables from fft2(weight) instead of pairwise sums.

    Requires every atom to carry a frequency tag.

    Raises:
        UnsupportedDictionaryError: at least one atom is untagged.
    """
    w = np.asarray(weight, dtype=np.float64)
    m_rows, n_cols = dictionary.shape
    if w.shape != (m_rows, n_cols):
        raise ShapeError(f"weight {w.shape} vs dictionary area {(m_rows, n_cols)}")
    tagged, mu, eta = _tag_arrays(dictionary)
    n_atoms = len(dictionary)
    if tagged.size != n_atoms:
        raise UnsupportedDictionaryError(
            f"fft table build needs frequency tags on all atoms; "
            f"{n_atoms - tagged.size} of {n_atoms} lack one"
        )
    spectrum = np.fft.fft2(w)
    mirror = spectrum[np.ix_((-np.arange(m_rows)) % m_rows, (-np.arange(n_cols)) % n_cols)]
    spectrum = 0.5 * (spectrum + np.conj(mirror))

    mu = mu % m_rows
    eta = eta % n_cols
    canonical = n_atoms == m_rows * n_cols and np.array_equal(
        mu, np.arange(n_atoms, dtype=np.intp) // n_cols
    ) and np.array_equal(eta, np.arange(n_atoms, dtype=np.intp) % n_cols)
    if canonical:
        # full regular frequency grid: difference indices factor per axis,
        # one broadcast gather builds the whole (K, K) block
        da = (np.arange(m_rows)[:, None] - np.arange(m_rows)[None, :]) % m_rows
        db = (np.arange(n_cols)[:, None] - np.arange(n_cols)[None, :]) % n_cols
        c = spectrum[da[:, None, :, None], db[None, :, None, :]].reshape(n_atoms, n_atoms)
    else:
        dmu = (mu[:, None] - mu[None, :]) % m_rows
        deta = (eta[:, None] - eta[None, :]) % n_cols
        c = spectrum[dmu, deta]
    return _finish_tables(c, provenance_hash(dictionary, w))
