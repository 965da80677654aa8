"""Block-wise concealment of lost image regions.

The image is tiled; every tile containing lost pixels becomes one job.
A job extrapolates over the tile plus a ring of ``support`` known pixels
on each side (clipped at the image border), then writes back only its own
tile's lost pixels — neighbouring tiles never see each other's output,
so jobs are order-independent and safe to run in parallel.

Dictionaries and Gram tables are cached across jobs: dictionaries by area
shape, tables by their provenance hash, which also lets one precomputed
table file serve every interior block of a regular grid (border blocks
get smaller areas, hence different provenance, and are built on the fly).
"""

from __future__ import annotations

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dictionary import Dictionary, parse_dict_spec
from .errors import ParameterError, ShapeError
from .fast import (
    GramTable,
    apply_model,
    build_gram_tables,
    fase_extrapolate,
    provenance_hash,
)
from .grid import ExtrapConfig, as_mask, build_weight_field, psnr_over_region
from .transform import fft_gram_table, fft_initial_products

REPORT_SCHEMA = "fase-conceal-report/1"
DEFAULT_SUPPORT = 24


@dataclass
class BlockResult:
    """Outcome of one tile job (block coordinates are image-absolute)."""

    row: int
    col: int
    height: int
    width: int
    area: tuple[int, int, int, int]  # r0, c0, rows, cols actually extrapolated
    lost: int
    seconds: float
    psnr_db: float | None
    max_imag: float
    trace: list[tuple[int, complex]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "row": self.row,
            "col": self.col,
            "height": self.height,
            "width": self.width,
            "area": list(self.area),
            "lost": self.lost,
            "seconds": self.seconds,
            "psnr_db": self.psnr_db,
            "max_imag": self.max_imag,
            "trace": [
                {"atom": int(k), "coefficient": [c.real, c.imag]} for k, c in self.trace
            ],
        }


class _SharedState:
    """Thread-safe caches shared by all block jobs of one conceal call."""

    def __init__(self, dict_spec: str, supplied_tables: GramTable | None, use_fft: bool):
        self.dict_spec = dict_spec
        self.supplied = supplied_tables
        self.use_fft = use_fft
        self.reused_supplied = 0
        self._dicts: dict[tuple[int, int], Dictionary] = {}
        self._tables: dict[int, GramTable] = {}
        self._lock = threading.Lock()

    def dictionary_for(self, shape: tuple[int, int]) -> Dictionary:
        with self._lock:
            if shape not in self._dicts:
                self._dicts[shape] = parse_dict_spec(self.dict_spec, *shape)
            return self._dicts[shape]

    def tables_for(self, dictionary: Dictionary, weight: np.ndarray) -> GramTable:
        key = provenance_hash(dictionary, weight)
        with self._lock:
            cached = self._tables.get(key)
        if cached is not None:
            return cached
        if self.supplied is not None and self.supplied.provenance == key:
            with self._lock:
                self._tables[key] = self.supplied
                self.reused_supplied += 1
            return self.supplied
        if self.use_fft and len(dictionary.tagged_indices()) == len(dictionary):
            built = fft_gram_table(weight, dictionary)
        else:
            built = build_gram_tables(dictionary, weight)
        with self._lock:
            self._tables.setdefault(key, built)
            return self._tables[key]


def _conceal_block(
    image: np.ndarray,
    lost: np.ndarray,
    out: np.ndarray,
    reference: np.ndarray | None,
    tile: tuple[int, int, int, int],
    support: int,
    config: ExtrapConfig,
    state: _SharedState,
) -> BlockResult:
    r0, c0, bh, bw = tile
    h_img, w_img = image.shape
    a_r0 = max(0, r0 - support)
    a_c0 = max(0, c0 - support)
    a_r1 = min(h_img, r0 + bh + support)
    a_c1 = min(w_img, c0 + bw + support)
    area = (slice(a_r0, a_r1), slice(a_c0, a_c1))
    signal = image[area].astype(np.float64)
    area_lost = lost[area]

    started = time.perf_counter()
    dictionary = state.dictionary_for(signal.shape)
    weight = build_weight_field(area_lost, config.rho_hat)
    tables = state.tables_for(dictionary, weight)
    products = (
        fft_initial_products(signal, weight, dictionary) if state.use_fft else None
    )
    model, trace = fase_extrapolate(
        signal, area_lost, dictionary, tables, config, products=products
    )
    patched, max_imag = apply_model(signal, model, area_lost)
    elapsed = time.perf_counter() - started

    tile_slice = (slice(r0, r0 + bh), slice(c0, c0 + bw))
    tile_lost = lost[tile_slice]
    # image-relative -> area-relative coordinates of this tile
    rel = (slice(r0 - a_r0, r0 - a_r0 + bh), slice(c0 - a_c0, c0 - a_c0 + bw))
    out[tile_slice][tile_lost] = patched[rel][tile_lost]

    psnr = None
    if reference is not None:
        psnr = psnr_over_region(reference[tile_slice], out[tile_slice], tile_lost)
    return BlockResult(
        row=r0,
        col=c0,
        height=bh,
        width=bw,
        area=(a_r0, a_c0, a_r1 - a_r0, a_c1 - a_c0),
        lost=int(tile_lost.sum()),
        seconds=elapsed,
        psnr_db=psnr,
        max_imag=max_imag,
        trace=[(k, complex(c)) for k, c in zip(trace.selected, trace.coefficients)],
    )


def conceal_image(
    image,
    lost_mask,
    *,
    dict_spec: str = "dft",
    config: ExtrapConfig = ExtrapConfig(),
    block: tuple[int, int] | None = None,
    support: int = DEFAULT_SUPPORT,
    tables: GramTable | None = None,
    use_fft: bool = False,
    single_thread: bool = False,
    reference=None,
) -> tuple[np.ndarray, dict]:
    """Fill the lost samples of an image and report what happened.

    Args:
        image: (H, W) array, any real dtype; values are treated as 8-bit
            luma for PSNR purposes.
        lost_mask: boolean (H, W), True = lost pixel.
        dict_spec: textual dictionary spec (see ``parse_dict_spec``),
            resolved per extrapolation-area shape.
        config: iterations / gamma / rho for every block.
        block: (rows, cols) tile size; None processes the whole image as
            one extrapolation area.
        support: known-pixel margin around each tile.
        tables: optional precomputed Gram tables, used for every block
            whose provenance matches.
        use_fft: batch initial products through fft2 and build tables via
            the transform shortcut where the dictionary allows it.
        single_thread: process blocks sequentially.
        reference: optional ground-truth image for PSNR reporting.

    Returns:
        (restored float64 image, JSON-ready report dict).
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ShapeError(f"image must be non-empty 2-D, got shape {img.shape}")
    lost = as_mask(lost_mask)
    if lost.shape != img.shape:
        raise ShapeError(f"image {img.shape} vs mask {lost.shape}")
    ref = None
    if reference is not None:
        ref = np.asarray(reference, dtype=np.float64)
        if ref.shape != img.shape:
            raise ShapeError(f"image {img.shape} vs reference {ref.shape}")
    if support < 0:
        raise ParameterError(f"support margin must be >= 0, got {support}")
    h_img, w_img = img.shape
    if block is None:
        tiles = [(0, 0, h_img, w_img)]
        grid = None
    else:
        bh, bw = block
        if bh < 1 or bw < 1:
            raise ParameterError(f"block must be at least 1x1, got {bh}x{bw}")
        tiles = [
            (r0, c0, min(bh, h_img - r0), min(bw, w_img - c0))
            for r0 in range(0, h_img, bh)
            for c0 in range(0, w_img, bw)
        ]
        grid = [bh, bw]
    jobs = [t for t in tiles if lost[t[0] : t[0] + t[2], t[1] : t[1] + t[3]].any()]

    out = img.copy()
    state = _SharedState(dict_spec, tables, use_fft)
    started = time.perf_counter()
    if single_thread or len(jobs) <= 1:
        results = [
            _conceal_block(img, lost, out, ref, t, support, config, state) for t in jobs
        ]
    else:
        with ThreadPoolExecutor(max_workers=os.cpu_count()) as pool:
            results = list(
                pool.map(
                    lambda t: _conceal_block(img, lost, out, ref, t, support, config, state),
                    jobs,
                )
            )
    total_seconds = time.perf_counter() - started

    overall_psnr = None
    if ref is not None and lost.any():
        overall_psnr = psnr_over_region(ref, out, lost)
    report = {
        "schema": REPORT_SCHEMA,
        "image": {"height": h_img, "width": w_img},
        "settings": {
            "dict": dict_spec,
            "iterations": config.iterations,
            "gamma": config.gamma,
            "rho": config.rho_hat,
            "block": grid,
            "support": support,
            "fft": use_fft,
        },
        "lost_pixels": int(lost.sum()),
        "blocks": [r.to_json() for r in results],
        "tables_reused": state.reused_supplied,
        "psnr_db": overall_psnr,
        "max_imag": max((r.max_imag for r in results), default=0.0),
        "seconds": total_seconds,
    }
    return out, report
