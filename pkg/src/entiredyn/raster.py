"""Escape-class rasters over a rectangle, f-vs-g agreement and image output."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import ClassifierConfig, CommutingPair, PointClass, as_evaluator, classify_points

PALETTE = {
    PointClass.Escaping: (230, 57, 70),
    PointClass.Bounded: (29, 53, 87),
    PointClass.Bungee: (244, 211, 94),
    PointClass.Undecided: (168, 168, 168),
}
CLASS_ORDER = [PointClass.Escaping, PointClass.Bounded, PointClass.Bungee, PointClass.Undecided]


@dataclass(frozen=True)
class GridSpec:
    re_min: float = -2.0
    re_max: float = 2.0
    im_min: float = -2.0
    im_max: float = 2.0
    width: int = 512
    height: int = 512

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("grid needs re_min < re_max and im_min < im_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid width and height must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width


def grid_points(spec: GridSpec) -> np.ndarray:
    """Pixel-centre points, row-major, row 0 at im_max."""
    dx = (spec.re_max - spec.re_min) / spec.width
    dy = (spec.im_max - spec.im_min) / spec.height
    re = spec.re_min + (np.arange(spec.width) + 0.5) * dx
    im = spec.im_max - (np.arange(spec.height) + 0.5) * dy
    return (re[None, :] + 1j * im[:, None]).ravel()


@dataclass(frozen=True)
class ClassificationRaster:
    spec: GridSpec
    classes: np.ndarray  # uint8 PointClass codes, shape (height, width)

    def __post_init__(self):
        classes = np.asarray(self.classes, dtype=np.uint8).reshape(self.spec.shape)
        classes.setflags(write=False)
        object.__setattr__(self, "classes", classes)

    def __getitem__(self, rc) -> PointClass:
        return PointClass(int(self.classes[rc]))

    def counts(self) -> dict[str, int]:
        n = np.bincount(self.classes.ravel(), minlength=4)
        return {c.name: int(n[c]) for c in CLASS_ORDER}


def _classify_chunk(args):
    f, points, config = args
    return classify_points(f, points, config)


def classify_grid(f, spec: GridSpec, config: ClassifierConfig, workers: int = 1) -> ClassificationRaster:
    """Classify every pixel centre; output does not depend on ``workers``."""
    fn = as_evaluator(f)
    points = grid_points(spec)
    if workers <= 1:
        return ClassificationRaster(spec, classify_points(fn, points, config))
    chunks = np.array_split(points, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_classify_chunk, [(fn, c, config) for c in chunks]))
    return ClassificationRaster(spec, np.concatenate(parts))


def classify_pair(pair: CommutingPair, spec: GridSpec, config: ClassifierConfig, workers: int = 1):
    """Rasters for f (budget N*p) and g = a f^p + b (budget N)."""
    rf = classify_grid(pair.f_function, spec, config.with_budget(config.max_iter * pair.p), workers)
    rg = classify_grid(pair.g_function, spec, config, workers)
    return rf, rg


@dataclass
class AgreementReport:
    confusion: np.ndarray  # 4x4, rows f-class, cols g-class
    decided_agreement_rate: float
    undecided_fraction_f: float
    undecided_fraction_g: float

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "classes": [c.name for c in CLASS_ORDER],
            "confusion": self.confusion.astype(int).tolist(),
            "decided_agreement_rate": round(self.decided_agreement_rate, 6),
            "undecided_fraction_f": round(self.undecided_fraction_f, 6),
            "undecided_fraction_g": round(self.undecided_fraction_g, 6),
        }


def compare_rasters(rf: ClassificationRaster, rg: ClassificationRaster) -> AgreementReport:
    if rf.spec != rg.spec:
        raise ValueError("rasters cover different grids")
    cf = rf.classes.ravel().astype(np.int64)
    cg = rg.classes.ravel().astype(np.int64)
    confusion = np.bincount(cf * 4 + cg, minlength=16).reshape(4, 4)
    decided = confusion[:3, :3]
    n_decided = decided.sum()
    rate = float(np.trace(decided) / n_decided) if n_decided else 1.0
    total = cf.size
    und = PointClass.Undecided
    return AgreementReport(
        confusion,
        rate,
        float(np.count_nonzero(cf == und) / total),
        float(np.count_nonzero(cg == und) / total),
    )


def _shifted(mask: np.ndarray, dr: int, dc: int) -> np.ndarray:
    # value of the neighbour at (r+dr, c+dc), False outside the grid
    out = np.zeros_like(mask)
    h, w = mask.shape
    out[max(0, -dr):h - max(0, dr), max(0, -dc):w - max(0, dc)] = mask[
        max(0, dr):h - max(0, -dr), max(0, dc):w - max(0, -dc)
    ]
    return out


_NEIGHBOURHOOD = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)]


def extract_boundary(raster: ClassificationRaster) -> np.ndarray:
    """Pixels whose 4-neighbourhood (itself included) holds both an Escaping
    pixel and a decided non-Escaping pixel."""
    c = raster.classes
    esc = c == PointClass.Escaping
    other = (c == PointClass.Bounded) | (c == PointClass.Bungee)
    near_esc = np.zeros_like(esc)
    near_other = np.zeros_like(esc)
    for dr, dc in _NEIGHBOURHOOD:
        near_esc |= _shifted(esc, dr, dc)
        near_other |= _shifted(other, dr, dc)
    return near_esc & near_other


def dilate(mask: np.ndarray, radius: int = 1) -> np.ndarray:
    """Chebyshev (square) dilation by ``radius`` pixels."""
    out = np.zeros_like(mask, dtype=bool)
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            out |= _shifted(mask.astype(bool), dr, dc)
    return out


def jaccard(m1: np.ndarray, m2: np.ndarray) -> float:
    union = np.count_nonzero(m1 | m2)
    if union == 0:
        return 1.0
    return np.count_nonzero(m1 & m2) / union


def decided_disagreements(rf: ClassificationRaster, rg: ClassificationRaster) -> np.ndarray:
    und = PointClass.Undecided
    return (rf.classes != rg.classes) & (rf.classes != und) & (rg.classes != und)


def disagreements_near_boundary(rf: ClassificationRaster, rg: ClassificationRaster, radius: int = 1) -> bool:
    """True if every decided disagreement is within ``radius`` pixels of the
    escape boundary of either raster."""
    near = dilate(extract_boundary(rf) | extract_boundary(rg), radius)
    return not np.any(decided_disagreements(rf, rg) & ~near)


def raster_rgb(raster: ClassificationRaster) -> np.ndarray:
    lut = np.array([PALETTE[c] for c in CLASS_ORDER], dtype=np.uint8)
    return lut[raster.classes]


def _write_p6(rgb: np.ndarray, path) -> None:
    h, w, _ = rgb.shape
    data = f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def write_ppm(raster: ClassificationRaster, path) -> None:
    _write_p6(raster_rgb(raster), path)


def write_mask_ppm(mask: np.ndarray, path) -> None:
    """Boundary mask as a black-on-white P6 image."""
    rgb = np.where(np.asarray(mask, dtype=bool)[..., None], 0, 255).astype(np.uint8)
    _write_p6(np.repeat(rgb, 3, axis=2), path)


def write_report_json(report: AgreementReport, path, **extra) -> None:
    doc = report.to_dict()
    doc.update(extra)
    try:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
