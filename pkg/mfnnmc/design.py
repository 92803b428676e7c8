"""Training designs, Monte Carlo draws and input scaling.

DESIGNS:
- 1D: M equispaced points including both endpoints; every 4th point
  (indices 0, 4, 8, ...) forms Y_I, the rest Y_II.
- 2D: n1 × n2 tensor grid; a point joins Y_I iff both grid indices are even.
Both rules put roughly a quarter of the points in Y_I (r = M_1/M ≈ 0.25).

RANDOM STREAMS:
All randomness uses numpy's counter-based Philox generator. A campaign's
master seed is expanded into per-phase sub-seeds by fixed offsets
(``derive_seed``), so design, network initialization, shuffles, pilot and
MC draws are independent streams and reproducible on their own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import ConfigurationError, InputError
from .host.filesystem import ensure_dir

logger = logging.getLogger(__name__)

RATIO_BOUNDS = (0.2, 0.3)

PHASE_STRIDE = 16
PHASE_OFFSETS = {
    "design": 0,
    "nn1_init": 1,
    "nn1_shuffle": 2,
    "nn2_init": 3,
    "nn2_shuffle": 4,
    "pilot": 5,
    "mc": 6,
    "calibration": 7,
}


def derive_seed(master_seed: int, phase: str) -> int:
    """Sub-seed of a campaign phase: master · 16 + fixed phase offset."""
    try:
        return int(master_seed) * PHASE_STRIDE + PHASE_OFFSETS[phase]
    except KeyError as e:
        raise InputError(f"Unknown seed phase: {phase!r}", {"known": sorted(PHASE_OFFSETS)}) from e


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def as_domain(domain) -> np.ndarray:
    """Normalize bounds to a (d, 2) float array with lo < hi per row."""
    d = np.asarray(domain, dtype=np.float64)
    if d.ndim == 1:
        d = d.reshape(1, 2)
    if d.ndim != 2 or d.shape[1] != 2 or np.any(d[:, 0] >= d[:, 1]):
        raise InputError("Domain must be [lo, hi] pairs with lo < hi", {"domain": d.tolist()})
    return d


@dataclass(frozen=True)
class ScalingTransform:
    """Per-dimension affine map z = (y - offset) / scale onto the unit cube."""

    offset: np.ndarray
    scale: np.ndarray

    @classmethod
    def from_domain(cls, domain) -> "ScalingTransform":
        d = as_domain(domain)
        return cls(offset=d[:, 0].copy(), scale=(d[:, 1] - d[:, 0]).copy())

    @classmethod
    def from_values(cls, values: np.ndarray) -> "ScalingTransform":
        """Min/max standardization of sample values (columns), unit scale if constant."""
        v = np.asarray(values, dtype=np.float64).reshape(len(values), -1)
        lo, hi = v.min(axis=0), v.max(axis=0)
        scale = np.where(hi > lo, hi - lo, 1.0)
        return cls(offset=lo, scale=scale)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - self.offset) / self.scale

    def inverse(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) * self.scale + self.offset

    def to_dict(self) -> dict:
        return {"offset": self.offset.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ScalingTransform":
        return cls(offset=np.asarray(data["offset"], dtype=np.float64),
                   scale=np.asarray(data["scale"], dtype=np.float64))


def apply_scaling(t: ScalingTransform, point) -> np.ndarray:
    """Map a point (or (n, d) points) into the unit cube."""
    return t.apply(point)


@dataclass(frozen=True)
class SampleDesign:
    """Disjoint training sets Y_I (paired LF/HF) and Y_II (LF only).

    Attributes:
        points: (M, d) all design points, Y_I and Y_II interleaved in grid order
        in_first: (M,) boolean mask, True for points of Y_I
        domain: (d, 2) bounds
    """

    points: np.ndarray
    in_first: np.ndarray
    domain: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def m1(self) -> int:
        return int(np.count_nonzero(self.in_first))

    @property
    def m2(self) -> int:
        return self.m - self.m1

    @property
    def ratio(self) -> float:
        return self.m1 / self.m

    @property
    def y_I(self) -> np.ndarray:
        return self.points[self.in_first]

    @property
    def y_II(self) -> np.ndarray:
        return self.points[~self.in_first]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"index": np.arange(self.m)})
        for k in range(self.dim):
            frame[f"y{k + 1}"] = self.points[:, k]
        frame["set"] = np.where(self.in_first, "I", "II")
        return frame

    def to_csv(self, path: str | Path) -> Path:
        """Export as CSV with columns index, y1..yd, set ∈ {I, II}."""
        p = Path(path)
        ensure_dir(p.parent)
        self.to_frame().to_csv(p, index=False, float_format="%.17g")
        return p

    @classmethod
    def from_csv(cls, path: str | Path, domain) -> "SampleDesign":
        frame = pd.read_csv(path)
        cols = [c for c in frame.columns if c.startswith("y")]
        return cls(
            points=frame[cols].to_numpy(dtype=np.float64),
            in_first=(frame["set"].astype(str) == "I").to_numpy(),
            domain=as_domain(domain),
        )


def _check_ratio(design: SampleDesign) -> SampleDesign:
    lo, hi = RATIO_BOUNDS
    if not lo <= design.ratio <= hi:
        logger.warning(
            "design ratio M1/M = %d/%d = %.3f outside [%.1f, %.1f]",
            design.m1, design.m, design.ratio, lo, hi,
        )
    return design


def build_design_1d(m: int, domain) -> SampleDesign:
    """M equispaced points on an interval; indices 0, 4, 8, ... form Y_I.

    Raises:
        ConfigurationError: If M < 5
    """
    if m < 5:
        raise ConfigurationError(
            "1D design needs at least 5 points",
            {"errors": [{"field": "M", "error": f"got {m}, need >= 5"}]},
        )
    d = as_domain(domain)
    if d.shape[0] != 1:
        raise ConfigurationError(
            "1D design needs an interval domain",
            {"errors": [{"field": "domain", "error": f"got {d.shape[0]} dimensions"}]},
        )
    points = np.linspace(d[0, 0], d[0, 1], m).reshape(-1, 1)
    in_first = np.arange(m) % 4 == 0
    return _check_ratio(SampleDesign(points=points, in_first=in_first, domain=d))


def build_design_2d(n1: int, n2: int, domain) -> SampleDesign:
    """n1 × n2 tensor grid; points with both indices even form Y_I.

    Raises:
        ConfigurationError: If n1 < 3 or n2 < 3
    """
    if n1 < 3 or n2 < 3:
        raise ConfigurationError(
            "Degenerate 2D design grid",
            {"errors": [{"field": "grid", "error": f"got {n1} x {n2}, need >= 3 x 3"}]},
        )
    d = as_domain(domain)
    if d.shape[0] != 2:
        raise ConfigurationError(
            "2D design needs a rectangle domain",
            {"errors": [{"field": "domain", "error": f"got {d.shape[0]} dimensions"}]},
        )
    g1 = np.linspace(d[0, 0], d[0, 1], n1)
    g2 = np.linspace(d[1, 0], d[1, 1], n2)
    i1, i2 = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    i1, i2 = i1.ravel(), i2.ravel()
    points = np.column_stack([g1[i1], g2[i2]])
    in_first = (i1 % 2 == 0) & (i2 % 2 == 0)
    return _check_ratio(SampleDesign(points=points, in_first=in_first, domain=d))


def all_high_fidelity(design: SampleDesign) -> SampleDesign:
    """The same points with every point in Y_I (M_2 = 0)."""
    logger.warning("all %d design points in Y_I: NN1 is skipped, NN2 trains on solver data", design.m)
    return SampleDesign(
        points=design.points, in_first=np.ones(design.m, dtype=bool), domain=design.domain
    )


def draw_mc_samples(n: int, domain, seed: int) -> np.ndarray:
    """N i.i.d. uniform draws on the hyper-rectangle, shape (N, d)."""
    if n < 1:
        raise InputError("Number of samples must be >= 1", {"N": n})
    d = as_domain(domain)
    rng = make_rng(seed)
    return d[:, 0] + (d[:, 1] - d[:, 0]) * rng.random((int(n), d.shape[0]))
