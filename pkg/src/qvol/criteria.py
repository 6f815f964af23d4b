"""Separability-related predicates on bipartite states.

The array functions (``*_batch``) take stacks of spectra as produced by
`qvol.sampling.sample_features` and return boolean arrays; the state-level
functions wrap them for a single `DensityMatrix`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .entropy import (
    EntropyParams,
    conditional_from_spectra,
    reduced_spectrum,
    tsallis_conditional_limit,
)
from .linalg import Subsystem, eigvalsh, partial_transpose

ENTROPY_SLACK = 1e-12
EIGEN_SLACK = 1e-10
MAJORIZATION_SLACK = 1e-10

Conditioning = Literal["A", "B", "both"]


@dataclass(frozen=True)
class QGrid:
    """Ascending finite q values, optionally closed by q = inf."""

    points: tuple[float, ...]
    include_inf: bool = True
    tolerance: float = 1e-10

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("q grid needs at least one finite point")
        if any(not math.isfinite(x) for x in pts):
            raise ValueError("finite points only; use include_inf for the terminal")
        if pts[0] < 1 or any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("q grid must be strictly ascending and >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    @classmethod
    def default(cls) -> "QGrid":
        return cls.geometric(1.001, 100.0, 60)

    @classmethod
    def geometric(cls, start: float, stop: float, count: int, include_inf: bool = True,
                  tolerance: float = 1e-10) -> "QGrid":
        return cls(tuple(np.geomspace(start, stop, count)), include_inf, tolerance)

    @classmethod
    def parse(cls, text: str) -> "QGrid":
        """``START:STOP:COUNT`` (geometric, plus inf) or ``START:STOP:COUNT:noinf``."""
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "noinf"):
            raise ValueError(f"bad q grid {text!r}; expected START:STOP:COUNT[:noinf]")
        return cls.geometric(float(parts[0]), float(parts[1]), int(parts[2]),
                             include_inf=len(parts) == 3)

    def values(self) -> tuple[float, ...]:
        return self.points + ((math.inf,) if self.include_inf else ())


# --------------------------------------------------------------------------
# batch predicates

def entropic_positive_batch(joint, reduced_a, reduced_b, q: EntropyParams | float):
    """Both conditional q-entropies non-negative (within ENTROPY_SLACK)."""
    params = q if isinstance(q, EntropyParams) else EntropyParams(q)
    s_ab = conditional_from_spectra(joint, reduced_b, params)
    s_ba = conditional_from_spectra(joint, reduced_a, params)
    return (np.asarray(s_ab) >= -ENTROPY_SLACK) & (np.asarray(s_ba) >= -ENTROPY_SLACK)


def ppt_batch(pt_min):
    return np.asarray(pt_min) >= -EIGEN_SLACK


def majorized_batch(joint, reduced):
    """``joint`` majorized by ``reduced`` zero-padded to the joint length.

    Both inputs must be descending along the last axis.
    """
    joint = np.asarray(joint, dtype=float)
    reduced = np.asarray(reduced, dtype=float)
    pad = np.zeros(joint.shape)
    pad[..., : reduced.shape[-1]] = reduced
    return np.all(np.cumsum(joint, axis=-1) <= np.cumsum(pad, axis=-1) + MAJORIZATION_SLACK, axis=-1)


def majorization_batch(joint, reduced_a, reduced_b):
    return majorized_batch(joint, reduced_a) & majorized_batch(joint, reduced_b)


def ppt_agreement_batch(joint, reduced_a, reduced_b, pt_min, q):
    return entropic_positive_batch(joint, reduced_a, reduced_b, q) == ppt_batch(pt_min)


def conditional_curve(joint, conditioning, kind: str, grid: QGrid) -> np.ndarray:
    """Conditional entropy at every grid point; shape ``(..., len(grid.values()))``.

    The q = inf column holds the exact limit of the chosen family: the lmax
    log-ratio for Rényi, and 0 or -inf for Tsallis.
    """
    cols = [conditional_from_spectra(joint, conditioning, EntropyParams(q, kind))
            for q in grid.points]
    if grid.include_inf:
        if kind == "tsallis":
            cols.append(tsallis_conditional_limit(joint, conditioning))
        else:
            cols.append(conditional_from_spectra(joint, conditioning, EntropyParams(math.inf, kind)))
    return np.stack([np.asarray(c, dtype=float) for c in cols], axis=-1)


def monotone_batch(joint, conditioning, kind: str, grid: QGrid):
    """Non-increasing along the grid up to ``grid.tolerance`` at each step."""
    v = conditional_curve(joint, conditioning, kind, grid)
    return np.all(v[..., 1:] <= v[..., :-1] + grid.tolerance, axis=-1)


def monotone_scan_batch(joint, reduced_a, reduced_b, kind: str, grid: QGrid,
                        conditioning: Conditioning = "A"):
    if conditioning == "A":
        return monotone_batch(joint, reduced_a, kind, grid)
    if conditioning == "B":
        return monotone_batch(joint, reduced_b, kind, grid)
    if conditioning == "both":
        return monotone_batch(joint, reduced_a, kind, grid) & monotone_batch(joint, reduced_b, kind, grid)
    raise ValueError(f"conditioning must be 'A', 'B' or 'both', got {conditioning!r}")


# --------------------------------------------------------------------------
# single-state API

def _spectra(rho):
    return rho.spectrum, reduced_spectrum(rho, "A"), reduced_spectrum(rho, "B")


def pt_min_eigenvalue(rho, on: Subsystem = "B") -> float:
    return float(eigvalsh(partial_transpose(rho.matrix, rho.dims, on))[-1])


def entropic_inequalities_hold(rho, q: EntropyParams | float) -> bool:
    return bool(entropic_positive_batch(*_spectra(rho), q))


def ppt_holds(rho, on: Subsystem = "B") -> bool:
    return bool(ppt_batch(pt_min_eigenvalue(rho, on)))


def majorization_holds(rho) -> bool:
    return bool(majorization_batch(*_spectra(rho)))


def ppt_agreement(rho, q: EntropyParams | float) -> bool:
    return entropic_inequalities_hold(rho, q) == ppt_holds(rho)


def monotonicity_scan(rho, conditioning: Conditioning = "A", kind: str = "tsallis",
                      grid: QGrid | None = None) -> bool:
    """True when the conditional entropy given ``conditioning`` never increases in q."""
    grid = grid or QGrid.default()
    return bool(monotone_scan_batch(*_spectra(rho), kind, grid, conditioning))


@dataclass(frozen=True)
class CriterionVerdict:
    entropic_positive_at: dict[float, bool]
    ppt: bool
    majorization: bool
    monotonic_tsallis: bool
    monotonic_renyi: bool


def evaluate(rho, q_values=(2.0, 4.0, 8.0, 16.0, math.inf), grid: QGrid | None = None,
             conditioning: Conditioning = "A") -> CriterionVerdict:
    grid = grid or QGrid.default()
    joint, ra, rb = _spectra(rho)
    return CriterionVerdict(
        entropic_positive_at={float(q): bool(entropic_positive_batch(joint, ra, rb, q)) for q in q_values},
        ppt=ppt_holds(rho),
        majorization=bool(majorization_batch(joint, ra, rb)),
        monotonic_tsallis=bool(monotone_scan_batch(joint, ra, rb, "tsallis", grid, conditioning)),
        monotonic_renyi=bool(monotone_scan_batch(joint, ra, rb, "renyi", grid, conditioning)),
    )
