"""Monte Carlo volume estimates over sampled ensembles.

A survey draws ``samples`` states for one (dims, rank) point and counts, for
each (predicate, q) pair, how many satisfy the predicate.  Work is split into
contiguous ``sample_index`` ranges; partial tallies are merged by integer
addition, so results do not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import criteria
from .criteria import Conditioning, QGrid
from .entropy import EntropyParams, format_q
from .errors import OverlappingRanges, UnknownPreset
from .linalg import BipartiteDims
from .sampling import Features, sample_features

log = logging.getLogger(__name__)

Q_PREDICATES = ("entropic_positive", "ppt_agreement")
PLAIN_PREDICATES = ("ppt", "majorization", "monotonic_tsallis", "monotonic_renyi")
PREDICATES = Q_PREDICATES + PLAIN_PREDICATES

CHUNK = 2048


def default_workers() -> int:
    env = os.environ.get("QVOL_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SurveyConfig:
    dims: BipartiteDims
    rank: int | None = None
    samples: int = 100_000
    seed: int = 0
    q_list: tuple[float, ...] = ()
    predicates: tuple[str, ...] = ("entropic_positive",)
    workers: int = 1
    experiment: str = "custom"
    grid: QGrid = field(default_factory=QGrid.default)
    conditioning: Conditioning = "A"

    def __post_init__(self):
        rank = self.dims.n if self.rank is None else int(self.rank)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "q_list", tuple(EntropyParams(q).q for q in self.q_list))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        if not 1 <= rank <= self.dims.n:
            raise ValueError(f"rank {rank} outside [1, {self.dims.n}]")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.predicates:
            raise ValueError("at least one predicate is required")
        unknown = set(self.predicates) - set(PREDICATES)
        if unknown:
            raise ValueError(f"unknown predicates {sorted(unknown)}; choose from {PREDICATES}")
        if any(p in Q_PREDICATES for p in self.predicates) and not self.q_list:
            raise ValueError("q-dependent predicates need a non-empty q_list")
        if self.conditioning not in ("A", "B", "both"):
            raise ValueError(f"bad conditioning {self.conditioning!r}")

    def keys(self) -> list[tuple[str, float | None]]:
        out = []
        for p in self.predicates:
            if p in Q_PREDICATES:
                out.extend((p, q) for q in self.q_list)
            else:
                out.append((p, None))
        return out

    @property
    def needs_pt(self) -> bool:
        return any(p in ("ppt", "ppt_agreement") for p in self.predicates)

    def snapshot(self) -> dict:
        return {
            "experiment": self.experiment,
            "dims": str(self.dims),
            "rank": self.rank,
            "samples": self.samples,
            "seed": self.seed,
            "q_list": [format_q(q) for q in self.q_list],
            "predicates": list(self.predicates),
            "workers": self.workers,
            "grid": {"points": list(self.grid.points), "include_inf": self.grid.include_inf,
                     "tolerance": self.grid.tolerance},
            "conditioning": self.conditioning,
        }


@dataclass(frozen=True)
class Tally:
    """Hit count for one (predicate, q) over sample indices ``[start, stop)``."""

    predicate: str
    q: float | None
    hits: int
    start: int
    stop: int

    @property
    def samples(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class VolumeEstimate:
    predicate: str
    q: float | None
    hits: int
    samples: int

    def __post_init__(self):
        if not 0 <= self.hits <= self.samples or self.samples < 1:
            raise ValueError(f"invalid tally {self.hits}/{self.samples}")

    @property
    def fraction(self) -> float:
        return self.hits / self.samples

    @property
    def stderr(self) -> float:
        """Binomial standard error; the rule-of-three bound 3/M at fraction 0 or 1."""
        if self.hits in (0, self.samples):
            return 3.0 / self.samples
        f = self.fraction
        return math.sqrt(f * (1 - f) / self.samples)


def evaluate_features(feat: Features, config: SurveyConfig) -> dict[tuple[str, float | None], np.ndarray]:
    """Per-sample boolean outcome for every (predicate, q) key of ``config``."""
    j, a, b, pt = feat.joint, feat.reduced_a, feat.reduced_b, feat.pt_min
    out: dict[tuple[str, float | None], np.ndarray] = {}
    positive: dict[float, np.ndarray] = {}

    def pos(q):
        if q not in positive:
            positive[q] = criteria.entropic_positive_batch(j, a, b, q)
        return positive[q]

    for pred, q in config.keys():
        if pred == "entropic_positive":
            out[pred, q] = pos(q)
        elif pred == "ppt_agreement":
            out[pred, q] = pos(q) == criteria.ppt_batch(pt)
        elif pred == "ppt":
            out[pred, q] = criteria.ppt_batch(pt)
        elif pred == "majorization":
            out[pred, q] = criteria.majorization_batch(j, a, b)
        else:
            kind = pred.split("_", 1)[1]
            out[pred, q] = criteria.monotone_scan_batch(j, a, b, kind, config.grid, config.conditioning)
    return out


def tally_range(config: SurveyConfig, start: int, stop: int, chunk: int = CHUNK) -> list[Tally]:
    """Tallies for sample indices ``[start, stop)``, processed in chunks."""
    hits = {k: 0 for k in config.keys()}
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        feat = sample_features(config.dims, config.rank, config.seed, lo, hi, want_pt=config.needs_pt)
        for k, mask in evaluate_features(feat, config).items():
            hits[k] += int(np.count_nonzero(mask))
    return [Tally(p, q, h, start, stop) for (p, q), h in hits.items()]


def aggregate(partials: list[Tally]) -> VolumeEstimate:
    """Merge tallies of one (predicate, q) from disjoint index ranges."""
    if not partials:
        raise ValueError("nothing to aggregate")
    keys = {(t.predicate, t.q) for t in partials}
    if len(keys) != 1:
        raise ValueError(f"tallies for different keys: {sorted(keys, key=str)}")
    ranges = sorted((t.start, t.stop) for t in partials)
    for (_, e0), (s1, _) in zip(ranges, ranges[1:]):
        if s1 < e0:
            raise OverlappingRanges(f"sample ranges overlap at index {s1}")
    t0 = partials[0]
    return VolumeEstimate(t0.predicate, t0.q, sum(t.hits for t in partials),
                          sum(t.samples for t in partials))


def split_ranges(samples: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, samples))
    edges = [samples * k // parts for k in range(parts + 1)]
    return [(edges[k], edges[k + 1]) for k in range(parts)]


def run_survey(config: SurveyConfig) -> list[VolumeEstimate]:
    """One `VolumeEstimate` per (predicate, q) key, in ``config.keys()`` order."""
    ranges = split_ranges(config.samples, config.workers)
    log.info("survey %s %s rank=%d samples=%d workers=%d", config.experiment, config.dims,
             config.rank, config.samples, len(ranges))
    if len(ranges) == 1:
        partials = [tally_range(config, *ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            partials = list(pool.map(lambda r: tally_range(config, *r), ranges))
    return [aggregate([p[i] for p in partials]) for i in range(len(config.keys()))]


def _sample_key(c: SurveyConfig):
    return (c.dims, c.rank, c.samples, c.seed, c.grid, c.conditioning)


def run_many(configs: list[SurveyConfig]) -> list[list[VolumeEstimate]]:
    """Run several configs, sharing one sample set among configs that only
    differ in predicates or q values.  Results match running each separately."""
    groups: dict[tuple, list[int]] = {}
    for i, c in enumerate(configs):
        groups.setdefault(_sample_key(c), []).append(i)
    results: list[list[VolumeEstimate] | None] = [None] * len(configs)
    for members in groups.values():
        first = configs[members[0]]
        preds = tuple(dict.fromkeys(p for i in members for p in configs[i].predicates))
        qs = tuple(dict.fromkeys(q for i in members for q in configs[i].q_list))
        merged = replace(first, predicates=preds, q_list=qs,
                         workers=max(configs[i].workers for i in members))
        table = {(e.predicate, e.q): e for e in run_survey(merged)}
        for i in members:
            results[i] = [table[k] for k in configs[i].keys()]
    return results  # type: ignore[return-value]


# --------------------------------------------------------------------------
# presets

POSITIVITY_Q = (2.0, 4.0, 8.0, 16.0, math.inf)
SWEEP_Q = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0, math.inf)
AGREEMENT_Q = (2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, math.inf)

TABLE1_ROWS = ((2, 2, (4, 3, 2)), (2, 3, (6, 5, 4, 3, 2)))


def _dim_sweep(n1: int | None) -> list[BipartiteDims]:
    dims = [BipartiteDims(2, n2) for n2 in range(2, 11)] + [BipartiteDims(3, n2) for n2 in range(3, 8)]
    return [d for d in dims if n1 is None or d.n1 == n1]


def preset(name: str, overrides: dict | None = None) -> list[SurveyConfig]:
    """Config sweep for a named experiment.

    Recognised overrides: ``samples``, ``seed``, ``workers``, ``grid``,
    ``conditioning`` (passed to every config), ``n1`` (dimension sweeps) and
    ``d`` (ppt_agreement: restrict to D x D).
    """
    ov = dict(overrides or {})
    n1 = ov.pop("n1", None)
    d = ov.pop("d", None)
    common = {k: v for k, v in ov.items() if v is not None}
    unknown = set(common) - {"samples", "seed", "workers", "grid", "conditioning"}
    if unknown:
        raise ValueError(f"unknown overrides {sorted(unknown)}")

    if name == "table1":
        return [SurveyConfig(BipartiteDims(a, b), rank=r, predicates=(f"monotonic_{kind}",),
                             experiment=name, **common)
                for a, b, ranks in TABLE1_ROWS for r in ranks for kind in ("tsallis", "renyi")]
    if name == "positivity_vs_dim":
        return [SurveyConfig(dm, q_list=POSITIVITY_Q, predicates=("entropic_positive",),
                             experiment=name, **common) for dm in _dim_sweep(n1)]
    if name == "positivity_vs_q":
        return [SurveyConfig(dm, q_list=SWEEP_Q, predicates=("entropic_positive",),
                             experiment=name, **common) for dm in _dim_sweep(n1)]
    if name == "ppt_agreement":
        sizes = (3, 4) if d is None else (int(d),)
        return [SurveyConfig(BipartiteDims(k, k), q_list=AGREEMENT_Q,
                             predicates=("ppt_agreement", "ppt"), experiment=name, **common)
                for k in sizes]
    if name == "majorization_volumes":
        return [SurveyConfig(dm, q_list=(math.inf,), predicates=("majorization", "entropic_positive"),
                             experiment=name, **common) for dm in _dim_sweep(n1)]
    raise UnknownPreset(name)


PRESETS = ("table1", "positivity_vs_dim", "positivity_vs_q", "ppt_agreement", "majorization_volumes")
