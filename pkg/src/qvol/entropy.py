"""Rényi, Tsallis and von Neumann entropies and their conditional forms.

All functions act on spectra along the last axis, so a single call can process
one spectrum or a whole block of samples.  Natural logarithms throughout.

Power sums are evaluated in log space, ``ln w_q = q ln p_max + ln sum (p/p_max)^q``,
which keeps large q (and q = inf) free of underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .linalg import Subsystem, eigvalsh, make_spectrum, partial_trace

Kind = Literal["tsallis", "renyi", "von_neumann"]
KINDS = ("tsallis", "renyi", "von_neumann")

# |q - 1| below this switches to the von Neumann branch
Q1_BAND = 1e-6


@dataclass(frozen=True)
class EntropyParams:
    q: float
    kind: Kind = "tsallis"

    def __post_init__(self):
        q = float(self.q)
        object.__setattr__(self, "q", q)
        if math.isnan(q) or q < 1:
            raise ValueError(f"entropic index must satisfy q >= 1, got {self.q}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown entropy kind {self.kind!r}")
        if self.kind == "von_neumann" and q != 1:
            raise ValueError("von_neumann entropy requires q = 1")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.q)

    @property
    def near_one(self) -> bool:
        return abs(self.q - 1) < Q1_BAND

    @classmethod
    def parse(cls, text: str, kind: Kind = "tsallis") -> "EntropyParams":
        text = text.strip().lower()
        q = math.inf if text in ("inf", "infinity", "∞") else float(text)
        return cls(q, kind)

    def label(self) -> str:
        return format_q(self.q)


def format_q(q: float) -> str:
    return "inf" if math.isinf(q) else f"{q:.17g}"


def _as_params(q, kind: Kind = "tsallis") -> EntropyParams:
    return q if isinstance(q, EntropyParams) else EntropyParams(q, kind)


def log_omega_q(s, q: float) -> np.ndarray:
    """``ln sum_i p_i^q`` over the last axis; zero entries contribute nothing."""
    s = np.asarray(s, dtype=float)
    pmax = s.max(axis=-1, keepdims=True)
    with np.errstate(divide="ignore"):
        logs = np.log(s) - np.log(pmax)
        terms = np.where(s > 0, np.exp(q * logs), 0.0)
    return q * np.log(pmax[..., 0]) + np.log(terms.sum(axis=-1))


def omega_q(s, q: float) -> np.ndarray | float:
    """Power sum ``sum_i p_i^q`` of a probability spectrum (q >= 1)."""
    out = np.exp(log_omega_q(s, q))
    return float(out) if np.ndim(out) == 0 else out


def von_neumann_entropy(s) -> np.ndarray | float:
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(s > 0, s * np.log(np.where(s > 0, s, 1.0)), 0.0)
    out = -plogp.sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def tsallis_entropy(s, q) -> np.ndarray | float:
    """``(1 - w_q) / (q - 1)``; von Neumann at q = 1, zero at q = inf."""
    p = _as_params(q, "tsallis")
    if p.near_one:
        return von_neumann_entropy(s)
    if p.is_infinite:
        out = np.zeros(np.shape(s)[:-1])
    else:
        out = -np.expm1(log_omega_q(s, p.q)) / (p.q - 1)
    return float(out) if np.ndim(out) == 0 else out


def renyi_entropy(s, q) -> np.ndarray | float:
    """``ln(w_q) / (1 - q)``; von Neumann at q = 1, ``-ln p_max`` at q = inf."""
    p = _as_params(q, "renyi")
    if p.near_one:
        return von_neumann_entropy(s)
    s = np.asarray(s, dtype=float)
    if p.is_infinite:
        out = -np.log(s.max(axis=-1))
    else:
        out = log_omega_q(s, p.q) / (1 - p.q)
    return float(out) if np.ndim(out) == 0 else out


def entropy(s, params: EntropyParams):
    if params.kind == "renyi":
        return renyi_entropy(s, params)
    return tsallis_entropy(s, params)


def conditional_from_spectra(joint, conditioning, params: EntropyParams):
    """Conditional q-entropy from the joint and conditioning-subsystem spectra.

    Tsallis:  ``(S(AB) - S(C)) / w_q(C)``, evaluated as ``(1 - w_q(AB)/w_q(C)) / (q - 1)``.
    Rényi:    ``S(AB) - S(C)``.
    q -> 1:   von Neumann difference for either kind.
    q = inf:  ``ln(lmax(C) / lmax(AB))`` for either kind; it carries the sign of
              both families in the limit and stays finite.
    """
    joint = np.asarray(joint, dtype=float)
    conditioning = np.asarray(conditioning, dtype=float)
    if params.near_one:
        out = von_neumann_entropy(joint) - von_neumann_entropy(conditioning)
    elif params.is_infinite:
        out = np.log(conditioning.max(axis=-1)) - np.log(joint.max(axis=-1))
    else:
        d = log_omega_q(joint, params.q) - log_omega_q(conditioning, params.q)
        if params.kind == "renyi":
            out = d / (1 - params.q)
        else:
            with np.errstate(over="ignore"):
                out = -np.expm1(d) / (params.q - 1)
    return float(out) if np.ndim(out) == 0 else out


def tsallis_conditional_limit(joint, conditioning, slack: float = 1e-12):
    """Exact q -> inf limit of the Tsallis conditional entropy.

    Zero when ``lmax(AB) <= lmax(C)`` (the ratio of power sums vanishes or stays
    bounded), ``-inf`` otherwise (the ratio grows geometrically in q).
    """
    jm = np.asarray(joint).max(axis=-1)
    cm = np.asarray(conditioning).max(axis=-1)
    out = np.where(jm > cm + slack, -np.inf, 0.0)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# state-level API

@dataclass(frozen=True)
class ConditionalEntropyValue:
    value: float
    conditioned_on: Subsystem
    params: EntropyParams


def reduced_spectrum(rho, keep: Subsystem) -> np.ndarray:
    """Clamped descending spectrum of the reduced state on ``keep``."""
    return make_spectrum(eigvalsh(partial_trace(rho.matrix, rho.dims, keep)))


def conditional_entropy(rho, conditioning: Subsystem, params: EntropyParams) -> ConditionalEntropyValue:
    """Conditional entropy of ``rho`` given subsystem ``conditioning``.

    ``conditioning="B"`` gives S(A|B) (uses rho_B); ``"A"`` gives S(B|A).
    """
    value = conditional_from_spectra(rho.spectrum, reduced_spectrum(rho, conditioning), params)
    return ConditionalEntropyValue(float(value), conditioning, params)
