"""Monte Carlo survey of conditional q-entropies and separability criteria
for random bipartite quantum states."""

__version__ = "0.1.0"

from .criteria import (
    CriterionVerdict,
    QGrid,
    entropic_inequalities_hold,
    majorization_holds,
    monotonicity_scan,
    ppt_agreement,
    ppt_holds,
)
from .entropy import (
    EntropyParams,
    conditional_entropy,
    omega_q,
    renyi_entropy,
    tsallis_entropy,
    von_neumann_entropy,
)
from .linalg import BipartiteDims, eigh, partial_trace, partial_transpose, qr_unitary
from .sampling import DensityMatrix, SampleSpec, rng_stream, sample_haar_unitary, sample_simplex, sample_state
from .survey import SurveyConfig, VolumeEstimate, aggregate, preset, run_survey

__all__ = [
    "BipartiteDims", "CriterionVerdict", "DensityMatrix", "EntropyParams", "QGrid", "SampleSpec",
    "SurveyConfig", "VolumeEstimate", "aggregate", "conditional_entropy", "eigh",
    "entropic_inequalities_hold", "majorization_holds", "monotonicity_scan", "omega_q",
    "partial_trace", "partial_transpose", "ppt_agreement", "ppt_holds", "preset", "qr_unitary",
    "renyi_entropy", "rng_stream", "run_survey", "sample_haar_unitary", "sample_simplex",
    "sample_state", "tsallis_entropy", "von_neumann_entropy",
]
