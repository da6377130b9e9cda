"""Correspondence between the two semantics, framing, and the refinement oracle."""

from cogc.refine.correspondence import (
    CorrReport,
    CorrViolation,
    PtrSets,
    Relation,
    corr_env,
    corr_value,
    value_typing_u,
    value_typing_v,
)
from cogc.refine.frame import FrameRule, FrameViolation, frame_check
from cogc.refine.oracle import (
    Obligation,
    OracleFailure,
    OracleVerdict,
    oracle_from_json,
    refinement_oracle,
    run_samples,
)

__all__ = [
    "CorrReport",
    "CorrViolation",
    "FrameRule",
    "FrameViolation",
    "Obligation",
    "OracleFailure",
    "OracleVerdict",
    "PtrSets",
    "Relation",
    "corr_env",
    "corr_value",
    "frame_check",
    "oracle_from_json",
    "refinement_oracle",
    "run_samples",
    "value_typing_u",
    "value_typing_v",
]
