"""Fock-state entanglement and majorization toolkit."""

from ._core import (
    GmoeError,
    apply_channel,
    auto_truncation,
    bs_attenuate,
    build_D,
    build_R,
    crossing,
    decompose,
    majorizes,
    minimize_entropy,
    output_entanglement,
    povm_reduce,
    random_scan,
    schmidt_coefficient,
    schmidt_vector,
    tmsv_entropy,
)

__all__ = [
    "GmoeError",
    "apply_channel",
    "auto_truncation",
    "bs_attenuate",
    "build_D",
    "build_R",
    "crossing",
    "decompose",
    "majorizes",
    "minimize_entropy",
    "output_entanglement",
    "povm_reduce",
    "random_scan",
    "schmidt_coefficient",
    "schmidt_vector",
    "tmsv_entropy",
]
