"""Bounded semi-formal property checking over recorded waveforms."""

from ._core import (
    __version__,
    design_info,
    policies,
    prep_verilog,
    run_check,
)

__all__ = [
    "__version__",
    "design_info",
    "policies",
    "prep_verilog",
    "run_check",
]
