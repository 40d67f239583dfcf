"""Unitary-group integrals over general complex matrices.

Closed forms (:mod:`ugi.integrals`) are checked against two independent
oracles (:mod:`ugi.oracles`): Haar Monte Carlo and truncated character
expansions built on :mod:`ugi.characters`.
"""
from .errors import InputError, NumericalError, UGIError
from .integrals import IntegralResult, eval_i1, eval_i2, eval_i2_rect, eval_i3
from .oracles import (
    MCEstimate,
    SeriesEstimate,
    mc_i1,
    mc_i2,
    mc_i2_rect_det,
    mc_i3,
    sample_haar,
    series_i1,
    series_i2,
)

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "NumericalError",
    "UGIError",
    "IntegralResult",
    "eval_i1",
    "eval_i2",
    "eval_i2_rect",
    "eval_i3",
    "MCEstimate",
    "SeriesEstimate",
    "mc_i1",
    "mc_i2",
    "mc_i2_rect_det",
    "mc_i3",
    "sample_haar",
    "series_i1",
    "series_i2",
]
