"""Inverse design of blade sections with transversal-velocity splines."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    assembly,
    config,
    errors,
    geometry,
    harmonic,
    inverse,
    pipeline,
    planefield,
    positioning,
    svgplot,
)
