"""Exact workbench for half-derivation spaces and transposed Poisson products."""

from .core import (
    BasisIndex,
    Element,
    Family,
    ParseError,
    Scalar,
    as_scalar,
    bidx,
    element_combine,
    parse_element,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "Element",
    "Family",
    "ParseError",
    "Scalar",
    "as_scalar",
    "bidx",
    "element_combine",
    "parse_element",
    "render",
    "__version__",
]
