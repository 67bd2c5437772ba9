"""opcurve: exact-arithmetic workbench for the correspondence between
commutative algebras of matrix differential operators, frames in an
infinite Grassmannian, and the algebraic curve data they encode."""

from .exactcore import (
    DEFAULT_DEPTH,
    DEFAULT_XPREC,
    DEFAULT_ZHI,
    DEFAULT_ZLO,
    DimensionError,
    DomainError,
    ExactError,
    Matrix,
    PrecisionError,
    QQ,
    XSeries,
    ZLaurent,
    char_coefficients,
)

__all__ = [
    "DEFAULT_DEPTH",
    "DEFAULT_XPREC",
    "DEFAULT_ZHI",
    "DEFAULT_ZLO",
    "DimensionError",
    "DomainError",
    "ExactError",
    "Matrix",
    "PrecisionError",
    "QQ",
    "XSeries",
    "ZLaurent",
    "char_coefficients",
]
