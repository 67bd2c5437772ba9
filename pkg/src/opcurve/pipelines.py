"""End-to-end chains between frames, algebras, and operator families.

Forward: a frame in the big cell plus a stabilizing algebra of
constant-coefficient matrices dresses into a family of commuting
differential operators.  Backward: a commuting family containing a
monic operator dresses that operator to a constant power of D, reads
the whole family off as constant-coefficient matrices, and reports the
curve data of the algebra they generate together with the frame the
dressing carries.

The backward normalization fixes every integration constant to zero, so
recursion results are canonical; a monic operator whose subleading
coefficient does not vanish has no dressing of this normalized shape
and is rejected rather than silently renormalized.
"""

from __future__ import annotations

from fractions import Fraction

from .exactcore import (
    DEFAULT_DEPTH,
    DEFAULT_XPREC,
    DomainError,
    Matrix,
    PrecisionError,
    XSeries,
    ZLaurent,
)
from .psidocalc import (
    MatrixPsiDO,
    binom,
    commutator,
    invert_dressing,
    order_and_monicity,
)
from .sato import (
    GrassPoint,
    dressing_from_point,
    point_from_dressing,
    points_equal,
    stabilizes,
)
from .curvedata import (
    AlgebraSpec,
    charpoly_string,
    condition_report,
    is_cyclic,
    matrix_order,
    semigroup_report,
    spectral_charpoly,
)

__all__ = [
    "BackwardResult",
    "ForwardResult",
    "VerifyReport",
    "dress_to_constant",
    "geometric_to_operators",
    "operators_to_geometric",
    "round_trip",
    "verify_commutative",
]


class VerifyReport:
    """Pairwise commutativity of an operator family, with witnesses."""

    __slots__ = ("ok", "witnesses")

    def __init__(self, ok, witnesses):
        self.ok = ok
        self.witnesses = witnesses

    def as_dict(self):
        return {
            "ok": self.ok,
            "witnesses": [{"left": i, "right": j, "commutator": repr(c)}
                          for i, j, c in self.witnesses],
        }

    def __repr__(self):
        return f"VerifyReport(ok={self.ok}, witnesses={len(self.witnesses)})"


def verify_commutative(ops) -> VerifyReport:
    ops = list(ops)
    witnesses = []
    for i, p in enumerate(ops):
        for j in range(i + 1, len(ops)):
            c = commutator(p, ops[j])
            if not c.is_zero():
                witnesses.append((i, j, c))
    return VerifyReport(not witnesses, witnesses)


def dress_to_constant(p: MatrixPsiDO, depth=None) -> MatrixPsiDO:
    """Dressing S with P o S = S o D^r for a monic differential P.

    Solved degree by degree: comparing the coefficient of D^(r-k) forces
    r * s_(k-1)' to equal minus the lower-order data, and integration
    with zero constant makes the answer canonical.  The first comparison
    forces the subleading coefficient of P to vanish; operators that
    fail this carry no dressing of the normalized shape.
    """
    r, monic = order_and_monicity(p)
    if not monic:
        raise DomainError("dressing to a constant power needs an identity "
                          "leading coefficient")
    if r < 1 or not p.is_differential_shape():
        raise DomainError("dressing to a constant power needs a "
                          "differential operator of positive order")
    n = p.n
    if p.lo is not None and p.lo > 0:
        raise PrecisionError("coefficients below the order window are "
                             "unknown, cannot dress")
    if depth is None:
        depth = DEFAULT_DEPTH
    if not p.coeff(r - 1).is_zero():
        raise DomainError("subleading coefficient must vanish for the "
                          "normalized dressing")
    if p.exact and p == MatrixPsiDO.d(r, n):
        return MatrixPsiDO.identity(n)
    zero = Matrix.filled(n, XSeries.zero())
    s = [Matrix.identity(n, XSeries.one())]
    for k in range(2, depth + 2):
        rhs = zero
        for j in range(2, k + 1):
            b = binom(r, j)
            d = k - j
            if b == 0 or d < 0 or d >= len(s):
                continue
            rhs = rhs + _ftimes(_derivative_iter(s[d], j), b)
        for m in range(0, r - 1):
            pm = p.coeff(m)
            if _matrix_exact_zero(pm):
                continue
            for j in range(0, k - r + m + 1):
                b = binom(m, j)
                d = k - r + m - j
                if b == 0 or d < 0 or d >= len(s):
                    continue
                rhs = rhs + _ftimes(pm * _derivative_iter(s[d], j), b)
        s.append(rhs.map(lambda e: e.scale(-1).integral().scale(
            Fraction(1, r))))
    terms = {0: s[0]}
    for d in range(1, len(s)):
        terms[-d] = s[d]
    return MatrixPsiDO(n, terms, -depth)


def _ftimes(mat: Matrix, c) -> Matrix:
    return mat.map(lambda e: e.scale(c))


def _derivative_iter(mat: Matrix, j: int) -> Matrix:
    for _ in range(j):
        mat = mat.map(lambda e: e.derivative())
    return mat


def _matrix_exact_zero(mat: Matrix) -> bool:
    return all(e.exact and e.is_zero() for row in mat.rows for e in row)


class ForwardResult:
    """Operators dressed from a frame and its stabilizing algebra."""

    __slots__ = ("point", "spec", "dressing", "inverse", "operators",
                 "differential", "commuting")

    def __init__(self, point, spec, dressing, inverse, operators,
                 differential, commuting):
        self.point = point
        self.spec = spec
        self.dressing = dressing
        self.inverse = inverse
        self.operators = operators
        self.differential = differential
        self.commuting = commuting

    def __repr__(self):
        return (f"ForwardResult(operators={len(self.operators)}, "
                f"differential={self.differential}, "
                f"commuting={self.commuting})")


def geometric_to_operators(point: GrassPoint, spec: AlgebraSpec,
                           depth=None, nx=None, window=None) -> ForwardResult:
    """Dress a stabilizing algebra into commuting differential operators.

    The frame must lie in the big cell and every generator must map the
    frame span into itself; both are checked before solving for the
    dressing of the given depth and coefficient degree.
    """
    if depth is None:
        depth = DEFAULT_DEPTH
    if nx is None:
        nx = DEFAULT_XPREC
    if window is None:
        window = DEFAULT_DEPTH
    if spec.n != point.n:
        raise DomainError("algebra size does not match the frame")
    rep = point.fredholm_report()
    if (rep.h0, rep.h1) != (0, 0):
        raise DomainError("frame is not in the big cell, no dressing "
                          "exists")
    gens = spec.matrices()
    for i, g in enumerate(gens):
        if not stabilizes(point, g):
            raise DomainError(f"generator {i} does not map the frame span "
                              "into itself")
    s = dressing_from_point(point, depth=depth, nx=nx)
    t = invert_dressing(s, depth=window)
    operators = [s * MatrixPsiDO.from_laurent(g) * t for g in gens]
    differential = [op.split()[1].is_zero() for op in operators]
    commuting = verify_commutative(operators).ok
    return ForwardResult(point, spec, s, t, operators, differential,
                         commuting)


class BackwardResult:
    """Curve data recovered from a commuting family of operators."""

    __slots__ = ("dressing", "inverse", "constants", "spec", "semigroup",
                 "condition", "charpoly", "charpoly_str", "point",
                 "fredholm", "monic_index")

    def __init__(self, dressing, inverse, constants, spec, semigroup,
                 condition, charpoly, charpoly_str, point, fredholm,
                 monic_index):
        self.dressing = dressing
        self.inverse = inverse
        self.constants = constants
        self.spec = spec
        self.semigroup = semigroup
        self.condition = condition
        self.charpoly = charpoly
        self.charpoly_str = charpoly_str
        self.point = point
        self.fredholm = fredholm
        self.monic_index = monic_index

    def __repr__(self):
        return (f"BackwardResult(genus={self.semigroup.genus}, "
                f"charpoly={self.charpoly_str!r})")


def _find_monic(ops):
    # An operator with identity leading coefficient, searched among the
    # given family and then among its small powers and products.
    for i, p in enumerate(ops):
        try:
            r, monic = order_and_monicity(p)
        except (DomainError, PrecisionError):
            continue
        if monic and r >= 1:
            return p, i
    candidates = []
    for i, p in enumerate(ops):
        for j, q in enumerate(ops):
            candidates.append((p * q, i))
    for c, i in candidates:
        try:
            r, monic = order_and_monicity(c)
        except (DomainError, PrecisionError):
            continue
        if monic and r >= 1:
            return c, i
    raise DomainError("no operator in the family, nor any pairwise "
                      "product, has an identity leading coefficient")


def operators_to_geometric(ops, depth=None) -> BackwardResult:
    """Recover constant-coefficient data and curve reports from a
    commuting family of differential operators."""
    ops = list(ops)
    if not ops:
        raise DomainError("need at least one operator")
    if depth is None:
        depth = DEFAULT_DEPTH
    check = verify_commutative(ops)
    if not check.ok:
        i, j, text = check.witnesses[0]
        raise DomainError(f"operators {i} and {j} do not commute; "
                          f"[P{i}, P{j}] = {text}")
    for i, p in enumerate(ops):
        if not p.is_differential_shape():
            raise DomainError(f"operator {i} is not differential")
    monic, monic_index = _find_monic(ops)
    s = dress_to_constant(monic, depth=depth)
    t = invert_dressing(s, depth=depth)
    constants = []
    for i, p in enumerate(ops):
        c = t * p * s
        if not c.is_constant_coefficient():
            raise DomainError(f"operator {i} does not conjugate to "
                              "constant coefficients under the dressing")
        constants.append(c.to_laurent())
    n = ops[0].n
    spec = AlgebraSpec(n, constants)
    semi = semigroup_report([matrix_order(g) for g in constants])
    try:
        cond = condition_report(spec)
    except PrecisionError:
        cond = None
    charpoly = None
    charstr = None
    for g in constants:
        try:
            cyclic = is_cyclic(g)
        except PrecisionError:
            continue
        if cyclic:
            charpoly = spectral_charpoly(g)
            charstr = charpoly_string(charpoly)
            break
    point = point_from_dressing(s)
    try:
        fred = point.fredholm_report()
    except PrecisionError:
        fred = None
    return BackwardResult(s, t, constants, spec, semi, cond, charpoly,
                          charstr, point, fred, monic_index)


def round_trip(point: GrassPoint, spec: AlgebraSpec, depth=None, nx=None,
               window=None):
    """Forward to operators, backward to a frame, and span comparison.

    Returns (forward, backward, equal).  Equality of the recovered frame
    with the original certifies the chain whenever the canonical
    zero-constant normalization of the backward dressing matches the
    forward one.
    """
    fwd = geometric_to_operators(point, spec, depth=depth, nx=nx,
                                 window=window)
    back = operators_to_geometric(fwd.operators, depth=depth)
    equal = points_equal(point, back.point)
    return fwd, back, equal
