"""Column modules over truncated Laurent series and Grassmannian frames.

Operators act on columns of Laurent series once D is read as
multiplication by z^-1 and x as the derivation z^2 d/dz, so that
x^l z^q = q (q+1) ... (q+l-1) z^(q+l).  A subspace is presented by a
frame: finitely many exceptional columns together with every standard
basis column from a stabilization class onward.  Classes are counted
along the pole filtration, class s naming the column z^(-(s//n)) e_(s%n),
so larger classes mean deeper poles and the positive-exponent side sits
at negative classes.

All reports come from exact rational elimination over the finitely many
coordinate classes the inputs determine.  Window bookkeeping follows the
same pessimistic rule as the series layer: a coordinate is used only
when every contribution to it is guaranteed.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

from .exactcore import (
    DimensionError,
    DomainError,
    Matrix,
    PrecisionError,
    XSeries,
    ZLaurent,
    _prec_key,
    rank,
    rref,
    solve,
)
from .psidocalc import MatrixPsiDO, is_dressing, invert_dressing

__all__ = [
    "FredholmReport",
    "GrassPoint",
    "basis_column",
    "dressing_from_point",
    "is_differential_by_action",
    "laurent_action",
    "module_action",
    "point_from_dressing",
    "points_equal",
    "stabilizes",
    "x_action",
]


def basis_column(s: int, n: int):
    """Standard column of class s: z^(-(s//n)) at component s % n."""
    col = [ZLaurent.zero() for _ in range(n)]
    col[s % n] = ZLaurent.monomial(-(s // n))
    return tuple(col)


def _as_vector(vec, n):
    vec = tuple(vec)
    if len(vec) != n:
        raise DimensionError(f"expected a column of length {n}, got {len(vec)}")
    for w in vec:
        if not isinstance(w, ZLaurent):
            raise DomainError("column entries must be Laurent series")
    return vec


def _scalar_action(s, m, w):
    # s(x) D^m applied to w: D^m shifts exponents up by m, then each
    # power of x multiplies by the rising factorial of the exponent.
    caps = []
    if w.prec is not None:
        caps.append(w.prec - m)
    if s.prec is not None:
        lb = w._low_bound()
        if lb != inf:
            caps.append(int(lb) - m + s.prec - 1)
    prec = min(caps) if caps else None
    vals = {}
    sc = s.coeffs
    for p, wc in w.coeffs.items():
        q = p - m
        rise = Fraction(1)
        for l, c in enumerate(sc):
            if c != 0 and rise != 0:
                e = q + l
                vals[e] = vals.get(e, Fraction(0)) + c * rise * wc
            rise *= q + l
    return ZLaurent(vals, prec)


def module_action(op: MatrixPsiDO, vec):
    """Apply an operator to a Laurent column, tracking windows."""
    vec = _as_vector(vec, op.n)
    n = op.n
    out = [ZLaurent.zero() for _ in range(n)]
    for m, mat in op.terms.items():
        for i in range(n):
            acc = out[i]
            for j in range(n):
                acc = acc + _scalar_action(mat.entry(i, j), m, vec[j])
            out[i] = acc
    if op.lo is not None:
        lb = min((w._low_bound() for w in vec), default=inf)
        if lb != inf:
            cap = int(lb) - op.lo
            out = [w.truncate(cap) for w in out]
    return tuple(out)


def x_action(vec):
    """Multiplication by x, realized entrywise as z^2 d/dz."""
    shift = ZLaurent.monomial(2)
    return tuple(w.derivative_z() * shift for w in vec)


def laurent_action(g: Matrix, vec):
    """Apply a constant-coefficient operator, a Laurent matrix, to a column."""
    n = g.n
    vec = _as_vector(vec, n)
    out = []
    for i in range(n):
        acc = ZLaurent.zero()
        for j in range(n):
            acc = acc + g.entry(i, j) * vec[j]
        out.append(acc)
    return tuple(out)


def _shift_exponents(w: ZLaurent, m: int) -> ZLaurent:
    prec = None if w.prec is None else w.prec + m
    return ZLaurent({e + m: c for e, c in w.coeffs.items()}, prec)


def _known_floor(vec, n):
    # Smallest class at which every higher coordinate of the column is
    # guaranteed; None when the column is exact.
    floor = None
    for i, w in enumerate(vec):
        if w.prec is not None:
            f = i - n * w.prec
            if floor is None or f > floor:
                floor = f
    return floor


def _support_classes(vec, n):
    out = set()
    for i, w in enumerate(vec):
        for e in w.coeffs:
            out.add(i - n * e)
    return out


def _coord(vec, s, n):
    return vec[s % n].coeff(-(s // n))


class FredholmReport:
    """Kernel and cokernel dimensions of the projection onto the span of
    the nonnegative classes, with the elimination rank that produced
    them."""

    __slots__ = ("h0", "h1", "index", "rank", "exceptional", "stable_from")

    def __init__(self, h0, h1, rank, exceptional, stable_from):
        self.h0 = h0
        self.h1 = h1
        self.index = h0 - h1
        self.rank = rank
        self.exceptional = exceptional
        self.stable_from = stable_from

    def as_dict(self):
        return {
            "h0": self.h0,
            "h1": self.h1,
            "index": self.index,
            "rank": self.rank,
            "exceptional": self.exceptional,
            "stable_from": self.stable_from,
        }

    def __repr__(self):
        return (f"FredholmReport(h0={self.h0}, h1={self.h1}, "
                f"index={self.index})")


class GrassPoint:
    """Frame for a subspace of the Laurent column module.

    The subspace is spanned by the exceptional columns together with
    every standard basis column of class at least stable_from.  Columns
    may carry truncation windows; reports state exactly what those
    windows certify and raise PrecisionError when they certify nothing.
    """

    __slots__ = ("n", "columns", "stable_from")

    def __init__(self, n, columns, stable_from):
        n = int(n)
        if n < 1:
            raise DimensionError("module rank must be at least 1")
        self.n = n
        self.columns = tuple(_as_vector(c, n) for c in columns)
        self.stable_from = int(stable_from)

    def _reduced_coords(self, vec, lo):
        # Coordinates on classes [lo, stable_from); higher classes lie in
        # the standard tail and are dropped by the reduction.
        return [_coord(vec, s, self.n) for s in range(lo, self.stable_from)]

    def _window_lo(self, extra=()):
        vecs = list(self.columns) + list(extra)
        lo = None
        for v in vecs:
            f = _known_floor(v, self.n)
            if f is not None and (lo is None or f > lo):
                lo = f
        base = self.stable_from
        for v in vecs:
            sup = _support_classes(v, self.n)
            if sup:
                base = min(base, min(sup))
        if lo is None:
            return base
        return max(lo, base)

    def window_lo(self) -> int:
        """Lowest class at which every column coordinate is certified."""
        return self._window_lo()

    def contains(self, vec):
        """Whether the column lies in the span, certified on the window
        of classes the inputs determine."""
        vec = _as_vector(vec, self.n)
        lo = self._window_lo([vec])
        classes = range(lo, self.stable_from)
        rows = [[_coord(col, s, self.n) for col in self.columns]
                for s in classes]
        rhs = [_coord(vec, s, self.n) for s in classes]
        return solve(rows, rhs) is not None

    def fredholm_report(self) -> FredholmReport:
        k = len(self.columns)
        s0 = self.stable_from
        lo = self._window_lo()
        lo = min(lo, 0, s0)
        for col in self.columns:
            f = _known_floor(col, self.n)
            if f is not None and f > lo:
                raise PrecisionError(
                    "column windows do not determine the coordinates "
                    f"down to class {lo}")
        full = [self._reduced_coords(col, lo) for col in self.columns]
        if rank([list(r) for r in zip(*full)] if full else []) != k:
            raise DomainError("exceptional columns are dependent modulo "
                              "the standard tail")
        a_rows = [[col[s - lo] for col in full] for s in range(max(0, lo), s0)]
        r = rank(a_rows)
        h0 = k - r + max(0, -s0)
        h1 = max(0, s0) - r
        return FredholmReport(h0, h1, r, k, s0)

    def __repr__(self):
        return (f"GrassPoint(n={self.n}, exceptional={len(self.columns)}, "
                f"stable_from={self.stable_from})")


def points_equal(a: GrassPoint, b: GrassPoint) -> bool:
    """Span equality of two frames on their certified windows."""
    if a.n != b.n:
        return False
    hi = max(a.stable_from, b.stable_from)
    for col in a.columns:
        if not b.contains(col):
            return False
    for s in range(a.stable_from, hi):
        if not b.contains(basis_column(s, a.n)):
            return False
    for col in b.columns:
        if not a.contains(col):
            return False
    for s in range(b.stable_from, hi):
        if not a.contains(basis_column(s, b.n)):
            return False
    return True


def _x_degree_bound(op: MatrixPsiDO) -> int:
    nx = 0
    for mat in op.terms.values():
        for row in mat.rows:
            for e in row:
                if e.prec is not None:
                    nx = max(nx, e.prec)
                elif e.coeffs:
                    nx = max(nx, len(e.coeffs))
    return nx


def point_from_dressing(s_op: MatrixPsiDO) -> GrassPoint:
    """Frame of the subspace the inverse dressing carries the standard
    nonnegative classes onto.

    Stabilization: the dressing moves a standard column by at most its
    depth plus its x-degree bound many classes, so beyond n times that
    budget the standard columns already lie in the subspace.
    """
    if not is_dressing(s_op):
        raise DomainError("operator is not a dressing")
    n = s_op.n
    if s_op.lo is not None:
        depth_s = -s_op.lo
    else:
        depth_s = max((-m for m in s_op.terms), default=0)
    nx = _x_degree_bound(s_op)
    budget = depth_s + nx
    stable = n * budget
    # The inverse is truncated in depth only; doubling the window keeps
    # every column determined well past the exceptional classes, which
    # the reverse solve needs for full-rank equation systems.
    t = invert_dressing(s_op, depth=2 * budget + 1)
    cols = [module_action(t, basis_column(s, n)) for s in range(stable)]
    return GrassPoint(n, cols, stable)


def dressing_from_point(point: GrassPoint, depth: int, nx: int) -> MatrixPsiDO:
    """Dressing carrying the subspace onto the standard nonnegative span.

    Solves exactly for a dressing of the given depth whose coefficients
    are polynomials of degree below nx.  Raises DomainError when no such
    dressing exists or when the frame windows leave the shape
    underdetermined.
    """
    n = point.n
    if depth < 1 or nx < 1:
        raise DomainError("dressing window must have positive depth and "
                          "x-degree")
    if not point.columns and point.stable_from == 0:
        return MatrixPsiDO.identity(n)
    cols = list(point.columns)
    for q in range(point.stable_from, n * (depth + nx)):
        cols.append(basis_column(q, n))
    nun = depth * nx * n
    actions = []
    for w in cols:
        acts = []
        for m in range(1, depth + 1):
            u = tuple(_shift_exponents(wp, m) for wp in w)
            for _ in range(nx):
                acts.append(u)
                u = x_action(u)
        actions.append(acts)

    def unknown(m, l, p):
        return ((m - 1) * nx + l) * n + p

    # the lhs rows depend only on the action data, so all n component
    # rows of the dressing share one elimination with n right-hand sides
    rows = []
    rhs_rows = []
    for w, acts in zip(cols, actions):
        hi = min(_prec_key(wp.prec) for wp in w)
        tops = [e for wp in w for e in wp.coeffs if e >= 1]
        for u in acts:
            for p in range(n):
                hi = min(hi, _prec_key(u[p].prec))
                tops.extend(e for e in u[p].coeffs if e >= 1)
        top = max(tops, default=0)
        for e in range(1, min(top, hi) + 1 if hi != inf else top + 1):
            row = [Fraction(0)] * nun
            for m in range(1, depth + 1):
                for l in range(nx):
                    u = acts[(m - 1) * nx + l]
                    for p in range(n):
                        row[unknown(m, l, p)] = u[p].coeffs.get(
                            e, Fraction(0))
            rhsv = [-wp.coeffs.get(e, Fraction(0)) for wp in w]
            if any(row) or any(rhsv):
                rows.append(row)
                rhs_rows.append(rhsv)
    if not rows:
        raise DomainError("frame windows leave the dressing "
                          "underdetermined at this depth and x-degree")
    # one augmented elimination answers consistency, uniqueness and all
    # component solutions at once
    aug = [row + rv for row, rv in zip(rows, rhs_rows)]
    red, pivots = rref(aug)
    if any(p >= nun for p in pivots):
        raise DomainError("no dressing with this depth and x-degree "
                          "carries the frame onto the standard span")
    if len(pivots) < nun:
        raise DomainError("frame windows leave the dressing "
                          "underdetermined at this depth and x-degree")
    terms = {-m: [[None] * n for _ in range(n)] for m in range(1, depth + 1)}
    for i in range(n):
        for m in range(1, depth + 1):
            for p in range(n):
                cs = [red[unknown(m, l, p)][nun + i] for l in range(nx)]
                terms[-m][i][p] = XSeries(cs)
    built = {m: Matrix(rows) for m, rows in terms.items()}
    built[0] = Matrix.identity(n, XSeries.one())
    out = MatrixPsiDO(n, built)
    return out


def stabilizes(point: GrassPoint, g: Matrix) -> bool:
    """Whether a constant-coefficient operator maps the frame span into
    itself, certified on the determined windows."""
    if g.n != point.n:
        raise DimensionError("operator size does not match the module rank")
    n = point.n
    for col in point.columns:
        if not point.contains(laurent_action(g, col)):
            return False
    drop = 0
    for row in g.rows:
        for e in row:
            if e.coeffs:
                drop = max(drop, max(e.coeffs))
    for q in range(point.stable_from, point.stable_from + n * (drop + 1)):
        img = laurent_action(g, basis_column(q, n))
        if not point.contains(img):
            return False
    return True


def is_differential_by_action(op: MatrixPsiDO, point: GrassPoint) -> bool:
    """Whether the operator maps the frame span into itself under the
    module action, certified on the determined windows."""
    if op.n != point.n:
        raise DimensionError("operator size does not match the module rank")
    n = point.n
    for col in point.columns:
        if not point.contains(module_action(op, col)):
            return False
    drop = 0
    nx = _x_degree_bound(op)
    for m in op.terms:
        drop = max(drop, nx - m)
    if op.lo is not None:
        drop = max(drop, nx - op.lo)
    for q in range(point.stable_from, point.stable_from + n * drop):
        img = module_action(op, basis_column(q, n))
        if not point.contains(img):
            return False
    return True
