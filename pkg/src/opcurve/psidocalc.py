"""Matrix pseudodifferential operators in left-normal form.

An operator is a finite window of terms a_m(x) * D^m where D = d/dx, the
a_m are square matrices of truncated power series, and m ranges over
integers of either sign (D^-1 is the formal integration symbol).  The
canonical form always keeps coefficients to the left of powers of D.

Composition is the generalized Leibniz rule

    D^m o a(x) = sum_{j>=0} binom(m, j) a^(j)(x) D^(m-j)

with binom(m, j) = m(m-1)...(m-j+1)/j!, valid for negative m as well.
The sum is truncated by two effects, both audited in compose():

* degrees below the derived window floor are dropped as untracked, and
* a term whose x-precision is exhausted poisons every lower degree.

The degree floor of a product is max(lo(P) + order(Q), order(P) + lo(Q)),
because the untracked tail of one factor meets the top term of the other
there; compose() is the single place this rule lives.

An operator with lo=None is exactly known: all degrees below its lowest
stored term are exactly zero, which is what makes constant-coefficient
algebra (where Leibniz sums terminate) exact end to end.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import inf

from .exactcore import (
    DEFAULT_DEPTH,
    DimensionError,
    DomainError,
    Matrix,
    PrecisionError,
    XSeries,
    ZLaurent,
)


@lru_cache(maxsize=None)
def binom(m: int, j: int) -> Fraction:
    """Generalized binomial coefficient m(m-1)...(m-j+1)/j! for integer m."""
    num = 1
    den = 1
    for t in range(j):
        num *= m - t
        den *= t + 1
    return Fraction(num, den)


def _falling(m: int, j: int) -> int:
    out = 1
    for t in range(j):
        out *= m - t
    return out


def _zero_matrix(n: int) -> Matrix:
    return Matrix.filled(n, XSeries.zero())


def _is_exact_zero(mat: Matrix) -> bool:
    return all(e.exact and e.is_zero() for row in mat.rows for e in row)


def _min_prec(mat: Matrix):
    p = inf
    for row in mat.rows:
        for e in row:
            if e.prec is not None:
                p = min(p, e.prec)
    return p


def _derivative(mat: Matrix):
    """Entrywise x-derivative, or None when precision is exhausted."""
    if _min_prec(mat) <= 1:
        return None
    return mat.map(lambda e: e.derivative())


class MatrixPsiDO:
    """Square-matrix pseudodifferential operator, left-normal form.

    terms maps D-degree to an n x n Matrix of XSeries; lo is the lowest
    guaranteed degree (degrees below lo are untracked), or None when every
    absent degree is exactly zero.  Instances are immutable.
    """

    __slots__ = ("n", "terms", "lo")

    def __init__(self, n: int, terms, lo=None):
        if n < 1:
            raise DimensionError("operator size must be at least 1")
        clean = {}
        for m, mat in dict(terms).items():
            m = int(m)
            if lo is not None and m < lo:
                continue
            if not isinstance(mat, Matrix) or mat.n != n:
                raise DimensionError(f"coefficient at degree {m} is not {n}x{n}")
            if _is_exact_zero(mat):
                continue
            clean[m] = mat
        self.n = n
        self.terms = clean
        self.lo = lo

    # -- constructors ------------------------------------------------

    @classmethod
    def identity(cls, n: int = 1) -> "MatrixPsiDO":
        return cls(n, {0: Matrix.identity(n, XSeries.one())})

    @classmethod
    def d(cls, m: int = 1, n: int = 1) -> "MatrixPsiDO":
        """The operator D^m * I_n."""
        return cls(n, {m: Matrix.identity(n, XSeries.one())})

    @classmethod
    def from_xseries(cls, s: XSeries, n: int = 1) -> "MatrixPsiDO":
        """Multiplication operator by a scalar series."""
        return cls(n, {0: Matrix.identity(n, XSeries.one()).map(lambda e: e * s)})

    @classmethod
    def from_scalars(cls, terms, lo=None) -> "MatrixPsiDO":
        """Scalar (1x1) operator from a map degree -> XSeries."""
        return cls(1, {m: Matrix([[s if isinstance(s, XSeries) else XSeries.constant(s)]])
                       for m, s in dict(terms).items()}, lo)

    @classmethod
    def from_laurent(cls, val) -> "MatrixPsiDO":
        """Embed a Laurent series (or matrix of them) as the constant
        coefficient operator with z = D^-1, so z^k becomes D^-k."""
        if isinstance(val, ZLaurent):
            val = Matrix([[val]])
        if not isinstance(val, Matrix):
            raise DomainError("from_laurent expects a ZLaurent or a Matrix of them")
        n = val.n
        lo = None
        for row in val.rows:
            for e in row:
                if not isinstance(e, ZLaurent):
                    raise DomainError("matrix entries must be ZLaurent")
                if e.prec is not None:
                    lo = -e.prec if lo is None else max(lo, -e.prec)
        terms = {}
        for i in range(n):
            for j in range(n):
                for k, c in val.rows[i][j].coeffs.items():
                    deg = -k
                    if lo is not None and deg < lo:
                        continue
                    if deg not in terms:
                        terms[deg] = [[XSeries.zero()] * n for _ in range(n)]
                    terms[deg][i][j] = XSeries.constant(c)
        return cls(n, {m: Matrix(rows) for m, rows in terms.items()}, lo)

    # -- inspection --------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.lo is None

    def xprec(self):
        """Smallest coefficient precision present, None when all exact."""
        p = inf
        for mat in self.terms.values():
            p = min(p, _min_prec(mat))
        return None if p == inf else int(p)

    def degrees(self):
        return sorted(self.terms)

    def coeff(self, m: int) -> Matrix:
        if self.lo is not None and m < self.lo:
            raise PrecisionError(f"degree {m} below tracked window (lo={self.lo})")
        return self.terms.get(m, _zero_matrix(self.n))

    def order(self) -> int:
        """Largest degree whose coefficient is nonzero within precision."""
        live = [m for m, mat in self.terms.items() if not mat.is_zero()]
        if not live:
            if self.exact:
                raise DomainError("order of the zero operator is undefined")
            raise PrecisionError("order undetermined at this precision")
        return max(live)

    def leading(self) -> Matrix:
        return self.terms[self.order()]

    def is_monic(self) -> bool:
        try:
            return self.leading() == Matrix.identity(self.n, XSeries.one())
        except (DomainError, PrecisionError):
            return False

    def is_differential_shape(self) -> bool:
        """No negative-degree term is nonzero within precision."""
        return all(mat.is_zero() for m, mat in self.terms.items() if m < 0)

    def is_constant_coefficient(self) -> bool:
        """Every tracked coefficient is constant in x within precision."""
        for mat in self.terms.values():
            for row in mat.rows:
                for e in row:
                    if any(c != 0 for c in e.coeffs[1:]):
                        return False
        return True

    # -- window management --------------------------------------------

    def truncate_depth(self, lo: int) -> "MatrixPsiDO":
        new_lo = lo if self.lo is None else max(lo, self.lo)
        return MatrixPsiDO(self.n, {m: mat for m, mat in self.terms.items()
                                    if m >= new_lo}, new_lo)

    def truncate_x(self, prec: int) -> "MatrixPsiDO":
        return MatrixPsiDO(self.n, {m: mat.map(lambda e: e.truncate(prec))
                                    for m, mat in self.terms.items()}, self.lo)

    # -- ring operations ----------------------------------------------

    def _check(self, other):
        if not isinstance(other, MatrixPsiDO):
            raise DimensionError("expected a MatrixPsiDO")
        if other.n != self.n:
            raise DimensionError("operator sizes differ")

    def __add__(self, other):
        if not isinstance(other, MatrixPsiDO):
            return NotImplemented
        self._check(other)
        lo = None
        if self.lo is not None or other.lo is not None:
            lo = max(x for x in (self.lo, other.lo) if x is not None)
        terms = {}
        for m in set(self.terms) | set(other.terms):
            if lo is not None and m < lo:
                continue
            a = self.terms.get(m)
            b = other.terms.get(m)
            terms[m] = a + b if a is not None and b is not None else (a or b)
        return MatrixPsiDO(self.n, terms, lo)

    def __neg__(self):
        return MatrixPsiDO(self.n, {m: -mat for m, mat in self.terms.items()}, self.lo)

    def __sub__(self, other):
        if not isinstance(other, MatrixPsiDO):
            return NotImplemented
        return self + (-other)

    def scale(self, a) -> "MatrixPsiDO":
        return MatrixPsiDO(self.n, {m: mat.map(lambda e: e.scale(a))
                                    for m, mat in self.terms.items()}, self.lo)

    def __mul__(self, other):
        if not isinstance(other, MatrixPsiDO):
            return NotImplemented
        return compose(self, other)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise DomainError("operator powers require a nonnegative integer")
        out = MatrixPsiDO.identity(self.n)
        for _ in range(e):
            out = compose(out, self)
        return out

    def split(self):
        """Split into (differential part, strictly negative part).

        The differential part has every degree >= 0; when the window floor
        reaches 0 or below, its absent negative degrees are exact zeros.
        """
        plus_lo = None if self.lo is None or self.lo <= 0 else self.lo
        plus = MatrixPsiDO(self.n, {m: mat for m, mat in self.terms.items() if m >= 0},
                           plus_lo)
        minus = MatrixPsiDO(self.n, {m: mat for m, mat in self.terms.items() if m < 0},
                            self.lo)
        return plus, minus

    # -- the constant-coefficient projection --------------------------

    def to_laurent(self) -> Matrix:
        """Right-normalize, evaluate coefficients at x = 0, map D^m to z^-m.

        Uses a D^m = sum_j (-1)^j binom(m, j) D^(m-j) a^(j), so the right
        coefficient picked up at z^(j-m) from a tracked term a(x) D^m is
        (-1)^j (m)_j [x^j]a.  Entry windows record where the operator's
        untracked tail or exhausted x-precision stops the guarantee.
        """
        n = self.n
        out = []
        for i in range(n):
            row = []
            for l in range(n):
                prec = None if self.lo is None else -self.lo
                vals: dict[int, Fraction] = {}
                for m, mat in sorted(self.terms.items()):
                    s = mat.rows[i][l]
                    if s.prec is not None:
                        cap = -m + s.prec - 1
                        prec = cap if prec is None else min(prec, cap)
                    for j, c in enumerate(s.coeffs):
                        if c == 0:
                            continue
                        e = j - m
                        vals[e] = vals.get(e, Fraction(0)) + (-1) ** j * _falling(m, j) * c
                row.append(ZLaurent(vals, prec))
            out.append(row)
        return Matrix(out)

    # -- comparison and display ---------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MatrixPsiDO) or other.n != self.n:
            return NotImplemented
        floor = -inf
        for x in (self.lo, other.lo):
            if x is not None:
                floor = max(floor, x)
        for m in set(self.terms) | set(other.terms):
            if m < floor:
                continue
            a = self.terms.get(m, _zero_matrix(self.n))
            b = other.terms.get(m, _zero_matrix(self.n))
            if not a == b:
                return False
        return True

    __hash__ = None

    def is_zero(self) -> bool:
        return all(mat.is_zero() for mat in self.terms.values())

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for m in sorted(self.terms, reverse=True):
                mat = self.terms[m]
                if self.n == 1:
                    c = f"({mat.rows[0][0]})"
                else:
                    c = repr(mat)
                if m == 0:
                    parts.append(c)
                else:
                    parts.append(f"{c}*D^{m}")
            body = " + ".join(parts)
        tail = "" if self.lo is None else f" + O(D^{self.lo - 1})"
        return f"MatrixPsiDO({body}{tail})"


def compose(p: MatrixPsiDO, q: MatrixPsiDO) -> MatrixPsiDO:
    """Product of two operators by the generalized Leibniz rule.

    This is the only place where the truncation policy is applied: the
    output floor max(lo(P)+order(Q), order(P)+lo(Q)) drops degrees the
    untracked tails could pollute, and a derivative tower that runs out of
    x-precision poisons every degree at and below its stopping point.
    """
    p._check(q)
    n = p.n
    # highest degree that could carry a nonzero coefficient; None means the
    # operator is exactly zero
    p_top = max(p.terms) if p.terms else (None if p.lo is None else p.lo - 1)
    q_top = max(q.terms) if q.terms else (None if q.lo is None else q.lo - 1)
    if p_top is None or q_top is None:
        return MatrixPsiDO(n, {})
    cands = []
    if p.lo is not None:
        cands.append(p.lo + q_top)
    if q.lo is not None:
        cands.append(p_top + q.lo)
    floor = max(cands) if cands else None

    towers: dict[int, list] = {k: [mat] for k, mat in q.terms.items()}
    ended_exact: dict[int, bool] = {}
    poison = None

    acc: dict[int, Matrix] = {}
    for m, a in p.terms.items():
        for k, b0 in q.terms.items():
            tower = towers[k]
            j = 0
            while True:
                if m >= 0 and j > m:
                    break
                deg = m + k - j
                if floor is not None and deg < floor:
                    break
                while len(tower) <= j:
                    if ended_exact.get(k) is not None:
                        break
                    nxt = _derivative(tower[-1])
                    if nxt is None:
                        ended_exact[k] = False
                    elif _is_exact_zero(nxt):
                        ended_exact[k] = True
                    else:
                        tower.append(nxt)
                if len(tower) <= j:
                    if not ended_exact[k]:
                        # x-precision exhausted: this and all lower degrees
                        # of the pair are unknown
                        poison = deg if poison is None else max(poison, deg)
                    break
                term = (a * tower[j]).map(lambda e: e.scale(binom(m, j)))
                acc[deg] = acc[deg] + term if deg in acc else term
                j += 1

    if poison is not None:
        floor = poison + 1 if floor is None else max(floor, poison + 1)
    if floor is not None:
        acc = {m: mat for m, mat in acc.items() if m >= floor}
    return MatrixPsiDO(n, acc, floor)


def commutator(p: MatrixPsiDO, q: MatrixPsiDO) -> MatrixPsiDO:
    return compose(p, q) - compose(q, p)


def order_and_monicity(p: MatrixPsiDO):
    """(order, leading coefficient == identity) for a nonzero operator."""
    r = p.order()
    return r, p.terms[r] == Matrix.identity(p.n, XSeries.one())


def is_dressing(s: MatrixPsiDO) -> bool:
    """Identity plus strictly negative degrees, within precision."""
    if s.lo is not None and s.lo > 0:
        return False
    if any(m > 0 and not mat.is_zero() for m, mat in s.terms.items()):
        return False
    return s.coeff(0) == Matrix.identity(s.n, XSeries.one())


def invert_dressing(s: MatrixPsiDO, depth=None) -> MatrixPsiDO:
    """Two-sided inverse of S = I + (negative degrees), degree by degree.

    Writing T = I + sum t_d D^-d, the coefficient of D^-d in S o T gives

        t_d = - sum_{m>=1, j>=0, m+j<=d} binom(-m, j) s_m t_{d-m-j}^(j)

    which determines each t_d from earlier ones.  The result is tracked
    down to degree -depth, further limited by the window of S itself.
    """
    if not is_dressing(s):
        raise DomainError("not a dressing operator: expected I + lower-degree terms")
    n = s.n
    if depth is None:
        depth = DEFAULT_DEPTH if s.lo is None else -s.lo
    lo = -depth if s.lo is None else max(-depth, s.lo)
    ident = Matrix.identity(n, XSeries.one())
    svals = {-m: mat for m, mat in s.terms.items() if m < 0}

    ts: dict[int, Matrix] = {0: ident}
    towers: dict[int, list] = {0: [ident]}
    for d in range(1, -lo + 1):
        acc = None
        for m, sm in svals.items():
            for j in range(0, d - m + 1):
                kk = d - m - j
                tower = towers[kk]
                while len(tower) <= j:
                    nxt = _derivative(tower[-1])
                    if nxt is None:
                        raise PrecisionError(
                            f"x-precision exhausted inverting at depth {d}")
                    tower.append(nxt)
                term = (sm * tower[j]).map(lambda e: e.scale(binom(-m, j)))
                acc = term if acc is None else acc + term
        td = _zero_matrix(n) if acc is None else -acc
        ts[d] = td
        towers[d] = [td]
    terms = {-d: t for d, t in ts.items()}
    # the true inverse has terms at every depth, so it is only exact when
    # S is exactly the identity
    if s.lo is None and all(_is_exact_zero(t) for d, t in ts.items() if d != 0):
        return MatrixPsiDO(n, terms)
    return MatrixPsiDO(n, terms, lo)


def rth_root(p: MatrixPsiDO, r: int, depth=None) -> MatrixPsiDO:
    """Monic r-th root of a monic operator of order r.

    R starts as D*I and gains one coefficient per step: the top surviving
    degree of P - R^r is r-1-t at step t and is removed by a correction
    c = coeff/r at degree -t, a linear solve with the invertible scalar r.
    Every free additive constant that could enter is pinned to zero by the
    construction, so the answer is the canonical normalized root.
    """
    rr, monic = order_and_monicity(p)
    if rr != r or not monic:
        raise DomainError(f"need a monic operator of order exactly {r}")
    n = p.n
    if depth is None:
        depth = DEFAULT_DEPTH
    root = MatrixPsiDO.d(1, n)
    steps = 0
    while steps < depth:
        diff = p - root ** r
        if diff.exact and not diff.terms:
            return root  # exact root found
        deg = r - 1 - steps
        if diff.lo is not None and deg < diff.lo:
            break  # cannot certify further corrections at this window
        c = diff.coeff(deg).map(lambda e: e.scale(Fraction(1, r)))
        root = root + MatrixPsiDO(n, {-steps: c})
        steps += 1
    return MatrixPsiDO(n, root.terms, 1 - steps)
