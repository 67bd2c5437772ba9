"""Acceptance gates for the workbench.

Each test covers one gate, prints a single PASS or FAIL line, and then
asserts.  Oracles are independent of the code under test: a Leibniz
expansion over an auxiliary polynomial ring, hand-reduced window
matrices committed as golden files, brute-force semigroup membership,
termwise integration, and direct matrix evaluation.
"""

import json
import math
from fractions import Fraction
from pathlib import Path
from random import Random
from time import perf_counter

from opcurve.exactcore import Matrix, XSeries, ZLaurent, rref
from opcurve.psidocalc import MatrixPsiDO, commutator, invert_dressing
from opcurve.sato import (
    GrassPoint,
    basis_column,
    dressing_from_point,
    is_differential_by_action,
    module_action,
    point_from_dressing,
    x_action,
)
from opcurve.curvedata import (
    AlgebraSpec,
    cayley_hamilton_holds,
    semigroup_report,
    spectral_charpoly,
)
from opcurve.pipelines import dress_to_constant, round_trip, verify_commutative

GOLDEN = Path(__file__).parent / "golden"


def _verdict(num, label, problems):
    ok = not problems
    tail = "" if ok else f" ({problems[0]})"
    print(f"{'PASS' if ok else 'FAIL'} acceptance {num}/9: {label}{tail}")
    assert ok, f"acceptance {num}/9: {label}{tail}"


def cusp_pair(nx=12):
    u = XSeries([1, 1])
    inv2 = (u * u).inverse(nx)
    inv3 = (u * u * u).inverse(nx)
    p = MatrixPsiDO.from_scalars({2: XSeries.one(), 0: inv2.scale(-2)})
    q = MatrixPsiDO.from_scalars({3: XSeries.one(),
                                  1: inv2.scale(-3),
                                  0: inv3.scale(3)})
    return p, q


# -- gate 1: the cusp pair commutes and lies on its curve ------------------
#
# Oracle: operators encoded over the ring Q[u] with u = 1/(1+x), which is
# closed under d/dx (u' = -u^2).  Composition is a finite Leibniz sum for
# differential operators, with no truncation anywhere, so the commutator
# and the curve relation are checked as identities, not to a window.

def _upoly_d(poly):
    return {k + 1: -k * c for k, c in poly.items() if k and c}


def _upoly_mul(a, b):
    out = {}
    for i, c in a.items():
        for j, e in b.items():
            out[i + j] = out.get(i + j, Fraction(0)) + c * e
    return {k: v for k, v in out.items() if v}


def _op_add(a, b, sign=1):
    out = {m: dict(poly) for m, poly in a.items()}
    for m, poly in b.items():
        tgt = out.setdefault(m, {})
        for k, c in poly.items():
            tgt[k] = tgt.get(k, Fraction(0)) + sign * c
    return {m: {k: c for k, c in poly.items() if c}
            for m, poly in out.items()}


def _op_mul(a, b):
    out = {}
    for m, am in a.items():
        for k, bk in b.items():
            deriv = bk
            for j in range(m + 1):
                if deriv:
                    poly = _upoly_mul(am, deriv)
                    tgt = out.setdefault(m + k - j, {})
                    for kk, c in poly.items():
                        tgt[kk] = tgt.get(kk, Fraction(0)) + math.comb(m, j) * c
                deriv = _upoly_d(deriv)
    return {m: {k: c for k, c in poly.items() if c}
            for m, poly in out.items()}


def _op_is_zero(a):
    return all(not poly for poly in a.values())


def test_cusp_pair_commutes_and_curve_relation():
    problems = []
    start = perf_counter()
    p, q = cusp_pair(12)
    rep = verify_commutative([p, q])
    if not rep.ok:
        problems.append("commutator not zero on the window")
    if not (q * q - p * p * p).is_zero():
        problems.append("curve relation fails on the window")
    elapsed = perf_counter() - start
    if elapsed >= 1.0:
        problems.append(f"took {elapsed:.3f}s")

    pu = {2: {0: Fraction(1)}, 0: {2: Fraction(-2)}}
    qu = {3: {0: Fraction(1)}, 1: {2: Fraction(-3)}, 0: {3: Fraction(3)}}
    if not _op_is_zero(_op_add(_op_mul(pu, qu), _op_mul(qu, pu), sign=-1)):
        problems.append("oracle commutator nonzero")
    cube = _op_mul(_op_mul(pu, pu), pu)
    if not _op_is_zero(_op_add(_op_mul(qu, qu), cube, sign=-1)):
        problems.append("oracle curve relation nonzero")
    _verdict(1, "cusp pair commutes and satisfies Q^2 = P^3", problems)


# -- gate 2: dressing round trips through the frame ------------------------

def _rand_poly(rng, terms):
    return XSeries([Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                    for _ in range(terms)])


def _rand_dressing(rng, n, depth=4, nx=8):
    terms = {0: Matrix([[XSeries.one() if i == j else XSeries.zero()
                         for j in range(n)] for i in range(n)])}
    for m in range(1, depth + 1):
        terms[-m] = Matrix([[_rand_poly(rng, nx) for _ in range(n)]
                            for _ in range(n)])
    return MatrixPsiDO(n, terms)


def test_dressing_round_trips():
    rng = Random(8142026)
    problems = []
    trials = 0
    for t in range(21):
        n = 2 if t == 20 else 1
        s = _rand_dressing(rng, n)
        w = point_from_dressing(s)
        back = dressing_from_point(w, depth=4, nx=8)
        trials += 1
        if back != s:
            problems.append(f"trial {t} (n={n}) differs on the window")
    if trials < 20:
        problems.append(f"only {trials} trials")
    _verdict(2, f"{trials} random dressings recovered from their frames",
             problems)


# -- gate 3: the action test agrees with the shape test --------------------

def _rand_xpoly(rng, terms=3, small=4):
    return XSeries([Fraction(rng.randint(-small, small))
                    for _ in range(terms)])


def _rand_operator(rng, n, differential):
    terms = {}
    for m in range(0, rng.randint(1, 4)):
        mat = Matrix([[_rand_xpoly(rng) for _ in range(n)]
                      for _ in range(n)])
        if not mat.is_zero():
            terms[m] = mat
    if not differential:
        mat = Matrix([[_rand_xpoly(rng) for _ in range(n)]
                      for _ in range(n)])
        rows = [list(r) for r in mat.rows]
        rows[0][0] = rows[0][0] + XSeries.constant(rng.randint(1, 8))
        terms[-rng.randint(1, 3)] = Matrix(rows)
    return MatrixPsiDO(n, terms)


def test_action_test_agrees_with_shape_test():
    rng = Random(314159)
    problems = []
    checked = 0
    for t in range(50):
        n = 1 if t % 2 == 0 else 2
        differential = t < 25
        op = _rand_operator(rng, n, differential)
        base = GrassPoint(n, [], 0)
        shape = op.is_differential_shape()
        if shape != differential:
            problems.append(f"trial {t}: construction mislabeled")
            continue
        action = is_differential_by_action(op, base)
        if action != shape:
            problems.append(f"trial {t}: action {action} vs shape {shape}")
        audit = all(
            base.contains(module_action(op, basis_column(s, n)))
            for s in range(8 * n))
        if audit != shape:
            problems.append(f"trial {t}: depth-8 audit {audit} vs {shape}")
        checked += 1
    if checked < 50:
        problems.append(f"only {checked} operators checked")
    _verdict(3, f"{checked} operators: action test matches shape test",
             problems)


# -- gate 4: projection counts against hand-reduced golden matrices --------

def _window_matrix(pt):
    rows = []
    for s in range(pt.stable_from):
        k, i = -(s // pt.n), s % pt.n
        rows.append([col[i].coeffs.get(k, Fraction(0))
                     for col in pt.columns])
    return rows


def test_projection_counts_match_golden_tables():
    cases = [
        ("gamma_base.json", GrassPoint(1, [], 0)),
        ("gamma_shift_up.json", GrassPoint(1, [(ZLaurent.monomial(1),)], 0)),
        ("gamma_shift_down.json", GrassPoint(1, [], 1)),
        ("gamma_cusp.json", GrassPoint(1, [(ZLaurent.one(),)], 2)),
        ("gamma_mixed.json",
         GrassPoint(2, [(ZLaurent.one(), ZLaurent.monomial(1))], 2)),
    ]
    problems = []
    for name, pt in cases:
        want = json.loads((GOLDEN / name).read_text())
        rows = _window_matrix(pt)
        if rows != [[Fraction(e) for e in row]
                    for row in want["window_matrix"]]:
            problems.append(f"{name}: window matrix differs")
            continue
        red, pivots = rref(rows)
        if red != [[Fraction(e) for e in row] for row in want["hand_rref"]]:
            problems.append(f"{name}: elimination differs from golden")
        if len(pivots) != want["rank"]:
            problems.append(f"{name}: rank {len(pivots)} != {want['rank']}")
        h0 = len(pt.columns) - len(pivots)
        h1 = pt.stable_from - len(pivots)
        rep = pt.fredholm_report()
        if (h0, h1) != (want["h0"], want["h1"]):
            problems.append(f"{name}: elimination gives ({h0},{h1})")
        if (rep.h0, rep.h1) != (want["h0"], want["h1"]):
            problems.append(f"{name}: report gives ({rep.h0},{rep.h1})")
    _verdict(4, "projection kernel/cokernel match golden eliminations",
             problems)


# -- gate 5: semigroup genus and the coprime representability bound --------

def test_semigroup_genus_and_representability():
    problems = []
    for orders, genus in (([2, 3], 1), ([3, 4], 3), ([1], 0)):
        rep = semigroup_report(orders)
        if rep.genus != genus:
            problems.append(f"orders {orders}: genus {rep.genus} != {genus}")

    for a in range(1, 8):
        for b in range(a + 1, 8):
            if math.gcd(a, b) != 1:
                continue
            rep = semigroup_report([a, b])
            bound = a * b - a - b

            def reachable(m):
                return any((m - i * a) % b == 0 for i in range(m // a + 1))

            # everything in (bound, bound + a] reachable implies, by
            # repeatedly adding a, everything above the bound is
            if not all(reachable(m) for m in range(bound + 1, bound + a + 1)):
                problems.append(f"({a},{b}): gap above {bound}")
            if bound >= 0 and reachable(bound):
                problems.append(f"({a},{b}): bound {bound} reachable")
            if rep.genus != (a - 1) * (b - 1) // 2:
                problems.append(f"({a},{b}): genus {rep.genus}")
            if rep.conductor != bound + 1:
                problems.append(f"({a},{b}): conductor {rep.conductor}")
            if rep.gaps and max(rep.gaps) != bound:
                problems.append(f"({a},{b}): largest gap {max(rep.gaps)}")
    _verdict(5, "semigroup genus tables and coprime pair audit", problems)


# -- gate 6: the 2x2 matrix algebra pipeline -------------------------------

def test_matrix_algebra_pipeline():
    problems = []
    start = perf_counter()
    j = Matrix([[ZLaurent.zero(), ZLaurent.one()],
                [ZLaurent.monomial(-1), ZLaurent.zero()]])
    spec = AlgebraSpec(2, gens=[j])
    base = GrassPoint(2, [], 0)
    fwd, back, equal = round_trip(base, spec)
    elapsed = perf_counter() - start

    expected = MatrixPsiDO(2, {
        0: Matrix([[XSeries.zero(), XSeries.one()],
                   [XSeries.zero(), XSeries.zero()]]),
        1: Matrix([[XSeries.zero(), XSeries.zero()],
                   [XSeries.one(), XSeries.zero()]]),
    })
    if fwd.operators[0] != expected:
        problems.append("transported generator is not [[0,1],[D,0]]")
    if fwd.operators[0] * fwd.operators[0] != MatrixPsiDO.d(1, 2):
        problems.append("square is not D times the identity")
    if back.charpoly_str != "t^2 - z^-1":
        problems.append(f"charpoly {back.charpoly_str!r}")
    if not equal:
        problems.append("round trip not closed")
    if elapsed >= 1.0:
        problems.append(f"took {elapsed:.3f}s")
    _verdict(6, "matrix generator pipeline closes with charpoly t^2 - z^-1",
             problems)


# -- gate 7: dressing the cusp operator to a constant power ----------------

def test_dress_to_constant_power():
    problems = []
    p, _ = cusp_pair(12)
    s = dress_to_constant(p)
    sinv = invert_dressing(s, depth=8)
    if sinv * p * s != MatrixPsiDO.d(2):
        problems.append("conjugate is not D^2 on the window")

    s1 = s.terms[-1].entry(0, 0)
    # independent oracle: expand (1+x)^-2 by the binomial series and
    # integrate termwise with zero constant; coefficient of x^(k+1) is
    # (-1)^k (k+1) / (k+1)
    deriv = [Fraction((-1) ** k * (k + 1)) for k in range(12)]
    integral = XSeries([Fraction(0)] + [c / (k + 1)
                                        for k, c in enumerate(deriv)])
    window = s1.prec if s1.prec is not None else 12
    if window < 12:
        problems.append(f"window {window} below 12")
    if s1 != integral:
        problems.append("first coefficient differs from the integrated "
                        "series")
    _verdict(7, "cusp operator dresses to D^2 with s1 = x - x^2 + ...",
             problems)


# -- gate 8: module axioms for the action on Laurent columns ---------------

def _rand_action_op(rng, n):
    terms = {}
    for m in range(-2, 3):
        if rng.random() < 0.6:
            mat = Matrix([[_rand_xpoly(rng, terms=3, small=3)
                           for _ in range(n)] for _ in range(n)])
            if not mat.is_zero():
                terms[m] = mat
    if not terms:
        terms[0] = Matrix([[XSeries.one() if i == j else XSeries.zero()
                            for j in range(n)] for i in range(n)])
    return MatrixPsiDO(n, terms)


def _rand_column(rng, n):
    return tuple(
        ZLaurent({e: Fraction(rng.randint(-5, 5)) for e in range(-3, 4)
                  if rng.random() < 0.5})
        for _ in range(n))


def test_module_axioms():
    rng = Random(271828)
    problems = []
    trials = 0
    for t in range(100):
        n = 1 if t % 2 == 0 else 2
        p = _rand_action_op(rng, n)
        q = _rand_action_op(rng, n)
        v = _rand_column(rng, n)
        left = module_action(p * q, v)
        right = module_action(p, module_action(q, v))
        if not all(a == b for a, b in zip(left, right)):
            problems.append(f"trial {t}: associativity fails")
        xm = MatrixPsiDO.from_xseries(XSeries.x(), n)
        if not all(a == b for a, b in
                   zip(x_action(v), module_action(xm, v))):
            problems.append(f"trial {t}: x action mismatch")
        trials += 1
    if trials < 100:
        problems.append(f"only {trials} triples")
    _verdict(8, f"{trials} random triples satisfy the module axioms",
             problems)


# -- gate 9: Cayley-Hamilton over truncated power series -------------------

def _rand_zseries(rng):
    return ZLaurent({e: Fraction(rng.randint(-4, 4)) for e in range(5)
                     if rng.random() < 0.7}, prec=6)


def test_cayley_hamilton():
    rng = Random(1618033)
    problems = []
    trials = 0
    for t in range(24):
        n = 2 if t % 2 == 0 else 3
        g = Matrix([[_rand_zseries(rng) for _ in range(n)]
                    for _ in range(n)])
        cs = spectral_charpoly(g)
        ident = Matrix([[ZLaurent.one() if i == j else ZLaurent.zero()
                         for j in range(n)] for i in range(n)])
        pows = [ident]
        for _ in range(n):
            pows.append(pows[-1] * g)
        acc = pows[n]
        for i, c in enumerate(cs, start=1):
            sign = Fraction((-1) ** i)
            acc = acc + pows[n - i].map(lambda e: e * c * sign)
        if not acc.is_zero():
            problems.append(f"trial {t}: evaluation nonzero")
        if not cayley_hamilton_holds(g):
            problems.append(f"trial {t}: helper disagrees")
        trials += 1
    if trials < 20:
        problems.append(f"only {trials} matrices")
    _verdict(9, f"{trials} truncated matrices satisfy their charpoly",
             problems)
