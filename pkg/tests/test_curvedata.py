import random
from fractions import Fraction

import pytest

from opcurve.curvedata import (
    AlgebraSpec,
    algebra_orders,
    cayley_hamilton_holds,
    charpoly_string,
    condition_report,
    filtration_piece,
    is_cyclic,
    laurent_span_dim,
    matrix_order,
    rank_of_algebra,
    semigroup_report,
    spectral_charpoly,
)
from opcurve.exactcore import (
    DomainError,
    Matrix,
    PrecisionError,
    ZLaurent,
)


def zmono(k, c=1):
    return ZLaurent.monomial(k, c)


def scalar_alg(*exponents):
    return AlgebraSpec(1, [Matrix([[zmono(-e)]]) for e in exponents])


def j_matrix():
    return Matrix([[ZLaurent.zero(), ZLaurent.one()],
                   [zmono(-1), ZLaurent.zero()]])


# -- orders and semigroups ---------------------------------------------

def test_matrix_order():
    assert matrix_order(Matrix([[zmono(-3)]])) == 3
    assert matrix_order(j_matrix()) == 1
    assert matrix_order(Matrix([[ZLaurent({2: 1, -1: 5})]])) == 1
    with pytest.raises(DomainError):
        matrix_order(Matrix([[ZLaurent.zero()]]))
    with pytest.raises(PrecisionError):
        matrix_order(Matrix([[ZLaurent.zero(prec=4)]]))


def test_rank_of_algebra():
    assert rank_of_algebra(scalar_alg(2, 3)) == 1
    assert rank_of_algebra(scalar_alg(4, 6)) == 2
    assert rank_of_algebra(AlgebraSpec(2, [j_matrix()])) == 1


def test_semigroup_cusp():
    rep = semigroup_report([2, 3])
    assert rep.rank == 1
    assert rep.gaps == [1]
    assert rep.genus == 1
    assert rep.conductor == 2
    assert rep.coprime_bound == 1


def test_semigroup_three_four():
    rep = semigroup_report([3, 4])
    assert rep.gaps == [1, 2, 5]
    assert rep.genus == 3
    assert rep.conductor == 6
    assert rep.coprime_bound == 5


def test_semigroup_full_line():
    rep = semigroup_report([1])
    assert rep.gaps == []
    assert rep.genus == 0
    assert rep.conductor == 0


def test_semigroup_reduces_by_rank():
    rep = semigroup_report([4, 6])
    assert rep.rank == 2
    assert rep.reduced == [2, 3]
    assert rep.gaps == [1]
    assert rep.genus == 1


def test_semigroup_without_coprime_pair():
    # <6, 10, 15> has pairwise common factors but total gcd 1; the run
    # detector must reach its conductor 30 without any pair bound
    rep = semigroup_report([6, 10, 15])
    assert rep.rank == 1
    assert rep.coprime_bound is None
    assert rep.conductor == 30
    assert rep.genus == 15
    assert rep.gaps[:5] == [1, 2, 3, 4, 5]
    assert 29 in rep.gaps
    assert 28 not in rep.gaps


# -- filtration ---------------------------------------------------------

def test_filtration_matches_semigroup_counts():
    spec = scalar_alg(2, 3)
    # dim of the piece of order <= k is the number of semigroup elements
    # up to k: {0}, {0,2}, {0,2,3}, {0,2,3,4}, ...
    want = [1, 1, 2, 3, 4, 5, 6]
    got = [filtration_piece(spec, k).dim for k in range(7)]
    assert got == want
    assert filtration_piece(spec, -1).dim == 0


def test_filtration_monomials_are_exponent_vectors():
    spec = scalar_alg(2, 3)
    rep = filtration_piece(spec, 4)
    assert (0, 0) in rep.monomials
    assert (1, 0) in rep.monomials
    assert (0, 1) in rep.monomials
    assert (2, 0) in rep.monomials
    assert rep.dim == 3 + 1


def test_filtration_j_algebra():
    spec = AlgebraSpec(2, [j_matrix()])
    # powers of the generator, one per order: dim k+1 at bound k
    for k in range(5):
        assert filtration_piece(spec, k).dim == k + 1


def test_filtration_rejects_unit_generators():
    spec = AlgebraSpec(1, [Matrix([[ZLaurent.one()]])])
    with pytest.raises(DomainError):
        filtration_piece(spec, 3)


# -- the span condition -------------------------------------------------

def test_condition_cusp_algebra():
    rep = condition_report(scalar_alg(2, 3))
    assert rep.commutes
    assert rep.span_dim == 1
    assert rep.rank == 1
    assert rep.satisfied


def test_condition_j_algebra():
    rep = condition_report(AlgebraSpec(2, [j_matrix()]))
    assert rep.commutes
    assert rep.span_dim == 2
    assert rep.rank == 1
    assert rep.satisfied


def test_condition_fails_for_diagonal_embedding():
    # scalar cusp algebra embedded diagonally in 2 x 2: span collapses
    spec = AlgebraSpec(2, diag_gens=[zmono(-2), zmono(-3)])
    rep = condition_report(spec)
    assert rep.commutes
    assert rep.span_dim == 1
    assert not rep.satisfied


def test_condition_fails_for_imprimitive_orders():
    rep = condition_report(scalar_alg(2))
    assert rep.commutes
    assert rep.span_dim == 1
    assert rep.rank == 2
    assert not rep.satisfied


def test_condition_detects_noncommuting():
    a = Matrix([[ZLaurent.zero(), ZLaurent.one()],
                [ZLaurent.zero(), ZLaurent.zero()]])
    b = Matrix([[zmono(-1), ZLaurent.zero()],
                [ZLaurent.zero(), ZLaurent.zero()]])
    rep = condition_report(AlgebraSpec(2, [a, b]))
    assert not rep.commutes
    assert not rep.satisfied


def test_span_dim_inconclusive_window():
    with pytest.raises(PrecisionError):
        laurent_span_dim([[ZLaurent.zero(prec=3)]])
    assert laurent_span_dim([[ZLaurent.zero()]]) == 0


# -- characteristic data ------------------------------------------------

def test_charpoly_j():
    cs = spectral_charpoly(j_matrix())
    assert cs[0] == ZLaurent.zero()
    assert cs[1] == zmono(-1, -1)
    assert charpoly_string(cs) == "t^2 - z^-1"


def test_charpoly_diagonal():
    g = Matrix([[zmono(-1), ZLaurent.zero()],
                [ZLaurent.zero(), zmono(-2)]])
    cs = spectral_charpoly(g)
    assert cs[0] == ZLaurent({-1: 1, -2: 1})
    assert cs[1] == zmono(-3)


def test_cayley_hamilton_sampled():
    rng = random.Random(1313)
    for _ in range(20):
        n = rng.choice([2, 3])
        g = Matrix([[ZLaurent({k: rng.randint(-3, 3) for k in range(-2, 2)
                               if rng.random() < 0.5})
                     for _ in range(n)] for _ in range(n)])
        assert cayley_hamilton_holds(g)


def test_cyclicity():
    assert is_cyclic(j_matrix())
    assert not is_cyclic(Matrix([[zmono(-2), ZLaurent.zero()],
                                 [ZLaurent.zero(), zmono(-2)]]))
    g = Matrix([[zmono(-1), ZLaurent.zero()],
                [ZLaurent.zero(), zmono(-2)]])
    assert is_cyclic(g)
