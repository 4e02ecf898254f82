from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from cayleymenger import cmcore
from cayleymenger.cmcore import (
    SymbolicMatrix,
    antisymmetric_matrix,
    cm_matrix,
    delta,
    delta_matrix,
    det_bareiss,
    det_laplace,
    gamma,
    lambda_,
    normalized_delta,
    normalized_gamma,
    normalized_x,
    relabel,
    x_det,
    x_matrix,
)
from cayleymenger.errors import CapExceeded, InvalidDimension
from cayleymenger.polyring import Polynomial, content, dist, is_homogeneous, tau, var

from conftest import leibniz_det


def d(i, j):
    return var(dist(i, j))


def test_cm_matrix_1():
    assert cm_matrix(1) == SymbolicMatrix([[0, 1, 1], [1, 0, d(0, 1) ** 2], [1, d(0, 1) ** 2, 0]])


def test_cm_matrix_layout():
    assert cm_matrix(2).order == 4
    assert cm_matrix(3)[2, 3] == d(1, 2) ** 2
    M = cm_matrix(4)
    assert M.is_symmetric()
    assert all(M[i, i] == 0 for i in range(M.order))
    assert all(M[0, j] == 1 for j in range(1, M.order))


def test_delta_matrix():
    assert delta_matrix(1) == SymbolicMatrix([[0, d(0, 1) ** 2], [d(0, 1) ** 2, 0]])
    assert delta_matrix(4).order == 5
    for n in range(1, 6):
        assert delta_matrix(n) == cm_matrix(n).minor(0, 0)


def test_x_matrix():
    assert x_matrix(2) == SymbolicMatrix([[0, d(1, 2)], [d(1, 2), 0]])
    assert det_laplace(x_matrix(2)) == -d(1, 2) ** 2
    assert det_laplace(x_matrix(3)) == 2 * d(1, 2) * d(1, 3) * d(2, 3)
    assert det_bareiss(x_matrix(3)) == 2 * d(1, 2) * d(1, 3) * d(2, 3)


def test_antisymmetric_matrix():
    A = antisymmetric_matrix(3)
    assert A[1, 0] == -d(1, 2) and A[0, 1] == d(1, 2)


@pytest.mark.parametrize("builder", [cm_matrix, delta_matrix, x_matrix, antisymmetric_matrix])
def test_invalid_dimension(builder):
    with pytest.raises(InvalidDimension):
        builder(0)


def test_small_determinants():
    assert det_laplace(SymbolicMatrix([[1]])) == 1
    assert det_bareiss(SymbolicMatrix([[1]])) == 1
    assert det_laplace(cm_matrix(1)) == 2 * d(0, 1) ** 2
    assert det_bareiss(cm_matrix(1)) == 2 * d(0, 1) ** 2
    assert det_laplace(delta_matrix(2)) == 2 * d(0, 1) ** 2 * d(0, 2) ** 2 * d(1, 2) ** 2


def test_singular_matrix():
    M = SymbolicMatrix([[d(0, 1), d(0, 2)], [2 * d(0, 1), 2 * d(0, 2)]])
    assert det_laplace(M) == 0
    assert det_bareiss(M) == 0
    zero_col = SymbolicMatrix([[0, 1, 2], [0, 3, 4], [0, 5, 6]])
    assert det_bareiss(zero_col) == 0


def test_laplace_matches_leibniz():
    # Leibniz expansion is the brute-force oracle for both algorithms.
    for M in [cm_matrix(1), cm_matrix(2), cm_matrix(3), delta_matrix(3), x_matrix(4), antisymmetric_matrix(5)]:
        assert det_laplace(M) == leibniz_det(M.rows)


BUILDERS = [
    (cm_matrix, range(1, 6)),
    (delta_matrix, range(1, 7)),
    (x_matrix, range(1, 8)),
    (antisymmetric_matrix, range(1, 8)),
]


@pytest.mark.parametrize("builder,ns", BUILDERS, ids=lambda x: getattr(x, "__name__", ""))
def test_laplace_equals_bareiss_on_builders(builder, ns):
    for n in ns:
        M = builder(n)
        assert M.order <= 7
        assert det_laplace(M) == det_bareiss(M)


def random_int_matrix(rng, m):
    return SymbolicMatrix([[rng.randint(-9, 9) for _ in range(m)] for _ in range(m)])


def test_laplace_equals_bareiss_random_integer():
    rng = random.Random(20240611)
    for k in range(100):
        M = random_int_matrix(rng, 1 + k % 6)
        assert det_laplace(M) == det_bareiss(M)


def test_random_integer_against_leibniz():
    rng = random.Random(3)
    for m in range(1, 6):
        M = random_int_matrix(rng, m)
        assert det_bareiss(M) == leibniz_det(M.rows)


def test_random_symbolic_entries():
    rng = random.Random(11)
    pool = [d(0, 1), d(0, 2) + 1, -d(1, 2), Polynomial.constant(3), Polynomial()]
    for _ in range(15):
        M = SymbolicMatrix([[rng.choice(pool) for _ in range(4)] for _ in range(4)])
        assert det_laplace(M) == det_bareiss(M) == leibniz_det(M.rows)


class TestGamma:
    def test_closed_forms(self):
        assert gamma(1) == 2 * d(0, 1) ** 2
        assert delta(1) == -d(0, 1) ** 4
        assert delta(2) == 2 * d(0, 1) ** 2 * d(0, 2) ** 2 * d(1, 2) ** 2

    def test_gamma2_heron(self):
        a, b, c = d(0, 1), d(1, 2), d(0, 2)
        assert gamma(2) == -(a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_degrees(self, n):
        assert is_homogeneous(gamma(n)) == (True, 2 * n)
        assert is_homogeneous(delta(n)) == (True, 2 * n + 2)

    def test_cached_identity(self):
        assert gamma(4) is gamma(4)

    def test_thread_safe_cache(self):
        cmcore.clear_cache()
        with ThreadPoolExecutor(max_workers=6) as pool:
            results = list(pool.map(lambda n: gamma(n), [5] * 12))
        assert all(r == results[0] for r in results)
        assert gamma(5) == det_bareiss(cm_matrix(5))

    @pytest.mark.parametrize("n", range(2, 5))
    def test_label_symmetry(self, n):
        rng = random.Random(n)
        for _ in range(3):
            perm = list(range(n + 1))
            rng.shuffle(perm)
            assert relabel(gamma(n), perm) == gamma(n)
            assert relabel(delta(n), perm) == delta(n)

    def test_cap(self):
        old = cmcore.symbolic_cap()
        try:
            cmcore.set_symbolic_cap(3)
            with pytest.raises(CapExceeded):
                gamma(4)
            delta(4)  # order 5 fits
            with pytest.raises(CapExceeded):
                delta(5)
        finally:
            cmcore.set_symbolic_cap(old)
        with pytest.raises(InvalidDimension):
            gamma(0)


class TestLambda:
    def test_top_is_gamma(self):
        for n in range(1, 5):
            assert lambda_(n, n) == gamma(n)

    def test_lambda21(self):
        assert lambda_(2, 1) == d(0, 1) ** 4 - 4 * d(0, 1) ** 2 * var(tau(2)) ** 2

    def test_homogeneous(self):
        assert is_homogeneous(lambda_(3, 2)) == (True, 6)
        for n in range(2, 6):
            for p in range(1, n + 1):
                assert is_homogeneous(lambda_(n, p)) == (True, 2 * n)

    def test_variables(self):
        for n in range(2, 6):
            for p in range(1, n):
                allowed = {dist(i, j) for j in range(1, p + 1) for i in range(j)}
                allowed |= {tau(k) for k in range(p + 1, n + 1)}
                assert lambda_(n, p).variables() <= allowed

    @pytest.mark.parametrize("n,p", [(2, 0), (2, 3), (3, -1)])
    def test_range(self, n, p):
        with pytest.raises(InvalidDimension):
            lambda_(n, p)


class TestNormalized:
    def test_values(self):
        assert normalized_gamma(3) * 2 == gamma(3)
        assert normalized_gamma(2) == gamma(2)
        assert normalized_x(3) == d(1, 2) * d(1, 3) * d(2, 3)
        assert normalized_delta(2) == d(0, 1) ** 2 * d(0, 2) ** 2 * d(1, 2) ** 2

    @pytest.mark.parametrize("n", range(1, 6))
    def test_content_one(self, n):
        assert content(normalized_gamma(n)) == 1
        assert content(normalized_delta(n + 1)) == 1
        assert content(normalized_x(n + 1)) == 1


@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_antisymmetric_odd_vanishes(n):
    assert det_laplace(antisymmetric_matrix(n)) == 0


def test_x_det_matches_delta_shift():
    # x_matrix(n+1) with x_{i+1,j+1} -> d_ij^2 is delta_matrix(n).
    for n in range(1, 5):
        mapping = {dist(i + 1, j + 1): d(i, j) ** 2 for j in range(n + 1) for i in range(j)}
        from cayleymenger.polyring import substitute

        assert substitute(x_det(n + 1), mapping) == delta(n)
