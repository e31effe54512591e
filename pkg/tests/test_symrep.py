from fractions import Fraction
from math import factorial

import pytest

from hitchinforge.exactnum import ExactMatrix, FieldElem
from hitchinforge.qforms import Place, form_invariants
from hitchinforge.symrep import (
    SIGN_CASES,
    cocycle_commutes_with_form,
    cocycle_matrix,
    hermitian_h,
    j_matrix,
    so_form_closed_hasse,
    so_form_from_cocycle,
    tau,
    trace_poly,
)
from conftest import random_sl2q


def test_tau_examples():
    assert tau(4, ExactMatrix.identity(2)).is_identity()
    lam = Fraction(5)
    d = tau(3, ExactMatrix.diagonal([lam, 1 / lam]))
    assert d == ExactMatrix.diagonal([lam ** 2, Fraction(1), lam ** -2])
    u = tau(3, ExactMatrix([[1, 1], [0, 1]]))
    assert u == ExactMatrix([[1, 1, 1], [0, 1, 2], [0, 0, 1]])


def test_tau_rejects_singular():
    with pytest.raises(ValueError):
        tau(3, ExactMatrix([[1, 1], [1, 1]]))


def test_tau_homomorphism_and_invariance(rng):
    for n in range(2, 8):
        j = j_matrix(n)
        for _ in range(10):
            m = random_sl2q(rng)
            nn = random_sl2q(rng)
            tm, tn = tau(n, m), tau(n, nn)
            assert tau(n, m * nn) == tm * tn
            assert tm.det() == 1
            assert tm.transpose() * j * tm == j


def test_j_matrix_examples():
    assert j_matrix(2) == ExactMatrix([[0, 1], [-1, 0]])
    j3 = j_matrix(3)
    assert [j3.entries[i][2 - i] for i in range(3)] == [2, -1, 2]
    for n in range(2, 10):
        jn = j_matrix(n)
        assert jn.transpose() == ((-1) ** (n - 1)) * jn
        for i in range(1, n + 1):
            expected = (-1) ** (i - 1) * factorial(n - i) * factorial(i - 1)
            assert jn.entries[i - 1][n - i] == expected


def test_trace_poly_recurrence_and_examples():
    assert trace_poly(2).coefficients == (0, 1)
    assert trace_poly(3).coefficients == (-1, 0, 1)       # t^2 - 1
    assert trace_poly(4).coefficients == (0, -2, 0, 1)    # t^3 - 2t
    for n in range(3, 10):
        p, q, r = trace_poly(n - 2), trace_poly(n - 1), trace_poly(n)
        t = Fraction(7, 3)
        assert r(t) == t * q(t) - p(t)


def test_trace_identity(rng):
    for n in range(2, 9):
        poly = trace_poly(n)
        for _ in range(8):
            m = random_sl2q(rng)
            assert poly(m.trace()) == tau(n, m).trace()


def test_cocycle_matrix_cases():
    assert cocycle_matrix(3, 5, (1, 1)).is_identity()
    assert cocycle_matrix(3, 5, (1, -1)) == ExactMatrix.diagonal([1, -1])
    assert cocycle_matrix(3, 5, (-1, 1)) == ExactMatrix([[0, 1], [1, 0]])
    assert cocycle_matrix(3, 5, (-1, -1)) == ExactMatrix([[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        cocycle_matrix(4, 5, (-1, 1))
    with pytest.raises(ValueError):
        cocycle_matrix(3, 9, (1, -1))


def test_hermitian_h_examples():
    assert hermitian_h(3, 3, 3, (-1, -1)) == ExactMatrix.diagonal([2, 1, 2])
    assert hermitian_h(2, 3, 3, (1, 1)) == j_matrix(2)


def test_hermitian_h_symmetry_and_commutation():
    for n in range(2, 8):
        for signs in SIGN_CASES:
            h = hermitian_h(n, 3, 5, signs)  # asserts +-symmetry internally
            if n % 2:
                assert h.transpose() == h
            assert cocycle_commutes_with_form(n, signs)
            if n % 2:
                assert cocycle_commutes_with_form(n, signs, strict=True)


def _fact_pattern(n, case, a, b):
    """The diagonal the construction must reproduce, from the closed
    factorial patterns (corners and center as displayed; interior entries
    follow the same two-sided rule)."""
    k = (n - 1) // 2
    f = lambda j: factorial(n - j) * factorial(j - 1)
    out = []
    if case == "degree-2":
        for j in range(1, k + 1):
            out.append(2 * f(j))
        out.append(factorial(k) ** 2 if n % 4 == 1 else -a * factorial(k) ** 2)
        for j in range(k, 0, -1):
            out.append(-2 * a * f(j))
        return out
    if n % 4 == 1:
        for j in range(1, k + 1):
            out.append((-2 * a if j % 2 else -2 * b) * f(j))
        out.append(factorial(k) ** 2)
        for j in range(k, 0, -1):
            out.append((2 if j % 2 else 2 * a * b) * f(j))
        return out
    for j in range(1, k + 1):
        out.append((-2 * b if j % 2 else 2) * f(j))
    out.append(-a * factorial(k) ** 2)
    for j in range(k, 0, -1):
        out.append((2 * a * b if j % 2 else -2 * a) * f(j))
    return out


@pytest.mark.parametrize("n", [5, 7])
@pytest.mark.parametrize("case", ["degree-2", "degree-4"])
@pytest.mark.parametrize("ab", [(3, 5), (2, 3)])
def test_so_form_matches_displayed_diagonals(n, case, ab):
    a, b = ab
    res = so_form_from_cocycle(n, a, b, case)
    got = [Fraction(e) if not isinstance(e, FieldElem) else e.rational_value()
           for e in res.diagonal_matrix.diagonal_entries()]
    assert got == _fact_pattern(n, case, a, b)


def test_so_form_example_values():
    res = so_form_from_cocycle(5, 3, 5, "degree-2")
    assert [int(e) for e in res.diagonal_matrix.diagonal_entries()] == [
        48, 12, 4, -36, -144]


def test_so_form_hasse_closed_form():
    for n in (5, 7):
        for case in ("degree-2", "degree-4"):
            for a, b in ((3, 5), (2, 3)):
                res = so_form_from_cocycle(n, a, b, case)
                for place in [Place.finite(2), Place.finite(3),
                              Place.finite(5), Place.real()]:
                    assert res.invariants.hasse(place) == \
                        so_form_closed_hasse(n, a, b, case, place)


def test_so_form_trivial_case():
    res = so_form_from_cocycle(5, 1, 4, "trivial")
    assert res.invariants == form_invariants(j_matrix(5))
    assert res.diagonal_matrix.is_diagonal()


def test_so_form_case_mismatch():
    with pytest.raises(ValueError):
        so_form_from_cocycle(5, 4, 9, "degree-2")
    with pytest.raises(ValueError):
        so_form_from_cocycle(5, 3, 3, "degree-4")   # ab = 9 is a square
    with pytest.raises(ValueError):
        so_form_from_cocycle(5, 3, 5, "trivial")
    with pytest.raises(ValueError):
        so_form_from_cocycle(6, 3, 5, "degree-2")
