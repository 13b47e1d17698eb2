import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from pleatlab.errors import ConfigurationError, DomainError
from pleatlab.hyperboloid import HPoint, minkowski_matrix
from pleatlab.lattices import (
    LatticeElement,
    QuadForm,
    angle_search,
    check_angle_agreement,
    closure_report,
    column_candidates,
    conjugate_to_lorentz,
    enumerate_elements,
    exact_angle,
    is_admissible,
    preserves_cone_components,
    preserves_form,
    rational_hyperplane,
    signature,
)
from pleatlab.quadfield import QuadElem

from oracles import brute_force

S2 = QuadElem.from_ab(0, 1, 2)
F2 = QuadForm.standard(2, 2)
J = minkowski_matrix(3)


def s2(a, b):
    return QuadElem.from_ab(a, b, 2)


PELL = [[1, 0, 0], [0, s2(3, 2), s2(4, 2)], [0, s2(2, 2), s2(3, 2)]]

# count of cone-preserving integral isometries of diag(1, 1, -sqrt 2), by height
FROZEN_COUNTS_D2 = {1: 8, 2: 8, 3: 40, 4: 72}


def test_standard_form_admissible():
    assert is_admissible(F2)
    assert signature(F2, 1) == (2, 1)
    assert signature(F2, -1) == (3, 0)


def test_non_admissible_forms():
    assert not is_admissible(QuadForm.diagonal([1, 1, S2], 2))
    assert not is_admissible(QuadForm.diagonal([1, -1, -S2], 2))
    # real signature (2, 1) but conjugate indefinite
    assert not is_admissible(QuadForm.diagonal([1, 1, -1], 2))


def test_signature_needs_off_diagonal_pivot():
    F = QuadForm([[0, 1, 0], [1, 0, 0], [0, 0, 1]], 2)
    assert signature(F) == (2, 1)


def test_degenerate_form_rejected():
    with pytest.raises(DomainError):
        signature(QuadForm.diagonal([1, 0, 1], 2))


def test_signature_matches_numeric_eigenvalues():
    rng = np.random.default_rng(7)
    for _ in range(30):
        A = rng.integers(-3, 4, size=(3, 3, 2))
        rows = [[(int(A[i, j, 0]), int(A[i, j, 1])) for j in range(3)] for i in range(3)]
        for i in range(3):
            for j in range(i):
                rows[i][j] = rows[j][i]
        F = QuadForm(rows, 2)
        for sigma in (1, -1):
            w = np.linalg.eigvalsh(F.numeric(sigma))
            if np.min(np.abs(w)) < 1e-8:
                continue
            assert signature(F, sigma) == (int(np.sum(w > 0)), int(np.sum(w < 0)))


def test_preserves_form_examples():
    assert preserves_form(np.eye(3, dtype=int).tolist(), F2)
    assert preserves_form([[-1, 0, 0], [0, 1, 0], [0, 0, 1]], F2)
    assert preserves_form(PELL, F2)
    assert not preserves_form([[1, 0, 0], [0, 1, 0], [0, 0, 2]], F2)


def test_cone_components():
    assert preserves_cone_components(np.eye(3, dtype=int).tolist(), F2)
    assert not preserves_cone_components([[1, 0, 0], [0, 1, 0], [0, 0, -1]], F2)
    assert preserves_cone_components(PELL, F2)


def test_pell_element_height_and_conjugation():
    T = LatticeElement.make(PELL, F2)
    assert T.height() == 4
    G = conjugate_to_lorentz(T, F2)
    assert np.max(np.abs(G.T @ J @ G - J)) < 1e-12
    assert np.isclose(np.linalg.det(G), 1.0)
    # hyperbolic: trace of the boost block exceeds 2
    assert np.trace(G[1:, 1:]) > 2.0


def test_conjugation_of_diagonal_commutes():
    T = LatticeElement.make([[-1, 0, 0], [0, 1, 0], [0, 0, 1]], F2)
    assert np.allclose(conjugate_to_lorentz(T, F2), np.diag([-1.0, 1.0, 1.0]))
    assert np.allclose(conjugate_to_lorentz(LatticeElement.identity(F2), F2), np.eye(3))


def test_enumeration_matches_brute_force_h1():
    assert enumerate_elements(F2, 1) == brute_force(F2, 1)


@pytest.mark.parametrize("d", [3, 5])
def test_enumeration_matches_brute_force_other_fields(d):
    F = QuadForm.standard(2, d)
    assert enumerate_elements(F, 1) == brute_force(F, 1)


def test_enumeration_h1_is_signed_permutations():
    E = enumerate_elements(F2, 1)
    perms = set()
    for P in ([[1, 0], [0, 1]], [[0, 1], [1, 0]]):
        for s0, s1 in itertools.product((1, -1), repeat=2):
            rows = [[s0 * P[0][0], s0 * P[0][1], 0], [s1 * P[1][0], s1 * P[1][1], 0], [0, 0, 1]]
            perms.add(LatticeElement.make(rows, F2))
    assert perms <= E
    assert len(E) == FROZEN_COUNTS_D2[1]


@pytest.mark.parametrize("H", [1, 2, 3, 4])
def test_enumeration_counts_frozen(H):
    E = enumerate_elements(F2, H)
    assert len(E) == FROZEN_COUNTS_D2[H]
    for T in E:
        assert T.height() <= H
        assert preserves_form(T, F2)
        assert preserves_cone_components(T, F2)
        G = conjugate_to_lorentz(T, F2)
        assert np.max(np.abs(G.T @ J @ G - J)) < 1e-12
        img = G @ np.array([0.0, 0.0, 1.0])
        assert abs(img[:2] @ img[:2] - img[2] ** 2 + 1.0) <= 1e-9


def test_enumeration_contains_pell():
    assert LatticeElement.make(PELL, F2) in enumerate_elements(F2, 4)


def test_enumeration_parallel_matches_serial():
    assert enumerate_elements(F2, 3, jobs=2) == enumerate_elements(F2, 3)


def test_enumeration_range_checks():
    with pytest.raises(ConfigurationError):
        enumerate_elements(F2, 5)
    with pytest.raises(ConfigurationError):
        enumerate_elements(F2, 0)
    with pytest.raises(ConfigurationError):
        enumerate_elements(QuadForm.standard(3, 2), 1)
    with pytest.raises(ConfigurationError):
        enumerate_elements(QuadForm([[1, 1, 0], [1, 1, 0], [0, 0, -S2]], 2), 1)


def test_column_candidates_have_right_norm():
    for j, cands in enumerate(column_candidates(F2, 2)):
        for v in cands[:50]:
            e = [QuadElem(int(x), int(y), 2) for x, y in v]
            assert F2.value(e) == F2.F[j][j]


def test_closure_report():
    for H in (1, 3):
        E = enumerate_elements(F2, H)
        rep = closure_report(E, F2, H)
        assert rep.size == len(E)
        assert rep.inverse_checked > 0 and rep.products_checked > 0
        assert rep.closed


def test_inverse_is_exact():
    T = LatticeElement.make(PELL, F2)
    assert T @ T.inverse(F2) == LatticeElement.identity(F2)


def test_rational_hyperplane_examples():
    assert np.allclose(rational_hyperplane([1, 0, 0], F2).normal, [1, 0, 0])
    assert np.allclose(rational_hyperplane([0, 1, 0], F2).normal, [0, 1, 0])
    with pytest.raises(DomainError):
        rational_hyperplane([0, 0, 1], F2)


def test_rational_hyperplane_angle_quarter_pi():
    from pleatlab.hyperboloid import hyperplane_angle

    a = hyperplane_angle(rational_hyperplane([1, 0, 0], F2), rational_hyperplane([1, 1, 0], F2))
    assert abs(a.angle - math.pi / 4) < 1e-12
    assert abs(exact_angle([1, 0, 0], [1, 1, 0], F2) - math.pi / 4) < 1e-12


def _coords(e):
    return tuple(x.coords() for x in e)


def test_angle_search_right_angle():
    res = angle_search(F2, 1, (math.pi / 2 - 0.01, math.pi / 2 + 0.01))
    pairs = {frozenset((_coords(p.e1), _coords(p.e2))) for p in res.pairs}
    e0 = ((1, 0), (0, 0), (0, 0))
    e1 = ((0, 0), (1, 0), (0, 0))
    assert frozenset((e0, e1)) in pairs


def test_angle_search_quarter_pi():
    res = angle_search(F2, 1, (math.pi / 4 - 0.01, math.pi / 4 + 0.01))
    pairs = {frozenset((_coords(p.e1), _coords(p.e2))) for p in res.pairs}
    assert frozenset((((1, 0), (0, 0), (0, 0)), ((1, 0), (1, 0), (0, 0)))) in pairs
    angles = [p.angle for p in res.pairs]
    assert angles == sorted(angles)


def test_angle_search_tiny_interval_empty_with_histogram():
    res = angle_search(F2, 1, (0.001, 0.002))
    assert len(res) == 0
    assert res.counts.sum() == res.intersecting > 0
    assert res.bin_edges[0] == 0.0 and res.bin_edges[-1] == math.pi


def test_angle_search_rejects_bad_interval():
    with pytest.raises(ConfigurationError):
        angle_search(F2, 1, (1.0, 0.5))
    with pytest.raises(ConfigurationError):
        angle_search(F2, 3, (0.1, 0.2))


coords12 = st.lists(st.integers(-3, 3), min_size=12, max_size=12)


@given(coords12)
def test_angle_formula_agreement(c):
    e1 = [QuadElem(c[2 * i], c[2 * i + 1], 2) for i in range(3)]
    e2 = [QuadElem(c[6 + 2 * i], c[7 + 2 * i], 2) for i in range(3)]
    assume(F2.value(e1).sign() > 0 and F2.value(e2).sign() > 0)
    assume(exact_angle(e1, e2, F2) is not None)
    assert check_angle_agreement(e1, e2, F2) < 1e-10


def test_angle_formula_agreement_100_seeded_pairs():
    rng = np.random.default_rng(2024)
    done = 0
    while done < 100:
        c = rng.integers(-3, 4, size=(2, 3, 2))
        e1 = [QuadElem(int(x), int(y), 2) for x, y in c[0]]
        e2 = [QuadElem(int(x), int(y), 2) for x, y in c[1]]
        if F2.value(e1).sign() <= 0 or F2.value(e2).sign() <= 0 or exact_angle(e1, e2, F2) is None:
            continue
        assert check_angle_agreement(e1, e2, F2) < 1e-10
        done += 1


def test_conjugated_point_stays_on_sheet():
    T = LatticeElement.make(PELL, F2)
    G = conjugate_to_lorentz(T, F2)
    HPoint(G @ np.array([0.0, 0.0, 1.0]))
