import random
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from halfder.algebras import direct_sum, make_algebra
from halfder.core import Element, Family, bidx
from halfder.solver import (
    LinMapWindow,
    SolutionSpace,
    WindowEscapeError,
    closed_form_map,
    delta_residual,
    identity_map,
    is_trivial_space,
    nullspace,
    solve_delta_derivations,
    solve_stabilized,
    stabilize,
)

HALF = Fraction(1, 2)


def E(i):
    return bidx(Family.E, 2 * i)


def L(i):
    return bidx(Family.L, 2 * i)


def in_window_pairs(alg, W):
    srcs = alg.window_indices(W)
    sset = set(srcs)
    for x, y in combinations_with_replacement(srcs, 2):
        out = alg.bracket_basis((x, y))
        if all(t in sset for t in out.terms):
            yield (x, y)
            if x != y:
                yield (y, x)


# ---------------------------------------------------------------------------
# nullspace


def test_nullspace_unit_examples():
    assert nullspace([[1, -1]]) == [[Fraction(1), Fraction(1)]]
    assert nullspace([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == []
    zero = nullspace([[0, 0], [0, 0]])
    assert zero == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    got = nullspace([[Fraction(1, 2), Fraction(1, 3)]])
    assert got == [[Fraction(-2, 3), Fraction(1)]]


def test_nullspace_random_matrix_self_check():
    rng = random.Random(7)
    rows = [
        [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(30)] for _ in range(20)
    ]
    basis = nullspace(rows)
    # multiply back: every basis vector kills every row
    for vec in basis:
        for row in rows:
            assert sum(r * v for r, v in zip(row, vec)) == 0
    # rank-nullity against an independent elimination
    dense = [row[:] for row in rows]
    rank = 0
    for col in range(30):
        piv = next((r for r in range(rank, 20) if dense[r][col]), None)
        if piv is None:
            continue
        dense[rank], dense[piv] = dense[piv], dense[rank]
        for r in range(20):
            if r != rank and dense[r][col]:
                f = dense[r][col] / dense[rank][col]
                dense[r] = [a - f * b for a, b in zip(dense[r], dense[rank])]
        rank += 1
    assert len(basis) == 30 - rank
    # determinism
    assert nullspace(rows) == basis


# ---------------------------------------------------------------------------
# delta_residual


def test_delta_residual_shift_map_frozen_example():
    witt = make_algebra("witt")
    shift1 = closed_form_map("witt_shift_family", {1: 1}, witt, 8)
    res = delta_residual(witt, shift1, 1, (E(2), E(3)))
    assert res == Element.basis(E(6))
    assert delta_residual(witt, shift1, HALF, (E(2), E(3))).is_zero()


def test_shift_maps_are_half_derivations_on_window():
    witt = make_algebra("witt")
    phi = closed_form_map("witt_shift_family", {-2: Fraction(1, 3), 0: 2, 1: -1}, witt, 6)
    for pair in in_window_pairs(witt, 6):
        assert delta_residual(witt, phi, HALF, pair).is_zero()


def test_identity_map_is_delta_half_derivation_everywhere():
    for name, params in (("virasoro", {}), ("svir", {"sector": "neveu_schwarz"})):
        alg = make_algebra(name, params)
        phi = identity_map(alg, 5)
        for pair in in_window_pairs(alg, 5):
            assert delta_residual(alg, phi, HALF, pair).is_zero()


def test_delta_residual_window_escape_is_reported():
    witt = make_algebra("witt")
    phi = closed_form_map("witt_shift_family", {0: 1}, witt, 4)
    with pytest.raises(WindowEscapeError):
        delta_residual(witt, phi, HALF, (E(2), E(3)))  # output e_5 leaves W=4
    with pytest.raises(WindowEscapeError):
        delta_residual(witt, phi, HALF, (E(9), E(0)))


def test_virasoro_residual_matches_hand_derived_relations():
    # independent oracle: with phi(L_m) = sum_k A[m,k] L_k + rho_m c and
    # phi(c) = gamma c, the L_k coefficient of the residual at (L_p, L_q) is
    # (p-q)A[p+q,k] - 1/2((k-2q)A[p,k-q] + (2p-k)A[q,k-p]) and the central
    # one at p+q != 0 is (p-q)rho_{p+q} - 1/24((q-q^3)A[p,-q] + (p^3-p)A[q,-p]).
    vir = make_algebra("virasoro")
    rng = random.Random(3)
    W, S = 6, 2
    srcs = vir.window_indices(W)
    A: dict = {}
    rho: dict = {}
    images: dict = {}
    gamma = Fraction(rng.randint(-3, 3))
    for s in srcs:
        if s.family is Family.C:
            images[s] = Element.single(s, gamma)
            continue
        m = s.degree2 // 2
        terms: dict = {}
        for k in range(m - S, m + S + 1):
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            A[(m, k)] = c
            if c:
                terms[L(k)] = c
        rho[m] = Fraction(rng.randint(-4, 4))
        if rho[m]:
            terms[bidx(Family.C)] = rho[m]
        images[s] = Element(terms)
    phi = LinMapWindow(vir, W, images)

    def a(m, k):
        return A.get((m, k), Fraction(0))

    for p, q in ((1, 2), (-3, 1), (2, 2), (4, -2), (0, 3)):
        res = delta_residual(vir, phi, HALF, (L(p), L(q)))
        for k in range(-2 * W, 2 * W + 1):
            expect = (p - q) * a(p + q, k) - HALF * (
                (k - 2 * q) * a(p, k - q) + (2 * p - k) * a(q, k - p)
            )
            assert res.coeff(L(k)) == expect, (p, q, k)
        if p + q != 0:
            central = (p - q) * rho[p + q] - Fraction(1, 24) * (
                (q - q**3) * a(p, -q) + (p**3 - p) * a(q, -p)
            )
            assert res.coeff(bidx(Family.C)) == central, (p, q)


# ---------------------------------------------------------------------------
# solve + stabilize


def test_witt_half_derivation_space_is_the_shift_family():
    witt = make_algebra("witt")
    space = solve_stabilized(witt, HALF, window=6, shift=2)
    assert space.stable and space.dimension == 5
    for j in range(-2, 3):
        shift = closed_form_map("witt_shift_family", {j: 1}, witt, 6)
        assert space.contains(shift)
    assert not is_trivial_space(space)
    not_member = closed_form_map("witt_shift_family", {}, witt, 6)
    images = {E(0): Element.basis(E(1))}
    lone = LinMapWindow(witt, 6, images)
    assert not space.contains(lone)
    assert space.contains(not_member)  # zero map sits in every span


def test_virasoro_space_is_trivial():
    vir = make_algebra("virasoro")
    space = solve_stabilized(vir, HALF, window=6, shift=2)
    assert space.dimension == 1
    assert is_trivial_space(space)


def test_wab_generic_point_is_trivial():
    wab = make_algebra("wab", a=1, b=2)
    space = solve_stabilized(wab, HALF, window=6, shift=2)
    assert space.dimension == 1
    assert is_trivial_space(space)


def test_wab_b_minus_one_has_two_shift_families():
    wab = make_algebra("wab", a=1, b=-1)
    S = 2
    space = solve_stabilized(wab, HALF, window=6, shift=S)
    assert space.dimension == 2 * (2 * S + 1)
    assert not is_trivial_space(space)
    for t in range(-S, S + 1):
        even = closed_form_map("wab_even", {t: 1}, wab, 6)
        odd = closed_form_map("wab_odd", {t: 1}, wab, 6)
        assert space.contains(even)
        assert space.contains(odd)


def test_wab_closed_forms_only_work_at_b_minus_one():
    good = make_algebra("wab", a=Fraction(1, 2), b=-1)
    for fam in ("wab_even", "wab_odd"):
        phi = closed_form_map(fam, {1: 1}, good, 5)
        for pair in in_window_pairs(good, 5):
            assert delta_residual(good, phi, HALF, pair).is_zero(), (fam, pair)
    bad = make_algebra("wab", a=Fraction(1, 2), b=3)
    phi = closed_form_map("wab_odd", {1: 1}, bad, 5)
    assert any(
        not delta_residual(bad, phi, HALF, pair).is_zero() for pair in in_window_pairs(bad, 5)
    )


def test_finite_solver_dimensions():
    sl2 = make_algebra("sl2")
    half = solve_delta_derivations(sl2, HALF)
    assert half.stable and half.dimension == 1 and is_trivial_space(half)
    ordinary = solve_delta_derivations(sl2, 1)
    assert ordinary.dimension == 3  # all derivations of sl2 are inner
    double = solve_delta_derivations(direct_sum(sl2, make_algebra("sl2")), HALF)
    assert double.dimension == 2
    sch = solve_delta_derivations(make_algebra("schrodinger"), HALF)
    assert sch.dimension == 1 and is_trivial_space(sch)
    a4 = make_algebra("nary_simple", n=3)
    third = solve_delta_derivations(a4, Fraction(1, 3))
    assert third.dimension == 1 and is_trivial_space(third)


def test_super_solver_spaces_are_trivial():
    for sector in ("ramond", "neveu_schwarz"):
        sv = make_algebra("svir", sector=sector)
        space = solve_stabilized(sv, HALF, window=4, shift=2)
        assert space.dimension == 1, sector
        assert is_trivial_space(space)
    n2 = make_algebra("n2sca", sector="neveu_schwarz")
    space = solve_stabilized(n2, HALF, window=3, shift=1)
    assert space.dimension == 1
    assert is_trivial_space(space)


def test_solvable_space_matches_closed_form():
    sol = make_algebra("solvable")
    S = 2
    space = solve_stabilized(sol, HALF, window=8, shift=S)
    # one overall scalar plus one free image coefficient per reachable e_i
    assert space.dimension == S + 1
    cand = closed_form_map("solvable_candidate", {1: 1, 2: Fraction(2, 3), 3: -1}, sol, 8)
    assert space.contains(cand)
    ident = closed_form_map("solvable_candidate", {1: 1}, sol, 8)
    for pair in in_window_pairs(sol, 8):
        assert delta_residual(sol, ident, HALF, pair).is_zero()


def test_raw_solution_spaces_satisfy_their_equations():
    for alg, W, S in (
        (make_algebra("witt"), 5, 2),
        (make_algebra("virasoro"), 4, 2),
        (make_algebra("solvable"), 6, 2),
    ):
        space = solve_delta_derivations(alg, HALF, window=W, shift=S)
        for phi in space.basis:
            for pair in in_window_pairs(alg, W):
                assert delta_residual(alg, phi, HALF, pair).is_zero(), (alg.name, pair)


def test_stabilized_dimension_is_monotone_in_window():
    witt = make_algebra("witt")
    dims = [solve_stabilized(witt, HALF, window=W, shift=2).dimension for W in (5, 6, 7)]
    assert dims == sorted(dims, reverse=True)
    assert dims == [5, 5, 5]


def test_stabilize_preconditions():
    witt = make_algebra("witt")
    small = solve_delta_derivations(witt, HALF, window=6, shift=2)
    with pytest.raises(ValueError):
        stabilize(small, small)  # zero window gap
    other_shift = solve_delta_derivations(witt, HALF, window=10, shift=3)
    with pytest.raises(ValueError):
        stabilize(small, other_shift)
    vir_large = solve_delta_derivations(make_algebra("virasoro"), HALF, window=10, shift=2)
    with pytest.raises(ValueError):
        stabilize(small, vir_large)
    with pytest.raises(ValueError):
        is_trivial_space(small)  # not stabilized
    fin = solve_delta_derivations(make_algebra("sl2"), HALF)
    with pytest.raises(ValueError):
        stabilize(fin, fin)


def test_solver_window_validation():
    witt = make_algebra("witt")
    with pytest.raises(ValueError):
        solve_delta_derivations(witt, HALF, window=4, shift=4)
    with pytest.raises(ValueError):
        solve_delta_derivations(witt, HALF, window=None, shift=None)
    with pytest.raises(ValueError):
        solve_delta_derivations(witt, HALF, window=6, shift=0)


def test_empty_space_flags_anomaly():
    vir = make_algebra("virasoro")
    empty = SolutionSpace(alg=vir, delta=HALF, window=4, shift=2, basis=(), stable=True)
    with pytest.warns(UserWarning):
        assert not is_trivial_space(empty)


def test_thin_candidate_frozen_residual():
    thin = make_algebra("thin")
    cand = closed_form_map("thin_candidate", {"alpha": {}, "beta": {1: 1}}, thin, 8)
    res = delta_residual(thin, cand, HALF, (E(2), E(3)))
    assert res == Element.single(E(4), Fraction(-1, 2))


def test_thin_candidate_with_beta1_zero_is_a_half_derivation():
    thin = make_algebra("thin")
    cand = closed_form_map(
        "thin_candidate", {"alpha": {1: 1, 3: -2}, "beta": {2: 1, 4: Fraction(1, 3)}}, thin, 10
    )
    for pair in in_window_pairs(thin, 10):
        assert delta_residual(thin, cand, HALF, pair).is_zero(), pair


def test_thin_space_excludes_beta1():
    thin = make_algebra("thin")
    space = solve_stabilized(thin, HALF, window=9, shift=3)
    bad = closed_form_map("thin_candidate", {"alpha": {}, "beta": {1: 1}}, thin, 9)
    assert not space.contains(bad)
    good = closed_form_map("thin_candidate", {"alpha": {1: 1}, "beta": {2: 1, 3: 2}}, thin, 9)
    assert space.contains(good)


def test_closed_form_validation():
    witt = make_algebra("witt")
    with pytest.raises(ValueError):
        closed_form_map("witt_shift_family", {}, make_algebra("thin"), 6)
    with pytest.raises(ValueError):
        closed_form_map("no_such_family", {}, witt, 6)
    with pytest.raises(ValueError):
        closed_form_map("solvable_candidate", {0: 1}, make_algebra("solvable"), 6)


def test_contains_requires_matching_window():
    witt = make_algebra("witt")
    space = solve_stabilized(witt, HALF, window=6, shift=2)
    other = closed_form_map("witt_shift_family", {0: 1}, witt, 5)
    with pytest.raises(ValueError):
        space.contains(other)
    wide = closed_form_map("witt_shift_family", {3: 1}, witt, 6)  # shift 3 > S=2
    assert not space.contains(wide)
