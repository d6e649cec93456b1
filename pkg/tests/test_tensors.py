import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from torelli_cycles.symplectic import SymplecticMap, a, b, generators, make_space, torus_element
from torelli_cycles.tensors import (
    W3,
    H,
    ResourceLimitExceeded,
    Tensor,
    TensorProduct,
    Wedge,
    annihilated_by_r_contractions,
    apply_map,
    canonicalize,
    contract,
    contract_matching,
    contract_pair_exterior,
    contraction_C3,
    degree,
    dimension,
    expand,
    flat,
    insert_omega,
    insert_omega_sq,
    lift,
    matching_orbit_representatives,
    matchings,
    multiply_exterior,
    omega,
    parse_shape,
    self_contract,
    sort_sign,
    tensor,
    torus_weight_components,
    traceless_project_p,
    unshuffle,
    vector,
    wedge,
    wedge_word,
    weight_band_histogram,
)


def basis_words(k, g):
    return list(itertools.combinations(range(2 * g), k))


def w3_basis(g):
    return [Tensor(W3, g, {w: 1}) for w in basis_words(3, g)]


def w2w3_basis(g):
    ws = basis_words(3, g)
    return [Tensor(Wedge(2, W3), g, {(x, y): 1}) for x, y in itertools.combinations(ws, 2)]


def w3_tensor(g):
    """Hypothesis strategy: random integer combination of ∧³H basis words."""
    words = basis_words(3, g)
    return st.dictionaries(st.sampled_from(words), st.integers(-3, 3), max_size=4).map(
        lambda d: Tensor(W3, g, d)
    )


# -- shapes and canonical words ---------------------------------------------------


def test_parse_shape_round_trip():
    assert parse_shape("H") == H()
    assert parse_shape("w3") == W3
    assert parse_shape("wedge(2, w3)") == Wedge(2, W3)
    assert parse_shape("tensor(H, w2)") == TensorProduct((H(), Wedge(2, H())))
    for bad in ("", "wedge(", "tensor(H,,H)", "w0", "x", "wedge(2,w2)", "H H"):
        with pytest.raises(ValueError):
            parse_shape(bad)


def test_degree_and_dimension():
    assert degree(Wedge(3, W3)) == 9
    assert dimension(W3, 3) == 20
    assert dimension(Wedge(2, W3), 3) == 190
    assert dimension(TensorProduct((W3, H())), 2) == 16


def test_sort_sign():
    assert sort_sign([2, 0, 1]) == (1, (0, 1, 2))
    assert sort_sign([1, 0]) == (-1, (0, 1))
    assert sort_sign([1, 1])[0] == 0


@given(st.permutations(range(5)))
def test_alternation_sign_matches_cycle_sign(perm):
    s, w = canonicalize(Wedge(5, H()), tuple(perm))
    assert w == tuple(range(5))
    assert s == oracles.perm_sign(perm)


@given(st.lists(st.integers(0, 5), min_size=3, max_size=3))
def test_repeated_leg_vanishes(word):
    t = Tensor(W3, 3, [(tuple(word), 1)], canonical=False)
    assert bool(t) == (len(set(word)) == 3)


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        Tensor(H(), 2, {0: 0.5})
    with pytest.raises(TypeError):
        vector(2, 0) * 1.5


def test_arithmetic_and_equality():
    x = wedge_word(2, a(1), b(1))
    y = wedge_word(2, b(1), a(1))
    assert x + y == Tensor.zero(Wedge(2, H()), 2)
    assert x * Fraction(1, 2) * 2 == x
    assert -x == y
    assert len(omega(3)) == 3
    with pytest.raises(ValueError):
        x + omega(3)


# -- products ---------------------------------------------------------------------


@given(w3_tensor(2), w3_tensor(2))
def test_wedge_reorder_sign(x, y):
    # odd-degree elements of the outer exterior algebra anticommute
    assert wedge(lift(x), lift(y)) == -wedge(lift(y), lift(x))
    assert wedge(lift(x), lift(x)) == Tensor.zero(Wedge(2, W3), 2)


def test_wedge_of_h_words_is_graded_commutative():
    x = wedge_word(3, a(1), b(2))
    y = wedge_word(3, a(3))
    assert wedge(x, y) == wedge(y, x)
    z = wedge_word(3, b(3), a(2))
    assert wedge(x, z) == wedge(z, x)


def test_tensor_flattens_products():
    t = tensor(tensor(vector(2, 0), vector(2, 1)), vector(2, 2))
    assert t.shape == flat(3)
    assert t.terms == {(0, 1, 2): 1}


# -- oracle equivalence on every basis input ------------------------------------------


@pytest.mark.parametrize("g", [1, 2, 3])
def test_expand_matches_oracle_w3(g):
    for t in w3_basis(g):
        (w, _), = t.items()
        assert expand(t).terms == oracles.alt(w)


@pytest.mark.parametrize("g", [2, 3])
def test_expand_matches_oracle_w2w3(g):
    for t in w2w3_basis(g):
        (w, _), = t.items()
        assert expand(t).terms == oracles.expand_wedge_of_words(w)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_contract_matches_oracle_w3(g):
    for t in w3_basis(g):
        e = expand(t)
        for i, j in itertools.combinations(range(3), 2):
            assert contract(e, i + 1, j + 1).terms == oracles.contract_flat(e.terms, i, j, g)


@pytest.mark.parametrize("g", [2, 3])
def test_contract_matches_oracle_w2w3(g):
    for t in w2w3_basis(g):
        (w, _), = t.items()
        ref = oracles.expand_wedge_of_words(w)
        e = expand(t)
        for i, j in itertools.combinations(range(6), 2):
            assert contract(e, i + 1, j + 1).terms == oracles.contract_flat(ref, i, j, g)


@pytest.mark.parametrize("g", [2, 3])
def test_double_contraction_matches_oracle_w2w3(g):
    for t in w2w3_basis(g)[::7]:
        (w, _), = t.items()
        ref = oracles.expand_wedge_of_words(w)
        e = expand(t)
        for m in matchings(6, 2):
            (i1, j1), (i2, j2) = m
            step = oracles.contract_flat(ref, i2, j2, g)
            # positions shift down after removing the later pair
            shift = lambda p: p - sum(1 for q in (i2, j2) if q < p)
            want = oracles.contract_flat(step, shift(i1), shift(j1), g)
            assert contract_matching(e, m).terms == want


def _as_w3_pair(t):
    """unshuffle(t, 1) reshaped as ∧³H ⊗ ∧³H."""
    u = unshuffle(t, 1)
    return Tensor(TensorProduct((W3, W3)), t.genus, {(x[0], y[0]): c for (x, y), c in u.terms.items()})


@pytest.mark.parametrize("g", [2, 3])
def test_pair_contraction_matches_flat_contraction(g):
    # contracting the first leg of each factor in H^{⊗6} is the diagonal contraction
    for t in w2w3_basis(g):
        (w, _), = t.items()
        ref = oracles.contract_flat(oracles.expand_wedge_of_words(w), 0, 3, g)
        got = expand(contract_pair_exterior(_as_w3_pair(t)))
        assert got.terms == ref


@pytest.mark.parametrize("g", [2, 3])
def test_multiply_matches_full_antisymmetrization(g):
    for t in w2w3_basis(g):
        pair = _as_w3_pair(t)
        prod = multiply_exterior(pair)
        ref = {}
        for (x, y), c in pair.terms.items():
            ref = oracles.add(ref, oracles.alt(x + y), scale=[1, c])
        assert expand(prod).terms == ref


@pytest.mark.parametrize("g", [1, 2, 3])
def test_self_contraction_matches_flat_route(g):
    # contracting the first two slots of an expanded wedge counts each pair twice
    for t in w3_basis(g):
        (w, _), = t.items()
        lhs = oracles.contract_flat(oracles.alt(w), 0, 1, g)
        rhs = {k: 2 * v for k, v in expand(self_contract(t)).terms.items()}
        assert lhs == rhs


@pytest.mark.parametrize("g", [2, 3])
def test_diagonal_pipeline_matches_flat_route(g):
    from torelli_cycles.cycles import phi_pipeline

    for t in w2w3_basis(g)[::3]:
        (w, _), = t.items()
        F = oracles.contract_flat(oracles.expand_wedge_of_words(w), 0, 3, g)
        ref = {k: Fraction(v, 8) for k, v in oracles.antisymmetrize(F).items() if v}
        assert expand(phi_pipeline(2, t)).terms == oracles.clean(ref)


def test_c3_formula():
    x, y, z = a(1), b(1), a(2)
    assert contraction_C3(wedge_word(2, x, y, z)) == vector(2, z)
    assert contraction_C3(wedge_word(2, x, z, y)) == -vector(2, z)
    assert contraction_C3(wedge_word(2, a(1), a(2), b(2))) == vector(2, a(1))
    assert self_contract(wedge_word(2, a(1), b(1))).terms == {(): 1}


@pytest.mark.parametrize("g", [2, 3])
def test_unshuffle_matches_oracle(g):
    for t in w2w3_basis(g)[::5]:
        (w, _), = t.items()
        u = unshuffle(t, 1)
        assert u.terms == {((w[0],), (w[1],)): 1, ((w[1],), (w[0],)): -1}


# -- group action ---------------------------------------------------------------------


def _generator(g, idx):
    gens = [m for _, m in generators(make_space(g))]
    return gens[idx % len(gens)]


@settings(max_examples=30)
@given(w3_tensor(3), st.integers(0, 11))
def test_apply_map_commutes_with_expand(t, idx):
    m = _generator(3, idx)
    assert expand(apply_map(t, m)).terms == oracles.apply_matrix(expand(t).terms, m.matrix)


@settings(max_examples=30)
@given(w3_tensor(3), w3_tensor(3), st.integers(0, 11))
def test_apply_map_commutes_with_wedge_and_tensor(x, y, idx):
    m = _generator(3, idx)
    X, Y = lift(x), lift(y)
    assert apply_map(wedge(X, Y), m) == wedge(apply_map(X, m), apply_map(Y, m))
    assert apply_map(tensor(x, y), m) == tensor(apply_map(x, m), apply_map(y, m))


@settings(max_examples=20)
@given(w3_tensor(2), st.integers(0, 3), st.integers(0, 3))
def test_action_is_multiplicative(t, i, j):
    m1, m2 = _generator(2, i), _generator(2, j)
    assert apply_map(t, m1 @ m2) == apply_map(apply_map(t, m2), m1)


def test_apply_map_genus_mismatch():
    with pytest.raises(ValueError):
        apply_map(vector(2, 0), SymplecticMap.identity(3))


@pytest.mark.parametrize("g", [2, 3])
def test_omega_invariant(g):
    w = omega(g)
    for name, m in generators(make_space(g)):
        assert apply_map(w, m) == w, name


@settings(max_examples=20)
@given(w3_tensor(3), st.lists(st.sampled_from([1, 2, -1, Fraction(1, 2), 3]), min_size=3, max_size=3))
def test_torus_acts_by_weight(t, ts):
    m = torus_element(make_space(3), ts)
    moved = apply_map(t, m)
    for wt, comp in torus_weight_components(t).items():
        scale = Fraction(1)
        for ti, wi in zip(ts, wt):
            scale *= Fraction(ti) ** wi
        for w, c in comp.terms.items():
            assert moved.coefficient(w) == c * scale


# -- the projection p and omega insertions -----------------------------------------------


@settings(max_examples=40)
@given(st.integers(2, 4).flatmap(lambda g: w3_tensor(g)))
def test_projection_is_traceless_and_idempotent(t):
    p = traceless_project_p(t)
    assert not contraction_C3(p)
    assert traceless_project_p(p) == p


def test_projection_kills_omega_wedge():
    for g in (2, 3, 4):
        x = insert_omega(vector(g, a(1)))
        assert not traceless_project_p(x)
        assert contraction_C3(x) == vector(g, a(1)) * (g - 1)


def test_projection_needs_genus_two():
    with pytest.raises(ValueError):
        traceless_project_p(Tensor(W3, 1, {}))


def test_insert_omega_sq_shape():
    t = insert_omega_sq(omega(2))
    assert t.shape == Wedge(2, W3) and t
    with pytest.raises(ValueError):
        insert_omega_sq(vector(2, 0))


def test_weight_histogram():
    t = wedge_word(3, a(1), b(1), a(3)) + wedge_word(3, a(1), a(2), a(3))
    assert weight_band_histogram(t) == {1: 1, 3: 1}
    comps = torus_weight_components(t)
    assert set(comps) == {(0, 0, 1), (1, 1, 1)}


# -- matchings and annihilation ------------------------------------------------------------


def test_matching_counts():
    assert sum(1 for _ in matchings(9, 4)) == 945
    assert sum(1 for _ in matchings(6, 3)) == 15
    assert sum(1 for _ in matchings(4, 1)) == 6


def test_orbit_representatives_cover_multigraph_classes():
    reps = matching_orbit_representatives(3, 3, 4)
    assert 0 < len(reps) < 945


def test_traceless_top_word_and_omega():
    top = wedge_word(3, a(1), a(2), a(3))
    assert annihilated_by_r_contractions(top, 1, exhaustive=True)
    assert not annihilated_by_r_contractions(omega(2), 1, exhaustive=True)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_orbit_reduction_agrees_with_exhaustive(seed):
    import random

    from torelli_cycles.cycles import claim51_check, psi_image, random_configuration

    rng = random.Random(seed)
    config = random_configuration(2, 5, rng)
    t = psi_image(config)
    for r in (1, 2, 3):
        assert annihilated_by_r_contractions(t, r) == annihilated_by_r_contractions(t, r, exhaustive=True)
    assert claim51_check(config)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(basis_words(3, 2)), st.sampled_from(basis_words(3, 2)),
                          st.integers(-2, 2)), max_size=3),
       st.integers(1, 3))
def test_exhaustive_matches_naive_matching_loop(entries, r):
    t = Tensor(Wedge(2, W3), 2, [((x, y), c) for x, y, c in entries], canonical=False)
    e = expand(t)
    naive = all(not contract_matching(e, m) for m in matchings(6, r))
    assert annihilated_by_r_contractions(t, r, exhaustive=True) == naive
    assert annihilated_by_r_contractions(t, r) == naive


def test_guard_trips_before_work():
    t = Tensor(Wedge(2, W3), 3, {((0, 1, 2), (0, 1, 3)): 1})
    with pytest.raises(ResourceLimitExceeded) as info:
        expand(t, term_cap=10)
    assert info.value.estimate == 72
