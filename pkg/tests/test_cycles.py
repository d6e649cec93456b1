import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from torelli_cycles.cycles import (
    BPConfiguration,
    ConfigurationError,
    StandardBoundingPair,
    TrulyNestedFamily,
    claim51_check,
    claim52_coefficient,
    claim52_term_sum,
    empty_config,
    figure4_config,
    glue_product,
    lagrangian_certificate,
    lemma42_scalar,
    nested_family,
    p_wedge,
    phi_pipeline,
    proportionality,
    psi2_fundamental,
    psi_image,
    psi_pipeline,
    random_configuration,
    rho,
    shift_tensor,
    sigma,
    tau_bp,
    theorem1_witness,
    theorem2_factors,
    theorem2_pipeline,
    top_weight_word,
)
from torelli_cycles.reptheory import Partition
from torelli_cycles.symplectic import a, b
from torelli_cycles.tensors import W3, Wedge, contraction_C3, lift, traceless_project_p, wedge_all, wedge_word

BP = StandardBoundingPair


def test_tau_of_a_pair():
    t = tau_bp(BP({1, 2}, 3), 3)
    assert t == wedge_word(3, a(1), b(1), a(3)) + wedge_word(3, a(2), b(2), a(3))
    with pytest.raises(ConfigurationError):
        tau_bp(BP({1}, 4), 3)
    with pytest.raises(ConfigurationError):
        BP({1, 2}, 2)


def test_figure4_n1_image():
    t = psi_image(figure4_config(1))
    assert len(t) == 1
    (w, c), = t.items()
    assert w == ((a(1), b(1), a(3)),) and c == 1


def test_configuration_invariants():
    assert BPConfiguration(4, [BP({1}, 2), BP({1, 2}, 3)]).n == 2
    assert BPConfiguration(4, [BP({1}, 2), BP({3}, 4)]).n == 2
    with pytest.raises(ConfigurationError, match="neither disjoint nor nested"):
        BPConfiguration(4, [BP({1, 2}, 3), BP({2, 4}, 1)])
    with pytest.raises(ConfigurationError, match="pairwise distinct"):
        BPConfiguration(4, [BP({1}, 3), BP({2}, 3)])
    with pytest.raises(ConfigurationError, match="out of range"):
        BPConfiguration(2, [BP({1}, 3)])
    bad = BPConfiguration(4, [BP({1, 2}, 3), BP({2, 4}, 1)], validate=False)
    assert bad.violations()


def test_lagrangian_certificate_and_json():
    c = figure4_config(2)
    assert lagrangian_certificate(c)
    assert c.to_json() == {"genus": 6, "pairs": [{"support": [1], "class_index": 3},
                                                 {"support": [4], "class_index": 6}]}


def test_glue_and_shift():
    c = glue_product(rho(1).config, rho(1).config)
    assert c.genus == 4 and c.pairs[1] == BP({3}, 4)
    t = tau_bp(BP({1}, 2), 2)
    assert shift_tensor(t, 2, 4) == tau_bp(BP({3}, 4), 4)


def test_empty_configuration_image_is_unit():
    t = psi_image(empty_config(3))
    assert t.shape == Wedge(0, W3) and t.terms == {(): 1}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_random_configurations_are_valid(seed, n):
    c = random_configuration(n, 3 * n, random.Random(seed))
    assert not c.violations() and c.n == n
    assert psi_image(c)


# -- nested families and the pipelines -----------------------------------------------------


def test_nested_family_shapes():
    s = sigma(2)
    assert s.config.genus == 4
    assert [sorted(p.support) for p in s.config.pairs] == [[1], [1, 3]]
    assert [p.class_index for p in s.config.pairs] == [3, 4]
    r = rho(3)
    assert [sorted(p.support) for p in r.config.pairs] == [[1], [1, 2], [1, 2, 3]]
    with pytest.raises(ConfigurationError):
        TrulyNestedFamily(BPConfiguration(4, [BP({1, 2}, 3), BP({1}, 4)]))


def test_sigma_rho_images_match_displayed_patterns():
    # ψ(σ_1) = a1∧b1∧a3 and ψ(ρ_1) = a1∧b1∧a2
    assert psi_image(sigma(1).config) == lift(wedge_word(3, a(1), b(1), a(3)))
    assert psi_image(rho(1).config) == lift(wedge_word(2, a(1), b(1), a(2)))


@pytest.mark.parametrize("n,expected", [(1, 1), (2, -3)])
@pytest.mark.parametrize("family", [sigma, rho])
def test_lemma42_anchors(family, n, expected):
    res = lemma42_scalar(family(n))
    assert res.scalar == expected and res.proportional


@pytest.mark.parametrize("family", [sigma, rho])
def test_lemma42_derived_values(family):
    # frozen regression values; magnitudes follow |λ_n| = |λ_{n-1}|·(n+1)(n+2)/2
    values = {n: lemma42_scalar(family(n)).scalar for n in (1, 2, 3, 4)}
    assert values[3] == -30 and values[4] == 450
    for n in (3, 4):
        assert abs(values[n]) == abs(values[n - 1]) * (n + 1) * (n + 2) // 2


def test_lemma42_generic_nested_family():
    fam = nested_family([2, 3], 3)
    assert lemma42_scalar(fam).scalar == -3


def test_psi_pipeline_on_rho():
    g = 3
    out = psi_pipeline(2, psi_image(rho(2).config))
    assert out == wedge_word(g, a(2), a(3)) * -3
    assert psi_pipeline(1, psi_image(rho(1).config)) == wedge_word(2, a(2))


def test_pipeline_input_checks():
    with pytest.raises(ValueError):
        phi_pipeline(2, psi_image(rho(1).config))
    with pytest.raises(ValueError):
        phi_pipeline(0, psi_image(rho(1).config))


def test_proportionality():
    x = wedge_word(3, a(1), a(2))
    assert proportionality(x * Fraction(-2, 3), x) == Fraction(-2, 3)
    assert proportionality(x + wedge_word(3, a(1), a(3)), x) is None


# -- theorem witnesses ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theorem1_witness(n):
    cert = theorem1_witness(n, 3 * n)
    assert cert.passed
    assert cert.image == top_weight_word(n, 3 * n)


def test_theorem1_needs_room():
    with pytest.raises(ValueError):
        theorem1_witness(2, 5)


def test_theorem2_factor_order():
    f = theorem2_factors(Partition((1,)), Partition((3, 1)))
    assert f == [("sigma", 1), ("rho", 3), ("rho", 1)]
    with pytest.raises(ValueError):
        theorem2_factors(Partition(()), Partition((3, 2, 1)))


@pytest.mark.parametrize("lam,mu", [((1,), ()), ((), (1,)), ((1,), (3,)), ((2,), ())])
def test_theorem2_weight_component(lam, mu):
    lam, mu = Partition(lam), Partition(mu)
    g = lam.weight + mu.weight + 2 * lam.length + mu.length
    cert = theorem2_pipeline(lam, mu, g)
    assert cert.passed
    assert cert.weight == lam.weight + mu.weight + 2 * lam.length


# -- vanishing of (n+1)-fold contractions --------------------------------------


def test_claim51_on_nested_and_disjoint():
    assert claim51_check(sigma(2).config)
    assert claim51_check(figure4_config(2))
    assert claim51_check(rho(3).config)
    with pytest.raises(ValueError):
        claim51_check(rho(1).config)


# -- contracted coefficient of p(rho_1)^m ---------------------------------------


@pytest.mark.parametrize("m,g", [(2, 4), (2, 5), (2, 6), (2, 7), (3, 6), (3, 7)])
def test_claim52_matches_hand_count(m, g):
    assert claim52_coefficient(m, g) == oracles.claim52_by_hand(m, g) == claim52_term_sum(m, g)


@pytest.mark.parametrize("g", [4, 5, 6, 7])
def test_claim52_m2_closed_form_derived(g):
    # derived: for m = 2 the hand count simplifies to (g+1)/(g-1)^2
    assert claim52_coefficient(2, g) == Fraction(g + 1, (g - 1) ** 2)


def test_claim52_is_nonzero():
    for m, g in ((2, 4), (3, 6), (3, 7)):
        assert claim52_coefficient(m, g) != 0


def test_p_wedge_acts_factorwise():
    g = 4
    x = tau_bp(BP({1}, 3), g)
    y = tau_bp(BP({1, 3}, 4), g)
    got = p_wedge(wedge_all([lift(x), lift(y)]))
    want = wedge_all([lift(traceless_project_p(x)), lift(traceless_project_p(y))])
    assert got == want
    assert not contraction_C3(traceless_project_p(y))


def test_claim52_input_checks():
    with pytest.raises(ValueError):
        claim52_coefficient(1, 4)
    with pytest.raises(ValueError):
        claim52_coefficient(3, 5)


# -- ψ2 of the fundamental class ---------------------------------------------------------------------------


@pytest.mark.parametrize("g", [2, 3])
def test_psi2_invariant(g):
    cert = psi2_fundamental(g)
    assert cert.passed and len(cert.invariant_under) == 2 * g * (g - 1)


def test_psi2_degenerate_genus():
    with pytest.raises(ValueError):
        psi2_fundamental(1)
