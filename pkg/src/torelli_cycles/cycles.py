"""Bounding-pair configurations, their ψ-images and the contraction pipelines.

Bounding pairs live in standard position: a pair is recorded by the handle
set ``support`` carrying the subsurface form and the handle ``class_index``
of its homology class, so τ(pair) = (Σ_{i∈support} a_i∧b_i)∧a_{class_index}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .reptheory import Partition
from .symplectic import SymplecticSpace, a, b, transvection_T
from .tensors import (
    DEFAULT_TERM_CAP,
    W3,
    H,
    Tensor,
    TensorProduct,
    Wedge,
    act_minus_one,
    annihilated_by_r_contractions,
    apply_map,
    contract_pair_exterior,
    expand,
    insert_omega_sq,
    legs,
    lift,
    multiply_exterior,
    rebuild,
    omega,
    self_contract,
    tensor,
    torus_weight_components,
    traceless_project_p,
    unlift,
    unshuffle,
    wedge,
    wedge_all,
    wedge_word,
)
from . import symplectic

# Sign relating claim52_coefficient to the closed form (2m-2)^m/(g-1)^m,
# fixed by the pair ordering used in rho(1)^m.
CLAIM52_SIGN = 1


class ConfigurationError(ValueError):
    """A configuration violates one of its invariants."""


@dataclass(frozen=True)
class StandardBoundingPair:
    support: frozenset[int]
    class_index: int

    def __init__(self, support, class_index: int):
        object.__setattr__(self, "support", frozenset(support))
        object.__setattr__(self, "class_index", int(class_index))
        if self.class_index in self.support:
            raise ConfigurationError(
                f"class index {self.class_index} lies in its own support {sorted(self.support)}"
            )

    @property
    def footprint(self) -> frozenset[int]:
        return self.support | {self.class_index}

    def shifted(self, offset: int) -> "StandardBoundingPair":
        return StandardBoundingPair({i + offset for i in self.support}, self.class_index + offset)

    def to_json(self) -> dict:
        return {"support": sorted(self.support), "class_index": self.class_index}

    def __repr__(self):
        return f"BP(S={sorted(self.support)}, j={self.class_index})"


def tau_bp(bp: StandardBoundingPair, g: int) -> Tensor:
    """(Σ_{i∈S} a_i∧b_i)∧a_j."""
    for i in bp.footprint:
        if not 1 <= i <= g:
            raise ConfigurationError(f"handle {i} out of range 1..{g}")
    j = bp.class_index
    return Tensor(W3, g, [((a(i), b(i), a(j)), 1) for i in bp.support], canonical=False)


def lagrangian_legs_ok(t: Tensor) -> bool:
    """Every monomial of a third-exterior-power tensor has >= 2 legs among the a's."""
    if t.shape != W3:
        raise ValueError("expected the third exterior power of H")
    return all(sum(1 for x in w if x % 2 == 0) >= 2 for w in t.terms)


@dataclass(frozen=True)
class BPConfiguration:
    genus: int
    pairs: tuple[StandardBoundingPair, ...]

    def __init__(self, genus: int, pairs: Sequence[StandardBoundingPair] = (), *, validate: bool = True):
        object.__setattr__(self, "genus", int(genus))
        object.__setattr__(self, "pairs", tuple(pairs))
        if validate:
            self.validate()

    def violations(self) -> list[str]:
        out = []
        if self.genus < 0:
            out.append("genus must be nonnegative")
        for k, p in enumerate(self.pairs):
            bad = [i for i in p.footprint if not 1 <= i <= self.genus]
            if bad:
                out.append(f"pairs[{k}]: handles {bad} out of range 1..{self.genus}")
        classes = [p.class_index for p in self.pairs]
        if len(set(classes)) != len(classes):
            out.append(f"class indices not pairwise distinct: {classes}")
        for (k1, p1), (k2, p2) in itertools.combinations(enumerate(self.pairs), 2):
            f1, f2 = p1.footprint, p2.footprint
            if f1.isdisjoint(f2) or f1 <= p2.support or f2 <= p1.support:
                continue
            out.append(f"pairs[{k1}] and pairs[{k2}] are neither disjoint nor nested")
        if not out and not lagrangian_certificate(self):
            out.append("Lagrangian certificate fails")
        return out

    def validate(self) -> None:
        errs = self.violations()
        if errs:
            raise ConfigurationError("; ".join(errs))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def to_json(self) -> dict:
        return {"genus": self.genus, "pairs": [p.to_json() for p in self.pairs]}


def lagrangian_certificate(config: BPConfiguration) -> bool:
    """Witness L = span(a_1..a_g): every τ-monomial has two legs in L."""
    return all(lagrangian_legs_ok(tau_bp(p, config.genus)) for p in config.pairs)


def psi_image(config: BPConfiguration) -> Tensor:
    """τ(f_1)∧...∧τ(f_n) in the n-th exterior power of ∧³H."""
    config.validate()
    g = config.genus
    if not config.pairs:
        return Tensor(Wedge(0, W3), g, {(): 1})
    return wedge_all(lift(tau_bp(p, g)) for p in config.pairs)


def glue_product(c1: BPConfiguration, c2: BPConfiguration) -> BPConfiguration:
    """Boundary-sum of surfaces: concatenate pairs, shifting c2 by c1's genus."""
    return BPConfiguration(c1.genus + c2.genus, c1.pairs + tuple(p.shifted(c1.genus) for p in c2.pairs))


def shift_tensor(t: Tensor, offset: int, genus: int) -> Tensor:
    """Re-embed a tensor at handle offset ``offset`` into genus ``genus``."""
    return Tensor(t.shape, genus, {
        rebuild(t.shape, [x + 2 * offset for x in legs(t.shape, w)]): c for w, c in t.terms.items()
    })


def empty_config(g: int) -> BPConfiguration:
    return BPConfiguration(g, ())


def figure4_config(n: int, g: int | None = None) -> BPConfiguration:
    """Pairs S={3i-2}, j=3i, i=1..n (the σ_1^n·1 cycle)."""
    g = 3 * n if g is None else g
    return BPConfiguration(g, [StandardBoundingPair({3 * i - 2}, 3 * i) for i in range(1, n + 1)])


@dataclass(frozen=True)
class TrulyNestedFamily:
    config: BPConfiguration

    def __post_init__(self):
        pairs = self.config.pairs
        if not pairs:
            raise ConfigurationError("a truly nested family needs at least one pair")
        for k, (p, q) in enumerate(zip(pairs, pairs[1:])):
            if not p.footprint <= q.support:
                raise ConfigurationError(f"pairs[{k}] is not nested inside pairs[{k + 1}]")

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def omega0(self) -> Tensor:
        g = self.config.genus
        return Tensor(Wedge(2, H()), g, {(a(i), b(i)): 1 for i in self.config.pairs[0].support})

    def target(self) -> Tensor:
        """ω0∧c_1∧...∧c_n."""
        g = self.config.genus
        out = self.omega0
        for p in self.config.pairs:
            out = wedge(out, wedge_word(g, a(p.class_index)))
        return out


def nested_family(classes: Sequence[int], g: int, omega0_support: Sequence[int] | None = None) -> TrulyNestedFamily:
    """Chain with support_1 = ``omega0_support`` (default {1..i_1-1}) and
    support_{k+1} = support_k ∪ {class_k} ∪ (handles strictly between)."""
    classes = list(classes)
    support = set(omega0_support) if omega0_support is not None else set(range(1, classes[0]))
    pairs = []
    for c in classes:
        pairs.append(StandardBoundingPair(support, c))
        support = support | {c}
    return TrulyNestedFamily(BPConfiguration(g, pairs))


def sigma(n: int) -> TrulyNestedFamily:
    """σ_n at genus n+2: support_k = {1,3,...,k+1}, class_k = k+2, ω0 = a1∧b1."""
    if n < 1:
        raise ValueError("sigma needs n >= 1")
    return nested_family(range(3, n + 3), n + 2, omega0_support=[1])


def rho(n: int) -> TrulyNestedFamily:
    """ρ_n at genus n+1: support_k = {1..k}, class_k = k+1, ω0 = a1∧b1."""
    if n < 1:
        raise ValueError("rho needs n >= 1")
    return nested_family(range(2, n + 2), n + 1, omega0_support=[1])


# -- Φ_n and Ψ_n ------------------------------------------------------------


def _check_pipeline_input(n: int, t: Tensor) -> None:
    if n < 1:
        raise ValueError("pipeline degree must be >= 1")
    if t.shape != Wedge(n, W3):
        raise ValueError(f"expected the {n}-th exterior power of ∧³H, got {t.shape}")


def _diagonal(t: Tensor) -> Tensor:
    """Contract adjacent factors 0,1 diagonally and multiply them."""
    return multiply_exterior(contract_pair_exterior(t, 0), 0)


def phi_first(t: Tensor) -> Tensor:
    """φ_1: ∧ⁿ(∧³H) -> ∧⁴H ⊗ ∧^{n-2}(∧³H) (plain ∧⁴H when n = 2)."""
    n = t.shape.k
    split = unshuffle(t, 2)  # (w_i∧w_j) ⊗ rest
    g = t.genus
    if n == 2:
        pair = Tensor(TensorProduct((W3, W3)), g, {(w[0][0], w[0][1]): c for w, c in split.terms.items()})
        return _diagonal(pair)
    pair = Tensor(
        TensorProduct((W3, W3, Wedge(n - 2, W3))),
        g,
        {(w[0][0], w[0][1], w[1]): c for w, c in split.terms.items()},
    )
    return _diagonal(pair)


def phi_next(t: Tensor) -> Tensor:
    """φ_k: ∧^{k+2}H ⊗ ∧^{m}(∧³H) -> ∧^{k+3}H ⊗ ∧^{m-1}(∧³H)."""
    X, rest = t.shape.factors
    m = rest.k
    g = t.genus
    if m == 1:
        trip = Tensor(TensorProduct((X, W3)), g, {(w[0], w[1][0]): c for w, c in t.terms.items()})
        return _diagonal(trip)
    acc: dict = {}
    for (x, ws), c in t.terms.items():
        for i in range(m):
            s = -1 if i % 2 else 1
            key = (x, ws[i], ws[:i] + ws[i + 1:])
            acc[key] = acc.get(key, 0) + s * c
    trip = Tensor(TensorProduct((X, W3, Wedge(m - 1, W3))), g, acc)
    return _diagonal(trip)


def phi_pipeline(n: int, t: Tensor) -> Tensor:
    """Φ_n = φ_{n-1} ∘ ... ∘ φ_1 : ∧ⁿ(∧³H) -> ∧^{n+2}H (Φ_1 = id)."""
    _check_pipeline_input(n, t)
    if n == 1:
        return unlift(t)
    out = phi_first(t)
    while isinstance(out.shape, TensorProduct):
        out = phi_next(out)
    return out


def psi_pipeline(n: int, t: Tensor) -> Tensor:
    """Ψ_n: Φ_n followed by the exterior self-contraction to ∧ⁿH."""
    return self_contract(phi_pipeline(n, t))


@dataclass
class Lemma42Result:
    scalar: Fraction
    output: Tensor
    target: Tensor
    proportional: bool


def proportionality(output: Tensor, target: Tensor) -> Fraction | None:
    """Scalar s with output == s*target, or None."""
    if not target:
        return None
    w0, c0 = target.items()[0]
    s = Fraction(output.coefficient(w0)) / Fraction(c0)
    return s if output == target * s else None


def lemma42_scalar(family: TrulyNestedFamily) -> Lemma42Result:
    """λ_n with (Φ_n∘ψ_n)(family) = λ_n ω0∧c_1∧...∧c_n; raises if not proportional."""
    out = phi_pipeline(family.n, psi_image(family.config))
    target = family.target()
    s = proportionality(out, target)
    if s is None or s == 0:
        raise ArithmeticError(
            f"Φ∘ψ is not a nonzero multiple of ω0∧c_1∧...∧c_n: got {out.pretty(limit=4)}"
        )
    return Lemma42Result(s, out, target, True)


# -- theorem witnesses ------------------------------------------------------


@dataclass
class Theorem1Certificate:
    n: int
    genus: int
    image: Tensor
    target: Tensor
    equal: bool
    traceless: bool

    @property
    def passed(self) -> bool:
        return self.equal and self.traceless


def top_weight_word(n: int, g: int) -> Tensor:
    """(a1∧a2∧a3)∧...∧(a_{3n-2}∧a_{3n-1}∧a_{3n})."""
    return wedge_all(lift(wedge_word(g, a(3 * i - 2), a(3 * i - 1), a(3 * i))) for i in range(1, n + 1))


def theorem1_witness(n: int, g: int, term_cap: int | None = DEFAULT_TERM_CAP) -> Theorem1Certificate:
    if n < 1:
        raise ValueError("n must be >= 1")
    if g < 3 * n:
        raise ValueError(f"top-weight witness needs g >= 3n (got n={n}, g={g})")
    space = SymplecticSpace(g)
    t = psi_image(figure4_config(n, g))
    for i in range(1, n + 1):
        t = act_minus_one(t, transvection_T(space, 3 * i - 2, 3 * i - 1))
    target = top_weight_word(n, g)
    traceless = annihilated_by_r_contractions(target, 1, exhaustive=True, term_cap=term_cap)
    return Theorem1Certificate(n, g, t, target, t == target, traceless)


@dataclass
class Theorem2Certificate:
    n: int
    k: int
    l: int
    genus: int
    config: BPConfiguration
    pieces: list[tuple[str, int, Tensor]]
    result: Tensor
    weight: int
    weight_component_nonzero: bool
    pure_a_multiple: Fraction | None

    @property
    def passed(self) -> bool:
        return self.weight_component_nonzero


def _parts_with_multiplicity(p: Partition) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for x in p.parts:
        if out and out[-1][0] == x:
            out[-1] = (x, out[-1][1] + 1)
        else:
            out.append((x, 1))
    return out


def theorem2_factors(lam: Partition, mu: Partition) -> list[tuple[str, int]]:
    """Ordered product σ_{λ1}^{k1} ρ_{μ1}^{l1} ... ρ_{μ_{m+1}}^{l_{m+1}} ρ_{μ_{m+2}}^{l_{m+2}}."""
    lp = _parts_with_multiplicity(lam)
    mp = dict(_parts_with_multiplicity(mu))
    shared = {x + 2 for x, _ in lp}
    extra = sorted((v for v in mp if v not in shared), reverse=True)
    if len(extra) > 2:
        raise ValueError(f"μ has more than two parts not of the form λ_i+2: {extra}")
    if lp and extra and extra[0] >= lp[-1][0] + 2:
        raise ValueError("the extra parts of μ must be smaller than every λ_i+2")
    factors: list[tuple[str, int]] = []
    for x, k in lp:
        factors += [("sigma", x)] * k
        factors += [("rho", x + 2)] * mp.get(x + 2, 0)
    for v in extra:
        factors += [("rho", v)] * mp[v]
    return factors


def theorem2_pipeline(lam: Partition, mu: Partition, g: int) -> Theorem2Certificate:
    """Build the product cycle, apply Φ/Ψ factorwise, then the T_{1,2}-1 moves."""
    factors = theorem2_factors(lam, mu)
    n = lam.weight + mu.weight
    k = lam.length
    l = mu.length
    if n < 1:
        raise ValueError("need |λ| + |μ| >= 1")
    if g < n + 2 * k + l:
        raise ValueError(f"need g >= n+2k+l = {n + 2 * k + l}, got g={g}")
    config = empty_config(0)
    pieces = []
    offset = 0
    space = SymplecticSpace(g)
    for kind, size in factors:
        fam = sigma(size) if kind == "sigma" else rho(size)
        local = fam.config
        # evaluate the factor inside the full genus so pieces multiply directly
        placed = BPConfiguration(g, [p.shifted(offset) for p in local.pairs])
        img = psi_image(placed)
        out = phi_pipeline(size, img) if kind == "sigma" else psi_pipeline(size, img)
        if kind == "sigma":
            out = act_minus_one(out, transvection_T(space, offset + 1, offset + 2))
        pieces.append((kind, size, out))
        config = glue_product(config, local)
        offset += local.genus
    config = glue_product(config, empty_config(g - offset))
    result = pieces[0][2]
    for _, _, piece in pieces[1:]:
        result = tensor(result, piece)
    weight = n + 2 * k
    comps = torus_weight_components(result)
    nonzero = any(sum(abs(x) for x in wt) == weight and comp for wt, comp in comps.items())
    pure = None
    if len(result) == 1:
        (w, c), = result.items()
        pure = Fraction(c)
    return Theorem2Certificate(n, k, l, g, config, pieces, result, weight, nonzero, pure)


# -- vanishing of (n+1)-fold contractions ---------------------------------------


def claim51_check(config: BPConfiguration, exhaustive: bool = False,
                  term_cap: int | None = DEFAULT_TERM_CAP) -> bool:
    """ψ-image annihilated by every (n+1)-fold contraction after expansion."""
    n = config.n
    if n < 2:
        raise ValueError("contraction vanishing check needs n >= 2")
    return annihilated_by_r_contractions(psi_image(config), n + 1, exhaustive=exhaustive, term_cap=term_cap)


def random_configuration(n: int, g: int, rng: random.Random) -> BPConfiguration:
    """A random valid configuration of n disjoint-or-nested pairs in genus <= g.

    Pairs are built one at a time; each new pair absorbs a random subset of the
    current outermost blocks plus fresh handles into its support and takes a
    fresh class handle.
    """
    for _ in range(1000):
        handles = list(range(1, g + 1))
        rng.shuffle(handles)
        blocks: list[frozenset[int]] = []
        pairs = []
        ok = True
        for _ in range(n):
            absorb = [bl for bl in blocks if rng.random() < 0.5]
            fresh_support = rng.randint(0 if absorb else 1, 2)
            if len(handles) < fresh_support + 1:
                ok = False
                break
            support = set().union(*absorb) if absorb else set()
            for _ in range(fresh_support):
                support.add(handles.pop())
            cls = handles.pop()
            pairs.append(StandardBoundingPair(support, cls))
            blocks = [bl for bl in blocks if bl not in absorb] + [frozenset(support | {cls})]
        if ok:
            rng.shuffle(pairs)
            return BPConfiguration(g, pairs)
    raise RuntimeError(f"could not sample a configuration with n={n}, g={g}")


# -- contracted coefficient of p(rho_1)^m ---------------------------------------


def p_wedge(t: Tensor) -> Tensor:
    """p applied to every factor of an element of ∧ⁿ(∧³H)."""
    if not (isinstance(t.shape, Wedge) and t.shape.inner == W3):
        raise ValueError("expected an exterior power of ∧³H")
    g = t.genus
    cache: dict = {}

    def proj(w):
        if w not in cache:
            cache[w] = lift(traceless_project_p(Tensor(W3, g, {w: 1})))
        return cache[w]

    out = Tensor.zero(t.shape, g)
    for ws, c in t.terms.items():
        out = out + wedge_all(proj(w) for w in ws) * c
    return out


def multiply_out(t: Tensor) -> Tensor:
    """∧ⁿ(∧³H) -> ∧^{3n}H, the multiplication map."""
    n = t.shape.k
    return t.map_words(Wedge(3 * n, H()), lambda ws: [(tuple(x for w in ws for x in w), 1)])


def claim52_coefficient(m: int, g: int) -> Fraction:
    """Coefficient of the class word after p^{∧m}, multiplication and m contractions.

    Uses ρ_1^m glued up to genus g; contractions are normalized by 1/m! so that
    contracting m distinct handles a_i∧b_i contributes 1.
    """
    if m < 2:
        raise ValueError("contracted coefficient needs m >= 2")
    if g < 2 * m:
        raise ValueError(f"need g >= 2m = {2 * m}")
    config = empty_config(0)
    for _ in range(m):
        config = glue_product(config, rho(1).config)
    config = glue_product(config, empty_config(g - 2 * m))
    t = multiply_out(p_wedge(psi_image(config)))
    for _ in range(m):
        t = self_contract(t)
    classes = tuple(sorted(a(p.class_index) for p in config.pairs))
    return CLAIM52_SIGN * Fraction(t.coefficient(classes)) / factorial(m)


def claim52_closed_form(m: int, g: int) -> Fraction:
    """(2m-2)^m / (g-1)^m."""
    return Fraction((2 * m - 2) ** m, (g - 1) ** m)


def claim52_term_sum(m: int, g: int) -> Fraction:
    """Term-by-term count of the same quantity: ω^{∧k} = k! Σ over k-subsets of handles.

    Σ_k C(m,k) (-1)^k (g-2m+1)(g-2m+2)...(g-2m+k) / (g-1)^k.
    """
    total = Fraction(0)
    for k in range(m + 1):
        rising = 1
        for j in range(1, k + 1):
            rising *= g - 2 * m + j
        total += comb(m, k) * (-1) ** k * Fraction(rising, (g - 1) ** k)
    return total


# -- ψ_2 of the fundamental class -------------------------------------------


@dataclass
class Psi2Certificate:
    genus: int
    tensor: Tensor
    invariant_under: list[str]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return bool(self.tensor) and not self.failures


def psi2_fundamental(g: int) -> Psi2Certificate:
    """insert_omega_sq(ω) with an invariance check under every T_{i,j}, S_{p,q}."""
    if g < 2:
        raise ValueError("ψ2([S_g]) is degenerate for g < 2")
    space = SymplecticSpace(g)
    t = insert_omega_sq(omega(g))
    ok, bad = [], []
    for name, m in symplectic.generators(space):
        (ok if apply_map(t, m) == t else bad).append(name)
    return Psi2Certificate(g, t, ok, bad)
