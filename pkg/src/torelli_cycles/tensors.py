"""Sparse exact multilinear algebra over the symplectic space H.

A :class:`Tensor` is a finite map from canonical basis words to nonzero exact
rationals (``int`` or :class:`fractions.Fraction`; floats are rejected).  Word
layout follows the shape tree:

* ``H``                 -> a basis code (int)
* ``Wedge(k, S)``       -> strictly increasing tuple of ``k`` canonical S-words
* ``TensorProduct(..)`` -> tuple of factor words

Every exterior layer in use has odd inner degree (H or the third exterior
power of H), so wedge products are plainly alternating and canonical form is
"sort, track the permutation sign, drop repeats".
"""

from __future__ import annotations

import itertools
import math
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Iterator, Union

from .symplectic import SymplecticMap, SymplecticSpace, a, b, leg_str, pairing

DEFAULT_TERM_CAP = 10**7


class ResourceLimitExceeded(RuntimeError):
    """Raised before a computation whose estimated term count exceeds the cap."""

    def __init__(self, what: str, estimate: int, cap: int):
        super().__init__(f"{what}: estimated {estimate} terms exceeds cap {cap}")
        self.what = what
        self.estimate = estimate
        self.cap = cap


def guard(what: str, estimate: int, cap: int | None) -> None:
    if cap is not None and estimate > cap:
        raise ResourceLimitExceeded(what, estimate, cap)


# -- shapes -----------------------------------------------------------------


class Shape:
    __slots__ = ()


@dataclass(frozen=True)
class H(Shape):
    def __str__(self):
        return "H"


@dataclass(frozen=True)
class Wedge(Shape):
    k: int
    inner: Shape

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("Wedge degree must be nonnegative")
        if self.k >= 2 and degree(self.inner) % 2 == 0:
            raise ValueError("exterior powers of even-degree shapes are not supported")

    def __str__(self):
        if self.inner == H():
            return f"w{self.k}"
        return f"wedge({self.k},{self.inner})"


@dataclass(frozen=True)
class TensorProduct(Shape):
    factors: tuple

    def __str__(self):
        return "tensor(" + ",".join(str(f) for f in self.factors) + ")"


def flat(k: int) -> TensorProduct:
    """H^{⊗k}."""
    return TensorProduct((H(),) * k)


def is_flat(shape: Shape) -> bool:
    return isinstance(shape, TensorProduct) and all(isinstance(f, H) for f in shape.factors)


def product_shape(factors) -> Shape:
    factors = tuple(factors)
    return factors[0] if len(factors) == 1 else TensorProduct(factors)


@lru_cache(maxsize=None)
def degree(shape: Shape) -> int:
    """Total number of H-legs."""
    if isinstance(shape, H):
        return 1
    if isinstance(shape, Wedge):
        return shape.k * degree(shape.inner)
    return sum(degree(f) for f in shape.factors)


W3 = Wedge(3, H())


def dimension(shape: Shape, g: int) -> int:
    if isinstance(shape, H):
        return 2 * g
    if isinstance(shape, Wedge):
        return math.comb(dimension(shape.inner, g), shape.k)
    return math.prod(dimension(f, g) for f in shape.factors)


def expansion_factor(shape: Shape) -> int:
    """Number of flat words in the expansion of one canonical word."""
    if isinstance(shape, H):
        return 1
    if isinstance(shape, Wedge):
        return math.factorial(shape.k) * expansion_factor(shape.inner) ** shape.k
    return math.prod(expansion_factor(f) for f in shape.factors)


_TOKEN = re.compile(r"\s*(?:(\d+)|(wedge|tensor|w\d+|H)|([(),]))")


def parse_shape(text: str) -> Shape:
    """Parse ``H``, ``w3`` (any ``w<k>``), ``wedge(n, S)``, ``tensor(S1, ...)``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse shape at column {pos + 1}: {text[pos:]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    it = iter(tokens + [None])
    cur = [next(it)]

    def take(expected=None):
        tok = cur[0]
        if expected is not None and tok != expected:
            got = "end of input" if tok is None else repr(tok)
            raise ValueError(f"expected {expected!r} in shape, got {got}")
        cur[0] = next(it, None)
        return tok

    def parse():
        tok = take()
        if tok == "H":
            return H()
        if tok and tok[0] == "w" and tok[1:].isdigit():
            k = int(tok[1:])
            if k < 1:
                raise ValueError("exterior degree must be >= 1")
            return Wedge(k, H())
        if tok == "wedge":
            take("(")
            k = take()
            if k is None or not k.isdigit() or int(k) < 1:
                raise ValueError(f"wedge degree must be a positive integer, got {k!r}")
            take(",")
            inner = parse()
            take(")")
            return Wedge(int(k), inner)
        if tok == "tensor":
            take("(")
            factors = [parse()]
            while cur[0] == ",":
                take(",")
                factors.append(parse())
            take(")")
            return product_shape(factors)
        raise ValueError("unexpected end of shape" if tok is None else f"unexpected token {tok!r} in shape")

    shape = parse()
    if cur[0] is not None:
        raise ValueError(f"trailing input in shape: {cur[0]!r}")
    return shape


# -- canonical words --------------------------------------------------------


def sort_sign(items) -> tuple[int, tuple]:
    """Sort ``items``; return (sign of the sorting permutation, sorted tuple).

    Sign is 0 when an item repeats.
    """
    items = list(items)
    n = len(items)
    inversions = 0
    for i in range(n):
        for j in range(i + 1, n):
            if items[i] > items[j]:
                inversions += 1
            elif items[i] == items[j]:
                return 0, ()
    return (-1 if inversions % 2 else 1), tuple(sorted(items))


def canonicalize(shape: Shape, raw) -> tuple[int, object]:
    if isinstance(shape, H):
        return 1, raw
    if isinstance(shape, Wedge):
        sign = 1
        inner = []
        for w in raw:
            s, cw = canonicalize(shape.inner, w)
            if s == 0:
                return 0, None
            sign *= s
            inner.append(cw)
        s, sw = sort_sign(inner)
        return sign * s, sw
    sign = 1
    out = []
    for f, w in zip(shape.factors, raw):
        s, cw = canonicalize(f, w)
        if s == 0:
            return 0, None
        sign *= s
        out.append(cw)
    return sign, tuple(out)


def legs(shape: Shape, word) -> tuple[int, ...]:
    if isinstance(shape, H):
        return (word,)
    if isinstance(shape, Wedge):
        return tuple(x for w in word for x in legs(shape.inner, w))
    return tuple(x for f, w in zip(shape.factors, word) for x in legs(f, w))


def rebuild(shape: Shape, flat_legs) -> object:
    """Inverse of :func:`legs` (result is raw, not canonical)."""
    it = iter(flat_legs)

    def build(s):
        if isinstance(s, H):
            return next(it)
        if isinstance(s, Wedge):
            return tuple(build(s.inner) for _ in range(s.k))
        return tuple(build(f) for f in s.factors)

    return build(shape)


def word_str(shape: Shape, word) -> str:
    if isinstance(shape, H):
        return leg_str(word)
    if isinstance(shape, Wedge):
        if shape.k == 0:
            return "1"
        parts = [word_str(shape.inner, w) for w in word]
        if isinstance(shape.inner, H):
            return "∧".join(parts)
        return "∧".join(f"({p})" for p in parts)
    return "⊗".join(
        f"({word_str(f, w)})" if not isinstance(f, H) else word_str(f, w)
        for f, w in zip(shape.factors, word)
    ) or "1"


# -- tensors ----------------------------------------------------------------


def _exact(c):
    if isinstance(c, bool) or not isinstance(c, Rational):
        raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")
    return c


class Tensor:
    """Immutable sparse element of a shape over genus ``g``."""

    __slots__ = ("shape", "genus", "terms")

    def __init__(self, shape: Shape, genus: int, terms=None, *, canonical: bool = True):
        self.shape = shape
        self.genus = genus
        acc: dict = {}
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        if canonical:
            for w, c in items:
                if _exact(c):
                    acc[w] = acc.get(w, 0) + c
        else:
            for w, c in items:
                s, cw = canonicalize(shape, w)
                if s and _exact(c):
                    acc[cw] = acc.get(cw, 0) + s * c
        self.terms = {w: c for w, c in acc.items() if c}

    @classmethod
    def zero(cls, shape: Shape, genus: int) -> "Tensor":
        return cls(shape, genus)

    # arithmetic
    def _check(self, other: "Tensor"):
        if not isinstance(other, Tensor):
            return NotImplemented
        if other.shape != self.shape or other.genus != self.genus:
            raise ValueError(f"shape mismatch: {self.shape}@g{self.genus} vs {other.shape}@g{other.genus}")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, 0) + c
        return Tensor(self.shape, self.genus, acc)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def __neg__(self) -> "Tensor":
        return Tensor(self.shape, self.genus, {w: -c for w, c in self.terms.items()})

    def __mul__(self, scalar) -> "Tensor":
        _exact(scalar)
        return Tensor(self.shape, self.genus, {w: c * scalar for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Tensor)
            and self.shape == other.shape
            and self.genus == other.genus
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.shape, self.genus, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> list:
        """Terms in canonical (sorted) word order."""
        return sorted(self.terms.items())

    def coefficient(self, word) -> Fraction | int:
        return self.terms.get(word, 0)

    def __repr__(self):
        return f"Tensor({self.shape}, g={self.genus}, {self.pretty(limit=6)})"

    def pretty(self, limit: int | None = None) -> str:
        items = self.items()
        if not items:
            return "0"
        shown = items if limit is None else items[:limit]
        out = []
        for w, c in shown:
            ws = word_str(self.shape, w)
            if c == 1:
                out.append(f"+ {ws}")
            elif c == -1:
                out.append(f"- {ws}")
            elif c < 0:
                out.append(f"- {-c}*{ws}")
            else:
                out.append(f"+ {c}*{ws}")
        text = " ".join(out).lstrip("+ ")
        if limit is not None and len(items) > limit:
            text += f" + ... ({len(items)} terms)"
        return text

    def map_words(self, shape: Shape, fn: Callable[[object], Iterable[tuple[object, object]]],
                  canonical: bool = False) -> "Tensor":
        """Linear extension of ``word -> [(raw_word, coef), ...]`` into ``shape``."""
        acc: dict = defaultdict(int)
        for w, c in self.terms.items():
            for nw, nc in fn(w):
                if canonical:
                    acc[nw] += c * nc
                else:
                    s, cw = canonicalize(shape, nw)
                    if s:
                        acc[cw] += s * c * nc
        return Tensor(shape, self.genus, acc)


# -- constructors -----------------------------------------------------------


def vector(g: int, code: int, coef=1) -> Tensor:
    return Tensor(H(), g, {code: coef})


def wedge_word(g: int, *codes: int, coef=1) -> Tensor:
    """The element c0∧c1∧...∧c_{k-1} of the k-th exterior power of H."""
    return Tensor(Wedge(len(codes), H()), g, [(tuple(codes), coef)], canonical=False)


def omega(space_or_g) -> Tensor:
    g = space_or_g.genus if isinstance(space_or_g, SymplecticSpace) else space_or_g
    return Tensor(Wedge(2, H()), g, {(a(i), b(i)): 1 for i in range(1, g + 1)})


def lift(t: Tensor) -> Tensor:
    """S -> first exterior power of S."""
    return Tensor(Wedge(1, t.shape), t.genus, {(w,): c for w, c in t.terms.items()})


def unlift(t: Tensor) -> Tensor:
    if not (isinstance(t.shape, Wedge) and t.shape.k == 1):
        raise ValueError(f"expected a first exterior power, got {t.shape}")
    return Tensor(t.shape.inner, t.genus, {w[0]: c for w, c in t.terms.items()})


def reshape(t: Tensor, shape: Shape) -> Tensor:
    """Reinterpret words under a shape with identical word layout."""
    return Tensor(shape, t.genus, dict(t.terms))


# -- products ---------------------------------------------------------------


def wedge(t1: Tensor, t2: Tensor) -> Tensor:
    """Product of p-th and q-th exterior powers of a common inner shape."""
    s1, s2 = t1.shape, t2.shape
    if not (isinstance(s1, Wedge) and isinstance(s2, Wedge)) or s1.inner != s2.inner:
        raise ValueError(f"wedge needs exterior powers of one inner shape, got {s1} and {s2}")
    if t1.genus != t2.genus:
        raise ValueError("genus mismatch")
    shape = Wedge(s1.k + s2.k, s1.inner)
    acc: dict = defaultdict(int)
    for w1, c1 in t1.terms.items():
        for w2, c2 in t2.terms.items():
            s, w = sort_sign(w1 + w2)
            if s:
                acc[w] += s * c1 * c2
    return Tensor(shape, t1.genus, acc)


def wedge_all(ts: Iterable[Tensor]) -> Tensor:
    ts = list(ts)
    out = ts[0]
    for t in ts[1:]:
        out = wedge(out, t)
    return out


def _factors(t: Tensor) -> tuple[tuple, Callable]:
    if isinstance(t.shape, TensorProduct):
        return t.shape.factors, lambda w: w
    return (t.shape,), lambda w: (w,)


def tensor(t1: Tensor, t2: Tensor) -> Tensor:
    if t1.genus != t2.genus:
        raise ValueError("genus mismatch")
    f1, as1 = _factors(t1)
    f2, as2 = _factors(t2)
    shape = TensorProduct(f1 + f2)
    return Tensor(
        shape,
        t1.genus,
        {as1(w1) + as2(w2): c1 * c2 for w1, c1 in t1.terms.items() for w2, c2 in t2.terms.items()},
    )


# -- expansion into H^{⊗k} --------------------------------------------------


def _perm_sign(perm) -> int:
    return sort_sign(perm)[0]


@lru_cache(maxsize=None)
def _expand_word(shape: Shape, word) -> tuple[tuple[int, tuple], ...]:
    if isinstance(shape, H):
        return ((1, (word,)),)
    if isinstance(shape, Wedge):
        parts = [_expand_word(shape.inner, w) for w in word]
        out = []
        for perm in itertools.permutations(range(shape.k)):
            sp = _perm_sign(perm)
            for combo in itertools.product(*(parts[i] for i in perm)):
                s = sp
                legs_ = ()
                for si, li in combo:
                    s *= si
                    legs_ += li
                out.append((s, legs_))
        return tuple(out)
    parts = [_expand_word(f, w) for f, w in zip(shape.factors, word)]
    out = []
    for combo in itertools.product(*parts):
        s = 1
        legs_ = ()
        for si, li in combo:
            s *= si
            legs_ += li
        out.append((s, legs_))
    return tuple(out)


def expand(t: Tensor, term_cap: int | None = DEFAULT_TERM_CAP) -> Tensor:
    """Image under the standard inclusion into H^{⊗k} (full signed symmetrization)."""
    guard("expand", len(t) * expansion_factor(t.shape), term_cap)
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        for s, fw in _expand_word(t.shape, w):
            acc[fw] += s * c
    return Tensor(flat(degree(t.shape)), t.genus, acc)


# -- contractions -----------------------------------------------------------


def contract(t: Tensor, i: int, j: int) -> Tensor:
    """C_{i,j}: H^{⊗k} -> H^{⊗(k-2)} with 1-based positions i < j, no positional sign."""
    if not is_flat(t.shape):
        raise ValueError(f"contract needs a flat tensor power of H, got {t.shape}")
    k = len(t.shape.factors)
    if not 1 <= i < j <= k:
        raise ValueError(f"positions must satisfy 1 <= i < j <= {k}, got ({i}, {j})")
    i0, j0 = i - 1, j - 1
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        p = pairing(w[i0], w[j0])
        if p:
            acc[w[:i0] + w[i0 + 1:j0] + w[j0 + 1:]] += p * c
    return Tensor(flat(k - 2), t.genus, acc)


def contract_matching(t: Tensor, matching) -> Tensor:
    """Contract a flat tensor along disjoint 0-based position pairs at once."""
    k = len(t.shape.factors)
    used = {p for pair in matching for p in pair}
    keep = [p for p in range(k) if p not in used]
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        coef = c
        for i, j in matching:
            p = pairing(w[i], w[j])
            if not p:
                break
            coef *= p
        else:
            acc[tuple(w[p] for p in keep)] += coef
    return Tensor(flat(len(keep)), t.genus, acc)


def _exterior_factor(shape: Shape) -> int:
    if not (isinstance(shape, Wedge) and isinstance(shape.inner, H)):
        raise ValueError(f"expected an exterior power of H, got {shape}")
    return shape.k


def contract_pair_exterior(t: Tensor, first: int = 0) -> Tensor:
    """Diagonal contraction of adjacent exterior-power factors ``first``, ``first+1``.

    Sums over every (leg of the first factor, leg of the second factor) pair; each
    term carries the pairing times the Koszul signs (-1)^i (-1)^j of moving the
    chosen legs to the front of their factors.
    """
    if not isinstance(t.shape, TensorProduct) or first + 1 >= len(t.shape.factors):
        raise ValueError("contract_pair_exterior needs a tensor product with two adjacent factors")
    factors = t.shape.factors
    p = _exterior_factor(factors[first])
    q = _exterior_factor(factors[first + 1])
    if p < 1 or q < 1:
        raise ValueError("both factors need at least one leg")
    new = factors[:first] + (Wedge(p - 1, H()), Wedge(q - 1, H())) + factors[first + 2:]
    shape = TensorProduct(new)
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        x, y = w[first], w[first + 1]
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                pr = pairing(xi, yj)
                if pr:
                    s = -pr if (i + j) % 2 else pr
                    nw = w[:first] + (x[:i] + x[i + 1:], y[:j] + y[j + 1:]) + w[first + 2:]
                    acc[nw] += s * c
    return Tensor(shape, t.genus, acc)


def multiply_exterior(t: Tensor, first: int = 0) -> Tensor:
    """Wedge-multiply adjacent exterior-power factors ``first`` and ``first+1``."""
    if not isinstance(t.shape, TensorProduct) or first + 1 >= len(t.shape.factors):
        raise ValueError("multiply_exterior needs a tensor product with two adjacent factors")
    factors = t.shape.factors
    p = _exterior_factor(factors[first])
    q = _exterior_factor(factors[first + 1])
    new = factors[:first] + (Wedge(p + q, H()),) + factors[first + 2:]
    shape = product_shape(new)
    collapse = len(new) == 1
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        s, m = sort_sign(w[first] + w[first + 1])
        if s:
            nw = m if collapse else w[:first] + (m,) + w[first + 2:]
            acc[nw] += s * c
    return Tensor(shape, t.genus, acc)


def self_contract(t: Tensor) -> Tensor:
    """Exterior self-contraction: r-th exterior power of H to the (r-2)-th.

    x_0∧...∧x_{r-1} -> sum_{i<j} (-1)^{i+j-1} <x_i, x_j> (word without i, j).
    """
    r = _exterior_factor(t.shape)
    if r < 2:
        raise ValueError("self-contraction needs at least two legs")
    acc: dict = defaultdict(int)
    for w, c in t.terms.items():
        for i in range(r):
            for j in range(i + 1, r):
                pr = pairing(w[i], w[j])
                if pr:
                    s = pr if (i + j) % 2 else -pr
                    acc[w[:i] + w[i + 1:j] + w[j + 1:]] += s * c
    return Tensor(Wedge(r - 2, H()), t.genus, acc)


def unshuffle(t: Tensor, p: int) -> Tensor:
    """Coproduct component: n-th exterior power of S -> (p-th) ⊗ (n-p-th).

    w_0∧...∧w_{n-1} -> sum over p-subsets I of sign(I) (w_I) ⊗ (w_rest).
    """
    if not isinstance(t.shape, Wedge):
        raise ValueError(f"unshuffle needs an exterior power, got {t.shape}")
    n, inner = t.shape.k, t.shape.inner
    if not 0 <= p <= n:
        raise ValueError(f"cannot split {p} factors off a degree-{n} exterior power")
    shape = TensorProduct((Wedge(p, inner), Wedge(n - p, inner)))
    acc: dict = defaultdict(int)
    subsets = list(itertools.combinations(range(n), p))
    for w, c in t.terms.items():
        for I in subsets:
            s = -1 if (sum(I) - p * (p - 1) // 2) % 2 else 1
            rest = tuple(w[i] for i in range(n) if i not in I)
            acc[(tuple(w[i] for i in I), rest)] += s * c
    return Tensor(shape, t.genus, acc)


# -- group action -----------------------------------------------------------


def apply_map(t: Tensor, m: SymplecticMap) -> Tensor:
    """Act by ``m`` on every H-leg and renormalize."""
    if m.genus != t.genus:
        raise ValueError(f"map genus {m.genus} does not match tensor genus {t.genus}")
    cols = m.columns
    shape = t.shape

    def images(w):
        ls = legs(shape, w)
        choices = [cols[x] for x in ls]
        for combo in itertools.product(*choices):
            coef = 1
            for _, cf in combo:
                coef *= cf
            yield rebuild(shape, [r for r, _ in combo]), coef

    return t.map_words(shape, images)


def act_minus_one(t: Tensor, m: SymplecticMap) -> Tensor:
    """Group-ring element (m - 1) acting on ``t``."""
    return apply_map(t, m) - t


# -- special maps -----------------------------------------------------------


def contraction_C3(t: Tensor) -> Tensor:
    """Third exterior power of H -> H (the contraction map)."""
    if t.shape != W3:
        raise ValueError(f"C3 expects the third exterior power of H, got {t.shape}")
    c = self_contract(t)
    return Tensor(H(), t.genus, {w[0]: v for w, v in c.terms.items()})


def traceless_project_p(t: Tensor) -> Tensor:
    """p(x∧y∧z) = x∧y∧z - (1/(g-1)) C3(x∧y∧z)∧ω."""
    if t.shape != W3:
        raise ValueError(f"p expects the third exterior power of H, got {t.shape}")
    g = t.genus
    if g < 2:
        raise ValueError("traceless projection needs g >= 2 (divides by g-1)")
    c = lift(contraction_C3(t))
    return t - wedge(c, omega(g)) * Fraction(1, g - 1)


def insert_omega(t: Tensor) -> Tensor:
    """H -> third exterior power, c -> ω∧c."""
    if not isinstance(t.shape, H):
        raise ValueError("insert_omega expects an element of H")
    return wedge(omega(t.genus), lift(t))


def insert_omega_sq(t: Tensor) -> Tensor:
    """Second exterior power of H -> second exterior power of ∧³H, x∧y -> (ω∧x)∧(ω∧y)."""
    if t.shape != Wedge(2, H()):
        raise ValueError(f"insert_omega_sq expects the second exterior power of H, got {t.shape}")
    g = t.genus
    cache = {c: lift(insert_omega(vector(g, c))) for c in range(2 * g)}
    out = Tensor.zero(Wedge(2, W3), g)
    for (x, y), c in t.terms.items():
        out = out + wedge(cache[x], cache[y]) * c
    return out


# -- torus weights ----------------------------------------------------------


def word_weight(shape: Shape, word, g: int) -> tuple[int, ...]:
    wt = [0] * g
    for x in legs(shape, word):
        wt[x // 2] += -1 if x % 2 else 1
    return tuple(wt)


def torus_weight_components(t: Tensor) -> dict[tuple[int, ...], Tensor]:
    parts: dict = defaultdict(dict)
    for w, c in t.terms.items():
        parts[word_weight(t.shape, w, t.genus)][w] = c
    return {wt: Tensor(t.shape, t.genus, terms) for wt, terms in sorted(parts.items())}


def weight_band_histogram(t: Tensor) -> dict[int, int]:
    """Number of terms per weight magnitude (sum of absolute weight entries)."""
    hist: dict = defaultdict(int)
    for w in t.terms:
        hist[sum(abs(x) for x in word_weight(t.shape, w, t.genus))] += 1
    return dict(sorted(hist.items()))


# -- annihilation by contractions -------------------------------------------


def matchings(k: int, r: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All sets of r disjoint 0-based position pairs among k positions."""

    def rec(start, used, left, acc):
        if left == 0:
            yield tuple(acc)
            return
        for i in range(start, k):
            if i in used:
                continue
            for j in range(i + 1, k):
                if j in used:
                    continue
                acc.append((i, j))
                yield from rec(i + 1, used | {i, j}, left - 1, acc)
                acc.pop()

    yield from rec(0, frozenset(), r, [])


def _block_structure(shape: Shape) -> tuple[int, int] | None:
    """(number of blocks, block size) when expand() is antisymmetric under the
    wreath product of block-internal and block permutations; else None."""
    if isinstance(shape, Wedge) and isinstance(shape.inner, H):
        return 1, shape.k
    if isinstance(shape, Wedge) and isinstance(shape.inner, Wedge) and isinstance(shape.inner.inner, H):
        return shape.k, shape.inner.k
    return None


def matching_orbit_representatives(n_blocks: int, size: int, r: int) -> list:
    """One matching per orbit of the block wreath-product symmetry."""
    k = n_blocks * size
    seen = set()
    reps = []
    perms = list(itertools.permutations(range(n_blocks)))
    for m in matchings(k, r):
        edges = [(i // size, j // size) for i, j in m]
        key = min(
            tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in edges)) for p in perms
        )
        if key not in seen:
            seen.add(key)
            reps.append(m)
    return reps


def _all_matching_contractions_vanish(ft: Tensor, r: int) -> bool:
    """Every size-r matching contraction of a flat tensor is zero.

    Term-driven: a term only feeds matchings built from position pairs whose
    legs pair nontrivially, so we enumerate those per term and accumulate the
    coefficient of each (matching, surviving word).  This covers all
    matchings without visiting the many that vanish termwise.
    """
    acc: dict = defaultdict(int)
    for w, c in ft.terms.items():
        by_handle: dict = {}
        for pos, code in enumerate(w):
            by_handle.setdefault(code >> 1, ([], []))[code & 1].append(pos)
        edges = []
        for a_pos, b_pos in by_handle.values():
            for i in a_pos:
                for j in b_pos:
                    # <a, b> = 1 when the a-leg comes first
                    edges.append((min(i, j), max(i, j), 1 if i < j else -1, (1 << i) | (1 << j)))
        if len(edges) < r:
            continue
        k = len(w)
        for combo in itertools.combinations(edges, r):
            mask = 0
            coef = c
            for _, _, p, bits in combo:
                if mask & bits:
                    break
                mask |= bits
                coef *= p
            else:
                pairs = tuple(sorted((i, j) for i, j, _, _ in combo))
                acc[(pairs, tuple(w[x] for x in range(k) if not mask >> x & 1))] += coef
    return not any(acc.values())


def annihilated_by_r_contractions(t: Tensor, r: int, exhaustive: bool = False,
                                  term_cap: int | None = DEFAULT_TERM_CAP) -> bool:
    """True iff every size-r matching contraction of expand(t) vanishes.

    With ``exhaustive=False`` and a block-symmetric shape, one matching per
    symmetry orbit is checked: expand(t) is (anti)invariant under permuting
    legs inside a block and permuting blocks, so contractions along matchings
    in one orbit agree up to sign and relabeling.  ``exhaustive=True`` covers
    every matching.
    """
    k = degree(t.shape)
    if r < 1 or 2 * r > k:
        raise ValueError(f"need 1 <= r and 2r <= {k}, got r={r}")
    ft = t if is_flat(t.shape) else expand(t, term_cap)
    if exhaustive:
        return _all_matching_contractions_vanish(ft, r)
    blocks = _block_structure(t.shape)
    candidates = matching_orbit_representatives(*blocks, r) if blocks else matchings(k, r)
    for m in candidates:
        if contract_matching(ft, m):
            return False
    return True
