"""Partitions, Sp(2g) irreducibles, weight multiplicities and decompositions,
Young symmetrizers and the constructive generation step for a1⊗...⊗ak.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Iterator, Sequence

from .linalg import exact_rank
from .symplectic import SymplecticMap, SymplecticSpace, a, b, handle_permutation, transvection_S
from .tensors import (
    DEFAULT_TERM_CAP,
    H,
    Shape,
    Tensor,
    TensorProduct,
    Wedge,
    apply_map,
    degree,
    dimension,
    flat,
    guard,
    is_flat,
    wedge_word,
    tensor,
)


@total_ordering
@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(x < y for x, y in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """``"2,2,1,1"``; the empty string or ``"0"`` is the empty partition."""
        text = text.strip()
        if text in ("", "0", "()"):
            return cls(())
        try:
            parts = [int(x) for x in text.replace(" ", "").split(",") if x != ""]
        except ValueError as exc:
            raise ValueError(f"cannot parse partition {text!r}") from exc
        return cls(tuple(p for p in parts if p != 0))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def transpose(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def padded(self, g: int) -> tuple[int, ...]:
        return self.parts + (0,) * (g - len(self.parts))

    def __lt__(self, other: "Partition") -> bool:
        return self.parts < other.parts

    def __str__(self) -> str:
        return ",".join(map(str, self.parts)) if self.parts else "0"

    def __iter__(self):
        return iter(self.parts)


def partitions(n: int, max_part: int | None = None, max_len: int | None = None) -> Iterator[Partition]:
    """Partitions of n in reverse lexicographic order."""
    max_part = n if max_part is None else max_part

    def rec(rest, cap, length):
        if rest == 0:
            yield ()
            return
        if max_len is not None and length >= max_len:
            return
        for p in range(min(rest, cap), 0, -1):
            for tail in rec(rest - p, p, length + 1):
                yield (p,) + tail

    for parts in rec(n, max_part, 0):
        yield Partition(parts)


@dataclass(frozen=True)
class IrrepLabel:
    partition: Partition
    genus: int

    def __post_init__(self):
        if self.partition.length > self.genus:
            raise ValueError(
                f"V_{self.partition} does not exist for Sp({2 * self.genus}): length > g"
            )


def weyl_dimension(label: IrrepLabel | Partition, g: int | None = None) -> int:
    """Dimension of V_λ for Sp(2g) by the type-C Weyl dimension formula."""
    if isinstance(label, Partition):
        label = IrrepLabel(label, g)
    lam, g = label.partition, label.genus
    rho = [g - i for i in range(g)]
    l = [x + r for x, r in zip(lam.padded(g), rho)]
    num = den = 1
    for i in range(g):
        num *= l[i]
        den *= rho[i]
        for j in range(i + 1, g):
            num *= (l[i] - l[j]) * (l[i] + l[j])
            den *= (rho[i] - rho[j]) * (rho[i] + rho[j])
    q, rem = divmod(num, den)
    assert rem == 0, "Weyl dimension must be an integer"
    return q


def symmetric_group_dimension(lam: Partition) -> int:
    """Hook-length formula."""
    conj = lam.transpose().parts
    hooks = 1
    for i, row in enumerate(lam.parts):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(lam.weight) // hooks


# -- weights ----------------------------------------------------------------


def dominant(weight: Sequence[int]) -> tuple[int, ...]:
    """Weyl-chamber representative: absolute values sorted decreasingly."""
    return tuple(sorted((abs(x) for x in weight), reverse=True))


def _add(u, v):
    return tuple(x + y for x, y in zip(u, v))


@lru_cache(maxsize=None)
def character(shape: Shape, g: int) -> dict[tuple[int, ...], int]:
    """Full torus character {weight: multiplicity}, built layer by layer."""
    if isinstance(shape, H):
        out = {}
        for i in range(g):
            e = [0] * g
            e[i] = 1
            out[tuple(e)] = 1
            e[i] = -1
            out[tuple(e)] = 1
        return out
    if isinstance(shape, Wedge):
        inner = character(shape.inner, g)
        # elementary symmetric function e_k of the inner weight multiset
        layers: list[dict] = [defaultdict(int) for _ in range(shape.k + 1)]
        layers[0][(0,) * g] = 1
        for wt, mult in inner.items():
            new = [defaultdict(int, layer) for layer in layers]
            for j in range(1, shape.k + 1):
                for take in range(1, min(j, mult) + 1):
                    c = math.comb(mult, take)
                    shift = tuple(take * x for x in wt)
                    for w0, m0 in layers[j - take].items():
                        new[j][_add(w0, shift)] += c * m0
            layers = new
        return {w: m for w, m in layers[shape.k].items() if m}
    out = {(0,) * g: 1}
    for f in shape.factors:
        fc = character(f, g)
        acc: dict = defaultdict(int)
        for w0, m0 in out.items():
            for w1, m1 in fc.items():
                acc[_add(w0, w1)] += m0 * m1
        out = dict(acc)
    return out


def weight_multiplicities(shape: Shape, g: int) -> dict[tuple[int, ...], int]:
    """Multiplicity of each dominant weight in the shape's character."""
    return {w: m for w, m in character(shape, g).items() if w == dominant(w)}


def dominates(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """mu <= lam in the type-C root order (both dominant, same length g)."""
    diff = [x - y for x, y in zip(lam, mu)]
    total = 0
    for d in diff:
        total += d
        if total < 0:
            return False
    return total % 2 == 0


def orbit_size(weight: Sequence[int]) -> int:
    """Size of the signed-permutation orbit of a dominant weight."""
    g = len(weight)
    counts: dict = defaultdict(int)
    for x in weight:
        counts[x] += 1
    size = math.factorial(g)
    for c in counts.values():
        size //= math.factorial(c)
    return size * 2 ** sum(1 for x in weight if x)


def _positive_roots(g: int) -> list[tuple[int, ...]]:
    roots = []
    for i in range(g):
        for j in range(i + 1, g):
            for s in (-1, 1):
                r = [0] * g
                r[i] = 1
                r[j] = s
                roots.append(tuple(r))
        r = [0] * g
        r[i] = 2
        roots.append(tuple(r))
    return roots


@lru_cache(maxsize=None)
def irreducible_multiplicities(lam: tuple[int, ...], g: int) -> dict[tuple[int, ...], int]:
    """Dominant weight multiplicities of V_λ via Freudenthal's recursion."""
    lam = tuple(lam) + (0,) * (g - len(lam))
    top = lam[0] if lam else 0
    dom = [
        p.padded(g)
        for s in range(sum(lam), -1, -2)
        for p in partitions(s, max_part=top, max_len=g)
        if dominates(lam, p.padded(g))
    ]
    rho = tuple(g - i for i in range(g))
    roots = _positive_roots(g)

    def norm_rho(w):
        return sum((x + r) ** 2 for x, r in zip(w, rho))

    target = norm_rho(lam)
    mult: dict = {lam: 1}
    # dom is sorted so every weight strictly above mu is handled before mu
    for mu in sorted(dom, key=lambda w: (-sum(w), [-x for x in w])):
        if mu == lam:
            continue
        total = 0
        for alpha in roots:
            k = 1
            while True:
                nu = tuple(m + k * x for m, x in zip(mu, alpha))
                if max(abs(x) for x in nu) > top:
                    break
                m_nu = mult.get(dominant(nu), 0)
                if m_nu:
                    total += m_nu * sum(x * y for x, y in zip(nu, alpha))
                k += 1
        denom = target - norm_rho(mu)
        value = Fraction(2 * total, denom)
        assert value.denominator == 1 and value >= 0
        if value:
            mult[mu] = int(value)
    return mult


@dataclass
class DecompositionReport:
    entries: dict[Partition, int]
    shape: Shape
    genus: int
    ambient_dimension: int = 0

    def __post_init__(self):
        if not self.ambient_dimension:
            self.ambient_dimension = dimension(self.shape, self.genus)

    def dimension_check(self) -> bool:
        total = sum(m * weyl_dimension(lam, self.genus) for lam, m in self.entries.items())
        return total == self.ambient_dimension

    def band(self, weight: int) -> dict[Partition, int]:
        return {lam: m for lam, m in self.entries.items() if lam.weight == weight}

    def sorted_entries(self, weight: int | None = None) -> list[tuple[Partition, int]]:
        src = self.entries if weight is None else self.band(weight)
        return sorted(src.items(), key=lambda kv: (-kv[0].weight, [-x for x in kv[0].parts]))

    def weight_bands(self) -> dict[int, int]:
        """Total multiplicity per irreducible weight."""
        bands: dict = defaultdict(int)
        for lam, m in self.entries.items():
            bands[lam.weight] += m
        return dict(sorted(bands.items(), reverse=True))

    def to_json(self, weight: int | None = None) -> dict:
        return {
            "shape": str(self.shape),
            "genus": self.genus,
            "ambient_dimension": self.ambient_dimension,
            "weight_filter": weight,
            "entries": [
                {"partition": list(lam.parts), "multiplicity": m}
                for lam, m in self.sorted_entries(weight)
            ],
            "weight_bands": {str(k): v for k, v in self.weight_bands().items()},
        }


def decompose(shape: Shape, g: int, term_cap: int | None = DEFAULT_TERM_CAP) -> DecompositionReport:
    """Greedy highest-weight subtraction against Freudenthal tables."""
    guard(f"decompose {shape} at g={g}", dimension(shape, g), term_cap)
    remaining = dict(weight_multiplicities(shape, g))
    entries: dict[Partition, int] = {}
    while True:
        live = [w for w, m in remaining.items() if m]
        if not live:
            break
        top = max(live)  # lex order refines the dominance order
        m = remaining[top]
        if m < 0:
            raise ArithmeticError(f"negative remaining multiplicity at {top}")
        lam = Partition(tuple(x for x in top if x))
        entries[lam] = m
        for w, k in irreducible_multiplicities(top, g).items():
            remaining[w] = remaining.get(w, 0) - m * k
    report = DecompositionReport(entries, shape, g)
    if not report.dimension_check():
        raise ArithmeticError("decomposition does not account for the full dimension")
    return report


# -- Schur–Weyl --------------------------------------------------------------


def traceless_dimension(k: int, g: int) -> int:
    """dim H^{⊗k} minus the rank of all ω-insertion images (independent route)."""
    n = 2 * g
    if k < 2:
        return n**k
    vectors = []
    for i, j in itertools.combinations(range(k), 2):
        for rest in itertools.product(range(n), repeat=k - 2):
            vec: dict = {}
            for h in range(g):
                for x, y, s in ((a(h + 1), b(h + 1), 1), (b(h + 1), a(h + 1), -1)):
                    word = list(rest)
                    word.insert(i, x)
                    word.insert(j, y)
                    vec[tuple(word)] = vec.get(tuple(word), 0) + s
            vectors.append(vec)
    return n**k - exact_rank(vectors)


def schur_weyl_sum(k: int, g: int) -> int:
    return sum(
        weyl_dimension(lam, g) * symmetric_group_dimension(lam)
        for lam in partitions(k, max_len=g)
    )


# -- Young symmetrizers -----------------------------------------------------


@dataclass(frozen=True)
class YoungTableau:
    partition: Partition
    rows: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if not self.rows:
            it = itertools.count(1)
            rows = tuple(tuple(next(it) for _ in range(r)) for r in self.partition.parts)
            object.__setattr__(self, "rows", rows)
        if tuple(len(r) for r in self.rows) != self.partition.parts:
            raise ValueError("tableau rows do not match the partition")
        nums = sorted(x for r in self.rows for x in r)
        if nums != list(range(1, self.partition.weight + 1)):
            raise ValueError("tableau numbering must be a bijection onto 1..|λ|")

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(r[j] for r in self.rows if len(r) > j) for j in range(len(self.rows[0]) if self.rows else 0)
        )


def _group_elements(blocks) -> Iterator[tuple[dict[int, int], int]]:
    """Permutations preserving each block, with their signs (1-based labels)."""
    per_block = [list(itertools.permutations(bl)) for bl in blocks]
    for choice in itertools.product(*per_block):
        perm = {}
        sign = 1
        for bl, img in zip(blocks, choice):
            perm.update(zip(bl, img))
            inv = sum(1 for i in range(len(img)) for j in range(i + 1, len(img)) if img[i] > img[j])
            sign *= -1 if inv % 2 else 1
        yield perm, sign


def permute_positions(t: Tensor, perm: dict[int, int]) -> Tensor:
    """Move the factor at position i to position perm[i] (1-based)."""
    k = len(t.shape.factors)
    inv = [0] * k
    for i in range(1, k + 1):
        inv[perm.get(i, i) - 1] = i - 1
    return Tensor(t.shape, t.genus, {tuple(w[inv[p]] for p in range(k)): c for w, c in t.terms.items()})


def young_symmetrizer_apply(tableau: YoungTableau, t: Tensor) -> Tensor:
    """c_λ = a_λ b_λ: signed column sum first, then row sum."""
    if not is_flat(t.shape) or len(t.shape.factors) != tableau.partition.weight:
        raise ValueError("tableau size must match the tensor degree")
    acc = Tensor.zero(t.shape, t.genus)
    for perm, sign in _group_elements(tableau.columns):
        acc = acc + permute_positions(t, perm) * sign
    out = Tensor.zero(t.shape, t.genus)
    for perm, _ in _group_elements(tableau.rows):
        out = out + permute_positions(acc, perm)
    return out


def generator_tensor(lam: Partition, g: int) -> Tensor:
    """(a1∧...∧a_{μ1}) ⊗ ... ⊗ (a1∧...∧a_{μl}) with μ the transpose of λ."""
    mu = lam.transpose()
    if mu.parts and mu.parts[0] > g:
        raise ValueError(f"need g >= {mu.parts[0]} for the generator of V_{lam}")
    factors = [wedge_word(g, *(a(i) for i in range(1, m + 1))) for m in mu.parts]
    if not factors:
        return Tensor(TensorProduct(()), g, {(): 1})
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def flat_a_word(g: int, indices: Sequence[int]) -> Tensor:
    return Tensor(flat(len(indices)), g, {tuple(a(i) for i in indices): 1})


@dataclass(frozen=True)
class ReductionStep:
    """Either ``S_{p,q} - 1`` or a handle relabeling (applied as the group element)."""

    kind: str  # "S-1" or "relabel"
    p: int = 0
    q: int = 0
    perm: tuple[tuple[int, int], ...] = ()

    def map(self, space: SymplecticSpace) -> SymplecticMap:
        if self.kind == "S-1":
            return transvection_S(space, self.p, self.q)
        return handle_permutation(space, dict(self.perm))

    def apply(self, t: Tensor, space: SymplecticSpace) -> Tensor:
        m = apply_map(t, self.map(space))
        return m - t if self.kind == "S-1" else m

    def __str__(self):
        if self.kind == "S-1":
            return f"(S_{self.p},{self.q} - 1)"
        return "relabel(" + ", ".join(f"{i}->{j}" for i, j in self.perm) + ")"


def lemma21_reduce(targets: Sequence[int], g: int) -> list[ReductionStep]:
    """Steps taking a1⊗...⊗ak to a_{i1}⊗...⊗a_{ik}.

    Repeated entries are produced by (S_{j,l} - 1) acting at position j, where l
    is the first position holding the same index; a final handle relabeling
    moves first occurrences to their target indices.
    """
    k = len(targets)
    if g < k:
        raise ValueError(f"need g >= k (g={g}, k={k})")
    if any(not 1 <= i <= g for i in targets):
        raise ValueError("target indices must lie in 1..g")
    first: dict[int, int] = {}
    steps: list[ReductionStep] = []
    for j, idx in enumerate(targets, start=1):
        if idx in first:
            steps.append(ReductionStep("S-1", j, first[idx]))
        else:
            first[idx] = j
    # handle j (first occurrence position) must end up at handle targets[j-1]
    mapping = {j: idx for idx, j in first.items()}
    free_src = [i for i in range(1, g + 1) if i not in mapping]
    free_dst = [i for i in range(1, g + 1) if i not in mapping.values()]
    mapping.update(zip(free_src, free_dst))
    perm = tuple(sorted((i, j) for i, j in mapping.items() if i != j))
    if perm:
        steps.append(ReductionStep("relabel", perm=perm))
    return steps


def replay(steps: Iterable[ReductionStep], k: int, g: int) -> Tensor:
    space = SymplecticSpace(g)
    t = flat_a_word(g, range(1, k + 1))
    for step in steps:
        t = step.apply(t, space)
    return t
