"""The genus-g symplectic space H, its basis labels, and the named generators.

Basis vectors are encoded as small integers so tensor words stay cheap to
hash and compare: ``a_i -> 2(i-1)`` and ``b_i -> 2(i-1) + 1``.  Integer order
is therefore the label order a1 < b1 < a2 < b2 < ...
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence


class Label(NamedTuple):
    index: int
    kind: str  # "a" or "b"

    @property
    def code(self) -> int:
        return 2 * (self.index - 1) + (self.kind == "b")

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def a(i: int) -> int:
    return 2 * (i - 1)


def b(i: int) -> int:
    return 2 * (i - 1) + 1


def handle(code: int) -> int:
    """1-based handle index of a basis code."""
    return code // 2 + 1


def is_a(code: int) -> bool:
    return code % 2 == 0


def label(code: int) -> Label:
    return Label(handle(code), "b" if code % 2 else "a")


def leg_str(code: int) -> str:
    return str(label(code))


def pairing(u: int, v: int) -> int:
    """Symplectic pairing of two basis codes: <a_i, b_i> = 1 = -<b_i, a_i>."""
    if u // 2 != v // 2 or u == v:
        return 0
    return 1 if u % 2 == 0 else -1


@dataclass(frozen=True)
class SymplecticSpace:
    genus: int

    def __post_init__(self):
        if not isinstance(self.genus, int) or self.genus < 1:
            raise ValueError(f"genus must be a positive integer, got {self.genus!r}")

    @property
    def dim(self) -> int:
        return 2 * self.genus

    @property
    def labels(self) -> list[Label]:
        return [label(c) for c in range(self.dim)]

    def pairing(self, u: int, v: int) -> int:
        return pairing(u, v)

    def pairing_matrix(self) -> list[list[int]]:
        return [[pairing(u, v) for v in range(self.dim)] for u in range(self.dim)]


def make_space(g: int) -> SymplecticSpace:
    return SymplecticSpace(g)


class SymplecticMap:
    """Dense exact matrix acting on basis coordinates.

    Column ``c`` holds the coordinates of the image of basis vector ``c``.
    """

    __slots__ = ("genus", "matrix", "__dict__")

    def __init__(self, genus: int, matrix: Sequence[Sequence]):
        n = 2 * genus
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError(f"expected a {n}x{n} matrix for genus {genus}")
        self.genus = genus
        self.matrix = tuple(tuple(Fraction(x) for x in row) for row in matrix)

    @classmethod
    def identity(cls, genus: int) -> "SymplecticMap":
        n = 2 * genus
        return cls(genus, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_images(cls, genus: int, images: dict[int, dict[int, object]]) -> "SymplecticMap":
        """Identity except on the basis codes listed in ``images``."""
        n = 2 * genus
        m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col, image in images.items():
            for row in range(n):
                m[row][col] = Fraction(0)
            for row, coef in image.items():
                m[row][col] = Fraction(coef)
        return cls(genus, m)

    @cached_property
    def columns(self) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
        """Sparse image of every basis vector."""
        n = 2 * self.genus
        return tuple(
            tuple((r, self.matrix[r][c]) for r in range(n) if self.matrix[r][c])
            for c in range(n)
        )

    def image(self, code: int) -> dict[int, Fraction]:
        return dict(self.columns[code])

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        if other.genus != self.genus:
            raise ValueError("genus mismatch in composition")
        n = 2 * self.genus
        A, B = self.matrix, other.matrix
        return SymplecticMap(
            self.genus,
            [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)],
        )

    def __eq__(self, other):
        return isinstance(other, SymplecticMap) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        changed = [
            f"{leg_str(c)}->{_fmt_vec(self.columns[c])}"
            for c in range(2 * self.genus)
            if self.columns[c] != ((c, Fraction(1)),)
        ]
        return f"SymplecticMap(g={self.genus}, {', '.join(changed) or 'identity'})"


def _fmt_vec(col) -> str:
    return " + ".join(f"{coef}*{leg_str(r)}" if coef != 1 else leg_str(r) for r, coef in col) or "0"


def _check_indices(space: SymplecticSpace, *idx: int) -> None:
    for i in idx:
        if not 1 <= i <= space.genus:
            raise ValueError(f"handle index {i} out of range 1..{space.genus}")


def transvection_T(space: SymplecticSpace, i: int, j: int) -> SymplecticMap:
    """b_i -> b_i + a_j, b_j -> b_j + a_i, everything else fixed."""
    if i == j:
        raise ValueError("transvection_T needs i != j")
    _check_indices(space, i, j)
    return SymplecticMap.from_images(
        space.genus, {b(i): {b(i): 1, a(j): 1}, b(j): {b(j): 1, a(i): 1}}
    )


def transvection_S(space: SymplecticSpace, p: int, q: int) -> SymplecticMap:
    """a_p -> a_p + a_q, b_q -> b_q - b_p, everything else fixed."""
    if p == q:
        raise ValueError("transvection_S needs p != q")
    _check_indices(space, p, q)
    return SymplecticMap.from_images(
        space.genus, {a(p): {a(p): 1, a(q): 1}, b(q): {b(q): 1, b(p): -1}}
    )


def torus_element(space: SymplecticSpace, ts: Sequence) -> SymplecticMap:
    """Diagonal map a_i -> t_i a_i, b_i -> t_i^{-1} b_i."""
    if len(ts) != space.genus:
        raise ValueError("need one torus parameter per handle")
    images = {}
    for i, t in enumerate(ts, start=1):
        t = Fraction(t)
        if t == 0:
            raise ValueError("torus parameters must be nonzero")
        images[a(i)] = {a(i): t}
        images[b(i)] = {b(i): 1 / t}
    return SymplecticMap.from_images(space.genus, images)


def handle_permutation(space: SymplecticSpace, perm: dict[int, int]) -> SymplecticMap:
    """Relabel handles: a_i -> a_perm(i), b_i -> b_perm(i).  Missing keys are fixed."""
    full = {i: perm.get(i, i) for i in range(1, space.genus + 1)}
    if sorted(full.values()) != list(range(1, space.genus + 1)):
        raise ValueError(f"not a permutation of handles: {perm}")
    images = {}
    for i, j in full.items():
        if i != j:
            images[a(i)] = {a(j): 1}
            images[b(i)] = {b(j): 1}
    return SymplecticMap.from_images(space.genus, images)


def is_symplectic(m: SymplecticMap, space: SymplecticSpace | None = None) -> bool:
    if space is not None and space.genus != m.genus:
        raise ValueError(f"map has genus {m.genus}, space has genus {space.genus}")
    n = 2 * m.genus
    cols = m.columns
    for u in range(n):
        for v in range(u, n):
            val = sum(cu * cv * pairing(ru, rv) for ru, cu in cols[u] for rv, cv in cols[v])
            if val != pairing(u, v):
                return False
    return True


def generators(space: SymplecticSpace) -> Iterable[tuple[str, SymplecticMap]]:
    """All ordered-pair instances of T_{i,j} and S_{p,q}."""
    g = space.genus
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            if i != j:
                yield f"T_{i},{j}", transvection_T(space, i, j)
    for p in range(1, g + 1):
        for q in range(1, g + 1):
            if p != q:
                yield f"S_{p},{q}", transvection_S(space, p, q)
