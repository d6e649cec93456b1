"""Exact rank of sparse rational vectors (fraction-free Gaussian elimination)."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping


def exact_rank(vectors: Iterable[Mapping[Hashable, object]]) -> int:
    """Rank of a family of sparse vectors given as {coordinate: exact rational}."""
    pivots: dict[Hashable, dict] = {}
    rank = 0
    for v in vectors:
        row = {k: Fraction(c) for k, c in v.items() if c}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = row
                rank += 1
                break
            factor = row[lead] / piv[lead]
            for k, c in piv.items():
                nv = row.get(k, 0) - factor * c
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rank
