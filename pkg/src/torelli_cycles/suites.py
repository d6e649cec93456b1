"""Named verification suites and the report they produce.

Every check is a top-level function returning ``(expected, computed, ok)`` so
that suites can fan out over a process pool; the report is keyed and sorted
by check id, which keeps the output independent of completion order.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import cycles
from .reptheory import (
    Partition,
    decompose,
    schur_weyl_sum,
    traceless_dimension,
    weyl_dimension,
)
from .tensors import DEFAULT_TERM_CAP, W3, ResourceLimitExceeded, Wedge, matchings

STATUSES = ("pass", "fail", "skipped")


def to_plain(value: Any) -> Any:
    """JSON-safe copy: rationals become "p/q" strings, partitions int arrays."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Partition):
        return list(value.parts)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__} exactly")


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    status: str
    expected: Any
    computed: Any
    wall_time: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if not self.anchor:
            raise ValueError("every check needs an anchor or the tag 'derived'")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "status": self.status,
            "expected": to_plain(self.expected),
            "computed": to_plain(self.computed),
            "wall_time": None if self.wall_time is None else round(self.wall_time, 3),
        }


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def status(self) -> str:
        live = [c for c in self.checks if c.status != "skipped"]
        return "pass" if all(c.status == "pass" for c in live) else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "status": self.status,
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.id)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        rows = [c.to_json() for c in sorted(self.checks, key=lambda c: c.id)]
        width = max([len(r["id"]) for r in rows] + [5])
        lines = [f"suite {self.suite}: {self.status}"]
        for r in rows:
            exp = json.dumps(r["expected"], sort_keys=True)
            got = json.dumps(r["computed"], sort_keys=True)
            line = f"  {r['status'].upper():7} {r['id']:<{width}}  expected={exp}  computed={got}"
            if r["wall_time"] is not None:
                line += f"  ({r['wall_time']:.3f}s)"
            lines.append(line + f"  [{r['anchor']}]")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Options:
    seed: int = 0
    samples: int = 20
    term_cap: int | None = DEFAULT_TERM_CAP
    timing: bool = False


# -- individual checks --------------------------------------------------------

TABLE_ROWS = {
    1: [(1, 1, 1)],
    2: [(2, 2, 1, 1), (1,) * 6],
    3: [(3, 2, 2, 2), (3, 3, 1, 1, 1), (2, 2, 2, 1, 1, 1), (2, 2, 1, 1, 1, 1, 1), (1,) * 9],
}


def round_sig(x: int, digits: int = 2) -> str:
    """``x`` rounded to ``digits`` significant figures, written like "7.5e7"."""
    return f"{x:.{digits - 1}e}".replace("e+0", "e").replace("e+", "e")


def check_table_exact(n: int, expected: int, opts: Options):
    g = 3 * n
    total = sum(weyl_dimension(Partition(p), g) for p in TABLE_ROWS[n])
    return expected, total, total == expected


def check_table_rounded(n: int, expected: str, opts: Options):
    g = 3 * n
    total = sum(weyl_dimension(Partition(p), g) for p in TABLE_ROWS[n])
    got = round_sig(total)
    return expected, {"exact": total, "rounded": got}, got == expected


def _entries(pairs) -> list:
    return [[list(lam.parts), m] for lam, m in pairs]


def check_decompose(n: int, g: int, weight: int | None, expected: list, opts: Options):
    report = decompose(Wedge(n, W3), g, term_cap=opts.term_cap)
    got = _entries(report.sorted_entries(weight))
    return expected, got, got == expected and report.dimension_check()


def check_thm1(n: int, opts: Options):
    cert = cycles.theorem1_witness(n, 3 * n, term_cap=opts.term_cap)
    got = {"equals_target": cert.equal, "traceless": cert.traceless, "terms": len(cert.image)}
    return {"equals_target": True, "traceless": True, "terms": 1}, got, cert.passed and len(cert.image) == 1


def check_lemma42(kind: str, n: int, expected: Fraction | None, opts: Options):
    fam = cycles.sigma(n) if kind == "sigma" else cycles.rho(n)
    res = cycles.lemma42_scalar(fam)
    if expected is None:
        return "nonzero", res.scalar, res.proportional and res.scalar != 0
    return expected, res.scalar, res.proportional and res.scalar == expected


def check_claim51(n: int, g: int, opts: Options):
    """Seeded samples, each checked over every matching and over orbit representatives."""
    rng = random.Random(f"claim51:{opts.seed}:{n}:{g}")
    bad = []
    for _ in range(opts.samples):
        config = cycles.random_configuration(n, g, rng)
        full = cycles.claim51_check(config, exhaustive=True, term_cap=opts.term_cap)
        fast = cycles.claim51_check(config, exhaustive=False, term_cap=opts.term_cap)
        if not (full and fast):
            bad.append(config.to_json())
    return {"samples": opts.samples, "failures": []}, {"samples": opts.samples, "failures": bad}, not bad


def check_claim51_exhaustive(opts: Options):
    """Full 945-matching enumeration on one n=3 sample, compared with the orbit-reduced answer."""
    rng = random.Random(f"claim51x:{opts.seed}")
    config = cycles.random_configuration(3, 9, rng)
    count = sum(1 for _ in matchings(9, 4))
    full = cycles.claim51_check(config, exhaustive=True, term_cap=opts.term_cap)
    fast = cycles.claim51_check(config, exhaustive=False, term_cap=opts.term_cap)
    expected = {"matchings": 945, "exhaustive": True, "orbit_reduced": True}
    got = {"matchings": count, "exhaustive": full, "orbit_reduced": fast}
    return expected, got, got == expected


def check_claim52(m: int, g: int, opts: Options):
    got = cycles.claim52_coefficient(m, g)
    want = cycles.claim52_closed_form(m, g)
    return want, got, got == want


def check_claim52_sign(opts: Options):
    """One global sign for every case means the ratios must all be the same ±1."""
    ratios = [cycles.claim52_coefficient(m, g) / cycles.claim52_closed_form(m, g) for m, g in CLAIM52_CASES]
    ok = len(set(ratios)) == 1 and abs(ratios[0]) == 1
    return "single ratio in {1, -1}", ratios, ok


def check_psi2(g: int, opts: Options):
    cert = cycles.psi2_fundamental(g)
    return {"nonzero": True, "moved_by": []}, {"nonzero": bool(cert.tensor), "moved_by": cert.failures}, cert.passed


def check_schurweyl(k: int, g: int, opts: Options):
    lhs = schur_weyl_sum(k, g)
    rhs = traceless_dimension(k, g)
    return rhs, lhs, lhs == rhs


# -- suite registry ------------------------------------------------------------

CLAIM52_CASES = [(2, 4), (2, 5), (3, 7)]

Spec = tuple[str, str, Callable, tuple]


def _table_specs(opts: Options) -> list[Spec]:
    V13_V1 = [[[1, 1, 1], 1], [[1], 1]]
    return [
        ("table.n1.g3", "top-weight dimension table, n=1", check_table_exact, (1, 14)),
        ("table.n2.g6", "top-weight dimension table, n=2", check_table_exact, (2, 19383)),
        ("table.n3.g9", "top-weight dimension table, n=3 (two significant figures)", check_table_rounded, (3, "7.5e7")),
        *[
            (f"decompose.w3.g{g}", "wedge^3 H splits as V_{1^3} + V_1", check_decompose, (1, g, None, V13_V1))
            for g in (3, 4, 5)
        ],
        (
            "decompose.wedge2w3.g6.weight6",
            "top-weight dimension table, n=2 constituents",
            check_decompose,
            (2, 6, 6, [[[2, 2, 1, 1], 1], [[1, 1, 1, 1, 1, 1], 1]]),
        ),
    ]


def _thm1_specs(opts: Options) -> list[Spec]:
    return [(f"thm1.n{n}.g{3 * n}", "top-weight witness for the Figure-4 cycle", check_thm1, (n,)) for n in (1, 2, 3)]


def _lemma42_specs(opts: Options) -> list[Spec]:
    anchors = {1: Fraction(1), 2: Fraction(-3)}
    out = []
    for kind in ("sigma", "rho"):
        for n in (1, 2):
            out.append((f"lemma42.{kind}.n{n}", "nested-family scalar anchor", check_lemma42, (kind, n, anchors[n])))
        for n in (3, 4):
            out.append((f"lemma42.{kind}.n{n}", "derived", check_lemma42, (kind, n, None)))
    return out


def _claim51_specs(opts: Options) -> list[Spec]:
    out = [
        (f"claim51.n{n}.g{g}", "vanishing of (n+1)-fold contractions", check_claim51, (n, g))
        for n, gs in ((2, (4, 5, 6)), (3, (6, 7, 8, 9)))
        for g in gs
    ]
    out.append(("claim51.exhaustive.n3", "vanishing of (n+1)-fold contractions", check_claim51_exhaustive, ()))
    return out


def _claim52_specs(opts: Options) -> list[Spec]:
    out = [
        (f"claim52.m{m}.g{g}", "closed-form contraction coefficient", check_claim52, (m, g))
        for m, g in CLAIM52_CASES
    ]
    out.append(("claim52.global_sign", "closed-form contraction coefficient", check_claim52_sign, ()))
    out += [(f"psi2.invariant.g{g}", "invariance of psi_2 of the fundamental class", check_psi2, (g,)) for g in (2, 3)]
    return out


def _schurweyl_specs(opts: Options) -> list[Spec]:
    return [
        (f"schurweyl.k{k}.g{g}", "derived", check_schurweyl, (k, g))
        for g in (3, 4)
        for k in (1, 2, 3)
    ]


SUITES: dict[str, Callable[[Options], list[Spec]]] = {
    "table": _table_specs,
    "thm1": _thm1_specs,
    "lemma42": _lemma42_specs,
    "claim51": _claim51_specs,
    "claim52": _claim52_specs,
    "schurweyl": _schurweyl_specs,
}
SUITE_NAMES = (*SUITES, "all")


def run_check(spec: Spec, opts: Options) -> Check:
    cid, anchor, fn, args = spec
    start = time.perf_counter()
    try:
        expected, computed, ok = fn(*args, opts)
        status = "pass" if ok else "fail"
    except ResourceLimitExceeded as exc:
        expected, computed, status = None, f"resource guard: estimate {exc.estimate} > cap {exc.cap}", "skipped"
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        expected, computed, status = None, f"{type(exc).__name__}: {exc}", "fail"
    elapsed = time.perf_counter() - start if opts.timing else None
    return Check(cid, anchor, status, to_plain(expected), to_plain(computed), elapsed)


def _run_packed(packed) -> Check:
    return run_check(*packed)


def run_suite(name: str, opts: Options = Options(), jobs: int = 1) -> VerificationReport:
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    names = list(SUITES) if name == "all" else [name]
    specs = [s for n in names for s in SUITES[n](opts)]
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            checks = list(pool.map(_run_packed, [(s, opts) for s in specs]))
    else:
        checks = [run_check(s, opts) for s in specs]
    return VerificationReport(name, sorted(checks, key=lambda c: c.id))
