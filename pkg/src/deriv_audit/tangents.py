"""Horizontal tangent points on an interval.

The naive route collects sign-change roots of the derivative expression; the
corrected route adds candidate points where the expression is undefined but
the limit definition still yields a (near-)zero derivative.  Both sets are
kept so a report can show the gap between them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .derivative import differentiate
from .expr import Expr, Interval, evaluate
from .probe import Differentiable, classify, probe

__all__ = [
    "Provenance", "TangentPoint", "RootScan",
    "grid_points", "scan_roots", "find_expression_roots",
    "combine_tangent_points", "find_horizontal_tangents",
    "DEFAULT_GRID_N",
]

DEFAULT_GRID_N = 4096

ROOT_WIDTH_TOL = 1e-12
DEDUP_TOL = 1e-9
# A localized sign change only counts as a root if the expression is defined
# and small there; a pole crossing fails this and is discarded.
ROOT_RESIDUAL_TOL = 1e-6
UNCONFIRMED_BAND = 1e-10
REPAIR_TOL = 1e-6


class Provenance(enum.Enum):
    SYMBOLIC_EXPRESSION_ROOT = "symbolic_expression_root"
    REPAIRED_BY_DEFINITION = "repaired_by_definition"


@dataclass(frozen=True, slots=True)
class TangentPoint:
    x: float
    provenance: Provenance
    residual: float


@dataclass(frozen=True, slots=True)
class RootScan:
    roots: tuple[float, ...]
    unconfirmed: tuple[float, ...]  # |value| < band at a grid point, no sign change


def grid_points(iv: Interval, n: int) -> list[float]:
    """n+1 equally spaced points; for even n the midpoint lands exactly."""
    span = iv.hi - iv.lo
    xs = [iv.lo + (i * span) / n for i in range(n + 1)]
    xs[-1] = iv.hi
    return xs


def dedup_sorted(points: list[float], tol: float = DEDUP_TOL) -> list[float]:
    out: list[float] = []
    for p in sorted(points):
        if not out or p - out[-1] > tol:
            out.append(p)
    return out


def _bisect_root(fp: Expr, lo: float, hi: float, flo: float) -> float | None:
    """Shrink a sign-change bracket to ROOT_WIDTH_TOL; None on a hole inside."""
    while hi - lo > ROOT_WIDTH_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        out = evaluate(fp, mid)
        if not out.is_defined:
            return None
        v = out.value
        if v == 0.0:
            return mid
        if (v > 0.0) == (flo > 0.0):
            lo, flo = mid, v
        else:
            hi = mid
    for r in (0.5 * (lo + hi), lo, hi):
        out = evaluate(fp, r)
        if out.is_defined and abs(out.value) <= ROOT_RESIDUAL_TOL:
            return r
    return None


def scan_roots(fp: Expr, iv: Interval, grid_n: int) -> RootScan:
    """Locate zeros of fp on iv by grid sampling plus bisection.

    Exact grid zeros are taken directly; adjacent defined samples of opposite
    sign are refined by bisection.  Grid points where |fp| is tiny without a
    neighboring sign change are reported as unconfirmed (a touching zero the
    sign scan cannot certify).
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if iv.lo == iv.hi:
        out = evaluate(fp, iv.lo)
        if out.is_defined and out.value == 0.0:
            return RootScan(roots=(iv.lo,), unconfirmed=())
        return RootScan(roots=(), unconfirmed=())

    xs = grid_points(iv, grid_n)
    outs = [evaluate(fp, x) for x in xs]

    roots = [x for x, o in zip(xs, outs) if o.is_defined and o.value == 0.0]
    segment_has_change = [False] * grid_n
    for i in range(grid_n):
        a, b = outs[i], outs[i + 1]
        if not (a.is_defined and b.is_defined):
            continue
        if (a.value > 0.0 and b.value < 0.0) or (a.value < 0.0 and b.value > 0.0):
            segment_has_change[i] = True
            r = _bisect_root(fp, xs[i], xs[i + 1], a.value)
            if r is not None:
                roots.append(r)

    roots = dedup_sorted(roots)

    unconfirmed = []
    for i, (x, o) in enumerate(zip(xs, outs)):
        if not o.is_defined or o.value == 0.0 or abs(o.value) >= UNCONFIRMED_BAND:
            continue
        near_change = (i > 0 and segment_has_change[i - 1]) or (
            i < grid_n and segment_has_change[i]
        )
        near_root = any(abs(x - r) <= DEDUP_TOL for r in roots)
        if not near_change and not near_root:
            unconfirmed.append(x)

    return RootScan(roots=tuple(roots), unconfirmed=tuple(dedup_sorted(unconfirmed)))


def find_expression_roots(fp: Expr, iv: Interval, grid_n: int) -> list[float]:
    """Zeros of fp on iv (points where fp is defined and vanishes)."""
    return list(scan_roots(fp, iv, grid_n).roots)


def combine_tangent_points(
    fp: Expr,
    expression_roots: list[float] | tuple[float, ...],
    candidate_verdicts,
) -> list[TangentPoint]:
    """Merge naive expression roots with repaired candidate points."""
    points = [
        TangentPoint(x=r, provenance=Provenance.SYMBOLIC_EXPRESSION_ROOT,
                     residual=abs(evaluate(fp, r).value))
        for r in expression_roots
    ]
    for cand, verdict in candidate_verdicts:
        if isinstance(verdict, Differentiable) and abs(verdict.value) <= REPAIR_TOL:
            points.append(TangentPoint(
                x=cand.x0,
                provenance=Provenance.REPAIRED_BY_DEFINITION,
                residual=abs(verdict.value),
            ))
    points.sort(key=lambda p: p.x)
    merged: list[TangentPoint] = []
    for p in points:
        if merged and p.x - merged[-1].x <= DEDUP_TOL:
            continue
        merged.append(p)
    return merged


def find_horizontal_tangents(f: Expr, iv: Interval, grid_n: int = DEFAULT_GRID_N) -> list[TangentPoint]:
    """All horizontal tangent locations of f on iv, naive roots plus repairs."""
    from .scan import scan  # deferred: the scanner reuses this module's root scan

    fp = differentiate(f).simplified
    roots = scan_roots(fp, iv, grid_n).roots
    candidates = scan(f, fp, iv, grid_n)
    verdicts = [(c, classify(probe(f, c.x0))) for c in candidates]
    return combine_tangent_points(fp, roots, verdicts)
