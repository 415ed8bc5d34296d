"""Locate points where a function is defined but its derivative expression
is not.

Detection is numeric: grid sampling of the derivative expression's
definedness, bisection of every defined/undefined boundary, plus a root scan
of each domain-sensitive subexpression (denominators, sqrt and ln
arguments).  Isolated holes become candidate points; undefined regions are
reported as interval notes at their boundary rather than as candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    Div, EvalOutcome, Expr, Func, Interval, UndefinedReason, children,
    evaluate, subexpressions,
)
from .tangents import find_expression_roots, grid_points

__all__ = [
    "CandidatePoint", "IntervalNote", "DismissedPoint", "ScanResult",
    "scan", "scan_detailed", "check_function_defined", "find_culprit",
]

DEDUP_TOL = 1e-9
BOUNDARY_TOL = 1e-12
# How far to each side we probe when deciding whether an undefined point is
# isolated; matches the dedup scale.
ISOLATION_DELTA = 1e-9


@dataclass(frozen=True, slots=True)
class CandidatePoint:
    """A location where f is defined but the derivative expression is not."""

    x0: float
    culprit: Expr
    reason: UndefinedReason
    function_value: float


@dataclass(frozen=True, slots=True)
class IntervalNote:
    """Boundary of a region where the derivative expression is undefined."""

    x: float
    undefined_side: str  # "left" | "right" | "both"
    reason: UndefinedReason


@dataclass(frozen=True, slots=True)
class DismissedPoint:
    """Hole of the derivative expression where f itself is undefined."""

    x0: float
    function_reason: UndefinedReason
    derivative_reason: UndefinedReason


@dataclass(frozen=True, slots=True)
class ScanResult:
    candidates: tuple[CandidatePoint, ...]
    interval_notes: tuple[IntervalNote, ...]
    dismissed: tuple[DismissedPoint, ...]


def check_function_defined(f: Expr, x0: float) -> EvalOutcome:
    """First gate of the point audit: an undefined function value means the
    point is not differentiable and drops out immediately."""
    return evaluate(f, x0)


def find_culprit(fp: Expr, x0: float) -> tuple[Expr, UndefinedReason]:
    """Smallest undefined subexpression of fp at x0 (leftmost if tied)."""
    node = fp
    while True:
        for child in children(node):
            if not evaluate(child, x0).is_defined:
                node = child
                break
        else:
            return node, evaluate(node, x0).reason


def _domain_sensitive_subexprs(fp: Expr) -> list[Expr]:
    found: dict[Expr, None] = {}
    for node in subexpressions(fp):
        if isinstance(node, Div):
            found.setdefault(node.right)
        elif isinstance(node, Func) and node.name in ("sqrt", "ln"):
            found.setdefault(node.arg)
    return list(found)


def _snap_values(r: float) -> list[float]:
    """Nearby decimal-representable values; a hole usually sits on one."""
    values = {r}
    for digits in range(6, 13):
        values.add(round(r, digits))
    if abs(r) < DEDUP_TOL:
        values.add(0.0)
    return sorted(values)


def _bisect_boundary(fp: Expr, defined_x: float, undefined_x: float) -> float:
    """Undefined-side point within BOUNDARY_TOL of the definedness flip."""
    a, b = defined_x, undefined_x
    while abs(b - a) > BOUNDARY_TOL:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        if evaluate(fp, mid).is_defined:
            a = mid
        else:
            b = mid
    return b


def _dedup_nice(points: list[float]) -> list[float]:
    """Dedup within DEDUP_TOL, preferring the shortest decimal representative
    (a grid or snapped hit over bisection residue)."""
    groups: list[list[float]] = []
    for p in sorted(points):
        if groups and p - groups[-1][-1] <= DEDUP_TOL:
            groups[-1].append(p)
        else:
            groups.append([p])
    return [min(g, key=lambda v: (len(repr(v)), v)) for g in groups]


def scan_detailed(f: Expr, fp: Expr, iv: Interval, grid_n: int) -> ScanResult:
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")

    holes: list[float] = []

    if iv.lo == iv.hi:
        if not evaluate(fp, iv.lo).is_defined:
            holes.append(iv.lo)
        return _classify_holes(f, fp, iv, holes)

    xs = grid_points(iv, grid_n)
    outs = [evaluate(fp, x) for x in xs]

    # Edges of undefined runs on the grid.  Interior points of an undefined
    # region are skipped; its boundary is what matters.
    last = len(xs) - 1
    for i, (x, out) in enumerate(zip(xs, outs)):
        if out.is_defined:
            continue
        left_defined = i > 0 and outs[i - 1].is_defined
        right_defined = i < last and outs[i + 1].is_defined
        if left_defined or right_defined:
            holes.append(x)

    # Defined/undefined flips between adjacent samples.
    for i in range(len(xs) - 1):
        a_def, b_def = outs[i].is_defined, outs[i + 1].is_defined
        if a_def == b_def:
            continue
        defined_x, undefined_x = (xs[i], xs[i + 1]) if a_def else (xs[i + 1], xs[i])
        boundary = _bisect_boundary(fp, defined_x, undefined_x)
        holes.append(boundary)
        for s in _snap_values(boundary):
            if iv.lo <= s <= iv.hi and not evaluate(fp, s).is_defined:
                holes.append(s)

    # Exact zeros of denominators and of sqrt/ln arguments: holes the grid
    # can sail straight past without a definedness flip.
    for sub in _domain_sensitive_subexprs(fp):
        for r in find_expression_roots(sub, iv, grid_n):
            for s in _snap_values(r):
                if iv.lo <= s <= iv.hi and not evaluate(fp, s).is_defined:
                    holes.append(s)

    return _classify_holes(f, fp, iv, holes)


def _classify_holes(f: Expr, fp: Expr, iv: Interval, holes: list[float]) -> ScanResult:
    candidates: list[CandidatePoint] = []
    notes: list[IntervalNote] = []
    dismissed: list[DismissedPoint] = []

    for h in _dedup_nice(holes):
        left_x = h - ISOLATION_DELTA
        right_x = h + ISOLATION_DELTA
        left_undefined = left_x >= iv.lo and not evaluate(fp, left_x).is_defined
        right_undefined = right_x <= iv.hi and not evaluate(fp, right_x).is_defined

        if left_undefined or right_undefined:
            if left_undefined and right_undefined:
                side, inside_x = "both", left_x
            elif left_undefined:
                side, inside_x = "left", left_x
            else:
                side, inside_x = "right", right_x
            reason = evaluate(fp, inside_x).reason or evaluate(fp, h).reason
            notes.append(IntervalNote(x=h, undefined_side=side, reason=reason))
            continue

        f_out = check_function_defined(f, h)
        if not f_out.is_defined:
            dismissed.append(DismissedPoint(
                x0=h,
                function_reason=f_out.reason,
                derivative_reason=evaluate(fp, h).reason,
            ))
            continue

        culprit, reason = find_culprit(fp, h)
        candidates.append(CandidatePoint(
            x0=h, culprit=culprit, reason=reason, function_value=f_out.value,
        ))

    return ScanResult(
        candidates=tuple(candidates),
        interval_notes=tuple(notes),
        dismissed=tuple(dismissed),
    )


def scan(f: Expr, fp: Expr, iv: Interval, grid_n: int) -> list[CandidatePoint]:
    """Candidate points on iv, sorted ascending, deduplicated within 1e-9."""
    return list(scan_detailed(f, fp, iv, grid_n).candidates)
