"""Newton polygons over the valued field, and the integral-model check.

The polygon of f = sum a_i X**i is the lower convex hull of the points
(i, val(a_i)) with nonzero a_i.  Its segment of slope s and horizontal
length l certifies exactly l roots of valuation -s in an algebraic closure;
divisibility by X**m adds m roots of infinite valuation.  That
correspondence is the only root information the rest of the package ever
uses — no root is ever found explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fppoly, kpoly
from .field import Valuation, fmt_rat
from .kpoly import ZeroPolynomial


class PreconditionViolated(ValueError):
    """The integral-model check got a polynomial outside its contract."""


@dataclass(frozen=True)
class Segment:
    slope: Fraction
    length: int


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull data: vertices (i, v(a_i)) and segments (slope, length)."""

    vertices: tuple  # ((i, Fraction), ...)
    segments: tuple  # (Segment, ...)
    x_order: int  # multiplicity of the root 0 (= lowest index with a_i != 0)
    degree: int

    def to_json(self):
        return {
            "vertices": [[i, fmt_rat(v)] for i, v in self.vertices],
            "segments": [
                {"slope": fmt_rat(s.slope), "len": s.length} for s in self.segments
            ],
            "x_order": self.x_order,
            "degree": self.degree,
        }


def newton_polygon(f):
    """Lower convex hull of (i, val(a_i)); monotone chain over exact rationals."""
    f = kpoly.trim(f)
    if not f:
        raise ZeroPolynomial("newton polygon of the zero polynomial")
    pts = []
    for i, c in enumerate(f):
        v = c.val()
        if not v.is_infinite:
            pts.append((i, v.q))
    # pts is nonempty (leading coefficient) and already sorted by i
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            x3, y3 = pt
            # keep the chain convex downward; pop when hull[-1] sits on or
            # above the line hull[-2] -> pt (collinear points merge)
            if (y2 - y1) * (x3 - x1) >= (y3 - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segments.append(Segment(Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(
        vertices=tuple((i, Fraction(v)) for i, v in hull),
        segments=tuple(segments),
        x_order=pts[0][0],
        degree=len(f) - 1,
    )


def root_valuations(f):
    """Multiset of valuations of all deg(f) roots, as a sorted list.

    Segment of slope s and length l -> l roots of valuation -s; the root 0
    (X-divisibility) appears with valuation infinity.
    """
    np = newton_polygon(f)
    out = []
    for seg in np.segments:
        out.extend([Valuation(-seg.slope)] * seg.length)
    out.extend([Valuation.infinite()] * np.x_order)
    return sorted(out)


def positive_root_count(f):
    """Number of roots of strictly positive valuation (infinite included).

    This counts the roots inside the open unit disc of the current chart —
    the quantity the blow-up engine compares across fibers.
    """
    np = newton_polygon(f)
    n = np.x_order
    for seg in np.segments:
        if seg.slope < 0:
            n += seg.length
    return n


def min_positive_root_valuation(f):
    """Smallest strictly positive *finite* root valuation, or None.

    None means every root in the open unit disc is exactly at the center
    (or there are none) — no scale at which anything new separates.
    """
    np = newton_polygon(f)
    best = None
    for seg in np.segments:
        if seg.slope < 0:
            v = -seg.slope
            if best is None or v < best:
                best = v
    return best


@dataclass(frozen=True)
class IntegralityReport:
    """Outcome of the integral-model check on a monic degree-p polynomial."""

    integral: bool
    witness: str | None = None
    reduction: tuple | None = None  # F_p coefficients when integral

    def __bool__(self):
        return self.integral


def check_integrality(f, ctx):
    """Decide whether f is in R[X] with reduction exactly X**p.

    Contract: f monic of degree p = ctx.p with f(0) = 0 (the shape of a
    normalized cover polynomial); anything else raises PreconditionViolated.
    Returns an IntegralityReport; a failing report carries a witness — the
    first coefficient of negative valuation, or the offending residual term.
    """
    f = kpoly.trim(f)
    p = ctx.p
    if kpoly.degree(f) != p:
        raise PreconditionViolated(f"expected degree {p}, got {kpoly.degree(f)}")
    if not (f[-1] - ctx.one()).is_zero():
        raise PreconditionViolated("polynomial is not monic")
    if not f[0].is_zero():
        raise PreconditionViolated("constant term must vanish")
    for i, c in enumerate(f):
        if c.val() < 0:
            return IntegralityReport(
                False, witness=f"coefficient {i} has valuation {c.val()} < 0"
            )
    red = kpoly.reduction(f, ctx)
    expected = [0] * p + [1]
    if red != expected:
        return IntegralityReport(
            False, witness=f"reduction is {fppoly.fmt(red)}, not X^{p}"
        )
    return IntegralityReport(True, reduction=tuple(red))
