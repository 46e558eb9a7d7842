"""Exact piecewise-linear self-maps of the circle and the interval.

Circle maps are stored through a lift ``F: R -> R`` with ``F(x + 1) = F(x) + d``
where ``d`` is the degree.  The lift is given by breakpoints
``0 = x_0 < ... < x_m < 1`` and values ``y_i = F(x_i)``; the piece after
``x_m`` runs to ``(1, y_0 + d)``.  Interval maps have breakpoints
``0 = x_0 < ... < x_m = 1`` and values in ``[0, 1]``.

Affine maps, rotations, reflections and the connecting homeomorphisms of
:mod:`shadowlab.homogeneity` are all instances of :class:`PLMap`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .space import CIRCLE, INTERVAL, ONE, ZERO, ArcSet, Segment, as_fraction, mod1

Piece = tuple[Fraction, Fraction, Fraction, Fraction]


def _collinear(p, q, r) -> bool:
    (x0, y0), (x1, y1), (x2, y2) = p, q, r
    return (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0)


@dataclass(frozen=True)
class PLMap:
    kind: str
    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    degree: int = 1

    def __post_init__(self):
        xs = tuple(as_fraction(x) for x in self.xs)
        ys = tuple(as_fraction(y) for y in self.ys)
        if len(xs) != len(ys) or not xs:
            raise ValueError("breakpoint lists must be non-empty and of equal length")
        if xs[0] != 0 or any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must start at 0 and strictly increase")
        if self.kind == CIRCLE:
            if xs[-1] >= 1:
                raise ValueError("circle breakpoints must lie in [0, 1)")
            shift = math.floor(ys[0])
            ys = tuple(y - shift for y in ys)
        elif self.kind == INTERVAL:
            if xs[-1] != 1 or len(xs) < 2:
                raise ValueError("interval breakpoints must run from 0 to 1")
            if any(not ZERO <= y <= ONE for y in ys):
                raise ValueError("interval map leaves [0, 1]")
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    # -- constructors -----------------------------------------------------

    @classmethod
    def affine(cls, kind: str, slope, offset) -> "PLMap":
        slope, offset = as_fraction(slope), as_fraction(offset)
        if kind == CIRCLE:
            if slope.denominator != 1:
                raise ValueError("circle affine maps need an integer slope")
            return cls(kind, (ZERO,), (offset,), int(slope))
        return cls(kind, (ZERO, ONE), (offset, slope + offset))

    @classmethod
    def identity(cls, kind: str) -> "PLMap":
        return cls.affine(kind, 1, 0)

    @classmethod
    def from_points(cls, kind: str, pairs: Iterable[tuple], degree: int = 1) -> "PLMap":
        """Build a canonical map from arbitrary (x, lift value) samples.

        On the circle the samples are reduced to ``x`` in ``[0, 1)`` using the
        degree, and the value at ``0`` is interpolated when missing.
        """
        pts = [(as_fraction(x), as_fraction(y)) for x, y in pairs]
        if kind == CIRCLE:
            red = {}
            for x, y in pts:
                k = math.floor(x)
                red[x - k] = y - k * degree
            xs = sorted(red)
            if xs[0] != 0:
                xl, yl = xs[-1], red[xs[-1]]
                xf, yf = xs[0] + 1, red[xs[0]] + degree
                y1 = yl + (yf - yl) * (1 - xl) / (xf - xl)
                red[ZERO] = y1 - degree
                xs = sorted(red)
            return cls(kind, tuple(xs), tuple(red[x] for x in xs), degree).normalized()
        red = dict(pts)
        xs = sorted(red)
        return cls(kind, tuple(xs), tuple(red[x] for x in xs)).normalized()

    def normalized(self) -> "PLMap":
        """Drop interior breakpoints where the map does not actually bend."""
        pts = list(self.points())
        if self.kind == CIRCLE:
            ext = pts + [(ONE, self.ys[0] + self.degree)]
            keep = [pts[0]]
            for i in range(1, len(pts)):
                if not _collinear(keep[-1], ext[i], ext[i + 1]):
                    keep.append(ext[i])
        else:
            keep = [pts[0]]
            for i in range(1, len(pts) - 1):
                if not _collinear(keep[-1], pts[i], pts[i + 1]):
                    keep.append(pts[i])
            keep.append(pts[-1])
        return PLMap(self.kind, tuple(p[0] for p in keep), tuple(p[1] for p in keep), self.degree)

    # -- structure --------------------------------------------------------

    def points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))

    def pieces(self) -> list[Piece]:
        """Linear pieces ``(x_a, x_b, y_a, y_b)`` covering the fundamental domain."""
        xs, ys = list(self.xs), list(self.ys)
        if self.kind == CIRCLE:
            xs.append(ONE)
            ys.append(self.ys[0] + self.degree)
        return [(xs[i], xs[i + 1], ys[i], ys[i + 1]) for i in range(len(xs) - 1)]

    def slopes(self) -> list[Fraction]:
        return [(yb - ya) / (xb - xa) for xa, xb, ya, yb in self.pieces()]

    @property
    def is_affine(self) -> bool:
        return len(self.pieces()) == 1

    @property
    def increasing(self) -> bool:
        return all(s > 0 for s in self.slopes())

    @property
    def decreasing(self) -> bool:
        return all(s < 0 for s in self.slopes())

    @property
    def monotone(self) -> bool:
        return self.increasing or self.decreasing

    @property
    def injective(self) -> bool:
        if self.kind == CIRCLE:
            return self.monotone and abs(self.degree) == 1
        return self.monotone

    @property
    def surjective(self) -> bool:
        lo, hi = self.image_lift(ZERO, ONE)
        if self.kind == CIRCLE:
            return self.degree != 0 or hi - lo >= 1
        return lo == 0 and hi == 1

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective

    @property
    def lipschitz_upper(self) -> Fraction:
        return max(abs(s) for s in self.slopes())

    @property
    def lipschitz_lower(self) -> Fraction:
        return min(abs(s) for s in self.slopes())

    # -- evaluation -------------------------------------------------------

    def lift(self, x) -> Fraction:
        x = as_fraction(x)
        if self.kind == CIRCLE:
            k = math.floor(x)
            t = x - k
        else:
            if not ZERO <= x <= ONE:
                raise ValueError(f"{x} outside [0, 1]")
            k, t = 0, x
        pcs = self.pieces()
        i = bisect_right(self.xs, t) - 1
        i = min(i, len(pcs) - 1)
        xa, xb, ya, yb = pcs[i]
        return ya + (yb - ya) * (t - xa) / (xb - xa) + k * self.degree

    def __call__(self, x) -> Fraction:
        y = self.lift(x)
        return mod1(y) if self.kind == CIRCLE else y

    def _breaks_between(self, lo: Fraction, hi: Fraction) -> list[Fraction]:
        if self.kind == INTERVAL:
            return [x for x in self.xs if lo < x < hi]
        out = []
        for k in range(math.floor(lo), math.floor(hi) + 1):
            out.extend(x + k for x in self.xs if lo < x + k < hi)
        return out

    def image_lift(self, lo: Fraction, hi: Fraction) -> Segment:
        """Exact image of the real interval ``[lo, hi]`` under the lift."""
        vals = [self.lift(lo), self.lift(hi)]
        vals.extend(self.lift(x) for x in self._breaks_between(lo, hi))
        return min(vals), max(vals)

    def image(self, s: ArcSet) -> ArcSet:
        if s.kind != self.kind:
            raise ValueError("space mismatch")
        if s.full and self.kind == CIRCLE:
            return ArcSet.from_lifts(self.kind, [self.image_lift(ZERO, ONE)])
        if self.kind == CIRCLE and self.is_affine:
            return s.affine_image(self.degree, self.ys[0])
        if self.kind == INTERVAL and len(self.xs) == 2 and self.ys[0] != self.ys[1]:
            return s.affine_image(self.ys[1] - self.ys[0], self.ys[0])
        return ArcSet.from_lifts(self.kind, [self.image_lift(a, b) for a, b in s.lifts()])

    def preimage(self, s: ArcSet) -> ArcSet:
        """Exact preimage of an arc set, within the fundamental domain."""
        if s.kind != self.kind:
            raise ValueError("space mismatch")
        if s.full:
            return ArcSet.whole(self.kind)
        out: list[Segment] = []
        targets = s.lifts()
        for xa, xb, ya, yb in self.pieces():
            lo_v, hi_v = min(ya, yb), max(ya, yb)
            for c, e in targets:
                if self.kind == CIRCLE:
                    ks = range(math.ceil(lo_v - e), math.floor(hi_v - c) + 1)
                else:
                    ks = range(0, 1)
                for k in ks:
                    c2, e2 = c + k, e + k
                    if e2 < lo_v or c2 > hi_v:
                        continue
                    if ya == yb:
                        out.append((xa, xb))
                        continue
                    # solve y = ya + (yb - ya) * (x - xa) / (xb - xa)
                    ta = xa + (c2 - ya) * (xb - xa) / (yb - ya)
                    tb = xa + (e2 - ya) * (xb - xa) / (yb - ya)
                    u, v = max(min(ta, tb), xa), min(max(ta, tb), xb)
                    if u <= v:
                        out.append((u, v))
        return ArcSet.from_segments(self.kind, out)

    # -- algebra ----------------------------------------------------------

    def compose(self, inner: "PLMap") -> "PLMap":
        """``self ∘ inner`` as an exact PL map."""
        if inner.kind != self.kind:
            raise ValueError("space mismatch")
        xs = set(inner.xs)
        for xa, xb, ya, yb in inner.pieces():
            if ya == yb:
                continue
            lo, hi = min(ya, yb), max(ya, yb)
            for t in self._breaks_between(lo, hi):
                xs.add(xa + (t - ya) * (xb - xa) / (yb - ya))
        xs = sorted(x for x in xs if x < 1 or self.kind == INTERVAL)
        pairs = [(x, self.lift(inner.lift(x))) for x in xs]
        if self.kind == CIRCLE:
            return PLMap.from_points(self.kind, pairs, self.degree * inner.degree)
        return PLMap.from_points(self.kind, pairs)

    def inverse(self) -> "PLMap":
        if not self.bijective:
            raise ValueError("map is not a homeomorphism")
        if self.kind == INTERVAL:
            return PLMap.from_points(self.kind, [(y, x) for x, y in self.points()])
        # F(x + k) = F(x) + k d, so the inverse lift G(y + d) = G(y) + 1
        pairs = []
        for x, y in self.points():
            k = math.floor(y)
            pairs.append((y - k, x - k * self.degree))
        return PLMap.from_points(self.kind, pairs, self.degree)

    def breakpoint_json(self) -> list[list[str]]:
        from .space import frac_str

        return [[frac_str(x), frac_str(y)] for x, y in self.points()]


def pl_from_breakpoints(kind: str, breakpoints: Sequence[Sequence], degree: int = 1) -> PLMap:
    return PLMap.from_points(kind, [(as_fraction(a), as_fraction(b)) for a, b in breakpoints], degree)
