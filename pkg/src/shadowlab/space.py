"""Compact one-dimensional metric spaces and exact arc-set algebra.

Two spaces are supported: the unit circle ``[0, 1)`` with the wrap-around
metric and the unit interval ``[0, 1]`` with the absolute-value metric.
All endpoints are :class:`fractions.Fraction`; nothing here touches floats.

An :class:`ArcSet` is a finite union of closed arcs in canonical form, so two
equal sets always compare equal.  Circle arcs that pass through ``0`` are kept
as a single wrapping arc ``(left, right)`` with ``right < left``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

CIRCLE = "circle"
INTERVAL = "interval"
SPACE_KINDS = (CIRCLE, INTERVAL)

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

Segment = tuple[Fraction, Fraction]


def as_fraction(value) -> Fraction:
    """Parse an exact rational from int, Fraction or a string like ``"3/10"``.

    Floats are rejected: they would smuggle binary rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def frac_str(q: Fraction) -> str:
    """Canonical reduced ``p/q`` string (``"3/10"``, ``"0/1"``)."""
    return f"{q.numerator}/{q.denominator}"


def mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _check_kind(kind: str) -> str:
    if kind not in SPACE_KINDS:
        raise ValueError(f"unknown space kind {kind!r}")
    return kind


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    resolution: Fraction = Fraction(1, 1000)

    def __post_init__(self):
        _check_kind(self.kind)
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")

    @property
    def is_circle(self) -> bool:
        return self.kind == CIRCLE

    def point(self, coord, radius=0) -> "Point":
        return Point(as_fraction(coord), self.kind, as_fraction(radius))


@dataclass(frozen=True)
class Point:
    """A point of the circle or interval.

    ``radius`` is the half-width of an enclosure: the true point lies within
    ``radius`` of ``coord``.  Exact points have radius zero.
    """

    coord: Fraction
    kind: str = CIRCLE
    radius: Fraction = ZERO

    def __post_init__(self):
        _check_kind(self.kind)
        c = as_fraction(self.coord)
        if self.kind == CIRCLE:
            c = mod1(c)
        elif not ZERO <= c <= ONE:
            raise ValueError(f"interval point {c} outside [0, 1]")
        object.__setattr__(self, "coord", c)
        r = as_fraction(self.radius)
        if r < 0:
            raise ValueError("enclosure radius must be non-negative")
        object.__setattr__(self, "radius", r)

    @property
    def exact(self) -> bool:
        return self.radius == 0

    def __str__(self):
        s = frac_str(self.coord)
        return s if self.exact else f"{s}±{frac_str(self.radius)}"


def coord_dist(kind: str, a: Fraction, b: Fraction) -> Fraction:
    d = abs(a - b)
    if kind == CIRCLE:
        d = mod1(d)
        return min(d, ONE - d)
    return d


def dist(space: SpaceDescriptor | str, a: Point, b: Point) -> Fraction:
    """Geodesic distance between the nominal coordinates of two points."""
    kind = space.kind if isinstance(space, SpaceDescriptor) else space
    if a.kind != kind or b.kind != kind:
        raise ValueError(f"points of kind {a.kind}/{b.kind} in a {kind} space")
    return coord_dist(kind, a.coord, b.coord)


def dist_upper(space, a: Point, b: Point) -> Fraction:
    """Upper bound on the distance between the true points of two enclosures."""
    return dist(space, a, b) + a.radius + b.radius


def dist_lower(space, a: Point, b: Point) -> Fraction:
    return max(ZERO, dist(space, a, b) - a.radius - b.radius)


# ---------------------------------------------------------------------------
# Arc sets
# ---------------------------------------------------------------------------


def _merge(segments: Iterable[Segment]) -> list[Segment]:
    segs = sorted(segments)
    out: list[Segment] = []
    for a, b in segs:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _lift_to_segments(kind: str, lo: Fraction, hi: Fraction) -> list[Segment]:
    """Split a real interval ``[lo, hi]`` into segments of ``[0, 1]``."""
    if hi < lo:
        raise ValueError("empty real interval")
    if kind == INTERVAL:
        lo, hi = max(lo, ZERO), min(hi, ONE)
        return [(lo, hi)] if lo <= hi else []
    if hi - lo >= 1:
        return [(ZERO, ONE)]
    k = math.floor(lo)
    a, b = lo - k, hi - k
    if b <= 1:
        return [(a, b)]
    return [(a, ONE), (ZERO, b - 1)]


@dataclass(frozen=True)
class ArcSet:
    """Finite union of closed arcs, canonically normalized.

    Build instances through :meth:`from_segments`, :meth:`from_lifts`,
    :func:`ball` and the set operations rather than the raw constructor.
    """

    kind: str
    arcs: tuple[Segment, ...] = ()
    full: bool = False

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, kind: str) -> "ArcSet":
        return cls(_check_kind(kind))

    @classmethod
    def whole(cls, kind: str) -> "ArcSet":
        if _check_kind(kind) == CIRCLE:
            return cls(kind, ((ZERO, ONE),), True)
        return cls(kind, ((ZERO, ONE),), False)

    @classmethod
    def from_segments(cls, kind: str, segments: Iterable[Segment]) -> "ArcSet":
        """Normalize non-wrapping segments of ``[0, 1]``."""
        _check_kind(kind)
        segs = [(as_fraction(a), as_fraction(b)) for a, b in segments]
        if kind == CIRCLE:
            segs = [(ZERO, ZERO) if a == b == ONE else (a, b) for a, b in segs]
        segs = _merge(segs)
        for a, b in segs:
            if not (ZERO <= a <= b <= ONE):
                raise ValueError(f"segment [{a}, {b}] outside [0, 1]")
        if kind == INTERVAL or not segs:
            return cls(kind, tuple(segs))
        if segs[0] == (ZERO, ONE):
            return cls.whole(kind)
        # the point 1 is the point 0 on the circle
        if segs[-1][1] == ONE:
            left = segs[-1][0]
            if segs[0][0] == ZERO:
                right = segs[0][1]
                segs = segs[1:-1]
            else:
                right = ZERO
                segs = segs[:-1]
            if len(segs) == 0 and right >= left:
                return cls.whole(kind)
            return cls(kind, tuple(segs) + ((left, right),))
        return cls(kind, tuple(segs))

    @classmethod
    def from_lifts(cls, kind: str, intervals: Iterable[Segment]) -> "ArcSet":
        """Union of real intervals projected to the space (mod 1 on the circle)."""
        segs: list[Segment] = []
        for lo, hi in intervals:
            segs.extend(_lift_to_segments(kind, lo, hi))
        return cls.from_segments(kind, segs)

    @classmethod
    def arc(cls, kind: str, left, right) -> "ArcSet":
        """Single closed arc; on the circle ``right < left`` means it wraps."""
        left, right = as_fraction(left), as_fraction(right)
        if kind == CIRCLE:
            left, right = mod1(left), mod1(right)
            if right < left:
                right += 1
            return cls.from_lifts(kind, [(left, right)])
        if right < left:
            raise ValueError("interval arcs cannot wrap")
        return cls.from_segments(kind, [(left, right)])

    # -- views ------------------------------------------------------------

    def segments(self) -> list[Segment]:
        """Non-wrapping segments of ``[0, 1]`` covering the set (export form)."""
        if self.full:
            return [(ZERO, ONE)]
        out: list[Segment] = []
        for a, b in self.arcs:
            if b < a:
                out.append((ZERO, b))
                out.append((a, ONE))
            else:
                out.append((a, b))
        return sorted(out)

    def lifts(self) -> list[Segment]:
        """Arcs as real intervals of length < 1 (wrapping arcs cross 1)."""
        if self.full:
            return [(ZERO, ONE)]
        return [(a, b + 1) if b < a else (a, b) for a, b in self.arcs]

    def is_empty(self) -> bool:
        return not self.arcs

    def __bool__(self):
        return bool(self.arcs)

    def __len__(self):
        return len(self.arcs)

    def measure(self) -> Fraction:
        if self.full:
            return ONE
        return sum((b - a for a, b in self.lifts()), ZERO)

    def wraps(self) -> list[bool]:
        return [False if self.full else b < a for a, b in self.arcs]

    def contains(self, x: Fraction) -> bool:
        x = as_fraction(x)
        if self.kind == CIRCLE:
            x = mod1(x)
        return any(a <= x <= b for a, b in self.segments())

    def interior_contains(self, x: Fraction) -> bool:
        x = as_fraction(x)
        if self.full:
            return True
        if self.kind == CIRCLE:
            x = mod1(x)
            return any(a < x < b or a < x + 1 < b for a, b in self.lifts())
        return any(a < x < b for a, b in self.arcs)

    def issubset(self, other: "ArcSet") -> bool:
        return self.intersect(other) == self

    # -- algebra ----------------------------------------------------------

    def _same(self, other: "ArcSet"):
        if self.kind != other.kind:
            raise ValueError(f"arc sets of kind {self.kind} and {other.kind}")

    def intersect(self, other: "ArcSet") -> "ArcSet":
        self._same(other)
        if self.full:
            return other
        if other.full:
            return self
        xs, ys = self.segments(), other.segments()
        out: list[Segment] = []
        i = j = 0
        while i < len(xs) and j < len(ys):
            a = max(xs[i][0], ys[j][0])
            b = min(xs[i][1], ys[j][1])
            if a <= b:
                out.append((a, b))
            if xs[i][1] < ys[j][1]:
                i += 1
            else:
                j += 1
        return ArcSet.from_segments(self.kind, out)

    __and__ = intersect

    def union(self, other: "ArcSet") -> "ArcSet":
        self._same(other)
        return ArcSet.from_segments(self.kind, self.segments() + other.segments())

    __or__ = union

    def translate(self, t) -> "ArcSet":
        if self.kind != CIRCLE:
            raise ValueError("translate is defined on the circle only")
        t = as_fraction(t)
        if self.full:
            return self
        return ArcSet.from_lifts(self.kind, [(a + t, b + t) for a, b in self.lifts()])

    def affine_image(self, slope, offset) -> "ArcSet":
        """Image under ``x -> slope*x + offset`` (mod 1 on the circle).

        On the circle the slope must be an integer for the map to be defined.
        Interval images are clipped to ``[0, 1]``.
        """
        slope, offset = as_fraction(slope), as_fraction(offset)
        if slope == 0:
            raise ValueError("slope 0 collapses the set to a point")
        if self.kind == CIRCLE and slope.denominator != 1:
            raise ValueError("circle affine maps need an integer slope")
        out = []
        for a, b in self.lifts():
            u, v = slope * a + offset, slope * b + offset
            out.append((min(u, v), max(u, v)))
        return ArcSet.from_lifts(self.kind, out)

    def dilate(self, r) -> "ArcSet":
        """Closed ``r``-neighbourhood of the set."""
        r = as_fraction(r)
        if r < 0:
            raise ValueError("negative dilation")
        if r == 0 or self.full or not self.arcs:
            return self
        return ArcSet.from_lifts(self.kind, [(a - r, b + r) for a, b in self.lifts()])

    def sample_point(self) -> Fraction:
        """Leftmost endpoint of the first arc."""
        if not self.arcs:
            raise ValueError("empty arc set has no points")
        return self.arcs[0][0]

    def first_arc(self) -> "ArcSet":
        """The first arc alone (the whole set when it is the full circle or empty)."""
        if self.full or len(self.arcs) <= 1:
            return self
        return ArcSet.from_lifts(self.kind, [self.lifts()[0]])

    def midpoint(self) -> Fraction:
        """Midpoint of the first arc; interior whenever that arc is non-degenerate."""
        if not self.arcs:
            raise ValueError("empty arc set has no points")
        a, b = self.lifts()[0]
        m = (a + b) / 2
        return mod1(m) if self.kind == CIRCLE else m

    def diameter(self) -> Fraction:
        """Diameter in the space's metric (arcs treated as closed)."""
        if not self.arcs:
            return ZERO
        if self.kind == INTERVAL:
            return self.arcs[-1][1] - self.arcs[0][0]
        if self.full or self.intersect(self.translate(HALF)):
            return HALF
        # with no antipodal pair inside, the maximum sits on arc endpoints
        pts = [x for seg in self.segments() for x in seg]
        return max(coord_dist(CIRCLE, p, q) for p in pts for q in pts)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "space": self.kind,
            "full": self.full,
            "arcs": [[frac_str(a), frac_str(b)] for a, b in self.arcs],
            "wraps": self.wraps(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ArcSet":
        kind = data["space"]
        if data.get("full"):
            return cls.whole(kind)
        out = cls.empty(kind)
        for arc in data["arcs"]:
            out = out | cls.arc(kind, arc[0], arc[1])
        return out

    def __str__(self):
        if self.full:
            return "S1"
        if not self.arcs:
            return "∅"
        return " ∪ ".join(f"[{a}, {b}]" for a, b in self.arcs)


def ball(space: SpaceDescriptor | str, center, eps, closed: bool = True) -> ArcSet:
    """Closed ``eps``-ball about ``center``.

    Open balls are returned as their closure; strictness is tracked by the
    caller (see the margin handling in :mod:`shadowlab.shadowing`).
    """
    kind = space.kind if isinstance(space, SpaceDescriptor) else space
    c = center.coord if isinstance(center, Point) else as_fraction(center)
    eps = as_fraction(eps)
    if eps < 0:
        raise ValueError("negative ball radius")
    if kind == CIRCLE and eps >= HALF:
        return ArcSet.whole(kind)
    return ArcSet.from_lifts(kind, [(c - eps, c + eps)])


def eps_net(space: SpaceDescriptor | str, eps) -> list[Point]:
    """Uniform grid whose points are within ``eps`` of every point of the space."""
    kind = space.kind if isinstance(space, SpaceDescriptor) else space
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("net radius must be positive")
    if kind == CIRCLE:
        n = 2 * math.ceil(1 / (2 * eps))
        return [Point(Fraction(i, n), kind) for i in range(n)]
    n = math.ceil(1 / eps)
    return [Point(Fraction(i, n), kind) for i in range(n + 1)]


def union_all(kind: str, sets: Sequence[ArcSet]) -> ArcSet:
    segs: list[Segment] = []
    for s in sets:
        segs.extend(s.segments())
    return ArcSet.from_segments(kind, segs)
