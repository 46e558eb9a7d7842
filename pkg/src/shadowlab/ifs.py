"""Parameterized iterated function systems: maps, words, orbits, pseudo-orbits.

A system is a finite ordered alphabet with one continuous self-map per symbol.
Every map is an exact piecewise-linear map (see :mod:`shadowlab.pl`) plus an
optional *additive enclosure*: the true map is ``nominal(x) + e`` for some
unknown constant ``|e| <= radius``.  This is how irrational rotation numbers
enter: the nominal offset is a rational midpoint and ``radius`` the half-width
of a rigorous enclosure.  Maps tagged with the same ``param`` share the same
unknown ``e``, so differences of their offsets are known exactly.

Words apply their first symbol first: ``F_{σ_n} = f_{λ_n} ∘ ... ∘ f_{λ_0}``.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .pl import PLMap, pl_from_breakpoints
from .space import (
    CIRCLE,
    INTERVAL,
    ONE,
    ZERO,
    ArcSet,
    Point,
    SpaceDescriptor,
    as_fraction,
    coord_dist,
    frac_str,
)

log = logging.getLogger(__name__)

FORWARD = "forward"
TWO_SIDED = "two-sided"


class DescriptorError(ValueError):
    """Malformed system, word or pseudo-orbit description."""

    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message if field_name is None else f"{field_name}: {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class MapSpec:
    nominal: PLMap
    radius: Fraction = ZERO
    param: str | None = None

    def __post_init__(self):
        r = as_fraction(self.radius)
        if r < 0:
            raise ValueError("enclosure radius must be non-negative")
        object.__setattr__(self, "radius", r)

    @classmethod
    def affine(cls, kind: str, slope, offset, radius=0, param: str | None = None) -> "MapSpec":
        return cls(PLMap.affine(kind, slope, offset), as_fraction(radius), param)

    @classmethod
    def rotation(cls, offset, radius=0, param: str | None = None) -> "MapSpec":
        return cls.affine(CIRCLE, 1, offset, radius, param)

    @classmethod
    def enclosed_rotation(cls, lo, hi, plus=0, param: str | None = None) -> "MapSpec":
        """Rotation by an unknown number in ``[lo, hi] + plus``."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        if hi < lo:
            raise ValueError("empty enclosure")
        return cls.rotation((lo + hi) / 2 + as_fraction(plus), (hi - lo) / 2, param)

    @classmethod
    def piecewise(cls, kind: str, breakpoints: Sequence[Sequence], degree: int = 1) -> "MapSpec":
        return cls(pl_from_breakpoints(kind, breakpoints, degree))

    @property
    def space_kind(self) -> str:
        return self.nominal.kind

    @property
    def kind(self) -> str:
        if self.nominal.is_affine:
            return "affine" if self.space_kind == CIRCLE else "affine-clamped"
        return "piecewise-linear"

    @property
    def slope(self) -> Fraction:
        if not self.nominal.is_affine:
            raise ValueError("map is not affine")
        return self.nominal.slopes()[0]

    @property
    def offset(self) -> Fraction:
        return self.nominal.ys[0]

    @property
    def is_rotation(self) -> bool:
        return self.space_kind == CIRCLE and self.nominal.is_affine and self.nominal.degree == 1

    @property
    def exact(self) -> bool:
        return self.radius == 0

    @property
    def lipschitz_upper(self) -> Fraction:
        return self.nominal.lipschitz_upper

    @property
    def lipschitz_lower(self) -> Fraction:
        return self.nominal.lipschitz_lower

    @property
    def invertible(self) -> bool:
        """True when the map is a homeomorphism of the space."""
        return self.nominal.bijective

    @property
    def surjective(self) -> bool:
        return self.nominal.surjective

    def __call__(self, x: Fraction) -> Fraction:
        return self.nominal(x)

    def image(self, s: ArcSet) -> ArcSet:
        return self.nominal.image(s)

    def preimage(self, s: ArcSet) -> ArcSet:
        return self.nominal.preimage(s)

    def to_json(self, symbol: str) -> dict:
        out: dict = {"id": symbol}
        if self.nominal.is_affine:
            out["kind"] = "affine"
            out["slope"] = frac_str(self.slope)
            if self.exact:
                out["offset"] = frac_str(self.offset)
            else:
                lo, hi = self.offset - self.radius, self.offset + self.radius
                out["offset"] = {"enclosure": [frac_str(lo), frac_str(hi)]}
                if self.param is not None:
                    out["offset"]["param"] = self.param
        else:
            out["kind"] = "piecewise-linear"
            out["breakpoints"] = self.nominal.breakpoint_json()
            if self.space_kind == CIRCLE:
                out["degree"] = self.nominal.degree
            if not self.exact:
                out["radius"] = frac_str(self.radius)
        return out


@dataclass(frozen=True)
class IFSystem:
    space: SpaceDescriptor
    symbols: tuple[str, ...]
    maps: tuple[MapSpec, ...]
    name: str = ""

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet has duplicate symbols")
        if len(self.maps) != len(symbols):
            raise ValueError("one map per symbol required")
        for m in self.maps:
            if m.space_kind != self.space.kind:
                raise ValueError("map and space kinds differ")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @classmethod
    def build(cls, kind: str, maps: dict[str, MapSpec] | Sequence[MapSpec], name: str = "") -> "IFSystem":
        if isinstance(maps, dict):
            return cls(SpaceDescriptor(kind), tuple(maps), tuple(maps.values()), name)
        return cls(SpaceDescriptor(kind), tuple(str(i + 1) for i in range(len(maps))), tuple(maps), name)

    @property
    def kind(self) -> str:
        return self.space.kind

    @property
    def all_invertible(self) -> bool:
        return all(m.invertible for m in self.maps)

    @property
    def exact(self) -> bool:
        return all(m.exact for m in self.maps)

    def map(self, symbol) -> MapSpec:
        try:
            return self.maps[self._index[str(symbol)]]
        except KeyError:
            raise KeyError(f"unknown symbol {symbol!r}") from None

    def items(self) -> Iterator[tuple[str, MapSpec]]:
        return zip(self.symbols, self.maps)

    def point(self, coord, radius=0) -> Point:
        return self.space.point(coord, radius)

    def with_maps(self, maps: Sequence[MapSpec], name: str = "") -> "IFSystem":
        return IFSystem(self.space, self.symbols, tuple(maps), name or self.name)

    # -- JSON descriptor --------------------------------------------------

    def to_json(self) -> dict:
        out = {"space": self.kind, "maps": [m.to_json(s) for s, m in self.items()]}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data) -> "IFSystem":
        if not isinstance(data, dict):
            raise DescriptorError("descriptor must be a JSON object")
        kind = data.get("space")
        if kind not in (CIRCLE, INTERVAL):
            raise DescriptorError(f"expected 'circle' or 'interval', got {kind!r}", "space")
        params = {}
        for pname, enc in (data.get("parameters") or {}).items():
            lo, hi = _parse_pair(enc, f"parameters.{pname}")
            params[pname] = (lo, hi)
        raw = data.get("maps")
        if not isinstance(raw, list) or not raw:
            raise DescriptorError("expected a non-empty list", "maps")
        symbols, maps = [], []
        for i, m in enumerate(raw):
            where = f"maps[{i}]"
            if not isinstance(m, dict):
                raise DescriptorError("expected an object", where)
            symbols.append(str(m.get("id", i + 1)))
            try:
                maps.append(_parse_map(kind, m, params, where))
            except DescriptorError:
                raise
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise DescriptorError(str(exc), where) from exc
        try:
            return cls(SpaceDescriptor(kind), tuple(symbols), tuple(maps), data.get("name", ""))
        except ValueError as exc:
            raise DescriptorError(str(exc), "maps") from exc


def _rational(value, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DescriptorError(f"not an exact rational: {value!r}", where) from exc


def _parse_pair(value, where: str) -> tuple[Fraction, Fraction]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise DescriptorError("expected a [lo, hi] pair", where)
    lo, hi = _rational(value[0], where), _rational(value[1], where)
    if hi < lo:
        raise DescriptorError("enclosure has hi < lo", where)
    return lo, hi


def _parse_map(kind: str, m: dict, params: dict, where: str) -> MapSpec:
    mkind = m.get("kind", "affine")
    if mkind in ("affine", "affine-mod-1", "affine-clamped"):
        if "slope" not in m:
            raise DescriptorError("missing", f"{where}.slope")
        slope = _rational(m["slope"], f"{where}.slope")
        off = m.get("offset", "0")
        if isinstance(off, dict):
            plus = _rational(off.get("plus", "0"), f"{where}.offset.plus")
            if "param" in off and "enclosure" not in off:
                pname = off["param"]
                if pname not in params:
                    raise DescriptorError(f"unknown parameter {pname!r}", f"{where}.offset.param")
                lo, hi = params[pname]
            else:
                lo, hi = _parse_pair(off.get("enclosure"), f"{where}.offset.enclosure")
                pname = off.get("param")
            return MapSpec.affine(kind, slope, (lo + hi) / 2 + plus, (hi - lo) / 2, pname)
        return MapSpec.affine(kind, slope, _rational(off, f"{where}.offset"))
    if mkind in ("piecewise-linear", "pl"):
        bps = m.get("breakpoints")
        if not isinstance(bps, list) or not bps:
            raise DescriptorError("expected a list of [x, y] pairs", f"{where}.breakpoints")
        pts = [_parse_pair_loose(p, f"{where}.breakpoints") for p in bps]
        degree = int(m.get("degree", 1))
        radius = _rational(m.get("radius", "0"), f"{where}.radius")
        return MapSpec(PLMap.from_points(kind, pts, degree), radius)
    raise DescriptorError(f"unknown map kind {mkind!r}", f"{where}.kind")


def _parse_pair_loose(value, where):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise DescriptorError("expected an [x, y] pair", where)
    return _rational(value[0], where), _rational(value[1], where)


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolWord:
    """Eventually periodic symbol sequence ``head + cycle + cycle + ...``."""

    head: tuple[str, ...] = ()
    cycle: tuple[str, ...] | None = None
    direction: str = FORWARD
    index_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(str(s) for s in self.head))
        if self.cycle is not None:
            if not self.cycle:
                raise ValueError("cycle must be non-empty when present")
            object.__setattr__(self, "cycle", tuple(str(s) for s in self.cycle))
        if self.direction not in (FORWARD, TWO_SIDED):
            raise ValueError(f"unknown direction {self.direction!r}")

    @classmethod
    def of(cls, symbols: Sequence) -> "SymbolWord":
        return cls(tuple(str(s) for s in symbols))

    @classmethod
    def constant(cls, symbol) -> "SymbolWord":
        return cls((), (str(symbol),))

    @property
    def finite(self) -> bool:
        return self.cycle is None

    def __len__(self):
        if self.cycle is not None:
            raise TypeError("infinite word has no length")
        return len(self.head)

    def __getitem__(self, i: int) -> str:
        if i < 0:
            raise IndexError(i)
        if i < len(self.head):
            return self.head[i]
        if self.cycle is None:
            raise IndexError(f"word exhausted at index {i}")
        return self.cycle[(i - len(self.head)) % len(self.cycle)]

    def available(self, n: int) -> bool:
        return self.cycle is not None or n <= len(self.head)

    def take(self, n: int) -> tuple[str, ...]:
        if not self.available(n):
            raise IndexError(f"word of length {len(self.head)} exhausted before {n} symbols")
        return tuple(self[i] for i in range(n))

    def check_alphabet(self, system: IFSystem):
        for s in self.head + (self.cycle or ()):
            system.map(s)


@dataclass(frozen=True)
class OrbitSegment:
    points: tuple[Point, ...]
    word: SymbolWord

    def coords(self) -> list[Fraction]:
        return [p.coord for p in self.points]

    def to_json(self) -> dict:
        out = {
            "word": list(self.word.head),
            "points": [frac_str(p.coord) for p in self.points],
        }
        if any(not p.exact for p in self.points):
            out["radii"] = [frac_str(p.radius) for p in self.points]
        return out


@dataclass(frozen=True)
class PseudoOrbit:
    points: tuple[Point, ...]
    delta: Fraction
    witness: SymbolWord
    index_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if len(self.points) < 1:
            raise ValueError("pseudo-orbit needs at least one point")
        if len(self.witness) != len(self.points) - 1:
            raise ValueError("witness length must be one less than the number of points")

    @property
    def length(self) -> int:
        """Index of the last point (number of steps)."""
        return len(self.points) - 1

    def coords(self) -> list[Fraction]:
        return [p.coord for p in self.points]

    def to_json(self) -> dict:
        return {
            "points": [frac_str(p.coord) for p in self.points],
            "delta": frac_str(self.delta),
            "witness": list(self.witness.head),
            "index_offset": self.index_offset,
        }


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------


def apply(system: IFSystem, symbol, x: Point) -> Point:
    """Image of ``x`` under ``f_symbol``; enclosure radii grow by the map's bounds."""
    f = system.map(symbol)
    if x.kind != system.kind:
        raise ValueError("point and system live in different spaces")
    y = f(x.coord)
    radius = f.lipschitz_upper * x.radius + f.radius
    if system.kind == INTERVAL and not ZERO <= y <= ONE:
        log.warning("interval map left [0, 1] at %s; clamped", y)
        y = min(max(y, ZERO), ONE)
    return Point(y, system.kind, radius)


def compose_word(system: IFSystem, word: SymbolWord, n: int) -> Callable[[Point], Point]:
    """``F_{σ_{n-1}}``: the composition of the first ``n`` maps of the word."""
    symbols = word.take(n)
    for s in symbols:
        system.map(s)

    def composed(x: Point) -> Point:
        for s in symbols:
            x = apply(system, s, x)
        return x

    return composed


def orbit(system: IFSystem, word: SymbolWord | Sequence, x0, n: int) -> OrbitSegment:
    if not isinstance(word, SymbolWord):
        word = SymbolWord.of(word)
    x = x0 if isinstance(x0, Point) else system.point(x0)
    symbols = word.take(n)
    pts = [x]
    for s in symbols:
        x = apply(system, s, x)
        pts.append(x)
    return OrbitSegment(tuple(pts), SymbolWord(symbols))


def step_error(system: IFSystem, symbol, x: Point, x_next: Point) -> Fraction:
    """Upper bound on ``d(x_next, f_symbol(x))`` over the enclosures."""
    y = apply(system, symbol, x)
    return coord_dist(system.kind, y.coord, x_next.coord) + y.radius + x_next.radius


def step_ok(system: IFSystem, symbol, x: Point, x_next: Point, delta: Fraction) -> bool:
    """Strict δ-step test; ``delta == 0`` asks for an exact orbit step instead."""
    if delta == 0:
        y = apply(system, symbol, x)
        return coord_dist(system.kind, y.coord, x_next.coord) <= y.radius + x_next.radius
    return step_error(system, symbol, x, x_next) < delta


def validate_pseudo_orbit(system: IFSystem, points: Sequence, delta) -> SymbolWord | None:
    """Lexicographically least witness word, or ``None`` if some step has none.

    ``delta == 0`` checks for an exact orbit (up to enclosure radii).
    """
    delta = as_fraction(delta)
    pts = [p if isinstance(p, Point) else system.point(p) for p in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    word = []
    for x, x_next in zip(pts, pts[1:]):
        for s in system.symbols:
            if step_ok(system, s, x, x_next, delta):
                word.append(s)
                break
        else:
            return None
    return SymbolWord(tuple(word))


def witness_valid(system: IFSystem, points: Sequence[Point], word: SymbolWord, delta) -> bool:
    delta = as_fraction(delta)
    syms = word.take(len(points) - 1)
    return all(step_ok(system, s, x, y, delta) for s, x, y in zip(syms, points, points[1:]))


def pseudo_orbit(system: IFSystem, points: Sequence, delta, index_offset: int = 0) -> PseudoOrbit:
    """Validate ``points`` and wrap them with their least witness."""
    pts = tuple(p if isinstance(p, Point) else system.point(p) for p in points)
    delta = as_fraction(delta)
    if len(pts) == 1:
        return PseudoOrbit(pts, delta, SymbolWord(), index_offset)
    w = validate_pseudo_orbit(system, pts, delta)
    if w is None:
        raise ValueError(f"points are not a {delta}-pseudo-orbit of the system")
    return PseudoOrbit(pts, delta, w, index_offset)


def make_pseudo_orbit_from_generator(system: IFSystem, generator: MapSpec, x0, n: int, delta) -> PseudoOrbit:
    """Orbit of an auxiliary map ``generator`` validated as a pseudo-orbit."""
    if generator.space_kind != system.kind:
        raise ValueError("generator lives in a different space")
    x = x0 if isinstance(x0, Point) else system.point(x0)
    pts = [x]
    for _ in range(n):
        x = Point(generator(x.coord), system.kind, generator.lipschitz_upper * x.radius + generator.radius)
        pts.append(x)
    return pseudo_orbit(system, pts, delta)


def random_pseudo_orbit(
    system: IFSystem,
    n: int,
    delta,
    rng: random.Random,
    grid: int = 10**6,
    repeat_prob: float = 0.0,
    x0=None,
) -> PseudoOrbit:
    """Seeded δ-pseudo-orbit: random symbols, uniform kicks of size below δ.

    Points are snapped to the grid ``1/grid`` to keep denominators small.
    With ``repeat_prob > 0`` a step may instead repeat the previous point when
    that is still a valid δ-step (exercises coincident points).
    """
    delta = as_fraction(delta)
    kind = system.kind
    slack = Fraction(1, grid)
    reach = delta - 2 * slack - max(m.radius for m in system.maps)
    if reach <= 0:
        raise ValueError("delta too small for the grid/enclosure")
    if x0 is None:
        x = Point(Fraction(rng.randrange(grid + (1 if kind == INTERVAL else 0)), grid), kind)
    else:
        x = x0 if isinstance(x0, Point) else system.point(x0)
    pts, word = [x], []
    for _ in range(n):
        if repeat_prob and rng.random() < repeat_prob:
            ok = [s for s in system.symbols if step_ok(system, s, x, x, delta)]
            if ok:
                word.append(ok[0])
                pts.append(x)
                continue
        s = rng.choice(system.symbols)
        y = apply(system, s, x).coord
        kick = reach * Fraction(rng.randrange(-grid + 1, grid), grid)
        t = y + kick
        t = Fraction(round(t * grid), grid)
        if kind == CIRCLE:
            t -= math.floor(t)
        else:
            t = min(max(t, ZERO), ONE)
        x = Point(t, kind)
        word.append(s)
        pts.append(x)
    po = PseudoOrbit(tuple(pts), delta, SymbolWord(tuple(word)))
    assert witness_valid(system, po.points, po.witness, delta)
    return po


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ratios:
    beta: Fraction
    alpha: Fraction
    contracting: bool
    expanding: bool
    exact: bool = True


def contraction_ratio(system: IFSystem) -> Fraction:
    """Upper bound on the Lipschitz constants of all maps (exact for PL maps)."""
    return max(m.lipschitz_upper for m in system.maps)


def expansion_ratio(system: IFSystem) -> Fraction:
    """Smallest local stretch factor over all maps (exact for PL maps)."""
    return min(m.lipschitz_lower for m in system.maps)


def ratios(system: IFSystem) -> Ratios:
    beta, alpha = contraction_ratio(system), expansion_ratio(system)
    return Ratios(
        beta=beta,
        alpha=alpha,
        contracting=beta < 1,
        expanding=alpha > 1 and all(m.surjective for m in system.maps),
    )
