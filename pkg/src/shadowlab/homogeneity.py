"""Homeomorphism metrics, connecting homeomorphisms and the cover-trace probe.

The circle and the interval are homogeneous in an explicit way: finitely many
points can be pushed onto nearby targets by a piecewise-linear homeomorphism
whose distance to the identity equals the largest displacement.  That
construction, the uniform metrics ``d0`` and ``rho``, and the trace families
of open covers are what the genericity argument for weak shadowing runs on.
Everything here is exact except the probe, which is an empirical report.
"""

from __future__ import annotations

import math
from bisect import bisect_right
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .ifs import IFSystem, MapSpec, OrbitSegment, PseudoOrbit, SymbolWord, apply, orbit, witness_valid
from .pl import PLMap
from .shadowing import distinct_perturbation
from .space import (
    CIRCLE,
    HALF,
    INTERVAL,
    ONE,
    ZERO,
    ArcSet,
    Point,
    SpaceDescriptor,
    as_fraction,
    coord_dist,
    eps_net,
    frac_str,
    mod1,
)


class ConnectionError_(ValueError):
    """Pairs cannot be connected by a homeomorphism within the requested bound."""


class CyclicOrderError(ConnectionError_):
    pass


class ModulusError(ConnectionError_):
    pass


@dataclass(frozen=True)
class Homeomorphism:
    pl: PLMap

    def __post_init__(self):
        if not self.pl.bijective:
            raise ValueError("breakpoints do not define a monotone bijection")

    @classmethod
    def identity(cls, kind: str) -> "Homeomorphism":
        return cls(PLMap.identity(kind))

    @classmethod
    def rotation(cls, t) -> "Homeomorphism":
        return cls(PLMap.affine(CIRCLE, 1, t))

    @classmethod
    def reflection(cls, kind: str) -> "Homeomorphism":
        """``x -> 1 - x``."""
        return cls(PLMap.affine(kind, -1, 1))

    @classmethod
    def from_breakpoints(cls, kind: str, pairs: Sequence[Sequence], degree: int = 1) -> "Homeomorphism":
        return cls(PLMap.from_points(kind, [(as_fraction(a), as_fraction(b)) for a, b in pairs], degree))

    @property
    def kind(self) -> str:
        return self.pl.kind

    @property
    def orientation(self) -> int:
        return 1 if self.pl.increasing else -1

    @property
    def lipschitz(self) -> Fraction:
        return self.pl.lipschitz_upper

    @property
    def inverse_lipschitz(self) -> Fraction:
        return 1 / self.pl.lipschitz_lower

    @property
    def is_isometry(self) -> bool:
        return self.pl.is_affine and self.pl.lipschitz_upper == 1

    def __call__(self, x) -> Fraction:
        return self.pl(x)

    def point(self, p: Point) -> Point:
        return Point(self.pl(p.coord), p.kind, self.lipschitz * p.radius)

    def inverse(self) -> "Homeomorphism":
        return Homeomorphism(self.pl.inverse())

    def compose(self, inner: "Homeomorphism") -> "Homeomorphism":
        return Homeomorphism(self.pl.compose(inner.pl))

    def to_json(self) -> dict:
        out = {"space": self.kind, "breakpoints": self.pl.breakpoint_json()}
        if self.kind == CIRCLE:
            out["degree"] = self.pl.degree
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Homeomorphism":
        kind = data.get("space")
        if kind not in (CIRCLE, INTERVAL):
            raise ValueError("space: expected 'circle' or 'interval'")
        bps = data.get("breakpoints")
        if not isinstance(bps, list) or not bps:
            raise ValueError("breakpoints: expected a non-empty list of [x, y] pairs")
        degree = int(data.get("degree", 1))
        return cls.from_breakpoints(kind, bps, degree)


def _as_pl(f) -> tuple[PLMap, Fraction, str | None]:
    if isinstance(f, Homeomorphism):
        return f.pl, ZERO, None
    if isinstance(f, MapSpec):
        return f.nominal, f.radius, f.param
    if isinstance(f, PLMap):
        return f, ZERO, None
    raise TypeError(f"cannot measure {type(f).__name__}")


def _sup_dist(f: PLMap, g: PLMap) -> Fraction:
    """``max_x d(f(x), g(x))`` for PL maps, exact."""
    xs = sorted(set(f.xs) | set(g.xs) | {ZERO, ONE})
    diffs = [f.lift(x) - g.lift(x) for x in xs]
    best = ZERO
    for u, v in zip(diffs, diffs[1:]):
        if f.kind == CIRCLE:
            lo, hi = min(u, v), max(u, v)
            # the difference sweeps a point at distance 1/2 from an integer
            if math.floor(hi - HALF) >= math.ceil(lo - HALF):
                return HALF
            best = max(best, coord_dist(CIRCLE, u, ZERO), coord_dist(CIRCLE, v, ZERO))
        else:
            best = max(best, abs(u), abs(v))
    return best


def d0(f, g) -> Fraction:
    """``max{ d(f(x), g(x)), d(f^-1(x), g^-1(x)) }`` over the space.

    Exact for PL maps.  For maps with enclosures the bound is widened by the
    radii unless both maps carry the same unknown constant.
    """
    pf, rf, tf = _as_pl(f)
    pg, rg, tg = _as_pl(g)
    if pf.kind != pg.kind:
        raise ValueError("space mismatch")
    if not (pf.bijective and pg.bijective):
        raise ValueError("d0 needs invertible maps")
    if pf == pg and rf == rg and (tf == tg or rf == 0):
        return ZERO
    fi, gi = pf.inverse(), pg.inverse()
    fwd, inv = _sup_dist(pf, pg), _sup_dist(fi, gi)
    shared = tf is not None and tf == tg and rf == rg
    if not shared:
        fwd += rf + rg
        inv += fi.lipschitz_upper * rf + gi.lipschitz_upper * rg
    return min(max(fwd, inv), HALF if pf.kind == CIRCLE else ONE)


def rho(F: IFSystem, G: IFSystem) -> Fraction:
    """Uniform distance between systems, maximized over matching symbols."""
    if F.symbols != G.symbols or F.kind != G.kind:
        raise ValueError("systems must share alphabet and space")
    return max(d0(f, g) for f, g in zip(F.maps, G.maps))


# ---------------------------------------------------------------------------
# Connecting homeomorphisms
# ---------------------------------------------------------------------------


def displacement(kind: str, a: Fraction, b: Fraction) -> Fraction:
    """Signed shortest displacement from ``a`` to ``b``."""
    t = b - a
    if kind == CIRCLE:
        t = mod1(t)
        if t > HALF:
            t -= 1
    return t


def homogeneity_modulus(kind: str, points: Sequence, eps) -> Fraction:
    """Displacement below which any targets keep the points' order.

    Moving each of the distinct ``points`` by less than half their minimum
    separation (and at most ``eps``) can always be realized by a connecting
    homeomorphism with ``d0 <= eps``.
    """
    eps = as_fraction(eps)
    pts = sorted({as_fraction(p) for p in points})
    if len(pts) < 2:
        return eps
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    if kind == CIRCLE:
        gaps.append(pts[0] + 1 - pts[-1])
    return min(eps, min(gaps) / 2)


def connecting_homeomorphism(
    space: SpaceDescriptor | str,
    pairs: Iterable[tuple],
    eps,
    margin=None,
) -> Homeomorphism:
    """PL homeomorphism with ``h(a_i) = b_i`` and ``d0(h, id) <= eps``.

    Between consecutive pairs the map is pinned to the identity at distance
    ``margin`` (default: the largest displacement) beyond both the source and
    the target, when there is room, so ``h`` is the identity away from the
    moved points.  Raises :class:`CyclicOrderError` if the targets are not in
    the (cyclic) order of the sources, :class:`ModulusError` if a required
    displacement exceeds ``eps``.
    """
    kind = space.kind if isinstance(space, SpaceDescriptor) else space
    eps = as_fraction(eps)
    pairs = [(as_fraction(a), as_fraction(b)) for a, b in pairs]
    if kind == CIRCLE:
        pairs = [(mod1(a), mod1(b)) for a, b in pairs]
    if len({a for a, _ in pairs}) != len(pairs):
        raise ValueError("sources must be pairwise distinct")
    if len({b for _, b in pairs}) != len(pairs):
        raise ValueError("targets must be pairwise distinct")
    pairs.sort()
    disp = [displacement(kind, a, b) for a, b in pairs]
    worst = max((abs(t) for t in disp), default=ZERO)
    if worst > eps:
        raise ModulusError(f"displacement {worst} exceeds the allowed {eps}")
    if worst == 0:
        return Homeomorphism.identity(kind)
    margin = worst if margin is None else as_fraction(margin)
    lifted = [(a, a + t) for (a, _), t in zip(pairs, disp)]
    ends = [b for _, b in lifted]
    if any(q <= p for p, q in zip(ends, ends[1:])):
        raise CyclicOrderError("targets are not in the order of their sources")
    if kind == CIRCLE and len(ends) > 1 and ends[-1] >= ends[0] + 1:
        raise CyclicOrderError("targets wrap past the first source")
    if kind == INTERVAL:
        for a, b in lifted:
            if (a in (ZERO, ONE) or b in (ZERO, ONE)) and a != b:
                raise CyclicOrderError("interval homeomorphisms fix the endpoints")

    pts: list[tuple[Fraction, Fraction]] = list(lifted)

    def pin(lo: Fraction, hi: Fraction):
        if hi <= lo:
            return
        if hi - lo > 2 * margin:
            pts.extend([(lo + margin, lo + margin), (hi - margin, hi - margin)])
        else:
            m = (lo + hi) / 2
            pts.append((m, m))

    for (a, b), (a2, b2) in zip(lifted, lifted[1:]):
        pin(max(a, b), min(a2, b2))
    if kind == CIRCLE:
        a, b = lifted[-1]
        a2, b2 = lifted[0]
        pin(max(a, b), min(a2, b2) + 1)
    else:
        pts.extend([(ZERO, ZERO), (ONE, ONE)])
        pin(ZERO, min(lifted[0]))
        pin(max(lifted[-1]), ONE)
    pl = PLMap.from_points(kind, pts, 1) if kind == CIRCLE else PLMap.from_points(kind, pts)
    h = Homeomorphism(pl)
    for a, b in pairs:
        if h(a) != b:
            raise RuntimeError("connecting homeomorphism misses a target")
    return h


def random_homeomorphism(kind: str, gamma, rng: random.Random, max_points: int = 4, grid: int = 10**6) -> Homeomorphism:
    """Random local PL bumps, each displacement strictly below ``gamma/2``."""
    gamma = as_fraction(gamma)
    if gamma == 0:
        return Homeomorphism.identity(kind)
    for _ in range(100):
        m = rng.randint(1, max_points)
        srcs = sorted({Fraction(rng.randrange(1, grid), grid) for _ in range(m)})
        pairs = []
        for a in srcs:
            t = gamma / 2 * Fraction(rng.randrange(-grid + 1, grid), grid)
            b = a + t
            if kind == CIRCLE:
                b = mod1(b)
            elif not ZERO < b < ONE:
                continue
            pairs.append((a, b))
        try:
            return connecting_homeomorphism(kind, pairs, gamma / 2, margin=gamma)
        except ConnectionError_:
            continue
        except ValueError:
            continue
    return Homeomorphism.identity(kind)


def perturb_system(F: IFSystem, h: Homeomorphism) -> IFSystem:
    """``G = {h ∘ f_λ}``.  Enclosure radii grow by the Lipschitz constant of ``h``."""
    if h.kind != F.kind:
        raise ValueError("space mismatch")
    maps = []
    for f in F.maps:
        nominal = h.pl.compose(f.nominal)
        if h.pl.is_affine and h.pl.increasing and h.lipschitz == 1:
            maps.append(MapSpec(nominal, f.radius, f.param))
        else:
            maps.append(MapSpec(nominal, h.lipschitz * f.radius, None if f.radius else f.param))
    return F.with_maps(maps)


def perturbation_bound(F: IFSystem, h: Homeomorphism) -> Fraction:
    """Upper bound on ``rho(F, h∘F)`` from ``d0(h, id)`` and the inverse moduli."""
    shift = d0(h, Homeomorphism.identity(h.kind))
    return max(max(shift, f.nominal.inverse().lipschitz_upper * shift) for f in F.maps)


def inverse_modulus(F: IFSystem, gamma) -> Fraction:
    """``tau`` in ``(0, gamma)`` with ``d(a,b) < tau  =>  d(f^-1 a, f^-1 b) < gamma`` for all maps."""
    gamma = as_fraction(gamma)
    lip = max(f.nominal.inverse().lipschitz_upper for f in F.maps)
    return min(gamma / 2, gamma / lip)


# ---------------------------------------------------------------------------
# Covers and trace families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenCover:
    """Open arcs ``(left, right)`` (real lifts, ``right - left < 1``) covering the space."""

    kind: str
    arcs: tuple[tuple[Fraction, Fraction], ...]
    epsilon: Fraction

    def __post_init__(self):
        arcs = tuple((as_fraction(a), as_fraction(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        for a, b in arcs:
            if not a < b:
                raise ValueError("cover arcs must have left < right")
        for j in range(len(arcs)):
            if self.diameter(j) >= self.epsilon:
                raise ValueError(f"cover element {j} has diameter >= epsilon")
        if not self._covers():
            raise ValueError("arcs do not cover the space")

    def __len__(self):
        return len(self.arcs)

    def closure(self, j: int) -> ArcSet:
        a, b = self.arcs[j]
        if self.kind == CIRCLE:
            return ArcSet.from_lifts(CIRCLE, [(a, b)])
        return ArcSet.from_segments(INTERVAL, [(max(a, ZERO), min(b, ONE))])

    def diameter(self, j: int) -> Fraction:
        return self.closure(j).diameter()

    def _covers(self) -> bool:
        # the open arcs cover iff no arc endpoint (in the space) is left uncovered
        probes = set()
        for a, b in self.arcs:
            for x in (a, b):
                probes.add(mod1(x) if self.kind == CIRCLE else min(max(x, ZERO), ONE))
        probes |= {ZERO, ONE} if self.kind == INTERVAL else {ZERO}
        return all(self._slow_indices(x) for x in probes)

    def contains(self, j: int, x: Fraction, radius: Fraction = ZERO) -> bool:
        """Whether the whole enclosure ``[x - radius, x + radius]`` lies in ``V_j``."""
        a, b = self.arcs[j]
        if self.kind == CIRCLE:
            x = mod1(x)
            return any(a < x + k - radius and x + k + radius < b for k in (-1, 0, 1))
        # relative topology: a left end below 0 includes the point 0, likewise at 1
        lo_ok = a < x - radius or (a < ZERO and x - radius <= ZERO <= x)
        hi_ok = x + radius < b or (b > ONE and x <= ONE <= x + radius)
        return lo_ok and hi_ok

    @cached_property
    def _bounds(self) -> list[Fraction]:
        ends = set()
        for a, b in self.arcs:
            for x in (a, b):
                ends.add(mod1(x) if self.kind == CIRCLE else min(max(x, ZERO), ONE))
        if self.kind == INTERVAL:
            ends |= {ZERO, ONE}
        return sorted(ends)

    @cached_property
    def _members(self) -> list[frozenset[int]]:
        return [self._slow_indices(m) for m in self.cell_points()]

    def cell_points(self) -> list[Fraction]:
        """One representative inside each open cell of the arrangement of arc ends."""
        bounds = self._bounds
        mids = [(u + v) / 2 for u, v in zip(bounds, bounds[1:])]
        if self.kind == CIRCLE:
            mids.append(mod1((bounds[-1] + bounds[0] + 1) / 2))
        return mids

    def _slow_indices(self, x: Fraction, radius: Fraction = ZERO) -> frozenset[int]:
        return frozenset(j for j in range(len(self.arcs)) if self.contains(j, x, radius))

    def indices(self, x: Fraction, radius: Fraction = ZERO) -> frozenset[int]:
        """Indices of the cover elements containing the enclosure of ``x``."""
        bounds, members = self._bounds, self._members
        if self.kind == CIRCLE:
            x = mod1(x)
            i = bisect_right(bounds, x) - 1
            if i < 0:
                left, right, cell = bounds[-1] - 1, bounds[0], len(bounds) - 1
            else:
                left = bounds[i]
                right = bounds[i + 1] if i + 1 < len(bounds) else bounds[0] + 1
                cell = i
        else:
            i = bisect_right(bounds, x) - 1
            if i >= len(bounds) - 1:
                return self._slow_indices(x, radius)
            left, right, cell = bounds[i], bounds[i + 1], i
        if left < x - radius and x + radius < right:
            return members[cell]
        return self._slow_indices(x, radius)


def equal_arc_cover(kind: str, k: int, overlap, epsilon=None) -> OpenCover:
    """``k`` open arcs of length ``1/k`` widened by ``overlap`` on both sides."""
    overlap = as_fraction(overlap)
    arcs = [(Fraction(j, k) - overlap, Fraction(j + 1, k) + overlap) for j in range(k)]
    if epsilon is None:
        epsilon = Fraction(1, k) + 2 * overlap + Fraction(1, 100 * k)
    return OpenCover(kind, tuple(arcs), as_fraction(epsilon))


@dataclass(frozen=True)
class TraceFamily:
    families: frozenset[frozenset[int]]
    maximal: frozenset[frozenset[int]]
    horizon: int
    system_hash: int
    complete: bool

    def __contains__(self, item) -> bool:
        return frozenset(item) in self.families

    def issubset(self, other: "TraceFamily") -> bool:
        return self.families <= other.families


def _downward_closure(sets: Iterable[frozenset[int]]) -> frozenset[frozenset[int]]:
    out: set[frozenset[int]] = set()
    for s in sets:
        items = sorted(s)
        for r in range(len(items) + 1):
            out.update(frozenset(c) for c in combinations(items, r))
    return frozenset(out)


def _maximal(sets: Iterable[frozenset[int]]) -> frozenset[frozenset[int]]:
    sets = set(sets)
    return frozenset(s for s in sets if not any(s < t for t in sets))


def _orbit_traces(system: IFSystem, cover: OpenCover, starts: Sequence[Point], horizon: int, budget: int):
    """Yield (met index set, orbit points, word, depth) for every explored node.

    Depth-first over words in lexicographic order; a state (depth, point,
    met set) seen before is skipped because its continuations repeat.
    Returns via StopIteration value whether the enumeration completed.
    """
    spent = 0
    seen: set = set()
    for x0 in starts:
        stack = [(0, x0, cover.indices(x0.coord, x0.radius), (x0,), ())]
        while stack:
            depth, x, met, pts, word = stack.pop()
            key = (depth, x.coord, x.radius, met)
            if key in seen:
                continue
            seen.add(key)
            yield met, pts, word, depth
            if depth == horizon:
                continue
            for sym in reversed(system.symbols):
                if spent >= budget:
                    return False
                spent += 1
                y = apply(system, sym, x)
                stack.append((depth + 1, y, met | cover.indices(y.coord, y.radius), pts + (y,), word + (sym,)))
    return True


def trace_starts(space: SpaceDescriptor, cover: OpenCover) -> list[Point]:
    coords = {p.coord for p in eps_net(space, cover.epsilon / 4)} | set(cover.cell_points())
    return [Point(c, space.kind) for c in sorted(coords)]


def trace_family(
    system: IFSystem,
    cover: OpenCover,
    horizon: int,
    budget: int = 10**5,
    net: Sequence[Point] | None = None,
) -> TraceFamily:
    """Index sets of cover elements met by explored orbits, downward closed.

    Orbits start on an ``epsilon/4``-net, augmented by one point in every
    cell of the cover's arrangement so that thin overlaps are seen, and run
    over all words up to the horizon within ``budget`` map evaluations.
    Every explored prefix counts, since it extends to a full segment.  The
    result is always a lower bound for the true family; ``complete`` is
    False when the budget cut the enumeration short.
    """
    if net is None:
        net = trace_starts(system.space, cover)
    observed: set[frozenset[int]] = set()
    gen = _orbit_traces(system, cover, net, horizon, budget)
    complete = True
    while True:
        try:
            met, _, _, _ = next(gen)
        except StopIteration as stop:
            complete = bool(stop.value)
            break
        observed.add(met)
    maximal = _maximal(observed)
    return TraceFamily(_downward_closure(maximal), maximal, horizon, hash(system), complete)


# ---------------------------------------------------------------------------
# Genericity probe
# ---------------------------------------------------------------------------


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SHADOWLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ProbeReport:
    gamma: Fraction
    trials: int
    equal: int = 0
    F_subset_G: int = 0
    violations: list = field(default_factory=list)
    max_rho: Fraction = ZERO
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "gamma": frac_str(self.gamma),
            "trials": self.trials,
            "equal": self.equal,
            "F_subset_G": self.F_subset_G,
            "violations": self.violations,
            "max_rho": frac_str(self.max_rho),
            "complete": self.complete,
        }


def _probe_trial(F: IFSystem, cover: OpenCover, gamma: Fraction, horizon: int, seed, trial: int, budget: int, JF: TraceFamily):
    rng = random.Random(f"{seed}:{trial}")
    for _ in range(50):
        h = random_homeomorphism(F.kind, gamma, rng)
        G = perturb_system(F, h)
        r = rho(F, G)
        if gamma == 0 or r < gamma:
            break
    else:
        raise RuntimeError("could not sample a perturbation within gamma")
    JG = trace_family(G, cover, horizon, budget)
    return trial, r, JG


def genericity_probe(
    F: IFSystem,
    cover: OpenCover,
    gamma,
    trials: int,
    horizon: int,
    seed: int = 0,
    budget: int = 10**5,
) -> ProbeReport:
    """Compare trace families of ``F`` and of random ``G`` with ``rho(F, G) < gamma``.

    Equality counts are "no difference found at this budget", never a proof.
    """
    gamma = as_fraction(gamma)
    if not F.all_invertible:
        raise ValueError("probe needs a system of homeomorphisms")
    JF = trace_family(F, cover, horizon, budget)
    report = ProbeReport(gamma, trials, complete=JF.complete)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda t: _probe_trial(F, cover, gamma, horizon, seed, t, budget, JF), range(trials)))
    for trial, r, JG in results:
        report.max_rho = max(report.max_rho, r)
        report.complete = report.complete and JG.complete
        if JG.families == JF.families:
            report.equal += 1
        if JF.issubset(JG):
            report.F_subset_G += 1
        else:
            missing = sorted(sorted(s) for s in JF.maximal - JG.families)
            report.violations.append({"trial": trial, "rho": frac_str(r), "missing": missing[:5]})
    return report


@dataclass
class Reconstruction:
    """Outcome of rebuilding the genericity proof on one finite pseudo-orbit."""

    perturbed: PseudoOrbit
    connector: Homeomorphism
    G: IFSystem
    rho_FG: Fraction
    z_is_orbit: bool
    z_within_eps: bool
    trace: frozenset[int]
    z_prime: OrbitSegment | None
    z_prime_within_3eps: bool

    @property
    def passed(self) -> bool:
        return self.z_is_orbit and self.z_within_eps and self.z_prime is not None and self.z_prime_within_3eps


def reconstruct_proof(
    F: IFSystem,
    pseudo: PseudoOrbit,
    cover: OpenCover,
    budget: int = 10**5,
) -> Reconstruction:
    """Turn a finite pseudo-orbit into a genuine orbit of a nearby system.

    1. perturb to pairwise-distinct points ``y`` (a ``2δ``-pseudo-orbit);
    2. connect ``f_{λ_i}(y_i)`` to ``y_{i+1}`` by one PL homeomorphism ``h``;
    3. ``G = h∘F`` has ``y`` as an exact orbit segment ``z``;
    4. find an orbit ``z'`` of ``F`` meeting only cover elements that ``z``
       meets, and check ``z' ⊂ B_{3ε}(x)``.
    """
    eps = cover.epsilon
    kind = F.kind
    y = distinct_perturbation(F, pseudo, eps)
    sources = [apply(F, s, p).coord for s, p in zip(y.witness.take(y.length), y.points)]
    targets = [p.coord for p in y.points[1:]]
    worst = max((abs(displacement(kind, a, b)) for a, b in zip(sources, targets)), default=ZERO)
    h = connecting_homeomorphism(kind, list(zip(sources, targets)), worst)
    G = perturb_system(F, h)
    r = rho(F, G)
    z_ok = witness_valid(G, y.points, y.witness, 0)
    within = all(
        coord_dist(kind, x.coord, p.coord) + x.radius + p.radius < eps for x, p in zip(pseudo.points, y.points)
    )
    trace = frozenset().union(*(cover.indices(p.coord, p.radius) for p in y.points))
    best = None
    for met, pts, word, depth in _orbit_traces(F, cover, trace_starts(F.space, cover), y.length, budget):
        if depth == y.length and met <= trace:
            cand = OrbitSegment(pts, SymbolWord(word))
            if met == trace:
                best = cand
                break
            if best is None:
                best = cand
    near = False
    if best is not None:
        near = all(
            any(coord_dist(kind, q.coord, x.coord) + q.radius + x.radius < 3 * eps for x in pseudo.points)
            for q in best.points
        )
    return Reconstruction(y, h, G, r, z_ok, within, trace, best, near)
