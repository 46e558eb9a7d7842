"""Finite-horizon decision procedures for shadowing and weak shadowing.

Both verifiers propagate exact feasible sets.  For shadowing the constraint at
index ``n`` is the closed ball ``B[x_n, eps]``; for weak shadowing it is the
union of the balls about every pseudo-orbit point.  A branch keeps the set of
current orbit points compatible with every constraint so far::

    S_0 = C_0,    S_{n+1} = f_λ(S_n) ∩ C_{n+1}

A surviving branch at the horizon yields a certificate; if every branch dies
under exact arithmetic the question is refuted at that horizon.

Maps with enclosed parameters are handled by running the search on the
nominal maps twice: once with constraints inflated by the accumulated
enclosure error (sound refutation) and once with deflated constraints (sound
certification).  Anything in between is reported as inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .ifs import (
    IFSystem,
    OrbitSegment,
    PseudoOrbit,
    SymbolWord,
    apply,
    orbit,
    witness_valid,
)
from .space import (
    CIRCLE,
    INTERVAL,
    ONE,
    ZERO,
    ArcSet,
    Point,
    as_fraction,
    ball,
    coord_dist,
    frac_str,
    mod1,
    union_all,
)

EXACT = "exact-arcset"
ROTATION_DP = "rotation-dp"
GRID = "grid-lipschitz"

SHADOWING = "shadowing"
WEAK = "weak-shadowing"

DEFAULT_BUDGET = 10**6
DEFAULT_MARGIN = Fraction(1, 10**9)
# cap on remembered sets per index for dominated-state pruning
SEEN_CAP = 512
# arc-count cap for the viability and forward-union summaries
VIABLE_ARC_CAP = 1024
# node allowance per step for the plain search before viable sets are computed
QUICK_NODES = 8


class Verdict(str, Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class VerificationOutcome:
    verdict: Verdict
    property: str
    proof_method: str
    horizon: int
    epsilon: Fraction
    certificate: OrbitSegment | None = None
    budget_spent: int = 0
    resolution: Fraction | None = None
    refuted_at: int | None = None

    def __post_init__(self):
        if self.verdict is Verdict.CERTIFIED and self.certificate is None:
            raise ValueError("certified outcome without certificate")
        if self.verdict is Verdict.REFUTED and self.proof_method == GRID and self.resolution is None:
            raise ValueError("grid refutation needs its resolution")

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.verdict is Verdict.REFUTED

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "property": self.property,
            "method": self.proof_method,
            "horizon": self.horizon,
            "epsilon": frac_str(self.epsilon),
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "nodes": self.budget_spent,
        }
        if self.refuted_at is not None:
            out["refuted_at"] = self.refuted_at
        if self.resolution is not None:
            out["resolution"] = frac_str(self.resolution)
        return out


class FeasibleState:
    """Search node: admissible current points after ``n`` steps of a branch."""

    __slots__ = ("set", "n", "symbol", "parent")

    def __init__(self, set_: ArcSet, n: int, symbol: str | None, parent: "FeasibleState | None"):
        self.set = set_
        self.n = n
        self.symbol = symbol
        self.parent = parent

    def chain(self) -> list["FeasibleState"]:
        out, node = [], self
        while node is not None:
            out.append(node)
            node = node.parent
        return out[::-1]

    def word(self) -> tuple[str, ...]:
        return tuple(s.symbol for s in self.chain()[1:])


@dataclass
class _SearchResult:
    status: str  # "found" | "dead" | "budget"
    leaf: FeasibleState | None
    nodes: int
    deepest: int


def _viable_sets(system: IFSystem, constraints: Sequence[ArcSet]) -> list[ArcSet]:
    """Supersets of ``V_n``, the points of ``C_n`` that can survive to the horizon.

    ``V_h = C_h`` and ``V_n = C_n ∩ ⋃_λ f_λ⁻¹(V_{n+1})``.  Expanding maps can
    fragment these sets exponentially, so once a set exceeds ``VIABLE_ARC_CAP``
    arcs the earlier indices keep their plain constraints (still a superset).
    """
    maps = [f for _, f in system.items()]
    out = [constraints[-1]]
    for k in range(len(constraints) - 2, -1, -1):
        nxt, c = out[-1], constraints[k]
        if len(nxt.arcs) > VIABLE_ARC_CAP:
            out.extend(constraints[k::-1])
            break
        out.append(c & union_all(c.kind, [f.preimage(nxt) for f in maps]) if nxt else nxt)
    return out[::-1]


def _first_dead_index(system: IFSystem, constraints: Sequence[ArcSet]) -> int | None:
    """First ``n`` where the forward union ``R_n = C_n ∩ ⋃_λ f_λ(R_{n-1})`` is empty.

    ``None`` when the union grows past ``VIABLE_ARC_CAP`` arcs.
    """
    maps = [f for _, f in system.items()]
    r = constraints[0]
    for n, c in enumerate(constraints):
        if n:
            r = c & union_all(c.kind, [f.image(r) for f in maps])
        if not r:
            return n
        if len(r.arcs) > VIABLE_ARC_CAP:
            return None
    return len(constraints)


def _branch_search(
    system: IFSystem,
    constraints: Sequence[ArcSet],
    budget: int,
    prune_viable: bool = True,
    _summarize: bool = False,
) -> _SearchResult:
    """Depth-first propagation in lexicographic symbol order.

    A state whose set is contained in a set already expanded at the same index
    is pruned: the earlier subtree was fully explored without success and the
    future constraints depend on the index only.  When a short plain search
    stalls, states are also cut down to the viable sets, which only removes
    points without a surviving continuation; surviving words are the same as
    without the cut, but dead subtrees are never entered.
    """
    horizon = len(constraints) - 1
    if prune_viable and not _summarize:
        # most questions resolve greedily; summarize only when that stalls
        quick = _branch_search(system, constraints, min(budget, QUICK_NODES * (horizon + 1)), False)
        if quick.status != "budget" or quick.nodes >= budget:
            return quick
        rest = _branch_search(system, constraints, budget - quick.nodes, True, _summarize=True)
        rest.nodes += quick.nodes
        return rest
    viable = _viable_sets(system, constraints) if _summarize else list(constraints)
    root_set = viable[0]

    def all_dead(nodes: int, deepest: int) -> _SearchResult:
        # cutting to viable sets hides how far the plain search gets, so the
        # depth comes from the forward union instead
        if not _summarize:
            return _SearchResult("dead", None, nodes, deepest)
        dead = _first_dead_index(system, constraints)
        if dead is None:
            # too fragmented to summarize; the plain search finds the depth
            return _branch_search(system, constraints, budget, prune_viable=False)
        return _SearchResult("dead", None, nodes, dead - 1)

    if not root_set:
        return all_dead(0, -1)
    stack = [FeasibleState(root_set, 0, None, None)]
    seen_eq: list[set] = [set() for _ in constraints]
    seen: list[list[ArcSet]] = [[] for _ in constraints]
    nodes, deepest = 0, 0
    maps = list(system.items())
    while stack:
        node = stack.pop()
        deepest = max(deepest, node.n)
        if node.n == horizon:
            return _SearchResult("found", node, nodes, deepest)
        s = node.set
        if s in seen_eq[node.n] or any(s.issubset(t) for t in seen[node.n]):
            continue
        if nodes >= budget:
            return _SearchResult("budget", None, nodes, deepest)
        nodes += 1
        seen_eq[node.n].add(s)
        if len(seen[node.n]) < SEEN_CAP:
            seen[node.n].append(s)
        nxt = viable[node.n + 1]
        for sym, f in reversed(maps):
            child = f.image(s) & nxt
            if child:
                stack.append(FeasibleState(child, node.n + 1, sym, node))
    return all_dead(nodes, deepest)


def _pull_back_point(system: IFSystem, sets: Sequence[ArcSet], word: Sequence[str]) -> Fraction:
    """Initial point whose orbit under ``word`` stays in ``sets`` at every index.

    Refines backward, ``T_n = first arc of S_n ∩ f^{-1}(T_{n+1})``, then takes
    the midpoint of ``T_0`` so the orbit sits in the interior when it can.
    Keeping one arc stops expanding maps from doubling the arc count per step;
    the chain cannot empty because ``S_{n+1} ⊆ f(S_n)``.
    """
    t = sets[-1].first_arc()
    for n in range(len(word) - 1, -1, -1):
        t = (sets[n] & system.map(word[n]).preimage(t)).first_arc()
        if not t:
            raise RuntimeError("backward refinement emptied a surviving branch")
    return t.midpoint()


def _drift(system: IFSystem, n: int) -> list[Fraction]:
    """Bound on |true orbit - nominal orbit| after each step from an exact start."""
    lip = max(m.lipschitz_upper for m in system.maps)
    rad = max(m.radius for m in system.maps)
    out = [ZERO]
    for _ in range(n):
        out.append(lip * out[-1] + rad)
    return out


def _ball_or_empty(kind: str, center: Point, r: Fraction) -> ArcSet:
    if r < 0:
        return ArcSet.empty(kind)
    return ball(kind, center.coord, r)


def _is_exact(system: IFSystem, pseudo: PseudoOrbit) -> bool:
    return system.exact and all(p.exact for p in pseudo.points)


def _check_inputs(system: IFSystem, pseudo: PseudoOrbit, eps) -> Fraction:
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if any(p.kind != system.kind for p in pseudo.points):
        raise ValueError("pseudo-orbit and system live in different spaces")
    if pseudo.length and not witness_valid(system, pseudo.points, pseudo.witness, pseudo.delta):
        raise ValueError("pseudo-orbit fails its own witness check")
    return eps


# ---------------------------------------------------------------------------
# Re-validation (independent of the search)
# ---------------------------------------------------------------------------


def _recompute(system: IFSystem, cert: OrbitSegment) -> OrbitSegment | None:
    n = len(cert.points) - 1
    if not cert.word.available(n):
        return None
    again = orbit(system, cert.word, cert.points[0], n)
    if again.coords() != cert.coords():
        return None
    return again


def revalidate_shadowing(system: IFSystem, pseudo: PseudoOrbit, eps, cert: OrbitSegment) -> bool:
    """Recompute the certificate orbit and check ``d(x_n, y_n) <= eps`` at every index."""
    eps = as_fraction(eps)
    again = _recompute(system, cert)
    if again is None or len(again.points) > len(pseudo.points):
        return False
    kind = system.kind
    for x, y in zip(pseudo.points, again.points):
        if coord_dist(kind, x.coord, y.coord) + x.radius + y.radius > eps:
            return False
    return True


def revalidate_weak(system: IFSystem, pseudo: PseudoOrbit, eps, cert: OrbitSegment) -> bool:
    """Recompute the certificate orbit and check it lies in the open ``eps``-neighbourhood."""
    eps = as_fraction(eps)
    again = _recompute(system, cert)
    if again is None:
        return False
    kind = system.kind
    for y in again.points:
        if not any(coord_dist(kind, x.coord, y.coord) + x.radius + y.radius < eps for x in pseudo.points):
            return False
    return True


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------


def _run_passes(system, pseudo, eps, budget, horizon, prop, constraints_for, validate):
    """Shared outer/inner pass logic for the branching verifiers."""
    nodes = 0

    def certify(res: _SearchResult, cons: Sequence[ArcSet]) -> VerificationOutcome:
        chain = res.leaf.chain()
        word = tuple(s.symbol for s in chain[1:])
        y0 = _pull_back_point(system, [s.set for s in chain], word)
        cert = orbit(system, SymbolWord(word), system.point(y0), horizon)
        if not validate(system, pseudo, eps, cert):
            raise RuntimeError("certificate failed independent re-validation")
        return VerificationOutcome(Verdict.CERTIFIED, prop, EXACT, horizon, eps, cert, nodes)

    def refute(res: _SearchResult) -> VerificationOutcome:
        return VerificationOutcome(
            Verdict.REFUTED, prop, EXACT, horizon, eps, None, nodes, refuted_at=res.deepest + 1
        )

    def give_up() -> VerificationOutcome:
        return VerificationOutcome(Verdict.INCONCLUSIVE, prop, EXACT, horizon, eps, None, nodes)

    inner = constraints_for(-1)
    outer = constraints_for(+1)
    if inner == outer:
        res = _branch_search(system, inner, budget)
        nodes += res.nodes
        if res.status == "found":
            return certify(res, inner)
        return refute(res) if res.status == "dead" else give_up()
    res = _branch_search(system, outer, budget)
    nodes += res.nodes
    if res.status == "dead":
        return refute(res)
    if res.status == "budget":
        return give_up()
    res = _branch_search(system, inner, budget)
    nodes += res.nodes
    if res.status == "found":
        return certify(res, inner)
    return give_up()


def check_shadowing(
    system: IFSystem,
    pseudo: PseudoOrbit,
    eps,
    budget: int = DEFAULT_BUDGET,
    horizon: int | None = None,
) -> VerificationOutcome:
    """Is there an orbit ``y`` with ``d(x_n, y_n) <= eps`` for ``n <= horizon``?"""
    eps = _check_inputs(system, pseudo, eps)
    horizon = pseudo.length if horizon is None else horizon
    if not 0 <= horizon <= pseudo.length:
        raise ValueError("horizon exceeds the pseudo-orbit")
    drift = _drift(system, horizon)
    kind = system.kind

    def constraints_for(sign: int) -> list[ArcSet]:
        return [
            _ball_or_empty(kind, x, eps + sign * (drift[n] + x.radius))
            for n, x in enumerate(pseudo.points[: horizon + 1])
        ]

    return _run_passes(system, pseudo, eps, budget, horizon, SHADOWING, constraints_for, revalidate_shadowing)


def check_weak_shadowing(
    system: IFSystem,
    pseudo: PseudoOrbit,
    eps,
    budget: int = DEFAULT_BUDGET,
    horizon: int | None = None,
    margin: Fraction = DEFAULT_MARGIN,
) -> VerificationOutcome:
    """Is there an orbit segment of ``horizon`` steps inside ``B_eps(pseudo-orbit)``?

    The neighbourhood is open.  Certificates are searched inside the closed
    ``eps*(1 - margin)`` neighbourhood, refutations use the closed ``eps`` one.
    """
    eps = _check_inputs(system, pseudo, eps)
    horizon = pseudo.length if horizon is None else horizon
    if horizon < 0:
        raise ValueError("negative horizon")
    drift = _drift(system, horizon)
    kind = system.kind
    centers = sorted({(x.coord, x.radius) for x in pseudo.points})
    cache: dict[Fraction, ArcSet] = {}
    whole_from: list[Fraction] = []

    def neighbourhood(r: Fraction) -> ArcSet:
        if whole_from and r >= whole_from[0]:
            return ArcSet.whole(kind)
        if r not in cache:
            u = union_all(kind, [ball(kind, c, r - cr) for c, cr in centers if r >= cr])
            if u == ArcSet.whole(kind):
                whole_from[:] = [min([r] + whole_from)]
            cache[r] = u
        return cache[r]

    def constraints_for(sign: int) -> list[ArcSet]:
        if sign < 0:
            radii = [eps * (1 - margin) - drift[n] for n in range(horizon + 1)]
        else:
            radii = [eps + drift[n] for n in range(horizon + 1)]
        neighbourhood(min(radii))  # settles the whole-space shortcut early
        return [neighbourhood(r) for r in radii]

    return _run_passes(system, pseudo, eps, budget, horizon, WEAK, constraints_for, revalidate_weak)


# ---------------------------------------------------------------------------
# Commuting rotations
# ---------------------------------------------------------------------------


def rotation_residues(system: IFSystem) -> tuple[int, list[int]]:
    """Common denominator ``q`` and residues of the offset differences.

    Raises ``ValueError`` unless every map is a rotation and the differences of
    rotation numbers are known exactly (exact offsets, or one shared enclosure
    parameter).
    """
    if system.kind != CIRCLE or not all(m.is_rotation for m in system.maps):
        raise ValueError("rotation DP needs circle rotations only")
    inexact = [m for m in system.maps if not m.exact]
    if inexact:
        tags = {(m.param, m.radius) for m in system.maps}
        if len(tags) != 1 or next(iter(tags))[0] is None:
            raise ValueError("offset differences are not known exactly (independent enclosures)")
    base = system.maps[0].offset
    diffs = [mod1(m.offset - base) for m in system.maps]
    q = 1
    for d in diffs:
        q = q * d.denominator // math.gcd(q, d.denominator)
    return q, [int(d * q) % q for d in diffs]


def rotation_dp_shadowing(
    system: IFSystem,
    pseudo: PseudoOrbit,
    eps,
    horizon: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> VerificationOutcome:
    """Shadowing for commuting rotations by dynamic programming.

    The position after ``n`` steps is ``y_0 + n b_1 + (sum of offset differences)``
    and the sum only matters modulo ``1/q``.  States ``(n, residue)`` carry the
    exact set of admissible current points, so the branching collapses to at
    most ``q`` states per index.
    """
    eps = _check_inputs(system, pseudo, eps)
    horizon = pseudo.length if horizon is None else horizon
    if not 0 <= horizon <= pseudo.length:
        raise ValueError("horizon exceeds the pseudo-orbit")
    q, res = rotation_residues(system)
    kind = CIRCLE
    rad = system.maps[0].radius if not system.exact else ZERO
    offsets = [m.offset for m in system.maps]
    symbols = system.symbols
    nodes = 0

    def run(sign: int):
        """Returns (layers, first empty index | -1 if alive | None on budget)."""
        nonlocal nodes
        cons = [
            _ball_or_empty(kind, x, eps + sign * (n * rad + x.radius))
            for n, x in enumerate(pseudo.points[: horizon + 1])
        ]
        layers: list[dict[int, ArcSet]] = [{0: cons[0]} if cons[0] else {}]
        for n in range(horizon):
            if not layers[n]:
                return layers, n
            nxt: dict[int, ArcSet] = {}
            for r, s in sorted(layers[n].items()):
                if nodes >= budget:
                    return layers, None
                nodes += 1
                for i, off in enumerate(offsets):
                    img = s.translate(off) & cons[n + 1]
                    if img:
                        r2 = (r + res[i]) % q
                        nxt[r2] = nxt[r2] | img if r2 in nxt else img
            layers.append(nxt)
        return layers, (-1 if layers[horizon] else horizon)

    def certify(layers) -> VerificationOutcome:
        r = min(layers[-1])
        t = layers[-1][r]
        word = []
        for n in range(horizon, 0, -1):
            for i, sym in enumerate(symbols):
                rp = (r - res[i]) % q
                prev = layers[n - 1].get(rp)
                if prev is None:
                    continue
                cand = t.translate(-offsets[i]) & prev
                if cand:
                    word.append(sym)
                    t, r = cand, rp
                    break
            else:
                raise RuntimeError("DP backtracking lost the surviving state")
        word.reverse()
        cert = orbit(system, SymbolWord(tuple(word)), system.point(t.midpoint()), horizon)
        if not revalidate_shadowing(system, pseudo, eps, cert):
            raise RuntimeError("DP certificate failed independent re-validation")
        return VerificationOutcome(Verdict.CERTIFIED, SHADOWING, ROTATION_DP, horizon, eps, cert, nodes)

    def outcome(verdict, dead_at=None):
        return VerificationOutcome(verdict, SHADOWING, ROTATION_DP, horizon, eps, None, nodes, refuted_at=dead_at)

    exact = _is_exact(system, pseudo)
    layers, dead = run(+1)
    if dead is None:
        return outcome(Verdict.INCONCLUSIVE)
    if dead != -1:
        return outcome(Verdict.REFUTED, dead)
    if not exact:
        layers, dead = run(-1)
        if dead != -1:
            return outcome(Verdict.INCONCLUSIVE)
    return certify(layers)


# ---------------------------------------------------------------------------
# Distinct perturbation and truncation covers
# ---------------------------------------------------------------------------


def distinct_perturbation(system: IFSystem, pseudo: PseudoOrbit, eps) -> PseudoOrbit:
    """Pairwise-distinct ``2δ``-pseudo-orbit close to ``pseudo``.

    Each point moves by a multiple of ``rho = bound / (4 (N + 1))`` where
    ``bound = min(eps, δ/2, δ/(2L))`` and ``L`` is the largest Lipschitz
    constant, so ``d(f(y_i), y_{i+1}) < δ/8 + δ + δ/8 < 2δ``.  Candidates are
    tried in the order ``0, +rho, -rho, +2rho, ...``; at most ``N`` earlier
    points can collide, so a free candidate always exists.
    """
    eps = as_fraction(eps)
    delta = pseudo.delta
    if delta <= 0 or eps <= 0:
        raise ValueError("need positive delta and eps")
    kind = system.kind
    n_pts = len(pseudo.points)
    lip = max(m.lipschitz_upper for m in system.maps)
    bound = min(eps, delta / 2, delta / (2 * lip))
    rho = bound / (4 * n_pts)
    taken: set[Fraction] = set()
    out: list[Point] = []
    for x in pseudo.points:
        for k in range(0, n_pts + 2):
            cands = (k * rho,) if k == 0 else (k * rho, -k * rho)
            chosen = None
            for off in cands:
                c = x.coord + off
                if kind == CIRCLE:
                    c = mod1(c)
                elif not ZERO <= c <= ONE:
                    continue
                if c not in taken:
                    chosen = c
                    break
            if chosen is not None:
                break
        else:
            raise RuntimeError("no free perturbation candidate")
        taken.add(chosen)
        out.append(Point(chosen, kind, x.radius))
    y = PseudoOrbit(tuple(out), 2 * delta, pseudo.witness, pseudo.index_offset)
    if not witness_valid(system, y.points, y.witness, y.delta):
        raise RuntimeError("perturbed sequence is not a 2δ-pseudo-orbit")
    return y


@dataclass(frozen=True)
class EventuallyPeriodic:
    """Sequence ``head[0], head[1], ..., cycle[0], cycle[1], ..., cycle[0], ...``."""

    head: tuple[Fraction, ...]
    cycle: tuple[Fraction, ...]
    kind: str = CIRCLE

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("cycle must be non-empty")
        object.__setattr__(self, "head", tuple(as_fraction(x) for x in self.head))
        object.__setattr__(self, "cycle", tuple(as_fraction(x) for x in self.cycle))

    def __getitem__(self, i: int) -> Fraction:
        if i < len(self.head):
            return self.head[i]
        return self.cycle[(i - len(self.head)) % len(self.cycle)]

    @property
    def span(self) -> int:
        """Number of leading terms that already contain every value."""
        return len(self.head) + len(self.cycle)


@dataclass(frozen=True)
class RotationOrbit:
    """Orbit ``x0 + n*b`` of a rotation whose number ``b`` lies in ``[lo, hi]``."""

    x0: Fraction
    lo: Fraction
    hi: Fraction


def periodic_orbit(system: IFSystem, word: SymbolWord, x0, max_steps: int = 10**5) -> EventuallyPeriodic:
    """Detect the eventual period of an exact orbit driven by an eventually periodic word."""
    if word.cycle is None:
        raise ValueError("word must be eventually periodic")
    if not system.exact:
        raise ValueError("periodic detection needs exact maps")
    x = x0 if isinstance(x0, Point) else system.point(x0)
    h, c = len(word.head), len(word.cycle)
    seen: dict[tuple[Fraction, int], int] = {}
    pts: list[Fraction] = []
    for i in range(max_steps):
        phase = i - h if i < h else (i - h) % c
        key = (x.coord, phase if i >= h else -1 - i)
        if key in seen:
            j = seen[key]
            return EventuallyPeriodic(tuple(pts[:j]), tuple(pts[j:]), system.kind)
        seen[key] = i
        pts.append(x.coord)
        x = apply(system, word[i], x)
    raise ValueError("no period found within max_steps")


def _covered(kind: str, pts: Sequence[Fraction], values, eps: Fraction) -> bool:
    return all(any(coord_dist(kind, p, v) < eps for p in pts) for v in values)


def truncation_cover(sequence, eps, max_steps: int = 10**6) -> int:
    """Least ``k`` with every term within ``eps`` (strictly) of the first ``k + 1`` terms.

    Eventually periodic sequences are decided exactly from one full cycle.  For
    an irrational rotation orbit the closure is the whole circle, so ``k`` is
    the first index where every gap of the visited set is below ``2*eps``;
    enclosures must be tight enough to decide that comparison.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(sequence, EventuallyPeriodic):
        values = set(sequence.head) | set(sequence.cycle)
        kind = sequence.kind
        near: dict[Fraction, bool] = {v: False for v in values}
        for k in range(sequence.span):
            p = sequence[k]
            for v in values:
                if not near[v] and coord_dist(kind, p, v) < eps:
                    near[v] = True
            if all(near.values()):
                return k
        raise AssertionError("a full cycle always covers its own values")
    if isinstance(sequence, RotationOrbit):
        return _rotation_cover(sequence, eps, max_steps)
    raise TypeError("only finitely representable sequences are accepted")


def _rotation_cover(seq: RotationOrbit, eps: Fraction, max_steps: int) -> int:
    # positions x0 + n*b are enclosed in [x0 + n lo, x0 + n hi]
    from bisect import insort

    mid = (seq.lo + seq.hi) / 2
    rad = (seq.hi - seq.lo) / 2
    pts: list[Fraction] = []
    target = 2 * eps
    prev_ambiguous = False
    for k in range(max_steps):
        insort(pts, mod1(seq.x0 + k * mid))
        slack = 2 * k * rad
        gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + 1 - pts[-1]]
        g = max(gaps)
        if g + slack < target:
            if prev_ambiguous:
                raise ValueError("enclosure too wide to decide the cover index")
            return k
        prev_ambiguous = g - slack < target
    raise ValueError("cover index exceeds max_steps")
