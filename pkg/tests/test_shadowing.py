from __future__ import annotations

import random
from fractions import Fraction as F
from itertools import product

import pytest
from oracles import brute_shadowing, brute_weak, scan_cover_index

from shadowlab import systems
from shadowlab.ifs import MapSpec, PseudoOrbit, SymbolWord, make_pseudo_orbit_from_generator, orbit, pseudo_orbit, random_pseudo_orbit
from shadowlab.shadowing import (
    EXACT,
    ROTATION_DP,
    EventuallyPeriodic,
    RotationOrbit,
    Verdict,
    check_shadowing,
    check_weak_shadowing,
    distinct_perturbation,
    periodic_orbit,
    revalidate_shadowing,
    revalidate_weak,
    rotation_dp_shadowing,
    rotation_residues,
    truncation_cover,
)
from shadowlab.space import CIRCLE, INTERVAL, Point, coord_dist
from shadowlab.systems import golden_enclosure


def golden_pseudo(alpha=F(619, 1000), delta=F(1, 1000), n=500):
    sys_ = systems.two_rotations()
    return sys_, make_pseudo_orbit_from_generator(sys_, MapSpec.rotation(alpha), F(0), n, delta)


def test_exact_orbit_certifies_itself():
    sys_ = systems.doubling_pair()
    seg = orbit(sys_, SymbolWord.of("1212211"), F(1, 7), 7)
    po = pseudo_orbit(sys_, seg.points, F(1, 100))
    out = check_shadowing(sys_, po, F(1, 10))
    assert out.certified and out.proof_method == EXACT
    assert revalidate_shadowing(sys_, po, F(1, 10), out.certificate)


def test_cantor_contraction_example():
    cantor = systems.cantor()
    po = random_pseudo_orbit(cantor, 50, F(1, 30), random.Random(11))
    out = check_shadowing(cantor, po, F(1, 20))
    assert out.certified and out.horizon == 50


def test_cantor_contraction_grid_crosscheck():
    # delta <= eps (1 - beta): following the witness word from some point of a
    # 1e-3 grid already shadows, as the telescoping estimate predicts
    cantor = systems.cantor()
    eps = F(1, 20)
    coeff = {"1": F(0), "2": F(2, 3)}
    for seed in range(5):
        po = random_pseudo_orbit(cantor, 8, eps * F(2, 3), random.Random(seed))
        xs, word = po.coords(), po.witness.head

        def shadows(y):
            for n, x in enumerate(xs):
                if abs(y - x) > eps:
                    return False
                if n < len(word):
                    y = y / 3 + coeff[word[n]]
            return True

        assert any(shadows(F(i, 1000)) for i in range(1001))
        assert check_shadowing(cantor, po, eps).certified


def test_counterexample_refuted_by_both_searches():
    sys_, po = golden_pseudo()
    dp = rotation_dp_shadowing(sys_, po, F(1, 5))
    br = check_shadowing(sys_, po, F(1, 5))
    assert dp.refuted and br.refuted
    assert dp.refuted_at == br.refuted_at
    assert dp.proof_method == ROTATION_DP


def test_counterexample_weak_certified_with_first_map():
    sys_, po = golden_pseudo()
    out = check_weak_shadowing(sys_, po, F(1, 5), horizon=100)
    assert out.certified
    assert set(out.certificate.word.head) == {"1"}
    assert revalidate_weak(sys_, po, F(1, 5), out.certificate)


def test_dp_node_count_at_short_horizon():
    # at eps = 1/5 at most one branch survives each step, so pruning keeps the
    # branching search as small as the DP; both certify at this horizon
    sys_, po = golden_pseudo()
    dp = rotation_dp_shadowing(sys_, po, F(1, 5), horizon=63)
    br = check_shadowing(sys_, po, F(1, 5), horizon=63)
    assert dp.verdict == br.verdict == Verdict.CERTIFIED
    assert dp.budget_spent <= 2 * 63


def test_weak_refuted_example():
    rot = systems.rotations(F(1, 2))
    po = PseudoOrbit((Point(F(0)), Point(F(69, 100))), F(1, 5), SymbolWord.of("1"))
    assert check_weak_shadowing(rot, po, F(1, 20), horizon=2).refuted


def test_weak_whole_space_certifies():
    sys_ = systems.doubling_pair()
    po = pseudo_orbit(sys_, [F(0), F(1, 2)], F(1, 100))
    out = check_weak_shadowing(sys_, po, F(1, 2), horizon=30)
    assert out.certified


def test_dp_residues():
    assert rotation_residues(systems.two_rotations())[0] == 2
    assert rotation_residues(systems.rotations(F(1, 3)))[0] == 1
    with pytest.raises(ValueError):
        rotation_residues(systems.doubling_pair())
    lo, hi = golden_enclosure(64)
    indep = systems.IFSystem.build(CIRCLE, [MapSpec.enclosed_rotation(lo, hi), MapSpec.enclosed_rotation(lo, hi, F(1, 2))])
    with pytest.raises(ValueError):
        rotation_residues(indep)


def test_dp_single_rotation_is_plain_propagation():
    rot = systems.rotations(F(1, 5))
    po = random_pseudo_orbit(rot, 12, F(1, 50), random.Random(3))
    for eps in (F(1, 100), F(1, 20), F(1, 5)):
        assert rotation_dp_shadowing(rot, po, eps).verdict == check_shadowing(rot, po, eps).verdict


@pytest.mark.parametrize("seed", range(12))
def test_dp_agrees_with_branching(seed):
    rng = random.Random(seed)
    a = F(rng.randrange(1, 60), 60)
    sys_ = systems.rotations(a, a + F(1, 2))
    po = random_pseudo_orbit(sys_, rng.randint(2, 12), F(rng.randint(5, 80), 1000), rng, grid=1000)
    eps = po.delta * F(rng.randint(3, 30), 10)
    assert rotation_dp_shadowing(sys_, po, eps).verdict == check_shadowing(sys_, po, eps).verdict


@pytest.mark.parametrize("seed", range(6))
def test_verifiers_match_brute_force(seed):
    rng = random.Random(100 + seed)
    sys_ = [systems.cantor(), systems.rotations(F(1, 3), F(5, 6)), systems.doubling_pair()][seed % 3]
    h = 4
    po = random_pseudo_orbit(sys_, h, F(rng.randint(10, 80), 1000), rng, grid=1000)
    eps = po.delta * F(rng.randint(4, 20), 10)
    assert check_shadowing(sys_, po, eps).certified == brute_shadowing(sys_, po.coords(), eps, h)
    assert check_weak_shadowing(sys_, po, eps).certified == brute_weak(sys_, po.coords(), eps, h)


@pytest.mark.parametrize("seed", range(8))
def test_eps_monotonicity_and_shadowing_implies_weak(seed):
    rng = random.Random(seed)
    sys_ = [systems.cantor(), systems.doubling_pair()][seed % 2]
    po = random_pseudo_orbit(sys_, 10, F(1, 50), rng)
    verdicts = []
    for eps in (F(1, 200), F(1, 100), F(1, 50), F(1, 25), F(1, 10)):
        out = check_shadowing(sys_, po, eps)
        verdicts.append(out.certified)
        if out.certified:
            weak = check_weak_shadowing(sys_, po, eps)
            assert weak.certified
            assert revalidate_weak(sys_, po, eps, out.certificate)
    assert verdicts == sorted(verdicts)


def test_budget_exhaustion_is_inconclusive():
    sys_ = systems.doubling_pair()
    po = random_pseudo_orbit(sys_, 20, F(1, 100), random.Random(1))
    out = check_shadowing(sys_, po, F(1, 10), budget=3)
    assert out.verdict == Verdict.INCONCLUSIVE


def test_verdict_json_fields():
    sys_, po = golden_pseudo()
    data = rotation_dp_shadowing(sys_, po, F(1, 5)).to_json()
    assert list(data)[:7] == ["verdict", "property", "method", "horizon", "epsilon", "certificate", "nodes"]
    assert data["epsilon"] == "1/5"


def test_distinct_perturbation_repeated_points():
    ident = systems.identity()
    po = pseudo_orbit(ident, [F(1, 3)] * 6, F(1, 50))
    y = distinct_perturbation(ident, po, F(1, 10))
    coords = y.coords()
    assert len(set(coords)) == len(coords)
    assert y.delta == F(1, 25)
    assert all(coord_dist(CIRCLE, a, b) < F(1, 100) for a, b in zip(coords, po.coords()))


def test_distinct_perturbation_keeps_distinct_input():
    cantor = systems.cantor()
    po = random_pseudo_orbit(cantor, 15, F(1, 20), random.Random(2))
    y = distinct_perturbation(cantor, po, F(1, 10))
    assert len(set(y.coords())) == len(y.points)
    assert all(abs(a - b) < po.delta / 2 for a, b in zip(y.coords(), po.coords()))


def test_truncation_cover_examples():
    rot3 = systems.rotations(F(1, 3))
    seq = periodic_orbit(rot3, SymbolWord.constant("1"), F(0))
    assert seq.cycle == (0, F(1, 3), F(2, 3))
    assert truncation_cover(seq, F(1, 10)) == 2
    assert truncation_cover(EventuallyPeriodic((), (F(2, 5),)), F(1, 1000)) == 0
    rot = systems.rotations(F(13, 21))
    seq = periodic_orbit(rot, SymbolWord.constant("1"), F(0))
    assert len(seq.cycle) == 21
    k = truncation_cover(seq, F(1, 5))
    assert k == scan_cover_index(lambda i: seq[i], F(1, 5), CIRCLE, seq.span)


def test_truncation_cover_interval_head():
    seq = EventuallyPeriodic((F(1), F(1, 2)), (F(0),), INTERVAL)
    assert truncation_cover(seq, F(1, 2)) == 2
    assert truncation_cover(seq, F(3, 5)) == 1
    # contracting orbits converge without ever repeating
    with pytest.raises(ValueError):
        periodic_orbit(systems.cantor(), SymbolWord((), ("1",)), F(1), max_steps=50)


def test_truncation_cover_irrational_rotation():
    lo, hi = golden_enclosure(64)
    k = truncation_cover(RotationOrbit(F(0), lo, hi), F(1, 20))
    mid = (lo + hi) / 2
    pts = sorted((i * mid) % 1 for i in range(k + 1))
    gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + 1 - pts[-1]]
    assert max(gaps) < F(1, 10)
    pts = sorted((i * mid) % 1 for i in range(k))
    gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + 1 - pts[-1]]
    assert max(gaps) >= F(1, 10)


@pytest.mark.parametrize("seed", range(40))
def test_viable_cut_matches_plain_search(seed):
    # the viable-set cut must not change the verdict, the first surviving word
    # or the depth at which every branch dies
    from shadowlab.shadowing import _branch_search
    from shadowlab.space import ball, union_all

    rng = random.Random(seed)
    sys_ = [systems.cantor(), systems.doubling_pair(), systems.rotations(F(1, 3), F(5, 6)), systems.doubling()][seed % 4]
    po = random_pseudo_orbit(sys_, rng.randint(2, 14), F(rng.randint(5, 80), 1000), rng, grid=1000)
    eps = po.delta * F(rng.randint(3, 30), 10)
    U = union_all(sys_.kind, [ball(sys_.kind, c, eps) for c in set(po.coords())])
    for cons in ([ball(sys_.kind, x, eps) for x in po.coords()], [U] * (po.length + 1)):
        a = _branch_search(sys_, cons, 10**6, False)
        b = _branch_search(sys_, cons, 10**6, True, _summarize=True)
        assert a.status == b.status
        assert (a.leaf and a.leaf.word()) == (b.leaf and b.leaf.word())
        if a.status == "dead":
            assert a.deepest == b.deepest
