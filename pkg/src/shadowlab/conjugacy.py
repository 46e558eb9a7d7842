"""Conjugating systems by PL homeomorphisms and transporting verdicts.

If ``g_λ = h ∘ f_λ ∘ h⁻¹`` then pseudo-orbits, tolerances and certificates
move between ``F`` and ``G`` through ``h`` with explicit moduli.  For PL maps
the moduli are slope bounds: ``d(a, b) < eps / L`` gives ``d(h a, h b) < eps``
when ``L`` bounds the slopes of ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .homogeneity import Homeomorphism
from .ifs import IFSystem, MapSpec, OrbitSegment, PseudoOrbit, witness_valid
from .shadowing import (
    DEFAULT_BUDGET,
    SHADOWING,
    WEAK,
    Verdict,
    VerificationOutcome,
    check_shadowing,
    check_weak_shadowing,
    revalidate_shadowing,
    revalidate_weak,
)
from .space import as_fraction


class ConjugacyError(ValueError):
    pass


@dataclass(frozen=True)
class ConjugacyMap:
    h: Homeomorphism

    @property
    def kind(self) -> str:
        return self.h.kind

    @property
    def lipschitz(self) -> Fraction:
        return self.h.lipschitz

    @property
    def inverse_lipschitz(self) -> Fraction:
        return self.h.inverse_lipschitz

    def modulus_fwd(self, eps) -> Fraction:
        """``t`` with ``d(a, b) < t  =>  d(h a, h b) < eps``."""
        return as_fraction(eps) / self.lipschitz

    def modulus_inv(self, t) -> Fraction:
        """``s`` with ``d(a, b) < s  =>  d(h⁻¹ a, h⁻¹ b) < t``."""
        return as_fraction(t) / self.inverse_lipschitz

    def inverse(self) -> "ConjugacyMap":
        return ConjugacyMap(self.h.inverse())

    def to_json(self) -> dict:
        return self.h.to_json()

    @classmethod
    def from_json(cls, data: dict) -> "ConjugacyMap":
        try:
            return cls(Homeomorphism.from_json(data))
        except (ValueError, TypeError, KeyError) as exc:
            raise ConjugacyError(f"invalid conjugacy descriptor: {exc}") from exc

    @classmethod
    def identity(cls, kind: str) -> "ConjugacyMap":
        return cls(Homeomorphism.identity(kind))

    @classmethod
    def rotation(cls, t) -> "ConjugacyMap":
        return cls(Homeomorphism.rotation(t))

    @classmethod
    def reflection(cls, kind: str) -> "ConjugacyMap":
        return cls(Homeomorphism.reflection(kind))


def _flip(param: str | None) -> str | None:
    if param is None:
        return None
    return param[1:] if param.startswith("-") else "-" + param


def conjugate_map(f: MapSpec, c: ConjugacyMap) -> MapSpec:
    h = c.h
    nominal = h.pl.compose(f.nominal).compose(h.inverse().pl)
    if h.is_isometry:
        # h(F(h⁻¹x) + e) = hFh⁻¹(x) ± e, so the shared unknown survives
        param = f.param if h.orientation > 0 else _flip(f.param)
        return MapSpec(nominal, f.radius, param)
    return MapSpec(nominal, h.lipschitz * f.radius, None if f.radius else f.param)


def conjugate(F: IFSystem, c: ConjugacyMap) -> IFSystem:
    """``G = {h ∘ f_λ ∘ h⁻¹}`` by exact PL composition."""
    if c.kind != F.kind:
        raise ConjugacyError("space mismatch between system and conjugacy")
    return F.with_maps([conjugate_map(f, c) for f in F.maps])


def transport_moduli(c: ConjugacyMap, eps) -> tuple[Fraction, Callable[[Fraction], Fraction]]:
    """``(eps1, delta1 -> delta)`` for moving a question about ``G`` to ``F``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return c.modulus_fwd(eps), c.modulus_inv


def _same_system(G: IFSystem, expected: IFSystem) -> bool:
    if G.symbols != expected.symbols or G.kind != expected.kind:
        return False
    return all(g.nominal == e.nominal and g.radius >= e.radius for g, e in zip(G.maps, expected.maps))


def pull_back(pseudo: PseudoOrbit, c: ConjugacyMap) -> PseudoOrbit:
    """``x' = h⁻¹(x)`` with the tolerance widened by the inverse slope bound."""
    inv = c.h.inverse()
    pts = tuple(inv.point(p) for p in pseudo.points)
    return PseudoOrbit(pts, c.inverse_lipschitz * pseudo.delta, pseudo.witness, pseudo.index_offset)


def push_forward(cert: OrbitSegment, c: ConjugacyMap) -> OrbitSegment:
    return OrbitSegment(tuple(c.h.point(p) for p in cert.points), cert.word)


def transport_verdict(
    F: IFSystem,
    G: IFSystem,
    c: ConjugacyMap,
    pseudo: PseudoOrbit,
    eps,
    kind: str = WEAK,
    budget: int = DEFAULT_BUDGET,
    horizon: int | None = None,
) -> VerificationOutcome:
    """Decide a question about ``G`` by solving the conjugate question on ``F``.

    The pseudo-orbit of ``G`` is pulled back through ``h⁻¹``, the verifier
    runs on ``F`` at ``eps1 = eps / L_h``, and a certificate is pushed forward
    through ``h`` and re-validated against ``G``.  A refutation on ``F`` at
    ``eps1`` refutes ``G`` at ``eps1 / L_{h⁻¹}``, which is the epsilon reported.
    """
    eps = as_fraction(eps)
    if not _same_system(G, conjugate(F, c)):
        raise ConjugacyError("G is not the conjugate of F by the given map")
    pulled = pull_back(pseudo, c)
    if not witness_valid(F, pulled.points, pulled.witness, pulled.delta):
        raise ConjugacyError("pulled-back sequence is not a pseudo-orbit of F")
    eps1, _ = transport_moduli(c, eps)
    if kind == WEAK:
        inner = check_weak_shadowing(F, pulled, eps1, budget=budget, horizon=horizon)
        revalidate = revalidate_weak
    elif kind == SHADOWING:
        inner = check_shadowing(F, pulled, eps1, budget=budget, horizon=horizon)
        revalidate = revalidate_shadowing
    else:
        raise ValueError(f"unknown property {kind!r}")
    method = f"transport/{inner.proof_method}"
    if inner.verdict == Verdict.CERTIFIED:
        cert = push_forward(inner.certificate, c)
        if not revalidate(G, pseudo, eps, cert):
            raise RuntimeError("transported certificate failed re-validation")
        return VerificationOutcome(
            Verdict.CERTIFIED, kind, method, inner.horizon, eps, cert, inner.budget_spent, inner.resolution
        )
    if inner.verdict == Verdict.REFUTED:
        return VerificationOutcome(
            Verdict.REFUTED,
            kind,
            method,
            inner.horizon,
            eps1 / c.inverse_lipschitz,
            None,
            inner.budget_spent,
            inner.resolution,
            inner.refuted_at,
        )
    return VerificationOutcome(
        inner.verdict, kind, method, inner.horizon, eps, None, inner.budget_spent, inner.resolution
    )


__all__ = [
    "ConjugacyError",
    "ConjugacyMap",
    "conjugate",
    "conjugate_map",
    "pull_back",
    "push_forward",
    "transport_moduli",
    "transport_verdict",
]
