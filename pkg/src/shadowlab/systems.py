"""Ready-made systems used by the CLI, the tests and the experiments."""

from __future__ import annotations

import math
from fractions import Fraction

from .ifs import IFSystem, MapSpec
from .space import CIRCLE, INTERVAL, as_fraction


def golden_enclosure(bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rigorous rational bounds on ``(sqrt(5) - 1) / 2`` of width ``2**-(bits+1)``."""
    scale = 1 << bits
    s = math.isqrt(5 * scale * scale)  # s <= sqrt(5)*2^bits < s + 1
    return Fraction(s - scale, 2 * scale), Fraction(s + 1 - scale, 2 * scale)


def cantor() -> IFSystem:
    third = Fraction(1, 3)
    return IFSystem.build(
        INTERVAL,
        {"1": MapSpec.affine(INTERVAL, third, 0), "2": MapSpec.affine(INTERVAL, third, Fraction(2, 3))},
        name="cantor",
    )


def doubling() -> IFSystem:
    return IFSystem.build(CIRCLE, {"1": MapSpec.affine(CIRCLE, 2, 0)}, name="doubling")


def doubling_pair() -> IFSystem:
    """``{2x, 2x + 1/2} mod 1``: uniformly expanding, both maps onto."""
    return IFSystem.build(
        CIRCLE,
        {"1": MapSpec.affine(CIRCLE, 2, 0), "2": MapSpec.affine(CIRCLE, 2, Fraction(1, 2))},
        name="doubling-pair",
    )


def rotations(*offsets, name: str = "rotations") -> IFSystem:
    return IFSystem.build(CIRCLE, [MapSpec.rotation(as_fraction(t)) for t in offsets], name=name)


def identity(kind: str = CIRCLE) -> IFSystem:
    return IFSystem.build(kind, {"1": MapSpec.affine(kind, 1, 0)}, name="identity")


def two_rotations(bits: int = 64, shift=Fraction(1, 2)) -> IFSystem:
    """Rotations by ``b`` and ``b + shift`` with ``b`` the golden-mean conjugate.

    Both maps share the enclosure parameter ``"beta"``, so the difference of
    their rotation numbers is exactly ``shift``.
    """
    lo, hi = golden_enclosure(bits)
    return IFSystem.build(
        CIRCLE,
        {
            "1": MapSpec.enclosed_rotation(lo, hi, 0, param="beta"),
            "2": MapSpec.enclosed_rotation(lo, hi, as_fraction(shift), param="beta"),
        },
        name="two-rotations",
    )


def golden_rotation(bits: int = 64) -> IFSystem:
    lo, hi = golden_enclosure(bits)
    return IFSystem.build(CIRCLE, {"1": MapSpec.enclosed_rotation(lo, hi, 0, param="beta")}, name="golden")
