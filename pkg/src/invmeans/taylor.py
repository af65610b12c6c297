"""Diagonal Taylor data of invariant means, exact in rational arithmetic.

For a homogeneous symmetric invariant mean, every partial derivative at the
center (1, 1, 1) through fourth order is determined by two numbers: the
second and fourth derivatives at 1 of the base mean's section f(x) = m(1, x).
This module assembles those partials (one representative per permutation
class), builds the Taylor polynomials of orders 2 through 4, and evaluates
the two scalar constraints that type-2 invariance imposes on the same data.

Coefficients are kept as exact fractions end to end and only converted to
floating point inside polynomial evaluation, so coefficient-level assertions
can be exact.

The cube coefficient in the cross fourth-order partial is -64/135.  The
closed-form chain that produces it can also be (mis)multiplied to -64/35,
which breaks the fourth-order permutation identity
m_xxxx + 8 m_xxxy + 6 m_xxyy + 12 m_xxyz = 0 and disagrees with the directly
differentiated geometric mean; -64/135 satisfies both checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .core import DiagonalDerivatives2

__all__ = [
    "DiagonalPartials",
    "TaylorPolynomial",
    "XXXY_CUBE_COEFF",
    "partials_type1",
    "logmean_diagonal_data",
    "taylor_polynomial",
    "taylor_eval",
    "homogeneous_rescale_eval",
    "type2_constraint_f2",
    "both_types_mxxxy",
]

RationalLike = Union[int, float, Fraction]

#: Coefficient of f''(1)^3 in the cross fourth-order partial m_xxxy.
XXXY_CUBE_COEFF = Fraction(-64, 135)


@dataclass(frozen=True)
class DiagonalPartials:
    """Partial derivatives of a symmetric invariant mean at (1, 1, 1).

    One representative per permutation class; the remaining partials follow
    by symmetry of the mixed indices at the diagonal.
    """

    m_x: Fraction
    m_xx: Fraction
    m_xy: Fraction
    m_xxx: Fraction
    m_xxy: Fraction
    m_xyz: Fraction
    m_xxxx: Fraction
    m_xxxy: Fraction
    m_xxyy: Fraction
    m_xxyz: Fraction

    def __post_init__(self) -> None:
        # The permutation identities hold by construction; re-assert them so
        # hand-built instances cannot smuggle in an inconsistent set.
        if self.m_x != Fraction(1, 3):
            raise ValueError("first-order partial at the center must be 1/3")
        if self.m_xy != -self.m_xx / 2:
            raise ValueError("m_xy must equal -m_xx/2")
        if self.m_xyz != -(self.m_xxx + 6 * self.m_xxy) / 2:
            raise ValueError("m_xyz must equal -(m_xxx + 6 m_xxy)/2")
        if self.m_xxxx + 8 * self.m_xxxy + 6 * self.m_xxyy + 12 * self.m_xxyz != 0:
            raise ValueError("fourth-order permutation identity violated")
        # Homogeneity relations at unit scale.
        if self.m_xx != -(self.m_xxx + 2 * self.m_xxy):
            raise ValueError("homogeneity relation for m_xx violated")
        if self.m_xyz != Fraction(-3, 2) * self.m_xxyz:
            raise ValueError("homogeneity relation for m_xyz violated")


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value)  # floats convert exactly (dyadic rationals)


def partials_type1(f2: RationalLike, f4: RationalLike) -> DiagonalPartials:
    """Diagonal partials of the type-1 invariant mean from f''(1), f''''(1).

    Exact when the inputs are exact; pass fractions for rational results.
    """
    f2 = _as_fraction(f2)
    f4 = _as_fraction(f4)
    m_xx = Fraction(8, 9) * f2
    m_xy = Fraction(-4, 9) * f2
    m_xxx = Fraction(32, 27) * (f2 ** 2 - f2)
    m_xxy = Fraction(-4, 27) * (4 * f2 ** 2 - f2)
    m_xyz = Fraction(4, 27) * (8 * f2 ** 2 + f2)
    m_xxxy = (
        Fraction(-16, 45) * f4
        + XXXY_CUBE_COEFF * f2 ** 3
        + Fraction(448, 405) * f2 ** 2
        + Fraction(464, 405) * f2
    )
    m_xxxx = -2 * m_xxxy - 2 * m_xxx
    m_xxyy = -m_xxxy - 2 * m_xxy + Fraction(2, 3) * m_xyz
    m_xxyz = Fraction(-2, 3) * m_xyz
    return DiagonalPartials(
        m_x=Fraction(1, 3),
        m_xx=m_xx,
        m_xy=m_xy,
        m_xxx=m_xxx,
        m_xxy=m_xxy,
        m_xyz=m_xyz,
        m_xxxx=m_xxxx,
        m_xxxy=m_xxxy,
        m_xxyy=m_xxyy,
        m_xxyz=m_xxyz,
    )


def logmean_diagonal_data() -> DiagonalDerivatives2:
    """Section data of the logarithmic mean: f''(1) = -1/6, f''''(1) = -19/30.

    These are the Taylor coefficients of t/log(1+t) at 0,
    1 + t/2 - t^2/12 + t^3/24 - 19 t^4/720, scaled by the factorials.
    """
    return DiagonalDerivatives2(d2=Fraction(-1, 6), d4=Fraction(-19, 30))


@dataclass(frozen=True)
class TaylorPolynomial:
    """Truncated diagonal expansion of an invariant mean about (1, 1, 1)."""

    order: int
    partials: DiagonalPartials
    center: Tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self) -> None:
        if self.order not in (2, 3, 4):
            raise ValueError("order must be 2, 3 or 4")

    def coefficient(self, multi_index: Sequence[int]) -> Fraction:
        """Exact polynomial coefficient of prod (x_i - 1)^k_i."""
        key = tuple(sorted((int(k) for k in multi_index), reverse=True))
        table = {
            (0, 0, 0): Fraction(1),
            (1, 0, 0): self.partials.m_x,
            (2, 0, 0): self.partials.m_xx / 2,
            (1, 1, 0): self.partials.m_xy,
            (3, 0, 0): self.partials.m_xxx / 6,
            (2, 1, 0): self.partials.m_xxy / 2,
            (1, 1, 1): self.partials.m_xyz,
            (4, 0, 0): self.partials.m_xxxx / 24,
            (3, 1, 0): self.partials.m_xxxy / 6,
            (2, 2, 0): self.partials.m_xxyy / 4,
            (2, 1, 1): self.partials.m_xxyz / 2,
        }
        if key not in table:
            raise ValueError(f"unsupported multi-index {multi_index!r}")
        if sum(key) > self.order:
            return Fraction(0)
        return table[key]


def taylor_polynomial(f2: RationalLike, f4: RationalLike, order: int) -> TaylorPolynomial:
    """Convenience constructor: partials from section data, then truncate."""
    return TaylorPolynomial(order=order, partials=partials_type1(f2, f4))


def taylor_eval(poly: TaylorPolynomial, point: Sequence[float]) -> float:
    """Evaluate the truncated expansion at a point (floating point)."""
    x, y, z = (float(v) for v in point)
    dx, dy, dz = x - 1.0, y - 1.0, z - 1.0
    P = poly.partials
    total = 1.0 + float(P.m_x) * (dx + dy + dz)
    total += float(P.m_xx) / 2.0 * (dx * dx + dy * dy + dz * dz)
    total += float(P.m_xy) * (dx * dy + dx * dz + dy * dz)
    if poly.order >= 3:
        total += float(P.m_xxx) / 6.0 * (dx ** 3 + dy ** 3 + dz ** 3)
        total += float(P.m_xxy) / 2.0 * (
            dx * dx * (dy + dz) + dy * dy * (dx + dz) + dz * dz * (dx + dy)
        )
        total += float(P.m_xyz) * dx * dy * dz
    if poly.order >= 4:
        total += float(P.m_xxxx) / 24.0 * (dx ** 4 + dy ** 4 + dz ** 4)
        total += float(P.m_xxxy) / 6.0 * (
            dx ** 3 * (dy + dz) + dy ** 3 * (dx + dz) + dz ** 3 * (dx + dy)
        )
        total += float(P.m_xxyy) / 4.0 * (
            dx * dx * dy * dy + dx * dx * dz * dz + dy * dy * dz * dz
        )
        total += float(P.m_xxyz) / 2.0 * (
            dx * dx * dy * dz + dy * dy * dx * dz + dz * dz * dx * dy
        )
    return total


def homogeneous_rescale_eval(poly: TaylorPolynomial, point: Sequence[float]) -> float:
    """Evaluate by first rescaling the point so its average sits at the center.

    Valid when the expanded mean is homogeneous; the expansion is then read
    off closest to its center, where the truncation error is smallest.
    """
    a, b, c = (float(v) for v in point)
    k = 3.0 / (a + b + c)
    return taylor_eval(poly, (k * a, k * b, k * c)) / k


def type2_constraint_f2(partials: DiagonalPartials) -> Fraction:
    """Section second derivative forced on any type-2 partner: (9/8) m_xx."""
    return Fraction(9, 8) * partials.m_xx


def both_types_mxxxy(f2: RationalLike, f4: RationalLike) -> Fraction:
    """m_xxxy forced when one mean is invariant in both senses for the same base.

    Differs in general from the type-1 value produced by
    :func:`partials_type1`; a nonzero difference rules out joint invariance
    for that base mean.
    """
    f2 = _as_fraction(f2)
    f4 = _as_fraction(f4)
    return Fraction(-8, 9) * (
        Fraction(2, 3) * f4
        + Fraction(8, 3) * f2 ** 3
        - Fraction(4, 9) * f2 ** 2
        - Fraction(20, 9) * f2
    )
