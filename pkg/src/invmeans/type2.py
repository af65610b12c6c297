"""Type-2 invariance: the scalar fixed point M(a, b, z) = z and its partners.

Given a three-variable mean M, the iteration z -> M(a, b, z) started from any
symmetric seed mean converges monotonically onto a value m(a, b) with
M(a, b, m(a, b)) = m(a, b); the resulting function of (a, b) is itself a
symmetric mean, strict and strictly isotone whenever M is.  Going the other
way, any symmetric two-variable mean m extends to a symmetric three-variable
mean by feeding the median argument into a chosen weighting mean against m of
the outer pair.  The implicit derivative of the extracted partner follows
from the fixed-point relation as M_y / (1 - M_z).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional, Tuple

from .core import Mean2Descriptor, Mean3Descriptor, eval2, eval3, fd_partial, mean2
from .errors import ContractionViolation, NoConvergence, NonIsotoneM
from .type1 import ToleranceConfig

__all__ = [
    "FixedPointTrace",
    "EXTRACT_CONFIG",
    "extract_mean2",
    "check_type2",
    "symmetric_extension",
    "implicit_derivative",
]

_EPS = sys.float_info.epsilon

#: Default stopping rule for the scalar fixed point: the contraction factor
#: at the limit is below one, so successive differences shrink geometrically;
#: the cap turns a non-contracting M into a clean error.
EXTRACT_CONFIG = ToleranceConfig(rel_tol=1e-14, max_iter=500)


@dataclass(frozen=True)
class FixedPointTrace:
    """Recorded run of the scalar iteration z -> M(a, b, z).

    ``monotone_direction`` is "increasing", "decreasing" or "constant";
    ``contraction_at_limit`` is the z-partial of M at the fixed point and is
    below one whenever the extraction is well posed.
    """

    values: Tuple[float, ...]
    converged: bool
    iterations: int
    limit: float
    monotone_direction: str
    contraction_at_limit: float


def extract_mean2(M: Mean3Descriptor, a: float, b: float,
                  seed: Optional[Mean2Descriptor] = None,
                  cfg: ToleranceConfig = EXTRACT_CONFIG) -> FixedPointTrace:
    """Extract the type-2 partner value of M at (a, b) by fixed-point iteration.

    The seed mean supplies the starting value (arithmetic mean by default;
    the limit does not depend on it when M has a single-signed second
    z-derivative).  The trace must be monotone for isotone M; a genuine
    reversal raises NonIsotoneM, which signals a wrong isotone flag.
    """
    a = float(a)
    b = float(b)
    if seed is None:
        seed = mean2("A2")
    z = eval2(seed, a, b)
    values = [z]
    direction = 0  # +1 increasing, -1 decreasing, 0 undetermined
    converged = False
    noise = 8.0 * _EPS
    for _ in range(cfg.max_iter):
        z_next = eval3(M, a, b, z)
        values.append(z_next)
        delta = z_next - z
        if abs(delta) < cfg.rel_tol * abs(z):
            z = z_next
            converged = True
            break
        if direction == 0:
            direction = 1 if delta > 0 else -1
        elif (delta > noise * abs(z) and direction < 0) or (
                delta < -noise * abs(z) and direction > 0):
            raise NonIsotoneM(
                f"fixed-point trace for {M.id} at ({a}, {b}) reversed direction; "
                "the isotone flag looks wrong"
            )
        z = z_next
    if not converged:
        raise NoConvergence(
            f"fixed point of {M.id} at ({a}, {b}) not reached in {cfg.max_iter} iterations"
        )
    label = {1: "increasing", -1: "decreasing", 0: "constant"}[direction]
    contraction = fd_partial(M, (0, 0, 1), (a, b, z))
    return FixedPointTrace(
        values=tuple(values),
        converged=True,
        iterations=len(values) - 1,
        limit=z,
        monotone_direction=label,
        contraction_at_limit=contraction,
    )


def check_type2(M: Mean3Descriptor, m: Mean2Descriptor, a: float, b: float) -> float:
    """Signed type-2 residual M(a, b, m(a,b)) - m(a,b)."""
    value = eval2(m, a, b)
    return eval3(M, a, b, value) - value


def symmetric_extension(m: Mean2Descriptor, n: Mean2Descriptor) -> Mean3Descriptor:
    """Extend a symmetric two-variable mean m to three variables.

    The median argument is paired against m of the outer two through the
    weighting mean n (which need not be symmetric): the value is
    n(m(outer, outer), median).  The result is symmetric and continuous by
    construction, and satisfies the type-2 identity exactly because m(a, b)
    always lies between a and b.  Ties take the first matching ordering, so
    evaluation is deterministic; all orderings agree on ties anyway.
    """
    m_raw = m.evaluate
    n_raw = n.evaluate

    def m_of(x: float, y: float) -> float:
        return x if x == y else m_raw(x, y)

    def n_of(x: float, y: float) -> float:
        # ties are returned directly so the type-2 identity holds exactly:
        # the fixed-point argument always ties with m of the outer pair
        return x if x == y else n_raw(x, y)

    def evaluate(a: float, b: float, c: float) -> float:
        if a <= c <= b or b <= c <= a:
            return n_of(m_of(a, b), c)
        if a <= b <= c or c <= b <= a:
            return n_of(m_of(a, c), b)
        return n_of(m_of(c, b), a)

    return Mean3Descriptor(
        id=f"extend({m.id};{n.id})",
        evaluate=evaluate,
        symmetric=True,
        strict=m.strict and n.strict,
        isotone=False,
        homogeneous=m.homogeneous and n.homogeneous,
        analytic=False,
    )


def implicit_derivative(M: Mean3Descriptor, m: Mean2Descriptor, a: float, b: float,
                        residual_tol: float = 1e-8) -> float:
    """d/db of the type-2 partner, computed as M_y / (1 - M_z) at (a, b, m(a,b)).

    Requires the pair to actually satisfy the type-2 identity at (a, b) to
    within ``residual_tol`` (relative), and the contraction M_z < 1 that a
    well-posed extraction guarantees.
    """
    a = float(a)
    b = float(b)
    z = eval2(m, a, b)
    residual = eval3(M, a, b, z) - z
    if abs(residual) > residual_tol * abs(z):
        raise ValueError(
            f"({M.id}, {m.id}) is not type-2 invariant at ({a}, {b}): "
            f"residual {residual:.3e}"
        )
    m_y = fd_partial(M, (0, 1, 0), (a, b, z))
    m_z = fd_partial(M, (0, 0, 1), (a, b, z))
    if m_z >= 1.0 - 1e-9:
        raise ContractionViolation(
            f"z-partial of {M.id} at ({a}, {b}, {z}) is {m_z}; need < 1"
        )
    return m_y / (1.0 - m_z)
