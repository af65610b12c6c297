"""Two- and three-variable means: descriptors, catalog, conjugation, derivatives.

Every mean is wrapped in an immutable descriptor carrying property flags
(symmetric / strict / isotone / homogeneous / analytic) and, where a closed
form is known, the diagonal derivative data of its one-parameter section
f(x) = m(1, x).  All evaluators are pure functions of their arguments, so
descriptors can be shared freely between threads.

Numerically delicate members of the catalog get dedicated kernels:

* the logarithmic mean switches to a short series of t/log(1+t) near the
  diagonal, where the naive quotient loses every significant digit;
* the divided-difference means U0/U1 are evaluated through nested first
  divided differences of log and x*log(x) (log1p based), and fall back to an
  averaged four-point perturbation when two arguments are closer than a
  relative gap of 1e-6, where the value is only defined by continuity.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import (
    DegenerateLimit,
    DomainError,
    NonPositiveInput,
    NumericOverflow,
    StepUnderflow,
    UnknownMean,
)

__all__ = [
    "DiagonalDerivatives2",
    "Mean2Descriptor",
    "Mean3Descriptor",
    "eval2",
    "eval3",
    "conjugate2",
    "conjugate3",
    "fd_partial",
    "fd_univariate",
    "mean2",
    "mean3",
    "catalog2",
    "catalog3",
    "CATALOG2_IDS",
    "CATALOG3_IDS",
    "LOG_MEAN_SERIES_BAND",
    "U_GUARD_BAND",
    "U_GUARD_DELTA",
    "U_GUARD_ACCURACY",
    "MAX_POWER_ORDER",
]

_EPS = sys.float_info.epsilon

# |b/a - 1| below which the logarithmic mean uses its diagonal series.
LOG_MEAN_SERIES_BAND = 1e-4

# Minimum pairwise relative gap below which U0/U1 switch to the guarded path.
U_GUARD_BAND = 1e-6
# Relative size of the symmetric perturbations used by the guarded path.
U_GUARD_DELTA = 1e-5
# Documented bound on the relative error of the guarded path (measured ~3e-11).
U_GUARD_ACCURACY = 1e-8

# Power/Lehmer exponents outside this range overflow long before they inform.
MAX_POWER_ORDER = 20

Real = Union[int, float, Fraction]


@dataclass(frozen=True)
class DiagonalDerivatives2:
    """Exact diagonal data of the section f(x) = m(1, x): f''(1) and f''''(1)."""

    d2: Fraction
    d4: Fraction


@dataclass(frozen=True)
class Mean2Descriptor:
    """A named two-variable mean with property flags.

    ``evaluate`` is the raw formula on positive reals; use :func:`eval2` for
    the validated entry point (domain checks, exact diagonal, canonical
    argument order for symmetric means).
    """

    id: str
    evaluate: Callable[[float, float], float]
    symmetric: bool = True
    strict: bool = True
    isotone: bool = True
    homogeneous: bool = True
    analytic: bool = True
    diagonal_data: Optional[DiagonalDerivatives2] = None


@dataclass(frozen=True)
class Mean3Descriptor:
    """A named three-variable mean with property flags (see Mean2Descriptor)."""

    id: str
    evaluate: Callable[[float, float, float], float]
    symmetric: bool = True
    strict: bool = True
    isotone: bool = True
    homogeneous: bool = True
    analytic: bool = True


def _require_positive(*values: float) -> None:
    for v in values:
        if not (v > 0.0) or math.isinf(v):
            raise NonPositiveInput(f"arguments must be positive finite reals, got {values!r}")


def eval2(desc: Mean2Descriptor, a: float, b: float) -> float:
    """Evaluate a two-variable mean with domain checks.

    Returns ``a`` exactly on the diagonal.  Symmetric means receive their
    arguments in sorted order so permuted calls are bit-identical.
    """
    a = float(a)
    b = float(b)
    _require_positive(a, b)
    if a == b:
        return a
    if desc.symmetric and b < a:
        a, b = b, a
    try:
        value = desc.evaluate(a, b)
    except OverflowError as exc:
        raise NumericOverflow(f"{desc.id}({a}, {b}) overflowed") from exc
    if not math.isfinite(value):
        raise NumericOverflow(f"{desc.id}({a}, {b}) is not finite: {value!r}")
    return value


def eval3(desc: Mean3Descriptor, a: float, b: float, c: float) -> float:
    """Evaluate a three-variable mean with domain checks (see :func:`eval2`)."""
    a = float(a)
    b = float(b)
    c = float(c)
    _require_positive(a, b, c)
    if a == b == c:
        return a
    if desc.symmetric:
        a, b, c = sorted((a, b, c))
    try:
        value = desc.evaluate(a, b, c)
    except OverflowError as exc:
        raise NumericOverflow(f"{desc.id}({a}, {b}, {c}) overflowed") from exc
    if not math.isfinite(value):
        raise NumericOverflow(f"{desc.id}({a}, {b}, {c}) is not finite: {value!r}")
    return value


# --------------------------------------------------------------------------
# numerically stable kernels
# --------------------------------------------------------------------------


def _log_mean(a: float, b: float) -> float:
    # (b-a)/(log b - log a) with the removable singularity handled explicitly.
    if a == b:
        return a
    if b < a:
        a, b = b, a
    t = (b - a) / a
    if t < LOG_MEAN_SERIES_BAND:
        # t/log(1+t) = 1 + t/2 - t^2/12 + t^3/24 - 19 t^4/720 + O(t^5);
        # the truncation is below 1e-20 relative inside the band.
        return a * (1.0 + t * (0.5 + t * (-1.0 / 12.0 + t * (1.0 / 24.0 + t * (-19.0 / 720.0)))))
    return (b - a) / math.log1p(t)


def _ddiff_log(x: float, y: float) -> float:
    # First divided difference of log; log1p avoids the cancellation of
    # log(x) - log(y) for nearby arguments.
    if x == y:
        return 1.0 / x
    return math.log1p((x - y) / y) / (x - y)


def _ddiff_xlogx(x: float, y: float) -> float:
    # First divided difference of x*log(x).
    if x == y:
        return math.log(x) + 1.0
    return x * _ddiff_log(x, y) + math.log(y)


def _min_pairwise_gap(a: float, b: float, c: float) -> float:
    # a <= b <= c assumed; smallest relative gap between neighbours.
    return min((b - a) / b, (c - b) / c)


_U_PERTURBATIONS = (
    (1.0 + U_GUARD_DELTA, 1.0, 1.0 - U_GUARD_DELTA),
    (1.0 - U_GUARD_DELTA, 1.0, 1.0 + U_GUARD_DELTA),
    (1.0, 1.0 + U_GUARD_DELTA, 1.0 - U_GUARD_DELTA),
    (1.0, 1.0 - U_GUARD_DELTA, 1.0 + U_GUARD_DELTA),
)


def _guarded(direct: Callable[[float, float, float], float], a: float, b: float, c: float) -> float:
    # Average of four symmetric perturbations; the +-delta pairs cancel the
    # first-order term, leaving an O(delta^2) ~ 1e-10 relative error.
    total = 0.0
    for pa, pb, pc in _U_PERTURBATIONS:
        v = direct(a * pa, b * pb, c * pc)
        if not math.isfinite(v):
            raise DegenerateLimit(
                f"guarded evaluation failed near the diagonal at {(a, b, c)!r}"
            )
        total += v
    return 0.25 * total


def _u0_direct(a: float, b: float, c: float) -> float:
    # 1/sqrt(-2 * log[a,b,c]) where log[a,b,c] is the second divided
    # difference of log; equal to Stolarsky's square-root form off-diagonal.
    d2 = (_ddiff_log(a, b) - _ddiff_log(b, c)) / (a - c)
    return 1.0 / math.sqrt(-2.0 * d2)


def _u1_direct(a: float, b: float, c: float) -> float:
    # 1/(2 * g[a,b,c]) with g(x) = x log x.
    d2 = (_ddiff_xlogx(a, b) - _ddiff_xlogx(b, c)) / (a - c)
    return 1.0 / (2.0 * d2)


def _stolarsky_u0(a: float, b: float, c: float) -> float:
    a, b, c = sorted((a, b, c))
    if _min_pairwise_gap(a, b, c) < U_GUARD_BAND:
        return _guarded(_u0_direct, a, b, c)
    return _u0_direct(a, b, c)


def _stolarsky_u1(a: float, b: float, c: float) -> float:
    a, b, c = sorted((a, b, c))
    if _min_pairwise_gap(a, b, c) < U_GUARD_BAND:
        return _guarded(_u1_direct, a, b, c)
    return _u1_direct(a, b, c)


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------


def _power_mean2(p: float) -> Callable[[float, float], float]:
    inv = 1.0 / p

    def f(a: float, b: float) -> float:
        return ((a ** p + b ** p) / 2.0) ** inv

    return f


def _power_mean3(p: float) -> Callable[[float, float, float], float]:
    inv = 1.0 / p

    def f(a: float, b: float, c: float) -> float:
        return ((a ** p + b ** p + c ** p) / 3.0) ** inv

    return f


def _lehmer2(p: float) -> Callable[[float, float], float]:
    def f(a: float, b: float) -> float:
        return (a ** p + b ** p) / (a ** (p - 1.0) + b ** (p - 1.0))

    return f


def _lehmer3(p: float) -> Callable[[float, float, float], float]:
    def f(a: float, b: float, c: float) -> float:
        return (a ** p + b ** p + c ** p) / (a ** (p - 1.0) + b ** (p - 1.0) + c ** (p - 1.0))

    return f


def _power_diagonal_data(p: Fraction) -> DiagonalDerivatives2:
    # Section derivatives of the power mean ((1+x^p)/2)^(1/p) at x=1.
    d2 = (p - 1) / 4
    d4 = Fraction(-2 * p ** 3 + 3 * p ** 2 + 14 * p - 15, 16)
    return DiagonalDerivatives2(d2=Fraction(d2), d4=Fraction(d4))


def _lehmer_diagonal_data(p: Fraction) -> DiagonalDerivatives2:
    # Section derivatives of (1+x^p)/(1+x^(p-1)) at x=1.
    d2 = (p - 1) / 2
    d4 = -(p - 3) * (p - 1) * (p + 1) / 2
    return DiagonalDerivatives2(d2=Fraction(d2), d4=Fraction(d4))


_LOG_MEAN_DATA = DiagonalDerivatives2(d2=Fraction(-1, 6), d4=Fraction(-19, 30))


def _parse_exponent(text: str) -> Fraction:
    try:
        p = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UnknownMean(f"bad exponent {text!r}") from exc
    if p == 0:
        raise UnknownMean("exponent 0 is the geometric mean; use G2/G3")
    if abs(p) > MAX_POWER_ORDER:
        raise UnknownMean(f"exponent {p} outside supported range |p| <= {MAX_POWER_ORDER}")
    return p


_FIXED2: dict = {}
_FIXED3: dict = {}


def _register2(desc: Mean2Descriptor) -> Mean2Descriptor:
    _FIXED2[desc.id] = desc
    return desc


def _register3(desc: Mean3Descriptor) -> Mean3Descriptor:
    _FIXED3[desc.id] = desc
    return desc


_register2(Mean2Descriptor(
    "A2", lambda a, b: (a + b) / 2.0,
    diagonal_data=DiagonalDerivatives2(Fraction(0), Fraction(0)),
))
_register2(Mean2Descriptor(
    "G2", lambda a, b: math.sqrt(a * b),
    diagonal_data=DiagonalDerivatives2(Fraction(-1, 4), Fraction(-15, 16)),
))
_register2(Mean2Descriptor(
    "H2", lambda a, b: 2.0 * a * b / (a + b),
    diagonal_data=DiagonalDerivatives2(Fraction(-1, 2), Fraction(-3, 2)),
))
_register2(Mean2Descriptor("L", _log_mean, diagonal_data=_LOG_MEAN_DATA))
_register2(Mean2Descriptor(
    "min", lambda a, b: min(a, b),
    strict=False, analytic=False,
))
_register2(Mean2Descriptor(
    "max", lambda a, b: max(a, b),
    strict=False, analytic=False,
))

_register3(Mean3Descriptor("A3", lambda a, b, c: (a + b + c) / 3.0))
_register3(Mean3Descriptor("G3", lambda a, b, c: (a * b * c) ** (1.0 / 3.0)))
_register3(Mean3Descriptor("H3", lambda a, b, c: 3.0 / (1.0 / a + 1.0 / b + 1.0 / c)))
_register3(Mean3Descriptor("Qroot", lambda a, b, c: math.sqrt((a * b + a * c + b * c) / 3.0)))
_register3(Mean3Descriptor(
    "min", lambda a, b, c: min(a, b, c),
    strict=False, analytic=False,
))
_register3(Mean3Descriptor(
    "max", lambda a, b, c: max(a, b, c),
    strict=False, analytic=False,
))
# U0/U1 are analytic off the diagonal, but the evaluator's behaviour at the
# diagonal is guard-defined, so derivative suites must not differentiate them.
_register3(Mean3Descriptor("U0", _stolarsky_u0, analytic=False))
_register3(Mean3Descriptor("U1", _stolarsky_u1, analytic=False))


def mean2(spec: str) -> Mean2Descriptor:
    """Resolve a two-variable catalog id.

    Fixed ids: A2, G2, H2, L, min, max, A12.  Parametric families:
    ``Ap:<p>`` (power mean) and ``lh:<p>`` (Lehmer mean) with rational or
    decimal ``p``, 0 < |p| <= 20.
    """
    if spec in _FIXED2:
        return _FIXED2[spec]
    if spec == "A12":
        return mean2("Ap:1/2")
    if spec.startswith("Ap:"):
        p = _parse_exponent(spec[3:])
        return Mean2Descriptor(
            spec, _power_mean2(float(p)), diagonal_data=_power_diagonal_data(p)
        )
    if spec.startswith("lh:"):
        p = _parse_exponent(spec[3:])
        # Lehmer means with p outside [0, 1] fail isotonicity far from the
        # diagonal; the flag mirrors the catalog's working hypothesis and the
        # iterations that use it, not a theorem.
        return Mean2Descriptor(
            spec, _lehmer2(float(p)), diagonal_data=_lehmer_diagonal_data(p)
        )
    raise UnknownMean(f"unknown two-variable mean id {spec!r}")


def mean3(spec: str) -> Mean3Descriptor:
    """Resolve a three-variable catalog id.

    Fixed ids: A3, G3, H3, Qroot, U0, U1, min, max, A12.  Parametric:
    ``Ap:<p>`` and ``LH:<p>``.  ``inv:<mean2-id>`` builds the type-1
    invariant mean of the named two-variable mean (``L3`` = ``inv:L``).
    """
    if spec in _FIXED3:
        return _FIXED3[spec]
    if spec == "A12":
        return mean3("Ap:1/2")
    if spec == "L3":
        return mean3("inv:L")
    if spec.startswith("Ap:"):
        p = _parse_exponent(spec[3:])
        return Mean3Descriptor(spec, _power_mean3(float(p)))
    if spec.startswith("LH:"):
        p = _parse_exponent(spec[3:])
        return Mean3Descriptor(spec, _lehmer3(float(p)))
    if spec.startswith("inv:"):
        from .type1 import construct_invariant  # deferred: type1 imports core

        return construct_invariant(mean2(spec[4:]))
    raise UnknownMean(f"unknown three-variable mean id {spec!r}")


# Canonical instances used by the property suites.
CATALOG2_IDS = ("A2", "G2", "H2", "L", "lh:2", "lh:3", "Ap:2", "Ap:1/2", "Ap:1/3", "min", "max")
CATALOG3_IDS = (
    "A3", "G3", "H3", "LH:2", "LH:3", "Ap:2", "Ap:1/2", "Ap:1/3",
    "U0", "U1", "Qroot", "min", "max",
)


def catalog2() -> list:
    return [mean2(i) for i in CATALOG2_IDS]


def catalog3() -> list:
    return [mean3(i) for i in CATALOG3_IDS]


# --------------------------------------------------------------------------
# conjugation
# --------------------------------------------------------------------------


def _conjugate_call(h, h_inv, inner, args):
    try:
        value = h_inv(inner(*[h(x) for x in args]))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"conjugation left the domain of the inner mean at {args!r}") from exc
    if not math.isfinite(value):
        raise DomainError(f"conjugation produced a non-finite value at {args!r}")
    return value


def conjugate2(h: Callable[[float], float], h_inv: Callable[[float], float],
               desc: Mean2Descriptor, ident: Optional[str] = None) -> Mean2Descriptor:
    """Conjugate a two-variable mean by a strictly monotone map h.

    Returns the mean (a, b) -> h_inv(m(h(a), h(b))).  Symmetry, strictness
    and isotonicity survive conjugation; homogeneity and analyticity depend
    on h, so those flags are dropped.
    """
    inner = desc.evaluate
    return Mean2Descriptor(
        ident or f"conj({desc.id})",
        lambda a, b: _conjugate_call(h, h_inv, inner, (a, b)),
        symmetric=desc.symmetric,
        strict=desc.strict,
        isotone=desc.isotone,
        homogeneous=False,
        analytic=False,
    )


def conjugate3(h: Callable[[float], float], h_inv: Callable[[float], float],
               desc: Mean3Descriptor, ident: Optional[str] = None) -> Mean3Descriptor:
    """Three-variable counterpart of :func:`conjugate2`."""
    inner = desc.evaluate
    return Mean3Descriptor(
        ident or f"conj({desc.id})",
        lambda a, b, c: _conjugate_call(h, h_inv, inner, (a, b, c)),
        symmetric=desc.symmetric,
        strict=desc.strict,
        isotone=desc.isotone,
        homogeneous=False,
        analytic=False,
    )


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

# Central stencils as (offset, coefficient) pairs; each has O(h^2) error with
# only even-order terms, so one Richardson step against the doubled step
# removes the leading term.
_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def _base_step(order: int) -> float:
    # With one Richardson level the truncation is O(h^4) while rounding grows
    # like eps/h^order, so the balanced step is eps**(1/(order+4)); the
    # un-extrapolated optimum eps**(1/(order+2)) leaves order-4 stencils with
    # ~1e-3 rounding noise, too coarse for the accuracy targets.
    return _EPS ** (1.0 / (order + 4))


def _exact_step(x: float, h: float) -> float:
    # Round h so that x+h and x-h are exactly representable offsets of x.
    probe = x + h
    return probe - x


def _tensor_stencil(fn, point, orders, steps):
    axes = []
    for x, k, h in zip(point, orders, steps):
        if k == 0:
            axes.append(((x, 1.0),))
            continue
        nodes = []
        for off, coef in _STENCILS[k]:
            nodes.append((x + off * h, coef / h ** k))
        axes.append(tuple(nodes))
    total = 0.0
    # Explicit loops over at most three short axes beat itertools here.
    for x0, c0 in axes[0]:
        for x1, c1 in axes[1] if len(axes) > 1 else ((None, 1.0),):
            for x2, c2 in axes[2] if len(axes) > 2 else ((None, 1.0),):
                args = [x0]
                if x1 is not None:
                    args.append(x1)
                if x2 is not None:
                    args.append(x2)
                total += c0 * c1 * c2 * fn(*args)
    return total


def fd_partial(desc, multi_index: Sequence[int], point: Sequence[float],
               rel_step: Optional[float] = None) -> float:
    """Richardson-extrapolated central-difference partial derivative.

    ``multi_index`` is one order per coordinate (total order <= 4).  The base
    step is eps**(1/(k+4)) scaled by each coordinate (k the total order),
    evaluated at (h, 2h) and extrapolated once.  Accuracy targets: 1e-5
    relative for total order <= 2, 1e-3 for orders 3-4 (closed-form means).

    Raises StepUnderflow if the widened stencil leaves the positive domain or
    the step rounds to zero.
    """
    point = tuple(float(x) for x in point)
    orders = tuple(int(k) for k in multi_index)
    if len(point) != len(orders) or len(point) not in (2, 3):
        raise ValueError("multi_index and point must both have length 2 or 3")
    total_order = sum(orders)
    if not 1 <= total_order <= 4:
        raise ValueError("total derivative order must be between 1 and 4")
    _require_positive(*point)

    evaluate = (lambda a, b: eval2(desc, a, b)) if len(point) == 2 else (
        lambda a, b, c: eval3(desc, a, b, c))

    base = rel_step if rel_step is not None else _base_step(total_order)
    steps = []
    for x, k in zip(point, orders):
        if k == 0:
            steps.append(0.0)
            continue
        h = _exact_step(x, base * abs(x))
        if h <= 0.0:
            raise StepUnderflow(f"step underflow at coordinate {x!r}")
        reach = 2 * h * max(off for off, _ in _STENCILS[k])
        if x - reach <= 0.0:
            raise StepUnderflow(f"stencil leaves the positive domain at {x!r}")
        steps.append(h)

    coarse = _tensor_stencil(evaluate, point, orders, [2 * h for h in steps])
    fine = _tensor_stencil(evaluate, point, orders, steps)
    return (4.0 * fine - coarse) / 3.0


def fd_univariate(fn: Callable[[float], float], x: float, order: int,
                  rel_step: Optional[float] = None) -> float:
    """One-dimensional analogue of :func:`fd_partial` for section functions."""
    x = float(x)
    if not 1 <= order <= 4:
        raise ValueError("order must be between 1 and 4")
    base = rel_step if rel_step is not None else _base_step(order)
    h = _exact_step(x, base * abs(x))
    if h <= 0.0:
        raise StepUnderflow(f"step underflow at {x!r}")
    if x - 4 * h <= 0.0:
        raise StepUnderflow(f"stencil leaves the positive domain at {x!r}")

    def apply(step: float) -> float:
        return sum(coef * fn(x + off * step) for off, coef in _STENCILS[order]) / step ** order

    return (4.0 * apply(h) - apply(2 * h)) / 3.0
