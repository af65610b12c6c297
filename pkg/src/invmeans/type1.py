"""Type-1 invariant means built from a two-variable base mean.

The core object is the triple recursion

    a' = m(a, c),   b' = m(c, b),   c' = m(a, b)

whose three sequences squeeze onto a common limit when m is strict, isotone
and symmetric.  The limit, as a function of the starting triple, is the
unique three-variable mean M with M(m(a,c), m(a,b), m(b,c)) = M(a,b,c); this
module constructs it, iterates arbitrary three-variable means toward it,
compares candidate bounds against it, and certifies when a given
three-variable mean admits no such base mean at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .core import Mean2Descriptor, Mean3Descriptor, _require_positive, eval2, eval3
from .errors import InvalidBaseMean, NoBracket, NoConvergence

__all__ = [
    "ToleranceConfig",
    "TripleTrace",
    "EnvelopeReport",
    "NoninvarianceCertificate",
    "step_triple",
    "iterate_triple",
    "construct_invariant",
    "check_type1",
    "compose_pairwise",
    "iterate_composition",
    "envelope_test",
    "type1_candidate",
    "noninvariance_certificate",
]

#: Bisection is run to this relative bracket width.
CANDIDATE_TOL = 1e-13
_CANDIDATE_MAX_ITER = 200


@dataclass(frozen=True)
class ToleranceConfig:
    """Stopping rule shared by the iterative constructions."""

    rel_tol: float = 1e-14
    max_iter: int = 200
    trace_states: bool = False

    def __post_init__(self) -> None:
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_CONFIG = ToleranceConfig()


@dataclass(frozen=True)
class TripleTrace:
    """Recorded run of the triple recursion.

    ``states`` holds the visited triples, initial state first, when tracing
    is enabled; otherwise it is empty.  ``limit`` is the final c-component.
    """

    states: Tuple[Tuple[float, float, float], ...]
    converged: bool
    iterations: int
    limit: float
    tol: float


def step_triple(m: Mean2Descriptor, state: Sequence[float]) -> Tuple[float, float, float]:
    """One step of the recursion: (a, b, c) -> (m(a,c), m(c,b), m(a,b))."""
    a, b, c = state
    return eval2(m, a, c), eval2(m, c, b), eval2(m, a, b)


def _spread(a: float, b: float, c: float) -> float:
    return max(a, b, c) / min(a, b, c) - 1.0


def iterate_triple(m: Mean2Descriptor, point: Sequence[float],
                   cfg: ToleranceConfig = DEFAULT_CONFIG) -> TripleTrace:
    """Run the triple recursion from ``point`` until the spread closes.

    The starting triple is ordered a0 <= c0 <= b0 (the value of the limit is
    permutation-invariant for symmetric m, and this order makes the recorded
    sequences monotone for isotone m).
    """
    a, c, b = sorted(float(x) for x in point)
    _require_positive(a, b, c)
    raw = m.evaluate
    states: List[Tuple[float, float, float]] = [(a, b, c)]
    iterations = 0
    while _spread(a, b, c) >= cfg.rel_tol:
        if iterations >= cfg.max_iter:
            raise NoConvergence(
                f"triple recursion for {m.id} did not reach rel_tol={cfg.rel_tol} "
                f"within {cfg.max_iter} iterations (spread {_spread(a, b, c):.3e})"
            )
        a, b, c = (
            raw(a, c) if a != c else a,
            raw(c, b) if c != b else c,
            raw(a, b) if a != b else a,
        )
        iterations += 1
        if cfg.trace_states:
            states.append((a, b, c))
    return TripleTrace(
        states=tuple(states) if cfg.trace_states else (),
        converged=True,
        iterations=iterations,
        limit=c,
        tol=cfg.rel_tol,
    )


def construct_invariant(m: Mean2Descriptor,
                        cfg: ToleranceConfig = DEFAULT_CONFIG) -> Mean3Descriptor:
    """Build the three-variable mean left invariant by the pairwise map of m.

    Requires the strict, isotone and symmetric flags on m; the recursion's
    squeeze argument uses all three.  The result inherits strict, isotone and
    symmetric, and is homogeneous exactly when m is.
    """
    missing = [name for name in ("strict", "isotone", "symmetric") if not getattr(m, name)]
    if missing:
        raise InvalidBaseMean(f"base mean {m.id} lacks required flags: {', '.join(missing)}")

    raw = m.evaluate
    rel_tol = cfg.rel_tol
    max_iter = cfg.max_iter

    def evaluate(a: float, b: float, c: float) -> float:
        a, c, b = sorted((a, b, c))
        n = 0
        while max(a, b, c) / min(a, b, c) - 1.0 >= rel_tol:
            if n >= max_iter:
                raise NoConvergence(
                    f"invariant mean for {m.id} did not converge at ({a}, {b}, {c})"
                )
            a, b, c = (
                raw(a, c) if a != c else a,
                raw(c, b) if c != b else c,
                raw(a, b) if a != b else a,
            )
            n += 1
        return c

    return Mean3Descriptor(
        id=f"inv:{m.id}",
        evaluate=evaluate,
        symmetric=True,
        strict=True,
        isotone=True,
        homogeneous=m.homogeneous,
        analytic=False,
    )


def check_type1(M: Mean3Descriptor, m: Mean2Descriptor, point: Sequence[float]) -> float:
    """Signed type-1 residual M(m(a,c), m(a,b), m(b,c)) - M(a,b,c)."""
    a, b, c = point
    composed = eval3(M, eval2(m, a, c), eval2(m, a, b), eval2(m, b, c))
    return composed - eval3(M, a, b, c)


def compose_pairwise(N: Mean3Descriptor, m: Mean2Descriptor) -> Mean3Descriptor:
    """The map N -> N(m(a,c), m(a,b), m(c,b)) whose fixed points are the invariant means."""
    def evaluate(a: float, b: float, c: float) -> float:
        return eval3(N, eval2(m, a, c), eval2(m, a, b), eval2(m, c, b))

    symmetric = N.symmetric and m.symmetric
    return Mean3Descriptor(
        id=f"pairwise({N.id};{m.id})",
        evaluate=evaluate,
        symmetric=symmetric,
        strict=N.strict and m.strict,
        isotone=N.isotone and m.isotone,
        homogeneous=N.homogeneous and m.homogeneous,
        analytic=False,
    )


def iterate_composition(N: Mean3Descriptor, m: Mean2Descriptor, point: Sequence[float],
                        cfg: ToleranceConfig = DEFAULT_CONFIG) -> List[float]:
    """Values of the iterated pairwise composition of N at ``point``.

    The n-th entry equals N evaluated on the n-th state of the triple
    recursion, so the whole orbit costs one recursion run.  Iteration stops
    once successive values agree to rel_tol; the final entry then matches the
    constructed invariant mean at ``point`` to within a few rel_tol.
    """
    a, b, c = (float(x) for x in point)
    _require_positive(a, b, c)
    raw = m.evaluate
    values: List[float] = []
    previous: Optional[float] = None
    for n in range(cfg.max_iter):
        a, b, c = (
            raw(a, c) if a != c else a,
            raw(c, b) if c != b else c,
            raw(a, b) if a != b else a,
        )
        current = eval3(N, a, b, c)
        values.append(current)
        if previous is not None and abs(current - previous) < cfg.rel_tol * abs(current):
            return values
        previous = current
    raise NoConvergence(
        f"pairwise composition of {N.id} under {m.id} did not settle "
        f"within {cfg.max_iter} iterations"
    )


@dataclass(frozen=True)
class EnvelopeReport:
    """Sign classification of the one-step composition residual over a sample set.

    ``sign`` is "<=" when no residual is positive beyond noise (this supports
    M <= N over the sampled box, as evidence only), ">=" when none is
    negative, and "mixed" otherwise with one witness of each sign.
    """

    sign: str
    n_positive: int
    n_negative: int
    n_zero: int
    max_abs_residual: float
    witnesses: Tuple[Tuple[Tuple[float, float, float], float], ...]


def envelope_test(N: Mean3Descriptor, m: Mean2Descriptor,
                  samples: Sequence[Sequence[float]]) -> EnvelopeReport:
    """Classify the sign of N(m(a,c), m(a,b), m(c,b)) - N(a,b,c) over samples."""
    n_pos = n_neg = n_zero = 0
    max_abs = 0.0
    best_pos = best_neg = None
    for point in samples:
        a, b, c = point
        residual = check_type1(N, m, (a, b, c))
        noise = 1e-12 * eval3(N, a, b, c)
        if residual > noise:
            n_pos += 1
            if best_pos is None or residual > best_pos[1]:
                best_pos = ((a, b, c), residual)
        elif residual < -noise:
            n_neg += 1
            if best_neg is None or residual < best_neg[1]:
                best_neg = ((a, b, c), residual)
        else:
            n_zero += 1
        max_abs = max(max_abs, abs(residual))

    if n_pos and n_neg:
        sign = "mixed"
        witnesses = (best_pos, best_neg)
    elif n_pos:
        sign = ">="
        witnesses = (best_pos,)
    else:
        sign = "<="
        witnesses = (best_neg,) if best_neg else ()
    return EnvelopeReport(
        sign=sign, n_positive=n_pos, n_negative=n_neg, n_zero=n_zero,
        max_abs_residual=max_abs, witnesses=witnesses,
    )


def type1_candidate(M: Mean3Descriptor, a: float, b: float) -> float:
    """The only possible base-mean value at (a, b) if M is type-1 invariant.

    Specializing the invariance identity to a repeated argument forces
    M(x, x, b) = M(a, b, b) at x = m(a, b); this solves that scalar equation
    by bisection over [min(a,b), max(a,b)] to 1e-13 relative width.  A
    strictly isotone M makes the left side strictly increasing in x, so a
    missing sign change signals failed isotonicity and raises NoBracket.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return a
    target = eval3(M, a, b, b)

    def objective(x: float) -> float:
        return eval3(M, x, x, b) - target

    lo, hi = (a, b) if a < b else (b, a)
    f_lo = objective(lo)
    f_hi = objective(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoBracket(
            f"no sign change for {M.id} on [{lo}, {hi}]; M is not strictly isotone there"
        )
    for _ in range(_CANDIDATE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= CANDIDATE_TOL * mid:
            return mid
        f_mid = objective(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_hi > 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class NoninvarianceCertificate:
    """Outcome of the candidate-composition probe at one triple."""

    point: Tuple[float, float, float]
    candidates: Tuple[float, float, float]  # m(a,b), m(a,c), m(b,c)
    composed: float
    direct: float
    gap: float
    certified: bool
    threshold: float


def noninvariance_certificate(M: Mean3Descriptor,
                              test_point: Sequence[float]) -> NoninvarianceCertificate:
    """Probe whether any base mean can make M type-1 invariant.

    Builds the forced candidate values pairwise and measures the type-1 gap
    they produce.  A gap beyond ten times the candidate solver tolerance
    certifies that no base mean exists; a gap at noise level is consistent
    with invariance (and is what the classical means return).
    """
    a, b, c = (float(x) for x in test_point)
    m_ab = type1_candidate(M, a, b)
    m_ac = type1_candidate(M, a, c)
    m_bc = type1_candidate(M, b, c)
    composed = eval3(M, m_ac, m_ab, m_bc)
    direct = eval3(M, a, b, c)
    gap = composed - direct
    threshold = 10.0 * CANDIDATE_TOL * direct
    return NoninvarianceCertificate(
        point=(a, b, c),
        candidates=(m_ab, m_ac, m_bc),
        composed=composed,
        direct=direct,
        gap=gap,
        certified=abs(gap) > threshold,
        threshold=threshold,
    )
