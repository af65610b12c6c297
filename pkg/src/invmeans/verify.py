"""Identity suites, inequality scans and counterexample reproductions.

Every scanner consumes a ScanConfig and produces a ScanReport.  Sampling is
driven by a counter-based splitmix64 generator mapped log-uniformly onto the
box, so identical configs reproduce byte-identical reports and the first N
samples of a longer run are exactly the samples of a shorter one.

Inequality scans treat near-diagonal samples carefully: pairs of means that
agree to second (or fourth) order at the diagonal have true margins that fall
below double-precision measurement noise there.  Samples inside the guard
band are excluded and counted; outside it, a wrong-direction gap only counts
as a violation when it exceeds both the claim tolerance and a documented
measurement floor proportional to eps / gap.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from math import exp, log, sqrt
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from ._version import __version__ as _ARTIFACT_VERSION
from .core import (
    Mean2Descriptor,
    Mean3Descriptor,
    U_GUARD_BAND,
    catalog2,
    catalog3,
    eval2,
    eval3,
    fd_partial,
    fd_univariate,
    mean2,
    mean3,
)
from .type1 import construct_invariant
from .type2 import check_type2

__all__ = [
    "GENERATOR_ID",
    "ScanConfig",
    "ScanReport",
    "sample_unit",
    "sample_pairs",
    "sample_triples",
    "conjecture1_scan",
    "conjecture2_scan",
    "lehmer_noncomparability",
    "diagonal_identity_suite",
    "both_invariance_demo",
]

_EPS = sys.float_info.epsilon

GENERATOR_ID = "splitmix64-loguniform-v1"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

#: Wrong-direction gaps below ``_FLOOR_FACTOR * eps / gap`` (relative to the
#: local value) are below what the evaluators can resolve and never count as
#: violations.
_FLOOR_FACTOR = 8.0

#: Sign claims must be separated by at least this absolute margin.
SIGN_CLAIM_MARGIN = 1e-6

_IDENTITY_TOL_LOW = 1e-5   # identities built from partials of order <= 2
_IDENTITY_TOL_HIGH = 1e-3  # identities involving orders 3-4


@dataclass(frozen=True)
class ScanConfig:
    """Sampling box, budget, seed and claim tolerance for one scan."""

    box: Tuple[float, float] = (0.1, 10.0)
    samples: int = 10_000
    seed: int = 1729
    tolerance: float = 1e-10

    def __post_init__(self) -> None:
        lo, hi = self.box
        if not (0.0 < lo < hi):
            raise ValueError("box must satisfy 0 < low < high")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


DEFAULT_SCAN = ScanConfig()


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def sample_unit(seed: int, counter: int) -> float:
    """Counter-based splitmix64 output mapped to [0, 1)."""
    return _mix64(seed + (counter + 1) * _GAMMA) * 2.0 ** -64


def _log_uniform(u: float, lo: float, hi: float) -> float:
    return lo * exp(u * log(hi / lo))


def sample_pairs(cfg: ScanConfig) -> Iterator[Tuple[float, float]]:
    lo, hi = cfg.box
    for i in range(cfg.samples):
        yield (
            _log_uniform(sample_unit(cfg.seed, 2 * i), lo, hi),
            _log_uniform(sample_unit(cfg.seed, 2 * i + 1), lo, hi),
        )


def sample_triples(cfg: ScanConfig) -> Iterator[Tuple[float, float, float]]:
    lo, hi = cfg.box
    for i in range(cfg.samples):
        yield (
            _log_uniform(sample_unit(cfg.seed, 3 * i), lo, hi),
            _log_uniform(sample_unit(cfg.seed, 3 * i + 1), lo, hi),
            _log_uniform(sample_unit(cfg.seed, 3 * i + 2), lo, hi),
        )


def _min_rel_gap(values: Sequence[float]) -> float:
    s = sorted(values)
    return min((s[i + 1] - s[i]) / s[i + 1] for i in range(len(s) - 1))


def _noise_floor(gap: float) -> float:
    return _FLOOR_FACTOR * _EPS / gap


@dataclass(frozen=True)
class ScanReport:
    """Structured result of one scan; serializable to JSON and CSV."""

    claim: str
    config: ScanConfig
    samples_tested: int
    excluded_near_diagonal: int
    violations: Tuple[dict, ...]
    max_residual: float
    verdict: str  # "pass" | "fail" | "evidence-only"
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "config": {
                "box": list(self.config.box),
                "samples": self.config.samples,
                "seed": self.config.seed,
                "tolerance": self.config.tolerance,
                "generator": GENERATOR_ID,
            },
            "samples_tested": self.samples_tested,
            "excluded_near_diagonal": self.excluded_near_diagonal,
            "violations": list(self.violations),
            "max_residual": self.max_residual,
            "verdict": self.verdict,
            "notes": self.notes,
            "artifact_version": _ARTIFACT_VERSION,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["index,a,b,c,lhs,rhs,gap"]
        for i, v in enumerate(self.violations):
            point = list(v["point"]) + [""] * (3 - len(v["point"]))
            cells = [str(i)] + [
                format(x, ".17g") if isinstance(x, float) else str(x) for x in point
            ] + [format(v["lhs"], ".17g"), format(v["rhs"], ".17g"), format(v["gap"], ".17g")]
            lines.append(",".join(cells))
        lines.append(
            f"summary,{self.claim},{self.samples_tested},{self.excluded_near_diagonal},"
            f"{format(self.max_residual, '.17g')},{self.verdict}"
        )
        return "\n".join(lines) + "\n"


def _violation(point: Sequence[float], lhs: float, rhs: float) -> dict:
    return {"point": [float(x) for x in point], "lhs": lhs, "rhs": rhs, "gap": lhs - rhs}


def conjecture1_scan(cfg: ScanConfig = DEFAULT_SCAN) -> ScanReport:
    """Scan the two-sided bound U0 <= invariant-log-mean <= U1 over the box.

    A scan gathers evidence only; the verdict is "evidence-only" on zero
    violations and "fail" with witnesses otherwise.
    """
    L3 = construct_invariant(mean2("L"))
    U0 = mean3("U0")
    U1 = mean3("U1")
    violations: List[dict] = []
    excluded = 0
    tested = 0
    max_residual = 0.0
    for point in sample_triples(cfg):
        gap = _min_rel_gap(point)
        if gap < U_GUARD_BAND:
            excluded += 1
            continue
        tested += 1
        mid = eval3(L3, *point)
        lower = eval3(U0, *point)
        upper = eval3(U1, *point)
        floor = max(cfg.tolerance, _noise_floor(gap))
        for lhs, rhs in ((lower, mid), (mid, upper)):
            excess = (lhs - rhs) / rhs
            max_residual = max(max_residual, excess)
            if excess > floor:
                violations.append(_violation(point, lhs, rhs))
    verdict = "fail" if violations else "evidence-only"
    return ScanReport(
        claim="conj1",
        config=cfg,
        samples_tested=tested,
        excluded_near_diagonal=excluded,
        violations=tuple(violations),
        max_residual=max(max_residual, 0.0),
        verdict=verdict,
        notes="max_residual is the largest wrong-direction excess relative to the local value",
    )


def conjecture2_scan(cfg: ScanConfig = DEFAULT_SCAN) -> ScanReport:
    """Scan the one-step comparisons that would imply the two-sided bound.

    Checks that one application of the pairwise log-mean map raises U0 and
    lowers U1.  Zero violations here, combined with the monotone-envelope
    comparison principle, would imply the two-sided bound over the sampled
    box; the scan remains evidence, not proof.  Samples whose composed triple
    falls inside the guard band are excluded along with near-diagonal
    originals.
    """
    Lm = mean2("L")
    U0 = mean3("U0")
    U1 = mean3("U1")
    violations: List[dict] = []
    excluded = 0
    tested = 0
    max_residual = 0.0
    for point in sample_triples(cfg):
        a, b, c = point
        gap = _min_rel_gap(point)
        if gap < U_GUARD_BAND:
            excluded += 1
            continue
        composed = (eval2(Lm, a, c), eval2(Lm, a, b), eval2(Lm, c, b))
        gap_c = _min_rel_gap(composed)
        if gap_c < U_GUARD_BAND:
            excluded += 1
            continue
        tested += 1
        floor = max(cfg.tolerance, _noise_floor(min(gap, gap_c)))
        u0_orig = eval3(U0, *point)
        u0_comp = eval3(U0, *composed)
        u1_orig = eval3(U1, *point)
        u1_comp = eval3(U1, *composed)
        # want u0_comp >= u0_orig and u1_comp <= u1_orig
        for lhs, rhs in ((u0_orig, u0_comp), (u1_comp, u1_orig)):
            excess = (lhs - rhs) / rhs
            max_residual = max(max_residual, excess)
            if excess > floor:
                violations.append(_violation(point, lhs, rhs))
    verdict = "fail" if violations else "evidence-only"
    return ScanReport(
        claim="conj2",
        config=cfg,
        samples_tested=tested,
        excluded_near_diagonal=excluded,
        violations=tuple(violations),
        max_residual=max(max_residual, 0.0),
        verdict=verdict,
        notes=(
            "zero violations plus the monotone-envelope comparison principle imply the "
            "two-sided bound over this box (evidence only, not proof); exclusions count "
            "originals and composed triples inside the guard band"
        ),
    )


def lehmer_noncomparability(cfg: ScanConfig = DEFAULT_SCAN) -> ScanReport:
    """Reproduce the sign flip separating the invariant Lehmer extension from the ratio form.

    The invariant mean of the quadratic Lehmer mean falls below the
    three-variable Lehmer ratio at (1,2,3) but above it at (1,2,4); both
    inequalities must hold strictly with margin > 1e-6 for a "pass".
    """
    M = construct_invariant(mean2("lh:2"))
    LH = mean3("LH:2")
    checks = (
        ((1.0, 2.0, 3.0), -1),  # M < LH expected
        ((1.0, 2.0, 4.0), +1),  # M > LH expected
    )
    violations: List[dict] = []
    max_residual = 0.0
    for point, expected_sign in checks:
        m_val = eval3(M, *point)
        lh_val = eval3(LH, *point)
        gap = m_val - lh_val
        if expected_sign * gap <= SIGN_CLAIM_MARGIN:
            violations.append(_violation(point, m_val, lh_val))
        max_residual = max(max_residual, -expected_sign * gap / lh_val, 0.0)
    return ScanReport(
        claim="lehmer",
        config=cfg,
        samples_tested=len(checks),
        excluded_near_diagonal=0,
        violations=tuple(violations),
        max_residual=max_residual,
        verdict="pass" if not violations else "fail",
        notes=f"sign claims require |gap| > {SIGN_CLAIM_MARGIN}",
    )


# --------------------------------------------------------------------------
# diagonal identity suite
# --------------------------------------------------------------------------

_DIAGONAL_POINTS = (0.5, 1.0, 3.0)


def _ident(records, target_id, name, point, lhs, rhs, tol, scale=None):
    # Each finite-difference term is accurate to tol *relative to itself*, so
    # sum identities are checked against the magnitude of their terms, not of
    # the (near-zero) sum.
    if scale is None:
        scale = abs(lhs) + abs(rhs)
    scale = max(1.0, scale)
    residual = abs(lhs - rhs) / scale
    records.append((f"{target_id}:{name}", point, lhs, rhs, residual, tol))


def _two_variable_checks(records, desc: Mean2Descriptor) -> None:
    for a in _DIAGONAL_POINTS:
        Q = (a, a)
        m_x = fd_partial(desc, (1, 0), Q)
        _ident(records, desc.id, f"grad-half@{a}", Q, m_x, 0.5, _IDENTITY_TOL_LOW)
        m_xx = fd_partial(desc, (2, 0), Q)
        m_xy = fd_partial(desc, (1, 1), Q)
        _ident(records, desc.id, f"mixed-vs-pure@{a}", Q, m_xy, -m_xx, _IDENTITY_TOL_LOW)
        m_xxx = fd_partial(desc, (3, 0), Q)
        m_xxy = fd_partial(desc, (2, 1), Q)
        _ident(records, desc.id, f"third-order-ratio@{a}", Q, 3 * m_xxy, -m_xxx,
               _IDENTITY_TOL_HIGH)
        if desc.homogeneous:
            section = lambda x: eval2(desc, a, x)
            f1 = fd_univariate(section, a, 1)
            _ident(records, desc.id, f"section-slope@{a}", Q, f1, 0.5, _IDENTITY_TOL_LOW)
            f2 = fd_univariate(section, a, 2)
            f3 = fd_univariate(section, a, 3)
            _ident(records, desc.id, f"section-third@{a}", Q, f3, -1.5 / a * f2,
                   _IDENTITY_TOL_HIGH)


def _three_variable_checks(records, desc: Mean3Descriptor) -> None:
    for a in _DIAGONAL_POINTS:
        Q = (a, a, a)
        d = {}
        for name, idx in (
            ("x", (1, 0, 0)), ("xx", (2, 0, 0)), ("xy", (1, 1, 0)),
            ("xxx", (3, 0, 0)), ("xxy", (2, 1, 0)), ("xyz", (1, 1, 1)),
            ("xxxx", (4, 0, 0)), ("xxxy", (3, 1, 0)), ("xxyy", (2, 2, 0)),
            ("xxyz", (2, 1, 1)),
        ):
            d[name] = fd_partial(desc, idx, Q)
        _ident(records, desc.id, f"grad-third@{a}", Q, d["x"], 1.0 / 3.0, _IDENTITY_TOL_LOW)
        _ident(records, desc.id, f"mixed-vs-pure@{a}", Q, d["xy"], -0.5 * d["xx"],
               _IDENTITY_TOL_LOW)
        _ident(records, desc.id, f"cross-third@{a}", Q, d["xyz"],
               -0.5 * (d["xxx"] + 6 * d["xxy"]), _IDENTITY_TOL_HIGH)
        _ident(records, desc.id, f"fourth-sum@{a}", Q,
               d["xxxx"] + 8 * d["xxxy"] + 6 * d["xxyy"] + 12 * d["xxyz"], 0.0,
               _IDENTITY_TOL_HIGH,
               scale=abs(d["xxxx"]) + 8 * abs(d["xxxy"]) + 6 * abs(d["xxyy"])
               + 12 * abs(d["xxyz"]))
        if desc.homogeneous:
            _ident(records, desc.id, f"homog-2nd@{a}", Q, d["xx"],
                   -a * (d["xxx"] + 2 * d["xxy"]), _IDENTITY_TOL_HIGH)
            _ident(records, desc.id, f"homog-3rd@{a}", Q, d["xxx"],
                   -a / 2 * (d["xxxx"] + 2 * d["xxxy"]), _IDENTITY_TOL_HIGH)
            _ident(records, desc.id, f"homog-mixed@{a}", Q, d["xxy"],
                   -a / 2 * (d["xxyy"] + d["xxxy"] + d["xxyz"]), _IDENTITY_TOL_HIGH)
            _ident(records, desc.id, f"homog-cross@{a}", Q, d["xyz"],
                   -1.5 * a * d["xxyz"], _IDENTITY_TOL_HIGH)


def diagonal_identity_suite(targets: Optional[Sequence] = None,
                            cfg: ScanConfig = DEFAULT_SCAN) -> ScanReport:
    """Check the diagonal derivative identities for differentiable catalog means.

    Identities involving partials of order <= 2 are held to 1e-5, orders 3-4
    to 1e-3 (the finite-difference accuracy targets), with residuals scaled
    by max(1, |lhs| + |rhs|).  Default targets are every catalog mean whose
    evaluator is analytic at the diagonal; the divided-difference means are
    skipped because their diagonal values are guard-defined.
    """
    if targets is None:
        targets = [d for d in catalog2() if d.analytic] + [d for d in catalog3() if d.analytic]
    records: List[tuple] = []
    for desc in targets:
        if isinstance(desc, Mean2Descriptor):
            _two_variable_checks(records, desc)
        else:
            _three_variable_checks(records, desc)
    violations = []
    max_residual = 0.0
    for name, point, lhs, rhs, residual, tol in records:
        max_residual = max(max_residual, residual)
        if residual > tol:
            v = _violation(point, lhs, rhs)
            v["identity"] = name
            violations.append(v)
    return ScanReport(
        claim="diagonal",
        config=cfg,
        samples_tested=len(records),
        excluded_near_diagonal=0,
        violations=tuple(violations),
        max_residual=max_residual,
        verdict="pass" if not violations else "fail",
        notes="residuals are |lhs-rhs| / max(1, |lhs|+|rhs|); samples_tested counts identities",
    )


# --------------------------------------------------------------------------
# both-types demo
# --------------------------------------------------------------------------

_EXACT_TOL = 1e-14
_CONJ_PAIR_TOL = 1e-12
_DIFFERENCE_MARGIN = 1e-3


def _weighted_two(a: float, b: float) -> float:
    return (2.0 * a + b) / 3.0


def _weighted_three(a: float, b: float, c: float) -> float:
    return (4.0 * a + 2.0 * b + c) / 7.0


def both_invariance_demo(cfg: ScanConfig = DEFAULT_SCAN) -> ScanReport:
    """Exercise pairs satisfying both invariance types, including a nonsymmetric one.

    For the weighted pair m(a,b) = (2a+b)/3, M(a,b,c) = (4a+2b+c)/7 the two
    invariance identities hold exactly in their matching argument order, while
    the symmetric-order composition differs by a visible margin.  The three
    monotone reparametrizations log, square and reciprocal of the arithmetic
    pair must satisfy both identities to 1e-12.
    """
    n_samples = min(cfg.samples, 500)
    small = ScanConfig(box=cfg.box, samples=n_samples, seed=cfg.seed,
                       tolerance=cfg.tolerance)
    violations: List[dict] = []
    max_residual = 0.0
    checked = 0

    def check(name, point, lhs, rhs, tol):
        nonlocal max_residual, checked
        checked += 1
        scale = max(abs(lhs), abs(rhs), 1e-300)
        residual = abs(lhs - rhs) / scale
        max_residual = max(max_residual, residual)
        if residual > tol:
            v = _violation(point, lhs, rhs)
            v["identity"] = name
            violations.append(v)

    demo_points = [(1.0, 2.0, 3.0)] + list(sample_triples(small))
    for a, b, c in demo_points:
        m_ab = _weighted_two(a, b)
        check("weighted:type2", (a, b, c), _weighted_three(a, b, m_ab), m_ab, _EXACT_TOL)
        composed = _weighted_three(_weighted_two(a, b), _weighted_two(a, c),
                                   _weighted_two(b, c))
        check("weighted:type1", (a, b, c), composed, _weighted_three(a, b, c), _EXACT_TOL)

    # The symmetric argument order must NOT reproduce the weighted mean.
    a, b, c = 1.0, 2.0, 3.0
    sym_order = _weighted_three(_weighted_two(a, c), _weighted_two(a, b),
                                _weighted_two(b, c))
    direct = _weighted_three(a, b, c)
    checked += 1
    if abs(sym_order - direct) <= _DIFFERENCE_MARGIN:
        v = _violation((a, b, c), sym_order, direct)
        v["identity"] = "weighted:symmetric-order-must-differ"
        violations.append(v)

    from .core import conjugate2, conjugate3
    from .type1 import check_type1

    A2 = mean2("A2")
    A3 = mean3("A3")
    reparams = (
        ("log", log, exp),
        ("square", lambda x: x * x, sqrt),
        ("reciprocal", lambda x: 1.0 / x, lambda x: 1.0 / x),
    )
    for name, h, h_inv in reparams:
        m_bar = conjugate2(h, h_inv, A2, ident=f"{name}-pair2")
        M_bar = conjugate3(h, h_inv, A3, ident=f"{name}-pair3")
        for point in sample_triples(small):
            direct3 = eval3(M_bar, *point)
            check(f"{name}:type1", point,
                  direct3 + check_type1(M_bar, m_bar, point), direct3, _CONJ_PAIR_TOL)
            direct2 = eval2(m_bar, point[0], point[1])
            check(f"{name}:type2", point,
                  direct2 + check_type2(M_bar, m_bar, point[0], point[1]), direct2,
                  _CONJ_PAIR_TOL)

    return ScanReport(
        claim="both-demo",
        config=cfg,
        samples_tested=checked,
        excluded_near_diagonal=0,
        violations=tuple(violations),
        max_residual=max_residual,
        verdict="pass" if not violations else "fail",
        notes="weighted-pair identities are exact; reparametrized arithmetic pairs to 1e-12",
    )
