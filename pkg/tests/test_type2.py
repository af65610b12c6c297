"""Scalar fixed-point extraction, symmetric extension, implicit derivative."""

import itertools
import math

import pytest

from invmeans import (
    ContractionViolation,
    Mean2Descriptor,
    Mean3Descriptor,
    NoConvergence,
    NonIsotoneM,
    check_type2,
    construct_invariant,
    eval2,
    eval3,
    extract_mean2,
    implicit_derivative,
    mean2,
    mean3,
    symmetric_extension,
)

from conftest import min_rel_gap, pairs, triples


def qroot_partner(a, b):
    # closed-form fixed point of z = sqrt((ab + (a+b)z)/3)
    s = a + b
    return (s + math.sqrt(s * s + 12.0 * a * b)) / 6.0


def a12(a, b):
    return ((math.sqrt(a) + math.sqrt(b)) / 2.0) ** 2


# --------------------------------------------------------------------------
# extraction
# --------------------------------------------------------------------------


def test_extract_arithmetic_is_midpoint():
    trace = extract_mean2(mean3("A3"), 1, 2)
    assert trace.limit == pytest.approx(1.5, abs=1e-14)
    assert trace.monotone_direction == "constant"
    assert trace.converged


def test_extract_qroot_closed_form():
    trace = extract_mean2(mean3("Qroot"), 1, 2)
    assert trace.limit == pytest.approx((3 + math.sqrt(33)) / 6, abs=1e-13)


def test_extract_lehmer():
    trace = extract_mean2(mean3("LH:2"), 1, 2)
    assert trace.limit == pytest.approx(5.0 / 3.0, abs=1e-13)


def test_extract_qroot_matches_oracle_on_pairs():
    M = mean3("Qroot")
    for a, b in pairs(300, seed=31):
        trace = extract_mean2(M, a, b)
        assert trace.limit == pytest.approx(qroot_partner(a, b), abs=1e-12 * max(a, b))


def test_extract_trace_invariants():
    for M_id in ("A3", "G3", "H3", "LH:2", "Qroot"):
        M = mean3(M_id)
        for a, b in pairs(40, seed=32):
            trace = extract_mean2(M, a, b)
            assert min(a, b) <= trace.limit <= max(a, b)
            assert trace.contraction_at_limit < 1.0
            values = trace.values
            if trace.monotone_direction == "increasing":
                assert all(x <= y + 8e-16 * abs(y) for x, y in zip(values, values[1:]))
            elif trace.monotone_direction == "decreasing":
                assert all(x >= y - 8e-16 * abs(y) for x, y in zip(values, values[1:]))


def test_extract_strictness_transfer():
    for M_id in ("G3", "Qroot", "LH:2"):
        M = mean3(M_id)
        for a, b in pairs(100, seed=33):
            if min_rel_gap((a, b)) < 1e-6:
                continue
            limit = extract_mean2(M, a, b).limit
            assert min(a, b) < limit < max(a, b), (M_id, a, b)


def test_extract_isotonicity_transfer():
    grid = [0.5 + 0.25 * k for k in range(19)]
    for M_id in ("A3", "G3", "Qroot"):
        M = mean3(M_id)
        limits = [extract_mean2(M, 1.0, b).limit for b in grid]
        assert all(x < y for x, y in zip(limits, limits[1:])), M_id


def test_extract_seed_independence():
    seeds = (mean2("min"), mean2("A2"), mean2("max"))
    for M_id in ("A3", "G3", "LH:2", "Qroot"):
        M = mean3(M_id)
        for a, b in pairs(60, seed=34):
            limits = [extract_mean2(M, a, b, seed=s).limit for s in seeds]
            spread = max(limits) - min(limits)
            assert spread <= 1e-12 * max(limits), (M_id, a, b, limits)


def test_extract_exceeds_half_power_mean():
    M = mean3("Qroot")
    for a, b in pairs(200, seed=35):
        if min_rel_gap((a, b)) < 1e-6:
            continue
        assert extract_mean2(M, a, b).limit > a12(a, b), (a, b)


def test_extract_non_isotone_detection():
    # z -> M(a, b, z) strictly decreasing forces an oscillating trace
    flipper = Mean3Descriptor("flip", lambda a, b, c: a + b + 0.2 - c,
                              symmetric=False, isotone=False, analytic=False)
    with pytest.raises(NonIsotoneM):
        extract_mean2(flipper, 1.0, 2.0)


def test_extract_no_convergence():
    drifter = Mean3Descriptor("drift", lambda a, b, c: c * 1.001,
                              symmetric=False, strict=False, analytic=False)
    with pytest.raises(NoConvergence):
        extract_mean2(drifter, 1.0, 2.0)


# --------------------------------------------------------------------------
# residuals
# --------------------------------------------------------------------------


def test_check_type2_lehmer_identity():
    assert abs(check_type2(mean3("LH:2"), mean2("lh:2"), 1, 2)) < 1e-14


def test_check_type2_arithmetic():
    assert abs(check_type2(mean3("A3"), mean2("A2"), 7, 9)) < 1e-14


def test_check_type2_invariant_log_mean_fails(L3):
    residual = check_type2(L3, mean2("L"), 1, 2)
    assert residual == pytest.approx(1.3502777431e-5, abs=1e-11)
    assert residual > 0


# --------------------------------------------------------------------------
# symmetric extension
# --------------------------------------------------------------------------


def test_extension_weighted_arithmetic_is_ternary_mean():
    n = Mean2Descriptor("w:2/3", lambda a, b: (2.0 * a + b) / 3.0, symmetric=False)
    ext = symmetric_extension(mean2("A2"), n)
    A3 = mean3("A3")
    for point in triples(100, seed=36):
        assert eval3(ext, *point) == pytest.approx(eval3(A3, *point), rel=2e-15)


def test_extension_weighted_geometric_is_ternary_mean():
    n = Mean2Descriptor("gw", lambda a, b: a ** (2.0 / 3.0) * b ** (1.0 / 3.0),
                        symmetric=False)
    ext = symmetric_extension(mean2("G2"), n)
    G3 = mean3("G3")
    for point in triples(100, seed=37):
        assert eval3(ext, *point) == pytest.approx(eval3(G3, *point), rel=1e-14)


def test_extension_median_composition():
    ext = symmetric_extension(mean2("A2"), mean2("A2"))
    # median 2 enters the second slot against the mean of the outer pair
    assert eval3(ext, 1, 2, 3) == pytest.approx(2.0, rel=1e-15)
    assert eval3(ext, 1, 2, 4) == pytest.approx(eval2(mean2("A2"), 2.5, 2.0), rel=1e-15)


def test_extension_type2_identity_exact():
    n = Mean2Descriptor("w:2/3", lambda a, b: (2.0 * a + b) / 3.0, symmetric=False)
    for m_id in ("A2", "G2", "L", "lh:2"):
        m = mean2(m_id)
        ext = symmetric_extension(m, n)
        for a, b in pairs(100, seed=38):
            assert check_type2(ext, m, a, b) == 0.0, (m_id, a, b)


def test_extension_symmetric_despite_asymmetric_weight():
    n = Mean2Descriptor("w:2/3", lambda a, b: (2.0 * a + b) / 3.0, symmetric=False)
    ext = symmetric_extension(mean2("G2"), n)
    for point in triples(30, seed=39):
        base = eval3(ext, *point)
        for perm in itertools.permutations(point):
            assert eval3(ext, *perm) == base


# --------------------------------------------------------------------------
# implicit derivative
# --------------------------------------------------------------------------


def test_implicit_derivative_arithmetic():
    assert implicit_derivative(mean3("A3"), mean2("A2"), 1.3, 2.7) == pytest.approx(
        0.5, abs=1e-9)


def test_implicit_derivative_diagonal_half():
    for M_id, m_id in (("G3", "G2"), ("H3", "H2"), ("LH:2", "lh:2")):
        value = implicit_derivative(mean3(M_id), mean2(m_id), 1.7, 1.7)
        assert value == pytest.approx(0.5, abs=1e-5), M_id


def test_implicit_derivative_lehmer_closed_form():
    # d/db of (1+b^2)/(1+b) is (b^2 + 2b - 1)/(1+b)^2 = 7/9 at b = 2
    value = implicit_derivative(mean3("LH:2"), mean2("lh:2"), 1, 2)
    assert value == pytest.approx(7.0 / 9.0, abs=1e-4)


def test_implicit_derivative_matches_direct_difference():
    M = mean3("Qroot")

    class _Partner:
        pass

    partner = Mean2Descriptor("qroot-partner", qroot_partner)
    value = implicit_derivative(M, partner, 1.0, 2.0)
    h = 1e-6
    direct = (extract_mean2(M, 1.0, 2.0 + h).limit
              - extract_mean2(M, 1.0, 2.0 - h).limit) / (2 * h)
    assert value == pytest.approx(direct, rel=1e-4)


def test_implicit_derivative_rejects_non_invariant_pair(L3):
    with pytest.raises(ValueError):
        implicit_derivative(L3, mean2("L"), 1, 2)


def test_implicit_derivative_contraction_violation():
    projection = Mean3Descriptor("proj-z", lambda a, b, c: c,
                                 symmetric=False, strict=False, analytic=False)
    with pytest.raises(ContractionViolation):
        implicit_derivative(projection, mean2("A2"), 1.0, 2.0)
