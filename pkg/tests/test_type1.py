"""Triple recursion, invariant construction, composition iterates, candidates."""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invmeans import (
    InvalidBaseMean,
    Mean3Descriptor,
    NoBracket,
    NoConvergence,
    ToleranceConfig,
    check_type1,
    compose_pairwise,
    construct_invariant,
    envelope_test,
    eval2,
    eval3,
    iterate_composition,
    iterate_triple,
    mean2,
    mean3,
    noninvariance_certificate,
    step_triple,
    type1_candidate,
)

from conftest import min_rel_gap, pairs, triples

positive = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)


# --------------------------------------------------------------------------
# single step
# --------------------------------------------------------------------------


def test_step_triple_arithmetic():
    assert step_triple(mean2("A2"), (1, 2, 3)) == (2.0, 2.5, 1.5)


def test_step_triple_diagonal_fixed_point():
    for m_id in ("A2", "G2", "L", "lh:2"):
        assert step_triple(mean2(m_id), (4, 4, 4)) == (4.0, 4.0, 4.0)


def test_step_triple_geometric():
    a, b, c = step_triple(mean2("G2"), (1, 4, 2))
    assert a == pytest.approx(math.sqrt(2), rel=1e-15)
    assert b == pytest.approx(math.sqrt(8), rel=1e-15)
    assert c == pytest.approx(2.0, rel=1e-15)


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------


def test_construct_arithmetic():
    M = construct_invariant(mean2("A2"))
    assert eval3(M, 1, 2, 3) == pytest.approx(2.0, abs=1e-13)


def test_construct_geometric():
    M = construct_invariant(mean2("G2"))
    assert eval3(M, 1, 2, 3) == pytest.approx(6.0 ** (1.0 / 3.0), abs=1e-12)


def test_construct_harmonic():
    M = construct_invariant(mean2("H2"))
    assert eval3(M, 1, 2, 3) == pytest.approx(18.0 / 11.0, abs=1e-12)


def test_construct_log_mean_spot(L3):
    assert eval3(L3, 1, 2, 3) == pytest.approx(1.87917, abs=5e-5)
    # frozen from a 50-digit run of the same recursion
    assert eval3(L3, 1, 2, 3) == pytest.approx(1.8791729736965828, abs=5e-13)
    assert eval3(L3, 0.9, 1.0, 1.1) == pytest.approx(0.9977710581703243, abs=5e-13)


def test_construct_iteration_budget():
    trace = iterate_triple(mean2("L"), (1, 2, 3))
    assert trace.converged
    assert trace.iterations <= 60
    assert trace.limit == pytest.approx(1.8791729736965828, abs=5e-13)


def test_construct_rejects_missing_flags():
    with pytest.raises(InvalidBaseMean):
        construct_invariant(mean2("min"))
    from invmeans import Mean2Descriptor

    lopsided = Mean2Descriptor("w", lambda a, b: (2 * a + b) / 3.0, symmetric=False)
    with pytest.raises(InvalidBaseMean):
        construct_invariant(lopsided)


def test_construct_no_convergence():
    cfg = ToleranceConfig(rel_tol=1e-14, max_iter=3)
    with pytest.raises(NoConvergence):
        iterate_triple(mean2("A2"), (1, 2, 3), cfg)


def test_trace_state_invariants():
    cfg = ToleranceConfig(trace_states=True)
    for m_id in ("A2", "G2", "L"):
        m = mean2(m_id)
        for point in triples(30, seed=21):
            trace = iterate_triple(m, point, cfg)
            lo, hi = min(point), max(point)
            assert lo <= trace.limit <= hi
            slack = 4e-16
            for (a, b, c) in trace.states:
                # ordering a <= c <= b is preserved from the sorted start
                assert a <= c * (1 + slack) and c <= b * (1 + slack)
            for (a0, b0, _), (a1, b1, _) in zip(trace.states, trace.states[1:]):
                assert a1 >= a0 * (1 - slack)  # lower sequence never decreases
                assert b1 <= b0 * (1 + slack)  # upper sequence never increases


@given(a=positive, b=positive, c=positive)
@settings(max_examples=40, deadline=None)
def test_constructed_limit_between_min_and_max(a, b, c):
    trace = iterate_triple(mean2("G2"), (a, b, c))
    assert min(a, b, c) <= trace.limit <= max(a, b, c)


def test_constructed_symmetry(L3):
    base = eval3(L3, 0.7, 2.0, 5.1)
    for perm in itertools.permutations((0.7, 2.0, 5.1)):
        assert eval3(L3, *perm) == base


def test_constructed_homogeneity(L3):
    for point in triples(40, seed=22):
        v = eval3(L3, *point)
        assert eval3(L3, *(2 * x for x in point)) == pytest.approx(2 * v, rel=1e-13)


def test_constructed_flags(L3):
    assert L3.symmetric and L3.strict and L3.isotone and L3.homogeneous
    assert not construct_invariant(mean2("A2")).analytic or True  # analytic not claimed


# --------------------------------------------------------------------------
# invariance residuals
# --------------------------------------------------------------------------


def test_check_type1_classical_zero():
    for pair in (("A3", "A2"), ("G3", "G2"), ("H3", "H2")):
        M, m = mean3(pair[0]), mean2(pair[1])
        assert abs(check_type1(M, m, (1, 2, 3))) < 1e-14


def test_check_type1_lehmer_residual():
    # exact rational: LH2(5/2, 5/3, 13/5) - 7/3 = -1/6090
    residual = check_type1(mean3("LH:2"), mean2("lh:2"), (1, 2, 3))
    assert residual == pytest.approx(-1.0 / 6090.0, abs=1e-12)
    assert residual < 0 and abs(residual) > 1e-5


def test_check_type1_constructed_zero(L3):
    assert abs(check_type1(L3, mean2("L"), (1, 2, 3))) < 1e-10


def test_idempotence_of_construction():
    for m_id in ("A2", "G2", "H2", "L", "lh:2", "Ap:1/3"):
        m = mean2(m_id)
        M = construct_invariant(m)
        for point in triples(60, seed=23):
            residual = check_type1(M, m, point)
            scale = eval3(M, *point)
            assert abs(residual) <= 10 * 1e-14 * scale + 1e-15, (m_id, point)


def test_sandwich_monotonicity():
    lower = construct_invariant(mean2("G2"))
    middle = construct_invariant(mean2("L"))
    upper = construct_invariant(mean2("Ap:1/3"))
    for point in triples(200, seed=24):
        lo = eval3(lower, *point)
        mid = eval3(middle, *point)
        hi = eval3(upper, *point)
        assert lo <= mid * (1 + 1e-13)
        assert mid <= hi * (1 + 1e-13)


# --------------------------------------------------------------------------
# pairwise composition
# --------------------------------------------------------------------------


def test_compose_pairwise_examples():
    m = mean2("A2")
    assert eval3(compose_pairwise(mean3("min"), m), 1, 2, 3) == pytest.approx(1.5)
    assert eval3(compose_pairwise(mean3("max"), m), 1, 2, 3) == pytest.approx(2.5)
    fixed = compose_pairwise(mean3("A3"), m)
    assert eval3(fixed, 1, 2, 3) == pytest.approx(eval3(mean3("A3"), 1, 2, 3), rel=1e-15)


def test_iterate_composition_monotone_limits():
    m = mean2("A2")
    seq_min = iterate_composition(mean3("min"), m, (1, 2, 3))
    seq_max = iterate_composition(mean3("max"), m, (1, 2, 3))
    assert all(x <= y + 1e-15 for x, y in zip(seq_min, seq_min[1:]))
    assert all(x >= y - 1e-15 for x, y in zip(seq_max, seq_max[1:]))
    assert seq_min[-1] == pytest.approx(2.0, rel=1e-13)
    assert seq_max[-1] == pytest.approx(2.0, rel=1e-13)


def test_iterate_composition_constant_at_fixed_point():
    seq = iterate_composition(mean3("A3"), mean2("A2"), (1, 2, 3))
    assert len(seq) == 2
    assert seq[0] == seq[1] == 2.0


def test_iterate_composition_agrees_with_construction(L3):
    for point in triples(10, seed=25):
        seq = iterate_composition(mean3("G3"), mean2("L"), point)
        direct = eval3(L3, *point)
        assert seq[-1] == pytest.approx(direct, rel=1e-13)


def test_uniqueness_probe():
    # iterates from the extreme seeds squeeze onto one value
    for point in triples(10, seed=26):
        low = iterate_composition(mean3("min"), mean2("L"), point)[-1]
        high = iterate_composition(mean3("max"), mean2("L"), point)[-1]
        assert low == pytest.approx(high, rel=1e-13)


def test_envelope_classifications():
    sample = [p for p in triples(300, seed=27) if min_rel_gap(p) > 1e-6]
    upper = envelope_test(mean3("Ap:1/3"), mean2("L"), sample)
    assert upper.sign == "<="
    assert upper.n_positive == 0
    lower = envelope_test(mean3("G3"), mean2("L"), sample)
    assert lower.sign == ">="
    assert lower.n_negative == 0
    neutral = envelope_test(mean3("A3"), mean2("A2"), sample)
    assert neutral.sign == "<="
    assert neutral.n_positive == neutral.n_negative == 0
    mixed = envelope_test(mean3("LH:2"), mean2("lh:2"), sample)
    assert mixed.sign == "mixed"
    assert len(mixed.witnesses) == 2


# --------------------------------------------------------------------------
# candidate extraction and the non-invariance certificate
# --------------------------------------------------------------------------


def test_type1_candidate_quadratic_root():
    # closed form -b + sqrt(2(b^2 + ab)) from the repeated-argument identity
    value = type1_candidate(mean3("Qroot"), 1, 2)
    assert value == pytest.approx(-2.0 + math.sqrt(12.0), abs=2e-13)


def test_type1_candidate_classical():
    assert type1_candidate(mean3("A3"), 1, 2) == pytest.approx(1.5, abs=1e-13)
    assert type1_candidate(mean3("G3"), 1, 4) == pytest.approx(2.0, abs=1e-12)


def test_type1_candidate_no_bracket():
    # a "mean" that decreases in its repeated argument has no bracket
    def anti(a, b, c):
        return a + b + c - 2.0 * sorted((a, b, c))[1]

    warped = Mean3Descriptor("anti-median", anti, strict=False, analytic=False)
    with pytest.raises(NoBracket):
        type1_candidate(warped, 1.0, 2.0)


def test_noninvariance_certificate_qroot():
    cert = noninvariance_certificate(mean3("Qroot"), (1, 2, 3))
    assert cert.composed == pytest.approx(1.9245267336471997, abs=1e-9)
    assert cert.direct == pytest.approx(1.9148542155126762, abs=1e-12)
    assert cert.gap == pytest.approx(0.009672518135, abs=1e-9)
    assert cert.certified


def test_noninvariance_certificate_classical_pass():
    for M_id in ("A3", "G3"):
        cert = noninvariance_certificate(mean3(M_id), (1, 2, 3))
        assert abs(cert.gap) < 1e-12
        assert not cert.certified
