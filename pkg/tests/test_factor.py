import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdpolar.algebra import CdElement, axis_exp, mul_arrays
from cdpolar.factor import (
    FactorSolution,
    SolverConfig,
    angle_distance,
    find_solutions,
    forward_compose,
    jacobian_analytic,
    jacobian_fd,
    reduce_sign_symmetry,
    residual,
    solve,
    stage_pairs,
    stage_values,
    verify_stage_rotations,
    wrap_angle,
)
from cdpolar.reference_system import PRINTED_PAIRS, pair_label, pairing_errata, printed_system
from cdpolar.selftest import KNOWN_PAIRING_ERRATA, WITNESS_TARGET
from cdpolar.sphere import gaussian_unit

HALF = math.pi / 2


def random_params(rng):
    y = rng.standard_normal(4)
    return np.concatenate([y / np.linalg.norm(y), rng.uniform(-math.pi, math.pi, 4)])


def test_forward_examples():
    assert forward_compose([1, 0, 0, 0], [0, 0, 0, 0]) == CdElement.one()
    np.testing.assert_allclose(forward_compose([1, 0, 0, 0], [HALF, 0, 0, 0]).coeffs, CdElement.basis(4).coeffs, atol=1e-16)
    # e4 e5 = e1
    np.testing.assert_allclose(forward_compose([1, 0, 0, 0], [HALF, HALF, 0, 0]).coeffs, CdElement.basis(1).coeffs, atol=1e-15)


def test_forward_grouping(rng):
    p = random_params(rng)
    acc = np.zeros(8)
    acc[:4] = p[:4]
    for k, a in zip((4, 5, 6, 7), p[4:]):
        acc = mul_arrays(acc, axis_exp(k, a))
    np.testing.assert_allclose(forward_compose(p[:4], p[4:]).coeffs, acc, atol=1e-15)


def test_forward_rejects_bad_lengths():
    with pytest.raises(ValueError):
        forward_compose([1, 0, 0], [0, 0, 0, 0])


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.lists(st.floats(-7, 7), min_size=4, max_size=4))
def test_norm_equals_quaternion_norm(y, phi):
    assert np.linalg.norm(forward_compose(y, phi).coeffs) == pytest.approx(np.linalg.norm(y), rel=1e-12, abs=1e-300)


def test_residual_examples():
    s = FactorSolution(1, 0, 0, 0, 0, 0, 0, 0)
    assert np.all(residual(s, CdElement.one()) == 0)
    np.testing.assert_array_equal(residual(s, CdElement.basis(4)), [1, 0, 0, 0, -1, 0, 0, 0])


def test_stage_values_examples():
    st_ = stage_values(FactorSolution(0, 1, 0, 0, HALF, 0, 0, 0))
    np.testing.assert_allclose(st_.c, mul_arrays(CdElement.basis(1).coeffs, CdElement.basis(4).coeffs), atol=1e-16)
    # c1 = cos(phi4) y1, c5 = sin(phi4) y1
    st_ = stage_values(FactorSolution(0, 1, 0, 0, 0.3, 0, 0, 0))
    assert st_.c[1] == pytest.approx(math.cos(0.3)) and st_.c[5] == pytest.approx(math.sin(0.3))
    np.testing.assert_array_equal(st_.b, st_.c)


def test_jacobians_agree(rng):
    for _ in range(20):
        p = random_params(rng) * np.r_[rng.uniform(0.5, 2), np.ones(7)]
        ja, jf = jacobian_analytic(p), jacobian_fd(p)
        assert np.max(np.abs(ja - jf)) <= 1e-5 * max(1.0, np.max(np.abs(ja)))


def test_stage_pairs_cover_all_coordinates():
    for k in (4, 5, 6, 7):
        flat = sorted(i for pair in stage_pairs(k) for i in pair)
        assert flat == list(range(8))


def test_stage_pairs_are_rotations(rng):
    for k in (4, 5, 6, 7):
        v = rng.standard_normal(8)
        out = mul_arrays(v, axis_exp(k, 0.7))
        for m, n in stage_pairs(k):
            assert complex(out[m], out[n]) == pytest.approx(complex(v[m], v[n]) * complex(math.cos(0.7), math.sin(0.7)))


def test_verify_examples(rng):
    p = random_params(rng)
    s = FactorSolution.from_params(p)
    target = forward_compose(p[:4], p[4:])
    assert verify_stage_rotations(s, target) <= 1e-14
    moved = FactorSolution.from_params(p + np.r_[np.zeros(7), 1e-3])
    assert verify_stage_rotations(moved, target) > 1e-4


def test_solve_identity():
    s = solve(CdElement.one())
    assert s.converged and s.start_index == 0 and s.iterations == 0
    assert s.residual_norm == 0.0


def test_solve_e4():
    s = solve(CdElement.basis(4))
    assert s.converged and s.residual_norm <= 1e-8
    np.testing.assert_allclose(forward_compose(s.y, s.phi).coeffs, CdElement.basis(4).coeffs, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_solve_round_trip(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    target = forward_compose(p[:4], p[4:])
    s = solve(target)
    assert s.converged and s.residual_norm <= 1e-8
    assert abs(np.linalg.norm(s.y) - 1.0) <= 1e-9
    assert verify_stage_rotations(s, target) <= 1e-8
    assert np.all((-math.pi <= s.phi) & (s.phi < math.pi))


def test_solve_fd_jacobian(rng):
    target = CdElement(gaussian_unit(rng))
    s = solve(target, SolverConfig(jacobian="fd"))
    assert s.converged


def test_failure_is_a_value():
    s = solve(CdElement(WITNESS_TARGET), SolverConfig(max_iter=0, n_starts=2))
    assert not s.converged
    assert s.residual_norm > 0.1


def test_non_unit_target_rejected():
    with pytest.raises(ValueError):
        solve(CdElement.real(2.0))
    with pytest.raises(ValueError):
        solve(CdElement.one(4))


@pytest.mark.parametrize("kw", [{"tol": 0}, {"n_starts": 0}, {"max_iter": -1}, {"jacobian": "exact"}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_warm_start_is_start_zero(rng):
    p = random_params(rng)
    target = forward_compose(p[:4], p[4:])
    near = p + 1e-4 * rng.standard_normal(8)
    s = solve(target, initial=near)
    assert s.converged and s.start_index == 0
    assert np.max(np.abs(s.params - np.r_[p[:4], wrap_angle(p[4:])])) < 1e-3


def test_wrap_angle():
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(-math.pi) == -math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_sign_symmetry_reduction(rng):
    p = random_params(rng)
    s = FactorSolution.from_params(p)
    flipped = FactorSolution.from_params(np.r_[-p[:4], p[4:] + np.r_[math.pi, 0, 0, 0]])
    np.testing.assert_allclose(forward_compose(flipped.y, flipped.phi).coeffs, forward_compose(s.y, s.phi).coeffs, atol=1e-14)
    np.testing.assert_allclose(reduce_sign_symmetry(s), reduce_sign_symmetry(flipped), atol=1e-14)


def test_non_uniqueness_witness():
    target = CdElement(WITNESS_TARGET)
    sols = find_solutions(target)
    distinct = []
    for s in sols:
        key = reduce_sign_symmetry(s)
        if all(np.max(np.abs(key - k)) > 1e-6 for k, _ in distinct):
            distinct.append((key, s))
    assert len(distinct) >= 2
    assert angle_distance(distinct[0][1], distinct[1][1]) > 0.1
    for _, s in distinct:
        assert s.residual_norm <= 1e-8


def test_printed_system_matches(rng):
    for _ in range(50):
        p = random_params(rng) * np.r_[2.0, 2.0, 2.0, 2.0, 1, 1, 1, 1]
        np.testing.assert_allclose(printed_system(p[:4], p[4:]), forward_compose(p[:4], p[4:]).coeffs, atol=1e-13)


def test_printed_pairings_errata(errata_text):
    found = pairing_errata()
    assert {printed for _, printed, _ in found} == set(KNOWN_PAIRING_ERRATA)
    for k, printed, derived in found:
        assert printed in errata_text and derived in errata_text
        assert derived in {pair_label(k, pair) for pair in stage_pairs(k)}


def test_printed_pairings_otherwise_agree():
    for k, printed in PRINTED_PAIRS.items():
        derived = set(stage_pairs(k))
        assert len(set(printed) - derived) <= 1
