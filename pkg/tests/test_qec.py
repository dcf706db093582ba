"""Error-channel, stabilizer, and transversality tests."""
import json
import math

import numpy as np
import pytest

from trajsense import discrim, qcore, qec, solver, trajset


def window_state():
    return solver.build_cyclic(4, 2, math.pi / 2).witness_state


# -------------------------------------------------------------- channel

@pytest.mark.parametrize("ts,theta", [
    (trajset.gen_cyclic(4, 2), math.pi / 2),
    (trajset.gen_symmetric(4, 2), 3 * math.pi / 4),
    (trajset.gen_symmetric(5, 2), 1.1),
    (trajset.gen_cyclic(6, 3), 0.4),
])
def test_channel_trace_preserving(ts, theta):
    ch = qec.ErrorChannel.from_trajectory_set(ts, theta)
    assert ch.completeness_residual() <= 1e-12
    assert ch.size == len(ts)


def test_kraus_diag_carries_weight():
    ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), 0.9)
    k0 = ch.kraus_diag(0)
    assert np.allclose(np.abs(k0), 1 / 2)   # 1/sqrt(4), unit-modulus phases


def test_channel_apply_matches_phase_op():
    ts = trajset.gen_cyclic(4, 2)
    ch = qec.ErrorChannel.from_trajectory_set(ts, 0.7)
    psi = window_state()
    out = ch.apply(psi, 2)
    op = trajset.compile_phase(ts.members[2], 4, 0.7)
    assert np.allclose(out.amps, psi.amps * op.phase)


# ------------------------------------------------------------- kl_verify

def test_window_state_is_discriminating():
    ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), math.pi / 2)
    rep = qec.kl_verify(window_state(), ch)
    assert rep.verdict == "discriminating code"
    assert rep.max_offdiag < 1e-12
    assert rep.max_diag_dev < 1e-12


def test_plus_product_is_recoverable_only():
    ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), math.pi / 2)
    plus = qcore.from_vector(4, np.full(16, 0.25))
    rep = qec.kl_verify(plus, ch)
    assert rep.verdict == "KL-recoverable only"
    # adjacent windows overlap in one qubit; the two fresh qubits each
    # contribute cos(pi/4), and the 1/4 channel weight scales the entry
    assert rep.max_offdiag == pytest.approx(math.cos(math.pi / 4) ** 2 / 4, abs=1e-12)


def test_single_member_channel_trivially_discriminating():
    one = trajset.TrajectorySet(4, "custom", 2, (trajset.Trajectory((1, 2)),))
    ch = qec.ErrorChannel.from_trajectory_set(one, math.pi / 2)
    plus = qcore.from_vector(4, np.full(16, 0.25))
    assert qec.kl_verify(plus, ch).verdict == "discriminating code"


def test_unnormalized_state_flagged():
    ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), math.pi / 2)
    bad = qcore.from_vector(4, np.full(16, 1.0), normalize=False)
    assert qec.kl_verify(bad, ch).verdict == "not a code state"


def test_kl_report_json():
    ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), math.pi / 2)
    d = json.loads(qec.kl_verify(window_state(), ch).to_json())
    assert d["verdict"] == "discriminating code"
    assert d["size"] == 4
    assert d["max_offdiag"] < 1e-12


@pytest.mark.parametrize("make_state,ts,theta", [
    (window_state, trajset.gen_cyclic(4, 2), math.pi / 2),
    (window_state, trajset.gen_cyclic(4, 2), 0.3),
    (lambda: qcore.from_vector(4, np.full(16, 0.25)), trajset.gen_cyclic(4, 2), math.pi / 2),
    (lambda: solver.solve_symmetric(4, 2, 3 * math.pi / 4).witness_state,
     trajset.gen_symmetric(4, 2), 3 * math.pi / 4),
    (lambda: qcore.make_ket(4, [("0101", 1), ("1010", 1j)]),
     trajset.gen_symmetric(4, 1), 0.8),
])
def test_kl_agrees_with_output_orthogonality(make_state, ts, theta):
    psi = make_state()
    ch = qec.ErrorChannel.from_trajectory_set(ts, theta)
    kl = qec.kl_verify(psi, ch).verdict == "discriminating code"
    assert kl == discrim.verify_ts(psi, ts, theta).is_ts


# ------------------------------------------------------------ stabilizers

def test_parse_pauli():
    assert qec.parse_pauli("-ZIZI") == (-1, "ZIZI")
    assert qec.parse_pauli("+XY") == (1, "XY")
    assert qec.parse_pauli("ZZ") == (1, "ZZ")
    for bad in ("", "-", "ZQ", "z", "Z1"):
        with pytest.raises(ValueError):
            qec.parse_pauli(bad)


def test_anticommuting_generators_rejected():
    with pytest.raises(ValueError, match="anticommute"):
        qec.StabilizerGroup(["XIII", "ZIII"])
    with pytest.raises(ValueError, match="anticommute"):
        qec.StabilizerGroup(["XXII", "ZIII"])


def test_minus_identity_rejected():
    with pytest.raises(ValueError, match="-I"):
        qec.StabilizerGroup(["ZIII", "-ZIII"])
    # a three-generator dependency multiplying to -I
    with pytest.raises(ValueError, match="-I"):
        qec.StabilizerGroup(["ZZII", "-IZZI", "ZIZI"])
    # the same dependency with consistent signs multiplies to +I: fine
    qec.StabilizerGroup(["ZZII", "IZZI", "ZIZI"])


def test_mixed_length_generators_rejected():
    with pytest.raises(ValueError):
        qec.StabilizerGroup(["ZZ", "ZIZ"])


def test_window_state_stabilized():
    rep = qec.stabilizer_check(qec.window_code_state(), qec.window_code_group())
    assert rep.all_plus_one
    assert max(rep.residuals.values()) < 1e-12
    assert rep.failing == ()


def test_sign_flip_fails_with_named_generator():
    rep = qec.stabilizer_check(qec.window_code_state(),
                               qec.StabilizerGroup(["ZIZI"]))
    assert not rep.all_plus_one
    assert rep.failing == ("ZIZI",)


def test_all_zeros_stabilized_by_z():
    zeros = qcore.make_ket(4, [("0000", 1)])
    grp = qec.StabilizerGroup(["ZIII", "IZII", "IIZI", "IIIZ"])
    assert qec.stabilizer_check(zeros, grp).all_plus_one


def test_stabilizer_check_length_mismatch():
    with pytest.raises(ValueError):
        qec.stabilizer_check(qec.window_code_state(), qec.StabilizerGroup(["ZZ"]))


def test_stabilizer_report_json():
    rep = qec.stabilizer_check(qec.window_code_state(), qec.window_code_group())
    d = json.loads(rep.to_json())
    assert d["all_plus_one"] is True
    assert set(d["residuals"]) == set(qec.window_code_group().generators)


def test_builder_state_matches_hand_entry():
    assert qcore.equal_up_to_phase(window_state(), qec.window_code_state())


def test_window_group_contains_y_products():
    # product of -Z1Z3 and X1X3 is a Y1Y3 element (times a sign); the code
    # state must sit in its +1 eigenspace too
    phase, letters = qec._string_product([(-1, "ZIZI"), (1, "XIXI")])
    assert letters == "YIYI"
    sign = phase.real if abs(phase.imag) < 1e-15 else None
    assert sign in (-1.0, 1.0)
    label = ("-" if sign < 0 else "") + letters
    rep = qec.stabilizer_check(qec.window_code_state(), qec.StabilizerGroup([label]))
    assert rep.all_plus_one


# ---------------------------------------------------------- seven-qubit code

def test_css7_logical_states_structure():
    zero, one = qec.css7_logical_states()
    assert abs(np.vdot(zero.amps, one.amps)) < 1e-12
    assert np.linalg.norm(zero.amps) == pytest.approx(1.0, abs=1e-12)
    # logical zero: eight equal terms of Hamming weight 0 or 4
    support = np.nonzero(np.abs(zero.amps) > 1e-12)[0]
    assert len(support) == 8
    weights = {bin(int(j)).count("1") for j in support}
    assert weights == {0, 4}
    assert np.allclose(np.abs(zero.amps[support]), 1 / math.sqrt(8))
    # logical one is the bit-complement pattern
    support1 = np.nonzero(np.abs(one.amps) > 1e-12)[0]
    assert {bin(int(j)).count("1") for j in support1} == {3, 7}
    for st in (zero, one):
        assert qec.stabilizer_check(st, qec.css7_group()).all_plus_one


def test_transversal_quarter_turn_is_inverse_logical():
    rep = qec.transversal_rotation_check()
    assert rep.passed
    assert rep.codespace_residual < 1e-9
    assert rep.logical_residual < 1e-9
    # for this code the identity holds with no leftover global phase
    assert abs(rep.global_phase - 1.0) < 1e-9


def test_transversal_half_turn_also_exact():
    assert qec.transversal_rotation_check(math.pi).passed


@pytest.mark.parametrize("angle", [math.pi / 3, 0.7])
def test_other_angles_fail_the_check(angle):
    rep = qec.transversal_rotation_check(angle)
    assert not rep.passed
    assert rep.detail in ("codespace leak", "wrong logical action")
    assert rep.codespace_residual > 1e-3 or rep.logical_residual > 1e-3


def test_plus_logical_relative_phase():
    # transversal quarter turn sends |0>+|1> to |0> - i|1> (logically)
    zero, one = qec.css7_logical_states()
    diag = qec._rz_diag(7, math.pi / 2)
    rotated = diag * (zero.amps + one.amps) / math.sqrt(2)
    c0 = np.vdot(zero.amps, rotated)
    c1 = np.vdot(one.amps, rotated)
    assert c1 / c0 == pytest.approx(-1j, abs=1e-12)


def test_transversality_report_json():
    d = json.loads(qec.transversal_rotation_check().to_json())
    assert d["passed"] is True
    assert d["codespace_residual"] < 1e-9
    d2 = json.loads(qec.transversal_rotation_check(math.pi / 3).to_json())
    assert d2["passed"] is False
    assert d2["detail"]
