"""Discrimination layer: oracles, measurement optimality, vote tails."""
import csv
import math

import numpy as np
import pytest

from trajsense import discrim, qcore, solver, trajset
from trajsense.discrim import OutputEnsemble, make_ensemble

PI = math.pi
BELL = qcore.make_ket(2, [("01", 1.0), ("10", 1.0)])
TS21 = trajset.gen_symmetric(2, 1)
TS42 = trajset.gen_symmetric(4, 2)


def plus_state(n):
    return qcore.Ket(n, np.full(1 << n, (1 << n) ** -0.5, dtype=complex))


# --- orthogonality verification -------------------------------------------

def test_verify_ts_bell():
    rep = discrim.verify_ts(BELL, TS21, PI / 2)
    assert rep.is_ts and rep.max_residual < 1e-12


def test_verify_ts_unentangled_fails():
    rep = discrim.verify_ts(plus_state(2), TS21, PI / 2)
    assert not rep.is_ts
    # off-diagonal is cos^2(pi/4) = 1/2
    assert abs(rep.max_residual - 0.5) < 1e-12


def test_verify_ts_zero_theta():
    rep = discrim.verify_ts(BELL, TS21, 0.0)
    assert not rep.is_ts and abs(rep.max_residual - 1.0) < 1e-12


# --- two-state oracle ------------------------------------------------------

def test_helstrom_orthogonal_and_identical():
    a = qcore.make_ket(1, [("0", 1.0)])
    b = qcore.make_ket(1, [("1", 1.0)])
    assert discrim.helstrom_pair(a, b).p_fail < 1e-12
    assert abs(discrim.helstrom_pair(a, a).p_fail - 0.5) < 1e-12


@pytest.mark.parametrize("theta", [0.3, 1.2, 2.5])
def test_helstrom_single_qubit_formula(theta):
    plus = qcore.Ket(1, np.array([1, 1], dtype=complex) / math.sqrt(2))
    rot = qcore.apply_phase(plus, trajset.compile_phase(trajset.Trajectory((1,)), 1, theta))
    got = discrim.helstrom_pair(plus, rot).p_fail
    assert abs(got - (1 - abs(math.sin(theta / 2))) / 2) < 1e-12


# --- square-root measurement ----------------------------------------------

def test_pgm_orthogonal_is_projective():
    cert = solver.solve_symmetric(4, 2, 3 * PI / 4)
    res = discrim.pgm(make_ensemble(cert.witness_state, TS42, 3 * PI / 4))
    assert res.p_fail < 1e-10
    total = sum(res.povm)
    assert np.abs(total - np.eye(16)).max() < 1e-9
    for P in res.povm:
        assert np.linalg.eigvalsh(P).min() > -1e-9


def test_pgm_identical_states():
    ens = OutputEnsemble(tuple([qcore.make_ket(2, [("00", 1.0)])] * 6))
    assert abs(discrim.pgm(ens).p_fail - 5 / 6) < 1e-12


def test_pgm_confusion_rows_stochastic():
    res = discrim.pgm(make_ensemble(plus_state(4), TS42, 0.6 * PI))
    np.testing.assert_allclose(res.confusion.sum(axis=1), 1.0, atol=1e-9)
    assert res.confusion.min() >= 0.0


# --- fixed-point optimum ---------------------------------------------------

def test_optimal_matches_helstrom_on_pairs():
    for theta in [0.4, 1.1, 2.0]:
        ens = make_ensemble(plus_state(2), TS21, theta)
        o = discrim.optimal_measurement(ens)
        h = discrim.helstrom_pair(ens.states[0], ens.states[1])
        assert abs(o.p_fail - h.p_fail) < 1e-8
        assert o.optimality_residual < 1e-9


def test_optimal_never_worse_than_pgm():
    for theta in [0.3 * PI, 0.6 * PI, 0.9 * PI]:
        ens = make_ensemble(plus_state(4), TS42, theta)
        assert discrim.optimal_measurement(ens).p_fail <= discrim.pgm(ens).p_fail + 1e-9


def test_optimal_equals_pgm_on_cyclic_ensembles():
    """Shift-covariant output sets are geometrically uniform: PGM is optimal."""
    cyc = trajset.gen_cyclic(4, 2)
    for theta in [0.4 * PI, 0.7 * PI]:
        ens = make_ensemble(plus_state(4), cyc, theta)
        assert abs(discrim.optimal_measurement(ens).p_fail - discrim.pgm(ens).p_fail) < 1e-8


def test_optimal_rejects_bad_tol():
    with pytest.raises(ValueError):
        discrim.optimal_measurement(make_ensemble(BELL, TS21, 1.0), tol=0.0)


# --- classical baselines ---------------------------------------------------

def test_classical_plus_endpoints():
    res = discrim.classical_baseline(TS42, PI, "plus_product")
    assert res.p_fail < 1e-9
    res0 = discrim.classical_baseline(TS42, 0.0, "plus_product")
    assert abs(res0.p_fail - 5 / 6) < 1e-9


def test_classical_plus_positive_below_pi():
    for theta in [0.5 * PI, 0.9 * PI, 0.99 * PI]:
        assert discrim.classical_baseline(TS42, theta, "plus_product").p_fail > 0


def test_classical_grid_never_worse_than_plus():
    theta = 0.7 * PI
    plus = discrim.classical_baseline(TS42, theta, "plus_product")
    grid = discrim.classical_baseline(TS42, theta, "best_product_grid", grid=(8, 5))
    assert grid.p_fail <= plus.p_fail + 1e-9
    assert "alpha=" in grid.note


def test_classical_grid_size_guard():
    with pytest.raises(ValueError):
        discrim.classical_baseline(trajset.gen_symmetric(11, 5), 1.0, "best_product_grid")
    with pytest.raises(ValueError):
        discrim.classical_baseline(TS42, 1.0, "nope")


# --- failure curves --------------------------------------------------------

def test_failure_curve_properties():
    grid = np.linspace(0.0, PI, 9)
    q = discrim.failure_curve(TS42, "solver_witness", grid)
    c = discrim.failure_curve(TS42, "classical_plus", grid)
    assert abs(q[0].p_fail - 5 / 6) < 1e-12
    assert abs(c[0].p_fail - 5 / 6) < 1e-12
    for qp, cp in zip(q, c):
        assert qp.p_fail <= cp.p_fail + 1e-9          # entanglement dominance
    for prev, cur in zip(q, q[1:]):
        assert cur.p_fail <= prev.p_fail + 1e-9       # monotone in theta
    for qp in q:
        if qp.theta >= 3 * PI / 4 - 1e-12:
            assert qp.p_fail < 1e-9


def test_failure_curve_rejects_unknown_source():
    with pytest.raises(ValueError):
        discrim.failure_curve(TS42, "witness", [1.0])


# --- plurality-vote repetition ---------------------------------------------

def test_vote_error_binary_hand_values():
    # two-category confusion with q = 0.9: r=2 keeps error 0.1 (tie), r=3 gives 0.028
    conf = np.array([[0.9, 0.1], [0.1, 0.9]])
    prior = np.array([0.5, 0.5])
    assert abs(discrim.plurality_error(conf, prior, 1) - 0.1) < 1e-12
    assert abs(discrim.plurality_error(conf, prior, 2) - 0.1) < 1e-12
    assert abs(discrim.plurality_error(conf, prior, 3) - 0.028) < 1e-12


def test_vote_error_r1_equals_per_shot():
    res = discrim.classical_baseline(TS42, 0.8 * PI, "plus_product")
    prior = np.full(6, 1 / 6)
    assert abs(discrim.plurality_error(res.confusion, prior, 1) - res.p_fail) < 1e-10


def test_vote_dp_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(4):
        raw = rng.dirichlet(np.ones(5), size=5)
        prior = np.full(5, 1 / 5)
        for r in [4, 9, 14]:
            e1 = discrim.plurality_error_enum(raw, prior, r)
            e2 = sum(prior[i] * (1 - discrim._plurality_win_dp(raw[i], i, r))
                     for i in range(5))
            assert abs(e1 - e2) < 1e-10


def test_vote_dp_matches_monte_carlo_beyond_enum():
    conf = np.array([[0.7, 0.1, 0.1, 0.1],
                     [0.1, 0.7, 0.1, 0.1],
                     [0.1, 0.1, 0.7, 0.1],
                     [0.1, 0.1, 0.1, 0.7]])
    prior = np.full(4, 0.25)
    r = 25
    exact = discrim.plurality_error(conf, prior, r)
    mc = discrim.plurality_error_mc(conf, prior, r, trials=120_000, seed=9)
    sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / 120_000)
    assert abs(mc - exact) < 4 * sigma + 1e-6


def test_repetition_quantum_single_shot():
    cert = solver.solve_symmetric(4, 2, 0.8 * PI)
    res = discrim.pgm(make_ensemble(cert.witness_state, TS42, 0.8 * PI))
    reports = discrim.repetition_analysis(res, [1e-1, 1e-3, 1e-6])
    assert [rep.r for rep in reports] == [1, 1, 1]


def test_repetition_chance_level_diverges():
    flat = discrim.DiscriminationResult(None, np.full(6, 1 / 6), 5 / 6, "pgm",
                                        np.full((6, 6), 1 / 6))
    reports = discrim.repetition_analysis(flat, [0.25])
    assert math.isinf(reports[0].r)


def test_repetition_classical_log_scaling():
    res = discrim.classical_baseline(TS42, 3 * PI / 4, "plus_product")
    eps = [10.0 ** -k for k in range(1, 7)]
    reports = discrim.repetition_analysis(res, eps)
    rs = np.array([rep.r for rep in reports], dtype=float)
    assert (np.diff(rs) >= 0).all()
    logs = np.log(1 / np.array(eps))
    A = np.vstack([logs, np.ones_like(logs)]).T
    coef, resid, *_ = np.linalg.lstsq(A, rs, rcond=None)
    ss = ((rs - rs.mean()) ** 2).sum()
    assert coef[0] > 0
    assert 1 - resid[0] / ss > 0.95


# --- CSV emission ----------------------------------------------------------

def test_curve_csv_roundtrip(tmp_path):
    grid = [0.0, 0.5 * PI, PI]
    q = discrim.failure_curve(TS21, "solver_witness", grid)
    c = discrim.failure_curve(TS21, "classical_plus", grid)
    path = tmp_path / "curve.csv"
    discrim.write_curve_csv(path, q, c)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["theta", "p_fail_quantum", "p_fail_classical", "method"]
    assert len(rows) == 4
    assert float(rows[1][1]) == 0.5  # theta=0 for two hypotheses


def test_curve_csv_grid_mismatch(tmp_path):
    q = discrim.failure_curve(TS21, "solver_witness", [1.0])
    c = discrim.failure_curve(TS21, "classical_plus", [1.0, 2.0])
    with pytest.raises(ValueError):
        discrim.write_curve_csv(tmp_path / "x.csv", q, c)


def test_repetition_csv(tmp_path):
    eps = [1e-1, 1e-2]
    flat = discrim.DiscriminationResult(None, np.full(2, 0.5), 0.5, "pgm",
                                        np.full((2, 2), 0.5))
    cert = solver.solve_symmetric(2, 1, 0.75 * PI)
    qres = discrim.pgm(make_ensemble(cert.witness_state, TS21, 0.75 * PI))
    cl = discrim.repetition_analysis(flat, eps)
    qu = discrim.repetition_analysis(qres, eps)
    path = tmp_path / "inset.csv"
    discrim.write_repetition_csv(path, eps, cl, qu)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["epsilon", "r_classical", "r_quantum"]
    assert rows[1][1] == "inf" and rows[1][2] == "1"


# --- ensemble validation ---------------------------------------------------

def test_ensemble_validation():
    with pytest.raises(ValueError):
        OutputEnsemble(())
    with pytest.raises(ValueError):
        OutputEnsemble((BELL, qcore.make_ket(3, [("000", 1.0)])))
    with pytest.raises(ValueError):
        OutputEnsemble((BELL, BELL), prior=np.array([0.7, 0.7]))
