"""Construct trajectory-sensing states and decide when they exist.

Two independent routes answer the same feasibility question:

* the closed-form route (`solve_symmetric`) works in the bit-flip and
  permutation invariant subspace, assembling the constraint rows from the
  symmetrized basis vectors themselves and analyzing the resulting small
  linear system directly; and
* the LP oracle (`solve_lp`) treats the squared magnitudes p_j = |c_j|^2 as
  variables of a linear feasibility program built from raw bit arithmetic,
  solved by exact rational phase-1 simplex (float fallback for very large
  custom instances).

`build_cyclic` realizes the tensor-composition construction for the cyclic
family, and every certificate's witness is re-verified against the full set
of pairwise orthogonality conditions afterwards.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import qcore, trajset
from .qcore import Ket
from .simplex import exact_phase1
from .trajset import TrajectorySet, Trajectory

#: feasibility slack shared by both routes so verdicts agree at boundaries
FEAS_TOL = 1e-9
#: entries this close to zero (after max-normalization) count as boundary ties
BOUNDARY_TOL = 1e-10
#: largest rows*cols the exact rational simplex is asked to handle
EXACT_LP_BUDGET = 60_000


class Threshold(NamedTuple):
    theta: float
    necessary: bool


def threshold_sym(n: int, m: int) -> Threshold:
    """Sufficient angle (n-1)pi/n; also necessary for the half-weight cases."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Threshold((n - 1) * math.pi / n, m in (n // 2, (n + 1) // 2))


def threshold_cyc(kappa) -> float:
    """Angle arccos(-1 + 1/ceil(kappa/2)) for the width-m window family, n = kappa*m."""
    if kappa != int(kappa) or kappa < 2:
        raise ValueError(f"kappa must be an integer >= 2, got {kappa!r}")
    return math.acos(-1.0 + 1.0 / math.ceil(int(kappa) / 2))


@dataclass(frozen=True)
class TSProblem:
    trajectories: TrajectorySet
    theta: float

    @property
    def trivial(self) -> bool:
        return len(self.trajectories) < 2


@dataclass
class FeasibilityCertificate:
    feasible: bool
    method: str                      # closed_form | lp | tensor_composition
    n: int
    theta: float
    family: str
    cbar_sq: list | None = None      # symmetrized squared magnitudes (may carry
                                     # the sign-violating ray when infeasible)
    p: list | None = None            # per-bitstring probabilities (LP route)
    max_residual: float = float("nan")
    witness_state: Ket | None = None
    boundary: bool = False
    marginal: bool = False
    trivial: bool = False
    infeasibility: float = 0.0
    sign_violations: list = field(default_factory=list)
    nullspace_dim: int | None = None
    detail: str = ""

    def to_json(self) -> str:
        obj = {
            "feasible": self.feasible, "method": self.method, "n": self.n,
            "theta": self.theta, "family": self.family,
            "max_residual": None if math.isnan(self.max_residual) else self.max_residual,
            "boundary": self.boundary, "marginal": self.marginal,
            "trivial": self.trivial, "infeasibility": self.infeasibility,
            "sign_violations": self.sign_violations,
            "nullspace_dim": self.nullspace_dim, "detail": self.detail,
        }
        if self.cbar_sq is not None:
            obj["cbar_sq"] = [float(v) for v in self.cbar_sq]
        if self.p is not None:
            obj["p"] = [float(v) for v in self.p]
        if self.witness_state is not None:
            obj["witness_state"] = json.loads(qcore.ket_to_json(self.witness_state))
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# shared verification

def _phase_rows(ts: TrajectorySet, theta: float) -> np.ndarray:
    """Stack of diagonal phase vectors, one row per trajectory."""
    return np.stack([trajset.compile_phase(t, ts.n, theta).phase for t in ts.members])


def eq1_gram(psi: Ket, ts: TrajectorySet, theta: float) -> np.ndarray:
    """Gram matrix of the post-trajectory outputs <psi|R(T)^dag R(T')|psi>."""
    if psi.n != ts.n:
        raise ValueError("state/trajectory register size mismatch")
    if len(ts) ** 2 * (1 << ts.n) > 2_000_000_000:
        raise ValueError("pairwise verification too large for dense computation")
    outs = _phase_rows(ts, theta) * psi.amps[None, :]
    return outs.conj() @ outs.T


def max_gram_residual(psi: Ket, ts: TrajectorySet, theta: float) -> float:
    g = eq1_gram(psi, ts, theta)
    return float(np.abs(g - np.eye(len(ts))).max())


# ---------------------------------------------------------------------------
# closed-form symmetrized route

def _sym_pair_reps(n: int, m: int):
    """One representative trajectory pair per intersection size."""
    reps = []
    for t in range(max(0, 2 * m - n), m):
        a = Trajectory(tuple(range(1, m + 1)))
        b = Trajectory(tuple(range(m - t + 1, 2 * m - t + 1)))
        reps.append((t, a, b))
    return reps

def _sym_constraint_rows(n: int, m: int, theta: float) -> np.ndarray:
    """Rows <nu|R(T)^dag R(T')|nu> over the symmetrized basis, one pair class each."""
    basis = qcore.symmetrized_basis(n)
    rows = []
    for _, ta, tb in _sym_pair_reps(n, m):
        pa = trajset.compile_phase(ta, n, theta).phase
        pb = trajset.compile_phase(tb, n, theta).phase
        d = pa.conj() * pb
        row = np.array([complex(d[list(e.support)].sum()) for e in basis])
        rows.append(row)
    if not rows:
        return np.zeros((0, len(basis)))
    cmplx = np.stack(rows)
    # bit-flip symmetry of the supports makes these rows real
    assert np.abs(cmplx.imag).max() < 1e-9, "symmetrized constraint rows must be real"
    return cmplx.real

def _nonneg_solution(A: np.ndarray, norms: np.ndarray):
    """Search for x >= 0 with A x = 0 and norms . x = 1 via basic solutions.

    Enumerates column-support subsets (largest first) and accepts the first
    exact solution that is nonnegative within BOUNDARY_TOL.  Returns
    (x or None, diagnostics).
    """
    K = len(norms)
    scale = np.abs(A).max(axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    B = np.vstack([A / scale, norms / norms.max()])
    b = np.zeros(B.shape[0])
    b[-1] = 1.0 / norms.max()
    best = None
    for size in range(K, 0, -1):
        for cols in itertools.combinations(range(K), size):
            sub = B[:, cols]
            x_s, *_ = np.linalg.lstsq(sub, b, rcond=None)
            if np.linalg.norm(sub @ x_s - b) > FEAS_TOL:
                continue
            x = np.zeros(K)
            x[list(cols)] = x_s
            if x.min() >= -BOUNDARY_TOL * max(1.0, x.max()):
                return np.clip(x, 0.0, None), best
            if best is None:
                best = x
    return None, best

def solve_symmetric(n: int, m: int, theta: float) -> FeasibilityCertificate:
    """Decide existence for the all-weight-m family via the invariant subspace."""
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"theta must be in (0, pi], got {theta}")
    ts = trajset.gen_symmetric(n, m)
    cert = FeasibilityCertificate(False, "closed_form", n, theta, "symmetric")
    if len(ts) < 2:
        uniform = Ket(n, np.full(1 << n, (1 << n) ** -0.5, dtype=complex))
        cert.feasible, cert.trivial, cert.witness_state = True, True, uniform
        cert.max_residual = max_gram_residual(uniform, ts, theta)
        cert.detail = "single-trajectory family is trivially distinguishable"
        return cert

    basis = qcore.symmetrized_basis(n)
    norms = np.array([e.norm_sq for e in basis], dtype=float)
    A = _sym_constraint_rows(n, m, theta)
    sv = np.linalg.svd(A, compute_uv=False) if A.size else np.array([])
    rank = int((sv > 1e-10 * (sv.max() if sv.size else 1.0)).sum())
    cert.nullspace_dim = len(basis) - rank

    x, ray = _nonneg_solution(A, norms)
    if x is None:
        cert.infeasibility = float(-ray.min() / max(abs(ray).max(), 1e-300)) if ray is not None else 1.0
        if ray is not None:
            # report the sign-violating candidate (ratios remain meaningful)
            if ray[np.argmax(np.abs(ray))] < 0:
                ray = -ray
            cert.cbar_sq = list(ray / np.abs(ray).max())
            cert.sign_violations = [int(i) for i in np.nonzero(ray < -BOUNDARY_TOL * np.abs(ray).max())[0]]
            cert.detail = ("no nonnegative solution; sign condition violated at nu="
                           + ",".join(map(str, cert.sign_violations)))
        else:
            cert.detail = "constraint system admits no nonzero solution"
        return cert

    x = x / float(norms @ x)           # sum_nu N_nu |cbar_nu|^2 = 1
    amps = np.zeros(1 << n)
    for e, xv in zip(basis, x):
        amps[list(e.support)] = math.sqrt(max(xv, 0.0))
    witness = Ket(n, amps.astype(complex))
    cert.feasible = True
    cert.cbar_sq = [float(v) for v in x]
    cert.boundary = bool(x.min() <= BOUNDARY_TOL * max(1.0, x.max()))
    cert.witness_state = witness
    cert.max_residual = max_gram_residual(witness, ts, theta)
    return cert


# ---------------------------------------------------------------------------
# linear-feasibility oracle over squared magnitudes

def _cyclic_orbit_ids(n: int) -> np.ndarray:
    """Orbit labels of bitstrings under cyclic shift and global bit flip."""
    mask = (1 << n) - 1
    idx = np.arange(1 << n, dtype=np.int64)
    rep = idx.copy()
    for variant in (idx, ~idx & mask):
        cur = variant.copy()
        for _ in range(n):
            cur = ((cur << 1) | (cur >> (n - 1))) & mask
            rep = np.minimum(rep, cur)
    _, inv = np.unique(rep, return_inverse=True)
    return inv

def _pair_coeffs(n: int, ta: Trajectory, tb: Trajectory, theta: float) -> np.ndarray:
    """Per-bitstring coefficient of <psi|R(Ta)^dag R(Tb)|psi> as a function of p."""
    sa = len(ta) - 2 * qcore.weight_on(n, ta.qubits)
    sb = len(tb) - 2 * qcore.weight_on(n, tb.qubits)
    return np.exp(-0.5j * theta * (sb - sa))

def _lp_system(ts: TrajectorySet, theta: float):
    """Build (rows, rhs, orbit_inverse) with symmetry-reduced variables.

    Variables are one per orbit of the relevant symmetry group (trivial for
    custom families); a feasible reduced vector expands to an orbit-constant
    p, and conversely averaging any feasible p over the group stays feasible,
    so the reduction preserves the verdict.
    """
    n = ts.n
    if ts.family == "symmetric":
        w = qcore.weight_on(n, range(1, n + 1))
        inv = np.minimum(w, n - w)
        pairs = [(a, b) for _, a, b in _sym_pair_reps(n, ts.m)]
    elif ts.family == "cyclic":
        inv = _cyclic_orbit_ids(n)
        pairs = [(ts.members[0], ts.members[d]) for d in range(1, len(ts))]
    else:
        inv = np.arange(1 << n)
        pairs = [(a, b) for a, b in itertools.combinations(ts.members, 2)]
    ncols = int(inv.max()) + 1
    rows = []
    for ta, tb in pairs:
        coeff = _pair_coeffs(n, ta, tb, theta)
        for part in (coeff.real, coeff.imag):
            row = np.bincount(inv, weights=part, minlength=ncols)
            if np.abs(row).max() > 1e-9:
                rows.append(row)
    counts = np.bincount(inv, minlength=ncols).astype(float)
    rows.append(counts)                       # total probability
    rhs = np.zeros(len(rows))
    rhs[-1] = 1.0
    return np.array(rows), rhs, inv

def _phase1_float(A: np.ndarray, b: np.ndarray):
    """Elastic feasibility LP via scipy for systems too big for exact pivots."""
    from scipy.optimize import linprog
    m, ncols = A.shape
    A_eq = np.hstack([A, np.eye(m), -np.eye(m)])
    c = np.concatenate([np.zeros(ncols), np.ones(2 * m)])
    res = linprog(c, A_eq=A_eq, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"feasibility LP failed: {res.message}")
    return float(res.fun), res.x[:ncols]

def solve_lp(problem: TSProblem) -> FeasibilityCertificate:
    """Independent oracle: feasibility of the magnitude-space linear system."""
    ts, theta = problem.trajectories, problem.theta
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"theta must be in (0, pi], got {theta}")
    cert = FeasibilityCertificate(False, "lp", ts.n, theta, ts.family)
    if problem.trivial:
        uniform = Ket(ts.n, np.full(1 << ts.n, (1 << ts.n) ** -0.5, dtype=complex))
        cert.feasible, cert.trivial, cert.witness_state = True, True, uniform
        cert.p = list(uniform.probs())
        cert.max_residual = max_gram_residual(uniform, ts, theta)
        return cert

    A, b, inv = _lp_system(ts, theta)
    if A.shape[0] * A.shape[1] <= EXACT_LP_BUDGET:
        obj, x_frac = exact_phase1(A.tolist(), b.tolist())
        infeas = float(obj)
        x = np.array([float(v) for v in x_frac])
    else:
        infeas, x = _phase1_float(A, b)
    cert.infeasibility = infeas
    if infeas > FEAS_TOL:
        cert.detail = f"phase-1 infeasibility {infeas:.3e} exceeds tolerance"
        return cert

    cert.feasible = True
    cert.marginal = infeas > 0.0
    p = np.clip(x[inv], 0.0, None)
    p = p / p.sum()
    witness = Ket(ts.n, np.sqrt(p).astype(complex))
    cert.p = [float(v) for v in p]
    cert.witness_state = witness
    cert.max_residual = max_gram_residual(witness, ts, theta)
    return cert


# ---------------------------------------------------------------------------
# tensor composition for the cyclic family

def build_cyclic(n: int, m: int, theta: float) -> FeasibilityCertificate:
    """Compose the width-m window TS state from m copies of a small one.

    Copy r lives on qubit positions {r, r+m, r+2m, ...}; each window of m
    consecutive positions touches every copy exactly once, so orthogonality
    of the small single-rotation states lifts to the full family.
    """
    if n % m != 0:
        raise ValueError(f"n={n} is not divisible by m={m}")
    kappa = n // m
    if kappa < 2:
        raise ValueError("tensor composition needs kappa = n/m >= 2")
    ts = trajset.gen_cyclic(n, m)
    sub = solve_symmetric(kappa, 1, theta)
    cert = FeasibilityCertificate(False, "tensor_composition", n, theta, "cyclic",
                                  cbar_sq=sub.cbar_sq, boundary=sub.boundary,
                                  nullspace_dim=sub.nullspace_dim)
    if not sub.feasible:
        cert.sign_violations = sub.sign_violations
        cert.infeasibility = sub.infeasibility
        cert.detail = (f"single-rotation subproblem on {kappa} qubits infeasible "
                       f"(threshold {threshold_cyc(kappa):.6f}): {sub.detail}")
        return cert

    phi = sub.witness_state
    bits = qcore.bit_table(n)
    powers = 1 << np.arange(kappa - 1, -1, -1)
    amps = np.ones(1 << n, dtype=complex)
    for r in range(1, m + 1):
        cols = [r + s * m - 1 for s in range(kappa)]
        amps *= phi.amps[bits[:, cols].astype(np.int64) @ powers]
    witness = Ket(n, amps)
    cert.feasible = True
    cert.witness_state = witness
    cert.p = [float(v) for v in witness.probs()]
    cert.max_residual = max_gram_residual(witness, ts, theta)
    return cert


def symmetrize(k: Ket) -> Ket:
    """Project onto the permutation/bit-flip invariant span and renormalize."""
    proj = np.zeros_like(k.amps)
    for e in qcore.symmetrized_basis(k.n):
        sup = list(e.support)
        proj[sup] = k.amps[sup].sum() / e.norm_sq
    nrm = np.linalg.norm(proj)
    if nrm < 1e-12:
        raise ValueError("state has zero projection onto the invariant subspace")
    return Ket(k.n, proj / nrm)


def solve(problem: TSProblem, method: str = "auto") -> FeasibilityCertificate:
    """Dispatch to the natural route for the family (or force one)."""
    ts = problem.trajectories
    if method in ("closed", "closed_form"):
        if ts.family != "symmetric":
            raise ValueError("closed-form route applies to the symmetric family")
        return solve_symmetric(ts.n, ts.m, problem.theta)
    if method == "lp":
        return solve_lp(problem)
    if method == "auto":
        if ts.family == "symmetric":
            return solve_symmetric(ts.n, ts.m, problem.theta)
        if ts.family == "cyclic" and ts.kappa and ts.kappa >= 2:
            return build_cyclic(ts.n, ts.m, problem.theta)
        return solve_lp(problem)
    raise ValueError(f"unknown method {method!r}")
