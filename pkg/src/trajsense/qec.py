"""Error-correction view of trajectory sensing.

The random-trajectory channel applies R^(T)(theta)/sqrt(|set|) for a
uniformly drawn member T.  A state whose outputs under these Kraus operators
are mutually orthogonal lets the receiver both identify T and undo it — the
matrix M_ij = <psi|K_i^dag K_j|psi> collapsing to I/|set| is the same
orthogonality condition the discrimination layer tests, read as a
Knill-Laflamme statement.

Also here: signed-Pauli stabilizer checks (the four-qubit window state is a
codeword of a small CSS code) and a self-contained verification that the
seven-qubit CSS code turns a transversal quarter-turn Z rotation into the
inverse logical quarter turn.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import qcore, trajset
from .qcore import Ket
from .trajset import TrajectorySet

_COMPLETENESS_TOL = 1e-10

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-letter products: (a, b) -> (power of i, resulting letter)
_PAULI_MUL = {
    ("I", "I"): (0, "I"), ("X", "X"): (0, "I"), ("Y", "Y"): (0, "I"),
    ("Z", "Z"): (0, "I"),
    ("X", "Y"): (1, "Z"), ("Y", "X"): (3, "Z"),
    ("Y", "Z"): (1, "X"), ("Z", "Y"): (3, "X"),
    ("Z", "X"): (1, "Y"), ("X", "Z"): (3, "Y"),
}
for _a in "XYZ":
    _PAULI_MUL[("I", _a)] = (0, _a)
    _PAULI_MUL[(_a, "I")] = (0, _a)


# ---------------------------------------------------------------------------
# the uniform trajectory channel

@dataclass(frozen=True)
class ErrorChannel:
    """Kraus family { R^(T)(theta) / sqrt(N) } for the members of a set."""
    n: int
    theta: float
    trajectories: TrajectorySet
    phases: np.ndarray = field(repr=False)   # (N, 2^n) unit-modulus diagonals

    @classmethod
    def from_trajectory_set(cls, ts: TrajectorySet, theta: float) -> "ErrorChannel":
        ops = trajset.compile_all(ts, theta)
        phases = np.stack([op.phase for op in ops])
        ch = cls(ts.n, float(theta), ts, phases)
        res = ch.completeness_residual()
        if res > _COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness violated: residual {res:.3e}")
        return ch

    @property
    def size(self) -> int:
        return self.phases.shape[0]

    def kraus_diag(self, i: int) -> np.ndarray:
        """Diagonal of the i-th Kraus operator (weight included)."""
        return self.phases[i] / math.sqrt(self.size)

    def completeness_residual(self) -> float:
        total = (np.abs(self.phases) ** 2).sum(axis=0) / self.size
        return float(np.abs(total - 1.0).max())

    def apply(self, psi: Ket, i: int) -> Ket:
        """Post-error state for the i-th member (unitary branch, renormalized)."""
        return qcore.from_vector(self.n, psi.amps * self.phases[i], normalize=False)


@dataclass
class KLReport:
    verdict: str               # discriminating code | KL-recoverable only | not a code state
    size: int
    max_offdiag: float
    max_diag_dev: float        # deviation of diagonal entries from 1/N
    hermiticity: float
    tol: float
    matrix: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> str:
        d = {
            "verdict": self.verdict,
            "size": self.size,
            "max_offdiag": self.max_offdiag,
            "max_diag_dev": self.max_diag_dev,
            "hermiticity": self.hermiticity,
            "tol": self.tol,
        }
        return json.dumps(d, indent=2, sort_keys=True)


def kl_verify(psi: Ket, channel: ErrorChannel, tol: float = 1e-8) -> KLReport:
    """Classify psi against the channel via M_ij = <psi|K_i^dag K_j|psi>.

    A 'discriminating code' state has M = I/N: every pair of corrupted
    states is orthogonal, so the error is identifiable and reversible.  If
    the diagonal still splits the trace evenly but off-diagonals survive,
    the structure is the generic recoverability form without the
    discrimination property ('KL-recoverable only').  Anything else — which
    for unit-modulus diagonal Kraus families can only arise from a
    malformed input state — is 'not a code state'.
    """
    a = psi.amps
    N = channel.size
    # K_i^dag K_j is diagonal; sandwich without forming matrices
    M = (channel.phases.conj() * (np.abs(a) ** 2)) @ channel.phases.T / N
    herm = float(np.abs(M - M.conj().T).max())
    diag_dev = float(np.abs(np.diag(M) - 1.0 / N).max())
    off = M - np.diag(np.diag(M))
    max_off = float(np.abs(off).max()) if N > 1 else 0.0
    if herm <= tol and diag_dev <= tol and max_off <= tol:
        verdict = "discriminating code"
    elif herm <= tol and diag_dev <= tol:
        verdict = "KL-recoverable only"
    else:
        verdict = "not a code state"
    return KLReport(verdict, N, max_off, diag_dev, herm, tol, M)


# ---------------------------------------------------------------------------
# signed Pauli strings and stabilizer groups

def parse_pauli(s: str) -> tuple[int, str]:
    """'-ZIZI' -> (sign, letters); sign is +1 or -1."""
    s = s.strip()
    sign = 1
    if s and s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        s = s[1:]
    if not s or any(c not in "IXYZ" for c in s):
        raise ValueError(f"malformed Pauli string {s!r}")
    return sign, s


def _commute(a: str, b: str) -> bool:
    anti = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return anti % 2 == 0


def _string_product(items):
    """Multiply signed Pauli strings exactly; returns (phase, letters).

    phase is a power of i stored mod 4 together with the +/- signs.
    """
    items = list(items)
    n = len(items[0][1])
    letters = "I" * n
    ipow = 0
    sign = 1
    for s, p in items:
        sign *= s
        out = []
        for x, y in zip(letters, p):
            k, r = _PAULI_MUL[(x, y)]
            ipow = (ipow + k) % 4
            out.append(r)
        letters = "".join(out)
    phase = sign * (1j ** ipow)
    return phase, letters


class StabilizerGroup:
    """A commuting set of signed Pauli strings whose group avoids -I."""

    def __init__(self, generators):
        parsed = [parse_pauli(g) for g in generators]
        if not parsed:
            raise ValueError("need at least one generator")
        n = len(parsed[0][1])
        if any(len(p) != n for _, p in parsed):
            raise ValueError("generators must share one length")
        for i in range(len(parsed)):
            for j in range(i + 1, len(parsed)):
                if not _commute(parsed[i][1], parsed[j][1]):
                    raise ValueError(
                        f"generators {generators[i]!r} and {generators[j]!r} anticommute")
        if len(parsed) > 16:
            raise ValueError("too many generators to screen for -I")
        for mask in range(1, 2 ** len(parsed)):
            subset = [parsed[k] for k in range(len(parsed)) if mask >> k & 1]
            phase, letters = _string_product(subset)
            if set(letters) == {"I"} and phase == -1:
                raise ValueError("group contains -I")
        self.generators = tuple(generators)
        self._parsed = parsed
        self.n = n

    def matrices(self):
        for sign, letters in self._parsed:
            yield sign * reduce(np.kron, [_PAULI_MATS[c] for c in letters])

    def projector(self) -> np.ndarray:
        """Projector onto the joint +1 eigenspace."""
        dim = 2 ** self.n
        P = np.eye(dim, dtype=complex)
        for g in self.matrices():
            P = P @ (np.eye(dim) + g) / 2.0
        return P


@dataclass
class StabilizerReport:
    all_plus_one: bool
    residuals: dict
    failing: tuple
    tol: float

    def to_json(self) -> str:
        return json.dumps({
            "all_plus_one": self.all_plus_one,
            "residuals": self.residuals,
            "failing": list(self.failing),
            "tol": self.tol,
        }, indent=2, sort_keys=True)


def stabilizer_check(psi: Ket, group: StabilizerGroup,
                     tol: float = 1e-10) -> StabilizerReport:
    """Is psi a +1 eigenstate of every generator?"""
    if group.n != psi.n:
        raise ValueError(f"group acts on {group.n} qubits, state has {psi.n}")
    residuals = {}
    failing = []
    for name, g in zip(group.generators, group.matrices()):
        res = float(np.abs(g @ psi.amps - psi.amps).max())
        residuals[name] = res
        if res > tol:
            failing.append(name)
    return StabilizerReport(not failing, residuals, tuple(failing), tol)


def window_code_group() -> StabilizerGroup:
    """Stabilizers of the four-qubit window state (a [[4,2,2]] subcode)."""
    return StabilizerGroup(["-ZIZI", "-IZIZ", "XIXI", "IXIX"])


def window_code_state() -> Ket:
    """The equal-weight four-window state entered by hand."""
    return qcore.make_ket(4, [("0011", 1), ("0110", 1), ("1100", 1), ("1001", 1)])


# ---------------------------------------------------------------------------
# seven-qubit CSS code and the transversal quarter turn

def css7_group() -> StabilizerGroup:
    """The standard seven-qubit CSS generators (X block then Z block)."""
    return StabilizerGroup([
        "IIIXXXX", "IXXIIXX", "XIXIXIX",
        "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ",
    ])


def css7_logical_states() -> tuple[Ket, Ket]:
    """Logical zero and one, built by projecting |0000000> onto the codespace."""
    P = css7_group().projector()
    v0 = P[:, 0]
    v0 = v0 / np.linalg.norm(v0)
    xbar = reduce(np.kron, [_PAULI_MATS["X"]] * 7)
    v1 = xbar @ v0
    return qcore.from_vector(7, v0, normalize=False), qcore.from_vector(7, v1, normalize=False)


def _rz_diag(n: int, theta: float) -> np.ndarray:
    """Diagonal of a single-angle Z rotation applied to every qubit."""
    w = qcore.weight_on(n, range(1, n + 1))
    return np.exp(-0.5j * theta * (n - 2 * w))


@dataclass
class TransversalityReport:
    passed: bool
    angle: float
    codespace_residual: float     # leakage of rotated codewords out of the span
    logical_residual: float       # distance from (global phase)*inverse quarter turn
    global_phase: complex
    detail: str = ""

    def to_json(self) -> str:
        return json.dumps({
            "passed": self.passed,
            "angle": self.angle,
            "codespace_residual": self.codespace_residual,
            "logical_residual": self.logical_residual,
            "global_phase": [self.global_phase.real, self.global_phase.imag],
            "detail": self.detail,
        }, indent=2, sort_keys=True)


def transversal_rotation_check(angle: float = math.pi / 2,
                               tol: float = 1e-9) -> TransversalityReport:
    """Does the per-qubit Z rotation act as the inverse logical rotation?

    Rotating every physical qubit of the seven-qubit code by `angle` should
    (for the quarter turn) keep the codespace invariant and equal, up to one
    global phase, the logical rotation by -angle.  Other angles serve as
    negative controls: they leak out of the codespace or twist the logical
    phase by the wrong amount.
    """
    zero, one = css7_logical_states()
    diag = _rz_diag(7, angle)
    basis = np.stack([zero.amps, one.amps])           # orthonormal rows
    L = np.zeros((2, 2), dtype=complex)
    leak = 0.0
    for col, v in enumerate((zero.amps, one.amps)):
        rotated = diag * v
        coeffs = basis.conj() @ rotated
        L[:, col] = coeffs
        leak = max(leak, float(np.linalg.norm(rotated - basis.T @ coeffs)))
    # target: logical rotation by -angle, i.e. diag(e^{+i a/2}, e^{-i a/2})
    target = np.diag([cmath.exp(0.5j * angle), cmath.exp(-0.5j * angle)])
    # strip one global phase, taken from the largest entry
    k = np.unravel_index(np.argmax(np.abs(L)), L.shape)
    phase = L[k] / target[k] if abs(target[k]) > 0 else 1.0
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    logical_res = float(np.abs(L - phase * target).max())
    passed = leak <= tol and logical_res <= tol
    detail = "" if passed else "codespace leak" if leak > tol else "wrong logical action"
    return TransversalityReport(passed, float(angle), leak, logical_res,
                                complex(phase), detail)
