"""Trajectory families and their compiled diagonal rotation operators.

A trajectory is the set of qubits rotated by a passing particle.  The
symmetric family holds every weight-m subset of {1..n}; the cyclic family
holds the n contiguous windows of width m (indices mod n).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .qcore import weight_on


@dataclass(frozen=True)
class Trajectory:
    """Sorted tuple of 1-based qubit indices."""

    qubits: tuple[int, ...]

    def __post_init__(self):
        q = tuple(sorted(int(x) for x in self.qubits))
        if len(set(q)) != len(q):
            raise ValueError(f"duplicate qubit index in trajectory {q}")
        if q and q[0] < 1:
            raise ValueError(f"qubit indices are 1-based, got {q}")
        object.__setattr__(self, "qubits", q)

    def __len__(self):
        return len(self.qubits)

    def validate_within(self, n: int) -> None:
        if self.qubits and self.qubits[-1] > n:
            raise ValueError(f"trajectory {self.qubits} exceeds register size {n}")

    def label(self) -> str:
        return "{" + ",".join(map(str, self.qubits)) + "}"


@dataclass(frozen=True)
class TrajectorySet:
    n: int
    family: str  # symmetric | cyclic | custom
    m: int
    members: tuple[Trajectory, ...]
    kappa: int | None = None
    degenerate: bool = False

    def __post_init__(self):
        if self.family not in ("symmetric", "cyclic", "custom"):
            raise ValueError(f"unknown family {self.family!r}")
        seen = set()
        for t in self.members:
            t.validate_within(self.n)
            if t.qubits in seen:
                raise ValueError(f"duplicate member {t.qubits}")
            seen.add(t.qubits)

    def __len__(self):
        return len(self.members)


def gen_symmetric(n: int, m: int) -> TrajectorySet:
    """All C(n,m) weight-m trajectories in lexicographic order."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    members = tuple(Trajectory(c) for c in itertools.combinations(range(1, n + 1), m))
    return TrajectorySet(n, "symmetric", m, members, degenerate=(m == 0))


def gen_cyclic(n: int, m: int) -> TrajectorySet:
    """The n windows z^j({1..m}) under the cyclic shift z = (1...n)."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    members = tuple(Trajectory(tuple((start + off) % n + 1 for off in range(m)))
                    for start in range(n))
    kappa = n // m if n % m == 0 else None
    return TrajectorySet(n, "cyclic", m, members, kappa=kappa)


@dataclass(frozen=True)
class PhaseOp:
    """Diagonal form of R^(T)(theta): each qubit in T gets R_Z(theta)."""

    n: int
    theta: float
    trajectory: Trajectory
    phase: np.ndarray

    def conj(self) -> np.ndarray:
        return self.phase.conj()


def compile_phase(t: Trajectory, n: int, theta: float) -> PhaseOp:
    """Phase vector exp(-i(theta/2) * sum_{k in T} (1 - 2 j_k)).

    R_Z(theta) = e^{-i theta Z/2} on every qubit of the trajectory; the
    operator is diagonal in the computational basis.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta={theta} outside the modeled range [0, pi]")
    t.validate_within(n)
    w = weight_on(n, t.qubits)               # ones inside T per basis index
    s = len(t) - 2 * w                       # sum of (1 - 2 j_k) over T
    return PhaseOp(n, theta, t, np.exp(-0.5j * theta * s))


def compile_all(ts: TrajectorySet, theta: float) -> list[PhaseOp]:
    return [compile_phase(t, ts.n, theta) for t in ts.members]


# ---------------------------------------------------------------------------
# file format: {"n":…, "family":…, "m":…, "members": [[indices], …]}

def to_json(ts: TrajectorySet) -> str:
    obj = {"n": ts.n, "family": ts.family, "m": ts.m,
           "members": [list(t.qubits) for t in ts.members]}
    if ts.kappa is not None:
        obj["kappa"] = ts.kappa
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def from_json(text: str) -> TrajectorySet:
    obj = json.loads(text)
    members = tuple(Trajectory(tuple(t)) for t in obj["members"])
    fam = obj.get("family", "custom")
    return TrajectorySet(obj["n"], fam, obj["m"], members, kappa=obj.get("kappa"),
                         degenerate=any(len(t) == 0 for t in members))


def load(path: str | Path) -> TrajectorySet:
    return from_json(Path(path).read_text())


def save(ts: TrajectorySet, path: str | Path) -> None:
    Path(path).write_text(to_json(ts))
