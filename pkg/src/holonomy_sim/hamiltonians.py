"""Time-dependent gate Hamiltonians, their dark states, and the DFS projection.

Three logical gate generators share one structure: a lambda-type coupling
between an ancilla level |2> and two other levels, with mixing angle
theta(t) = a*sin(2*pi*t/T) and drive phase phi(t) = 2*pi*t/T.  Their
eigenvalues are {-1, 0, 0, +1} at every instant (the gap never closes and
never moves), which is what makes the accelerated-adiabaticity control
scheme work: energy differences in the rotating frame are constants.

The four-physical-qubit exchange Hamiltonian (XY hopping plus a
Dzialoshinski-Moriya term on one bond) commutes with the total
Z = sum_i sigma_z^i, so the single-excitation block is decoherence-free
under collective dephasing.  Restricted to that block it reproduces the
normalized phase-gate generator scaled by sqrt(J12^2 + J13^2), with
theta = atan(J13/J12).

Basis conventions, used everywhere:
  * logical levels ordered (|0>, |1>, |2>, |3>)
  * the x-gate works in (|+>, |->, |2>, |3>) with |+-> = (|0> +- |1>)/sqrt(2),
    represented in the same 4-dim array by basis relabeling
  * two logical qubits: row-major 4x4, |j,k> -> index 4*j + k
  * four physical qubits |abcd>: leftmost label = qubit 1 = most significant
    bit of the 16-dim index
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qcore import tensor_product

TWO_PI = 2.0 * math.pi

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


class GateKind(enum.Enum):
    PHASE = "phase"
    XGATE = "xgate"
    CPHASE = "cphase"
    PHYSICAL_FOUR = "physical_four"


@dataclass(frozen=True)
class Schedule:
    """Cyclic drive: theta(t) = a*sin(2*pi*t/T), phi(t) = 2*pi*t/T."""

    a: float
    T: float

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"period T must be positive, got {self.T}")
        if self.a < 0:
            raise ValueError(f"amplitude a must be >= 0, got {self.a}")

    def _check_t(self, t: float) -> None:
        tol = 1e-9 * max(self.T, 1.0)
        if t < -tol or t > self.T + tol:
            raise ValueError(f"time {t} outside [0, {self.T}]")

    def theta(self, t: float) -> float:
        self._check_t(t)
        return self.a * math.sin(TWO_PI * t / self.T)

    def theta_dot(self, t: float) -> float:
        self._check_t(t)
        return self.a * (TWO_PI / self.T) * math.cos(TWO_PI * t / self.T)

    def phi(self, t: float) -> float:
        self._check_t(t)
        return TWO_PI * t / self.T

    def phi_dot(self, t: float) -> float:
        self._check_t(t)
        return TWO_PI / self.T


@dataclass(frozen=True)
class GateSpec:
    """Which gate to run: kind, drive schedule, physical couplings.

    j12/j13 are only meaningful for PHYSICAL_FOUR, where at least one must
    be nonzero.
    """

    kind: GateKind
    schedule: Schedule
    j12: float = 0.0
    j13: float = 0.0

    def __post_init__(self):
        if self.kind is GateKind.PHYSICAL_FOUR and self.j12 ** 2 + self.j13 ** 2 == 0:
            raise ValueError("physical_four requires j12^2 + j13^2 > 0")

    @property
    def dim(self) -> int:
        return 16 if self.kind in (GateKind.CPHASE, GateKind.PHYSICAL_FOUR) else 4


@dataclass(frozen=True)
class DfsBasis:
    """Computational-basis indices of the logical levels |0>,|1>,|2>,|3>.

    Default encoding: |0>=|0001>, |1>=|0010>, |2>=|1000>, |3>=|0100>.
    All four must live in the same total-Z eigenspace (equal excitation
    count), otherwise the block would not be decoherence free.
    """

    indices: tuple = (0b0001, 0b0010, 0b1000, 0b0100)

    def __post_init__(self):
        idx = self.indices
        if len(idx) != 4 or len(set(idx)) != 4:
            raise ValueError(f"need four distinct indices, got {idx}")
        if any(i < 0 or i >= 16 for i in idx):
            raise ValueError(f"indices must lie in [0, 16), got {idx}")
        weights = {bin(i).count("1") for i in idx}
        if len(weights) != 1:
            raise ValueError("basis states have unequal total-Z eigenvalues")


def _lambda_coupling(th: float, ph: float, dim: int, lo: int, anc: int, hi: int) -> np.ndarray:
    """sin(th) on lo<->anc plus cos(th)*e^{+-i ph} on anc<->hi."""
    h = np.zeros((dim, dim), dtype=complex)
    h[lo, anc] = h[anc, lo] = math.sin(th)
    h[hi, anc] = math.cos(th) * np.exp(-1j * ph)
    h[anc, hi] = math.cos(th) * np.exp(1j * ph)
    return h


def phase_hamiltonian(s: Schedule, t: float) -> np.ndarray:
    """4x4 phase-gate generator in the (|0>,|1>,|2>,|3>) basis.

    |0> is untouched; |1> couples to the ancilla |2> with sin(theta) and
    |3> with cos(theta)*e^{+-i phi}.  Hermitian by construction, eigenvalues
    {-1, 0, 0, +1} for every t.
    """
    return _lambda_coupling(s.theta(t), s.phi(t), 4, lo=1, anc=2, hi=3)


def xgate_hamiltonian(s: Schedule, t: float) -> np.ndarray:
    """4x4 x-gate generator, array indices ordered (|+>, |->, |2>, |3>).

    Identical matrix entries to :func:`phase_hamiltonian`; only the meaning
    of the first two array slots changes (|+->, not |0>/|1>), so the same
    propagator serves both gates.
    """
    return _lambda_coupling(s.theta(t), s.phi(t), 4, lo=1, anc=2, hi=3)


def cphase_hamiltonian(s: Schedule, t: float) -> np.ndarray:
    """16x16 controlled-phase generator on two logical qubits (row-major 4x4).

    Acts only on span{|1,1>, |2,1>, |3,1>}; every other product state is
    annihilated, so |0,0>, |0,1>, |1,0> are trivially dark.
    """
    # |1,1> -> 5, |2,1> -> 9, |3,1> -> 13
    return _lambda_coupling(s.theta(t), s.phi(t), 16, lo=5, anc=9, hi=13)


def _pauli_on(op: np.ndarray, qubit: int) -> np.ndarray:
    """Embed a single-qubit operator at position `qubit` of four (MSB first)."""
    out = np.eye(1, dtype=complex)
    for q in range(4):
        out = tensor_product(out, op if q == qubit else ID2)
    return out


def _exchange_xy(l: int, m: int) -> np.ndarray:
    """(sigma_x sigma_x + sigma_y sigma_y)/2 on qubits l, m."""
    return 0.5 * (_pauli_on(PAULI_X, l) @ _pauli_on(PAULI_X, m)
                  + _pauli_on(PAULI_Y, l) @ _pauli_on(PAULI_Y, m))


def _exchange_dm(l: int, m: int) -> np.ndarray:
    """(sigma_x sigma_y - sigma_y sigma_x)/2 on qubits l, m."""
    return 0.5 * (_pauli_on(PAULI_X, l) @ _pauli_on(PAULI_Y, m)
                  - _pauli_on(PAULI_Y, l) @ _pauli_on(PAULI_X, m))


def total_z() -> np.ndarray:
    """Collective dephasing axis Z = sum_i sigma_z^i on four qubits."""
    return sum(_pauli_on(PAULI_Z, q) for q in range(4))


def physical_hamiltonian(spec: GateSpec, varphi: float) -> np.ndarray:
    """Four-qubit exchange Hamiltonian at drive phase varphi.

    H = J13 * XY(1,3) + J12 * [cos(varphi) * XY(1,2) - sin(varphi) * DM(1,2)]
    on the 16-dim space.  Commutes with total Z, so it is block diagonal in
    the excitation number; the single-excitation block is the DFS.
    """
    if spec.kind is not GateKind.PHYSICAL_FOUR:
        raise ValueError(f"physical_hamiltonian needs a physical_four spec, got {spec.kind}")
    return (spec.j13 * _exchange_xy(0, 2)
            + spec.j12 * (math.cos(varphi) * _exchange_xy(0, 1)
                          - math.sin(varphi) * _exchange_dm(0, 1)))


def project_dfs(h: np.ndarray, basis: DfsBasis = DfsBasis()):
    """Restrict a 16-dim operator to the DFS block.

    Returns ``(block, leakage)`` where block[i, j] = <b_i|H|b_j> in the
    logical order and leakage is the largest matrix element connecting the
    DFS to any computational state outside it.  For any generator commuting
    with total Z the leakage is zero to rounding.
    """
    if h.shape != (16, 16):
        raise ValueError(f"expected a 16x16 operator, got {h.shape}")
    idx = list(basis.indices)
    block = h[np.ix_(idx, idx)].copy()
    outside = [x for x in range(16) if x not in basis.indices]
    leakage = float(np.max(np.abs(h[np.ix_(outside, idx)]))) if outside else 0.0
    return block, leakage


def dark_states(spec: GateSpec, t: float) -> list:
    """Instantaneous zero-eigenvalue eigenstates of the gate generator.

    The last entry of the list is always the phase-carrying dark state
    (the one whose Berry phase realizes the gate).  PHYSICAL_FOUR has no
    logical-level dark states and is rejected.
    """
    s = spec.schedule
    if spec.kind is GateKind.PHYSICAL_FOUR:
        raise ValueError("dark states are defined at the logical level only")
    th, ph = s.theta(t), s.phi(t)
    if spec.kind in (GateKind.PHASE, GateKind.XGATE):
        d0 = np.zeros(4, dtype=complex)
        d0[0] = 1.0
        d1 = np.zeros(4, dtype=complex)
        d1[1] = math.cos(th)
        d1[3] = -np.exp(-1j * ph) * math.sin(th)
        return [d0, d1]
    states = []
    for idx in (0, 1, 4):  # |0,0>, |0,1>, |1,0>
        v = np.zeros(16, dtype=complex)
        v[idx] = 1.0
        states.append(v)
    d3 = np.zeros(16, dtype=complex)
    d3[5] = math.cos(th)                       # |1,1>
    d3[13] = -np.exp(-1j * ph) * math.sin(th)  # |3,1>
    states.append(d3)
    return states


def gate_hamiltonian(spec: GateSpec, t: float) -> np.ndarray:
    """Dispatch to the generator for spec.kind evaluated at time t."""
    if spec.kind is GateKind.PHASE:
        return phase_hamiltonian(spec.schedule, t)
    if spec.kind is GateKind.XGATE:
        return xgate_hamiltonian(spec.schedule, t)
    if spec.kind is GateKind.CPHASE:
        return cphase_hamiltonian(spec.schedule, t)
    return physical_hamiltonian(spec, spec.schedule.phi(t))
