"""Per-kick observables: Fock populations, leakage, Bell fidelities, entropy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fock import FockBasis, StateVector, vacuum_state
from .hamiltonian import CouplerConfig
from .propagator import build_propagators, iterate_kicks

Label = tuple[int, int]

QUBIT_LABELS: tuple[Label, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))
EIGEN_CUTOFF = 1e-14


@dataclass(frozen=True)
class TrackedSet:
    """Fock labels whose summed population defines the closed subspace."""

    labels: tuple[Label, ...]

    def __post_init__(self):
        labels = tuple((int(m), int(n)) for m, n in self.labels)
        if not labels:
            raise ValueError("tracked set must not be empty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"tracked labels must be distinct: {labels}")
        object.__setattr__(self, "labels", labels)

    def check(self, basis: FockBasis) -> None:
        for m, n in self.labels:
            basis.flat_index(m, n)

    @classmethod
    def full(cls, basis: FockBasis) -> TrackedSet:
        return cls(tuple(basis.labels()))


THREE_STATE = TrackedSet(((0, 0), (0, 1), (1, 0)))
FOUR_STATE = TrackedSet(QUBIT_LABELS)


def default_tracked(chi_ab: float) -> TrackedSet:
    # without cross-Kerr, |1,1> joins the zero-energy manifold
    return THREE_STATE if chi_ab != 0 else FOUR_STATE


def probabilities(psi: StateVector, tracked: TrackedSet) -> dict[Label, float]:
    tracked.check(psi.basis)
    return {label: psi.probability(*label) for label in tracked.labels}


def leakage(psi: StateVector, tracked: TrackedSet) -> float:
    return 1.0 - sum(probabilities(psi, tracked).values())


def bell_states(basis: FockBasis) -> tuple[StateVector, StateVector]:
    """B1 = (|0,1> + i|1,0>)/sqrt2 and B2 = (|1,0> + i|0,1>)/sqrt2.

    B2 is the Bell state orthogonal to B1 within span{|0,1>, |1,0>}. Writing
    it with -i instead would give -i * B1, i.e. the same state as B1. The
    kicked coupler alternates between exactly these two states at its
    (0,1)/(1,0) population crossings.
    """
    s = 1 / np.sqrt(2)
    b1 = np.zeros(basis.dim, dtype=np.complex128)
    b1[basis.flat_index(0, 1)] = s
    b1[basis.flat_index(1, 0)] = 1j * s
    b2 = np.zeros(basis.dim, dtype=np.complex128)
    b2[basis.flat_index(1, 0)] = s
    b2[basis.flat_index(0, 1)] = 1j * s
    return StateVector(basis, b1), StateVector(basis, b2)


def bell_fidelities(psi: StateVector) -> tuple[float, float]:
    b1, b2 = bell_states(psi.basis)
    f1 = abs(np.vdot(b1.amplitudes, psi.amplitudes)) ** 2
    f2 = abs(np.vdot(b2.amplitudes, psi.amplitudes)) ** 2
    return float(f1), float(f2)


def reduced_density_a(psi: StateVector) -> np.ndarray:
    c = psi.as_matrix()
    return c @ c.conj().T


def entanglement_entropy(psi: StateVector) -> float:
    """Von Neumann entropy of the mode-a reduced state, in bits."""
    evals = np.linalg.eigvalsh(reduced_density_a(psi))
    evals = evals[evals > EIGEN_CUTOFF]
    return float(max(0.0, -np.sum(evals * np.log2(evals))))


@dataclass
class KickTrajectory:
    """Column-oriented per-kick record.

    ``populations`` always holds the four qubit labels plus every tracked
    label, so CSV consumers get p_00..p_11 regardless of the tracked set.
    """

    tracked: TrackedSet
    kick: np.ndarray
    time: np.ndarray
    populations: dict[Label, np.ndarray]
    leakage: np.ndarray
    fid_b1: np.ndarray
    fid_b2: np.ndarray
    entropy: np.ndarray
    norm_error: np.ndarray
    states: list[StateVector] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.kick)

    def probability(self, label: Label) -> np.ndarray:
        return self.populations[tuple(label)]

    def tracked_probabilities(self) -> np.ndarray:
        """Array of shape (n_records, n_tracked)."""
        return np.column_stack([self.populations[lab] for lab in self.tracked.labels])


def compute_trajectory(
    amplitudes: Iterable[np.ndarray | StateVector],
    basis: FockBasis,
    tracked: TrackedSet,
    T: float,
    keep_states: bool = False,
) -> KickTrajectory:
    """Evaluate all observables on a stream of states (kick 0, 1, 2, ...)."""
    tracked.check(basis)
    labels = list(dict.fromkeys(QUBIT_LABELS + tracked.labels))
    index = {lab: basis.flat_index(*lab) for lab in labels}
    tracked_idx = [index[lab] for lab in tracked.labels]
    b1, b2 = (b.amplitudes for b in bell_states(basis))

    pops = {lab: [] for lab in labels}
    leak, f1, f2, ent, nerr, states = [], [], [], [], [], []
    for raw in amplitudes:
        psi = raw if isinstance(raw, StateVector) else StateVector(basis, raw)
        c = psi.amplitudes
        p = np.abs(c) ** 2
        for lab in labels:
            pops[lab].append(p[index[lab]])
        leak.append(1.0 - p[tracked_idx].sum())
        f1.append(abs(np.vdot(b1, c)) ** 2)
        f2.append(abs(np.vdot(b2, c)) ** 2)
        ent.append(entanglement_entropy(psi))
        nerr.append(abs(np.sqrt(p.sum()) - 1.0))
        if keep_states:
            states.append(psi)

    n = len(leak)
    return KickTrajectory(
        tracked=tracked,
        kick=np.arange(n),
        time=np.arange(n) * T,
        populations={lab: np.array(v) for lab, v in pops.items()},
        leakage=np.array(leak),
        fid_b1=np.array(f1),
        fid_b2=np.array(f2),
        entropy=np.array(ent),
        norm_error=np.array(nerr),
        states=states if keep_states else None,
    )


# (pair, tag). "bell"/"separable" are the crossings seen with cross-Kerr;
# the other two pairs are the ones relevant without it.
EVENT_PAIRS: tuple[tuple[tuple[Label, Label], str], ...] = (
    (((0, 0), (1, 0)), "separable"),
    (((0, 1), (1, 0)), "bell"),
    (((0, 0), (1, 1)), "bell_00_11"),
    (((0, 1), (1, 1)), "separable_01_11"),
)


@dataclass(frozen=True)
class CrossingEvent:
    kick: int
    tag: str
    pair: tuple[Label, Label]


def detect_events(
    traj: KickTrajectory,
    tol: float = 0.02,
    pairs: Sequence[tuple[tuple[Label, Label], str]] = EVENT_PAIRS,
) -> list[CrossingEvent]:
    """Kicks at which both probabilities of a pair sit within ``tol`` of 1/2."""
    if not 0 < tol <= 0.1:
        raise ValueError(f"tol must lie in (0, 0.1], got {tol}")
    events = []
    for k in range(len(traj)):
        for (first, second), tag in pairs:
            if first not in traj.populations or second not in traj.populations:
                continue
            p, q = traj.populations[first][k], traj.populations[second][k]
            if abs(p - 0.5) < tol and abs(q - 0.5) < tol:
                events.append(CrossingEvent(int(traj.kick[k]), tag, (first, second)))
    return events


def simulate(
    cfg: CouplerConfig,
    psi0: StateVector | None = None,
    tracked: TrackedSet | None = None,
    keep_states: bool = False,
) -> KickTrajectory:
    """Run ``cfg.n_kicks`` kicks and evaluate the observables on the fly."""
    basis = cfg.basis
    psi0 = psi0 if psi0 is not None else vacuum_state(basis)
    tracked = tracked if tracked is not None else default_tracked(cfg.chi_ab)
    u_step = build_propagators(cfg, basis).u_step
    return compute_trajectory(
        iterate_kicks(u_step, psi0, cfg.n_kicks), basis, tracked, cfg.T, keep_states
    )
