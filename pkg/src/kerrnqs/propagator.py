"""Free-flight and kick unitaries, and the stroboscopic kick loop."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .fock import NORM_TOL, FockBasis, JointOperator, NumericalError, StateVector
from .hamiltonian import CouplerConfig, build_h_nl, build_kick_generator

HERMITIAN_TOL = 1e-10


def expm_hermitian_scaled(h: JointOperator, s: float) -> JointOperator:
    """exp(-i s H) for Hermitian H via eigendecomposition."""
    if not h.is_hermitian(HERMITIAN_TOL):
        raise NumericalError("expm_hermitian_scaled requires a Hermitian generator")
    evals, evecs = np.linalg.eigh(h.matrix)
    phases = np.exp(-1j * s * evals)
    return JointOperator(h.basis, (evecs * phases) @ evecs.conj().T)


def build_u_nl(
    cfg: CouplerConfig, basis: FockBasis | None = None, method: str = "auto"
) -> JointOperator:
    """Free evolution over one inter-pulse interval, exp(-i H_NL T).

    ``method`` is ``"spectral"``, ``"diagonal"`` (only valid when epsilon == 0)
    or ``"auto"``, which takes the diagonal path whenever it is exact.
    """
    h = build_h_nl(cfg, basis)
    diagonal_ok = complex(cfg.epsilon) == 0
    if method == "auto":
        method = "diagonal" if diagonal_ok else "spectral"
    if method == "diagonal":
        if not diagonal_ok:
            raise ValueError("diagonal fast path needs epsilon == 0")
        energies = np.real(np.diag(h.matrix))
        return JointOperator(h.basis, np.diag(np.exp(-1j * cfg.T * energies)))
    if method == "spectral":
        return expm_hermitian_scaled(h, cfg.T)
    raise ValueError(f"unknown method {method!r}")


def build_u_k(cfg: CouplerConfig, basis: FockBasis | None = None) -> JointOperator:
    # instantaneous kick: the exponent carries no T
    return expm_hermitian_scaled(build_kick_generator(cfg, basis), 1.0)


@dataclass(frozen=True)
class Propagators:
    u_nl: JointOperator
    u_k: JointOperator
    u_step: JointOperator


def build_propagators(cfg: CouplerConfig, basis: FockBasis | None = None) -> Propagators:
    u_nl = build_u_nl(cfg, basis)
    u_k = build_u_k(cfg, basis)
    props = Propagators(u_nl, u_k, u_k @ u_nl)
    for name in ("u_nl", "u_k", "u_step"):
        if not getattr(props, name).is_unitary(1e-10):
            raise NumericalError(f"{name} failed the unitarity check")
    return props


def iterate_kicks(
    u_step: JointOperator, psi0: StateVector, n_kicks: int
) -> Iterator[np.ndarray]:
    """Yield raw amplitude arrays psi_0, psi_1, ..., psi_n_kicks.

    One matrix-vector product per kick; nothing is stored.
    """
    if psi0.basis != u_step.basis:
        raise ValueError(f"basis mismatch: {psi0.basis} vs {u_step.basis}")
    step = u_step.matrix
    psi = psi0.amplitudes
    yield psi
    for _ in range(n_kicks):
        psi = step @ psi
        yield psi


def run_kicks(
    cfg: CouplerConfig,
    basis: FockBasis | None,
    psi0: StateVector,
    n_kicks: int | None = None,
) -> list[StateVector]:
    """States just after each kick, element 0 being ``psi0``.

    Each step applies U_K U_NL: free flight first, then the kick.
    ``n_kicks`` defaults to ``cfg.n_kicks``.
    """
    basis = basis or cfg.basis
    if psi0.basis != basis:
        raise ValueError(f"basis mismatch: {psi0.basis} vs {basis}")
    n_kicks = cfg.n_kicks if n_kicks is None else n_kicks
    if n_kicks < 0:
        raise ValueError(f"n_kicks must be >= 0, got {n_kicks}")
    u_step = build_propagators(cfg, basis).u_step

    states = []
    for k, amplitudes in enumerate(iterate_kicks(u_step, psi0, n_kicks)):
        norm_error = abs(np.linalg.norm(amplitudes) - 1.0)
        if norm_error > NORM_TOL:
            raise NumericalError(f"norm drifted by {norm_error:.3e} at kick {k}")
        states.append(StateVector(basis, amplitudes))
    return states
