"""Kerr coupler Hamiltonian and the kick generator."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .fock import (
    FockBasis,
    JointOperator,
    mode_a_annihilation,
    mode_b_annihilation,
)


@dataclass(frozen=True)
class CouplerConfig:
    """Physical parameters and run controls.

    All strengths and times are in units of the Kerr nonlinearity constant.
    """

    chi_a: float = 1.0
    chi_b: float = 1.0
    chi_ab: float = 1.0
    epsilon: complex = 0.01
    alpha: complex = 0.04
    T: float = math.pi
    dim_a: int = 10
    dim_b: int = 10
    n_kicks: int = 1000

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T}")
        if self.n_kicks < 1:
            raise ValueError(f"n_kicks must be >= 1, got {self.n_kicks}")
        # FockBasis validates the dimensions
        FockBasis(self.dim_a, self.dim_b)

    @property
    def basis(self) -> FockBasis:
        return FockBasis(self.dim_a, self.dim_b)

    def replace(self, **changes) -> CouplerConfig:
        return dataclasses.replace(self, **changes)


def _resolve_basis(cfg: CouplerConfig, basis: FockBasis | None) -> FockBasis:
    if basis is None:
        return cfg.basis
    if (basis.dim_a, basis.dim_b) != (cfg.dim_a, cfg.dim_b):
        raise ValueError(
            f"basis ({basis.dim_a}, {basis.dim_b}) does not match config dims "
            f"({cfg.dim_a}, {cfg.dim_b})"
        )
    return basis


def build_h_nl(cfg: CouplerConfig, basis: FockBasis | None = None) -> JointOperator:
    """Coupler Hamiltonian

        chi_a/2 a+a+ a a + chi_b/2 b+b+ b b + eps a+ b + eps* a b+ + chi_ab a+a b+b

    assembled from the truncated ladder matrices. Diagonal only when eps == 0.
    """
    basis = _resolve_basis(cfg, basis)
    a = mode_a_annihilation(basis)
    b = mode_b_annihilation(basis)
    ad, bd = a.dagger(), b.dagger()
    eps = complex(cfg.epsilon)

    h = (cfg.chi_a / 2) * (ad @ ad @ a @ a)
    h = h + (cfg.chi_b / 2) * (bd @ bd @ b @ b)
    h = h + eps * (ad @ b) + eps.conjugate() * (a @ bd)
    h = h + cfg.chi_ab * (ad @ a @ bd @ b)
    return h


def build_kick_generator(
    cfg: CouplerConfig, basis: FockBasis | None = None
) -> JointOperator:
    """alpha a+ + alpha* a, acting on mode a only."""
    basis = _resolve_basis(cfg, basis)
    a = mode_a_annihilation(basis)
    alpha = complex(cfg.alpha)
    return alpha * a.dagger() + alpha.conjugate() * a
