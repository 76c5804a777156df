"""Lorentz boosts along g1: matrices, rotors, the three coframes and the point map."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import ETA, GAMMA, ContractViolation, blade, exp_bivector, reverse, sandwich, vector_components


class DomainError(ValueError):
    pass


def _gamma_factor(v: float) -> float:
    if not abs(v) < 1.0:
        raise DomainError(f"|v| must be < 1, got {v}")
    return 1.0 / math.sqrt(1.0 - v * v)


def boost_matrix(v: float) -> tuple[np.ndarray, np.ndarray]:
    """``(L, L⁻¹)`` for a velocity boost ``v`` along g1, entries ``L^mu_nu``."""
    g = _gamma_factor(v)
    L = np.eye(4)
    L[0, 0] = L[1, 1] = g
    L[0, 1] = L[1, 0] = -v * g
    Linv = np.eye(4)
    Linv[0, 0] = Linv[1, 1] = g
    Linv[0, 1] = Linv[1, 0] = v * g
    return L, Linv


def lorentz_inverse(L: np.ndarray) -> np.ndarray:
    """``η Lᵀ η``, the inverse of any Lorentz matrix."""
    return ETA @ L.T @ ETA


def is_lorentz(L: np.ndarray, tol: float = 1e-12) -> bool:
    return (
        np.allclose(L.T @ ETA @ L, ETA, atol=tol, rtol=0)
        and abs(np.linalg.det(L) - 1.0) <= tol * 10
        and L[0, 0] >= 1.0 - tol
    )


def rotor_from_velocity(v: float) -> np.ndarray:
    """``exp(χ/2 g1 g0)`` with ``tanh χ = v``; sends g0 to ``γ(g0 + v g1)``."""
    _gamma_factor(v)
    chi = math.atanh(v)
    return exp_bivector(blade(1, 0, coeff=chi / 2.0))


def rotor_matrix(R: np.ndarray) -> np.ndarray:
    """Matrix ``M`` with ``R g_mu R̃ = M^alpha_mu g_alpha`` (columns are images)."""
    return np.stack([vector_components(sandwich(R, g)) for g in GAMMA], axis=1)


@dataclass(frozen=True)
class FrameTriple:
    """Coframes ``{g_mu}``, ``{g'_mu} = R g_mu R⁻¹`` and ``{g''_mu} = R⁻¹ g_mu R``."""

    base: tuple
    prime: tuple
    double_prime: tuple

    def select(self, which: str) -> tuple:
        return {"base": self.base, "prime": self.prime, "double_prime": self.double_prime}[which]


def frame_triple(v: float) -> FrameTriple:
    g = _gamma_factor(v)
    base = tuple(GAMMA)
    prime = (
        g * (GAMMA[0] + v * GAMMA[1]),
        g * (v * GAMMA[0] + GAMMA[1]),
        GAMMA[2].copy(),
        GAMMA[3].copy(),
    )
    R = rotor_from_velocity(v)
    Rrev = reverse(R)
    double_prime = tuple(sandwich(Rrev, e) for e in GAMMA)
    return FrameTriple(base, prime, double_prime)


def lorentz_point_map(L: np.ndarray, x) -> np.ndarray:
    """Coordinates of ``l e`` given those of ``e``: ``(L⁻¹) x``."""
    L = np.asarray(L, dtype=float)
    if L.shape != (4, 4):
        raise ContractViolation("L must be 4x4")
    return np.asarray(x, dtype=float) @ lorentz_inverse(L).T
