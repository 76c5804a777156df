"""Electromagnetic fields as bivector fields in natural units (c = 1, no 4π).

Bivector convention: ``F = ½ F_mu_nu g^mu ∧ g^nu`` and, relative to the
observer ``g0``, ``F = E + g5 B`` with ``σ_i = g_i g_0`` and ``g5 = g0 g1 g2 g3``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import algebra as ga
from .boosts import _gamma_factor, boost_matrix, lorentz_inverse
from .fields import Field, SingularityError

log = logging.getLogger(__name__)

SIGMA = [ga.geometric_product(ga.GAMMA[i], ga.GAMMA[0]) for i in (1, 2, 3)]
I_SIGMA = [ga.geometric_product(ga.TAU, s) for s in SIGMA]
_BIVECTOR_BLADES = [(mu, nu) for mu in range(4) for nu in range(mu + 1, 4)]


def bivector_from_tensor(Fmn: np.ndarray) -> np.ndarray:
    """Bivector from covariant components ``F_mu_nu`` (antisymmetric, shape ``(..., 4, 4)``)."""
    out = np.zeros(Fmn.shape[:-2] + (ga.N_BLADES,))
    for mu, nu in _BIVECTOR_BLADES:
        out[..., (1 << mu) | (1 << nu)] = Fmn[..., mu, nu] * ga.SIGNATURE[mu] * ga.SIGNATURE[nu]
    return out


def tensor_from_bivector(F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    out = np.zeros(F.shape[:-1] + (4, 4))
    for mu, nu in _BIVECTOR_BLADES:
        c = F[..., (1 << mu) | (1 << nu)] * ga.SIGNATURE[mu] * ga.SIGNATURE[nu]
        out[..., mu, nu] = c
        out[..., nu, mu] = -c
    return out


def from_eb(E, B) -> np.ndarray:
    """``E + g5 B`` on the g0 observer's ``σ_i``."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    out = np.zeros(np.broadcast_shapes(E.shape, B.shape)[:-1] + (ga.N_BLADES,))
    for i in range(3):
        out = out + E[..., i : i + 1] * SIGMA[i] + B[..., i : i + 1] * I_SIGMA[i]
    return out


@dataclass(frozen=True)
class EBSplit:
    E: np.ndarray
    B: np.ndarray

    def reconstruct(self, frame: Optional[Sequence] = None) -> np.ndarray:
        sig, isig = _frame_sigmas(frame)
        out = np.zeros(self.E.shape[:-1] + (ga.N_BLADES,))
        for i in range(3):
            out = out + self.E[..., i : i + 1] * sig[i] + self.B[..., i : i + 1] * isig[i]
        return out


def _frame_sigmas(frame):
    if frame is None:
        return SIGMA, I_SIGMA
    g = [np.asarray(e, dtype=float) for e in frame]
    sig = [ga.geometric_product(g[i], g[0]) for i in (1, 2, 3)]
    # g'5 = g5 for proper frames
    return sig, [ga.geometric_product(ga.TAU, s) for s in sig]


def eb_decompose(F, frame: Optional[Sequence] = None) -> EBSplit:
    """Electric and magnetic parts of a bivector relative to ``frame[0]``.

    ``frame`` is a sequence of four orthonormal vectors (e.g.
    ``frame_triple(v).prime``); ``None`` means the g frame.
    """
    F = ga._arr(F)
    if not ga.is_grade(F, 2):
        raise ga.ContractViolation("eb_decompose needs a pure bivector")
    sig, isig = _frame_sigmas(frame)
    E = np.stack([ga.geometric_product(F, s)[..., 0] for s in sig], axis=-1)
    B = np.stack([-ga.geometric_product(F, s)[..., 0] for s in isig], axis=-1)
    return EBSplit(E, B)


# ---------------------------------------------------------------- fields


def _spatial_norm(x):
    return np.sqrt(x[..., 1] ** 2 + x[..., 2] ** 2 + x[..., 3] ** 2)


def coulomb_field(q: float = 1.0) -> Field:
    """Charge ``q`` at rest at the spatial origin: ``F_0i = q x^i / |x|³``."""

    def fn(x):
        r = _spatial_norm(x)[..., None]
        E = q * x[..., 1:] / r**3
        return from_eb(E, np.zeros_like(E))

    def dfn(x):
        r = _spatial_norm(x)[..., None, None]
        xs = x[..., 1:]
        # dE_i/dx^j
        jac = q * (np.eye(3) / r**3 - 3.0 * xs[..., :, None] * xs[..., None, :] / r**5)
        out = np.zeros(x.shape[:-1] + (4, ga.N_BLADES))
        for j in range(3):
            out[..., j + 1, :] = from_eb(jac[..., :, j], np.zeros(x.shape[:-1] + (3,)))
        return out

    return Field(fn, dfn, _spatial_norm, f"coulomb(q={q})")


def _bivector_map(M: np.ndarray) -> np.ndarray:
    """16x16 matrix of ``F_mu_nu -> M^a_mu M^b_nu F_ab`` acting on coefficient rows."""
    K = np.zeros((ga.N_BLADES, ga.N_BLADES))
    for b in range(ga.N_BLADES):
        if ga.GRADE[b] != 2:
            continue
        e = np.zeros(ga.N_BLADES)
        e[b] = 1.0
        T = tensor_from_bivector(e)
        K[:, b] = bivector_from_tensor(M.T @ T @ M)
    return K


def pullback_field(L: np.ndarray, F: Field) -> Field:
    """Pullback under the Lorentz map with ``x(l e) = L⁻¹ x(e)``.

    ``F̄_mu_nu(x) = (L⁻¹)^a_mu (L⁻¹)^b_nu F_ab(L⁻¹ x)``; partials follow by the
    chain rule when ``F`` has them.
    """
    M = lorentz_inverse(np.asarray(L, dtype=float))
    K = _bivector_map(M)

    def fn(x):
        return F.fn(x @ M.T) @ K.T

    dfn = None
    if F.partials_fn is not None:
        def dfn(x):
            d = F.partials_fn(x @ M.T)  # (..., rho, 16)
            d = np.einsum("...rk,rm->...mk", d, M)
            return d @ K.T

    dist = None
    if F.singular_distance is not None:
        def dist(x):
            return F.singular_distance(x @ M.T)

    return Field(fn, dfn, dist, f"pullback({F.name})")


def boosted_coulomb_closed_form(q: float, v: float) -> Field:
    """Field of charge ``q`` moving along ``-x¹`` with speed ``v``, in closed form."""
    g = _gamma_factor(v)
    u = np.array([-v, 0.0, 0.0])

    def _R(x):
        return np.sqrt(g**2 * (x[..., 1] + v * x[..., 0]) ** 2 + x[..., 2] ** 2 + x[..., 3] ** 2)

    def fn(x):
        R3 = _R(x)[..., None] ** 3
        E = q * g * np.stack([x[..., 1] + v * x[..., 0], x[..., 2], x[..., 3]], axis=-1) / R3
        return from_eb(E, np.cross(u, E))

    def dist(x):
        return np.sqrt((x[..., 1] + v * x[..., 0]) ** 2 + x[..., 2] ** 2 + x[..., 3] ** 2)

    return Field(fn, None, dist, f"boosted_coulomb(q={q}, v={v})")


def lienard_wiechert_uniform(q: float, velocity: Sequence[float]) -> Field:
    """Retarded field of a charge on the worldline ``r(t) = u t``.

    Solves the light-cone condition ``|x - u t_r| = t - t_r`` for the retarded
    time in closed form and applies the velocity (Coulomb-like) part of the
    Liénard-Wiechert field; there is no acceleration term.
    """
    u = np.asarray(velocity, dtype=float)
    u2 = float(u @ u)
    if not u2 < 1.0:
        raise ValueError("|velocity| must be < 1")

    def fn(x):
        d = x[..., 1:] - x[..., :1] * u  # displacement from present position
        du = d @ u
        d2 = np.sum(d * d, axis=-1)
        s = (du + np.sqrt(du * du + (1.0 - u2) * d2)) / (1.0 - u2)  # t - t_r
        if u2 == 0.0:
            s = np.sqrt(d2)
        n = (d + s[..., None] * u) / s[..., None]
        kappa = 1.0 - n @ u
        E = q * (1.0 - u2) * (n - u) / (kappa**3 * s**2)[..., None]
        return from_eb(E, np.cross(n, E))

    def dist(x):
        d = x[..., 1:] - x[..., :1] * u
        return np.sqrt(np.sum(d * d, axis=-1))

    return Field(fn, None, dist, f"lienard_wiechert(q={q}, u={u.tolist()})")


def moving_charge_prime_frame(q: float, v: float, x) -> EBSplit:
    """E', B' seen by g'0 observers for the rest-frame Coulomb field, at ``x' = L x``."""
    g = _gamma_factor(v)
    L, _ = boost_matrix(v)
    xp = np.asarray(x, dtype=float) @ L.T
    Rp = np.sqrt(g**2 * (xp[..., 1] + v * xp[..., 0]) ** 2 + xp[..., 2] ** 2 + xp[..., 3] ** 2)
    E = q * g * np.stack([xp[..., 1] + v * xp[..., 0], xp[..., 2], xp[..., 3]], axis=-1) / Rp[..., None] ** 3
    return EBSplit(E, np.cross(np.array([-v, 0.0, 0.0]), E))


# ---------------------------------------------------------- action density


def maxwell_action_density(F, A=None, J=None) -> np.ndarray:
    """Coefficient of ``τ`` in ``F∧⋆F - A∧⋆J``."""
    F = ga._arr(F)
    out = ga.wedge(F, ga.hodge_star(F))[..., ga.PSEUDOSCALAR_BLADE]
    if A is not None and J is not None:
        out = out - ga.wedge(ga._arr(A), ga.hodge_star(ga._arr(J)))[..., ga.PSEUDOSCALAR_BLADE]
    return out


# ------------------------------------------------------------- worldlines


@dataclass(frozen=True)
class ProbeCharge:
    m: float
    q: float
    x: np.ndarray  # event coordinates
    v: np.ndarray  # proper velocity components v^mu, v·v = 1

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.q == 0:
            raise ValueError("charge must be nonzero")


class WorldlineAborted(RuntimeError):
    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def _minkowski_sq(v):
    return v[0] ** 2 - v[1] ** 2 - v[2] ** 2 - v[3] ** 2


def _acceleration(q_over_m, F: Field, x, v):
    Fx = F(x)
    return q_over_m * ga.vector_components(ga.left_contraction(ga.vector(v), Fx))


def lorentz_force_step(charge: ProbeCharge, F: Field, dtau: float) -> ProbeCharge:
    """One RK4 step of ``m dv/dτ = q v⌟F``, ``dx/dτ = v``, then ``v`` is rescaled to unit norm."""
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    k = charge.q / charge.m
    x0, v0 = charge.x, charge.v

    def rhs(x, v):
        return v, _acceleration(k, F, x, v)

    k1x, k1v = rhs(x0, v0)
    k2x, k2v = rhs(x0 + 0.5 * dtau * k1x, v0 + 0.5 * dtau * k1v)
    k3x, k3v = rhs(x0 + 0.5 * dtau * k2x, v0 + 0.5 * dtau * k2v)
    k4x, k4v = rhs(x0 + dtau * k3x, v0 + dtau * k3v)
    x1 = x0 + dtau / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    v1 = v0 + dtau / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    n2 = _minkowski_sq(v1)
    if not n2 > 0:
        raise SingularityError("step left the timelike cone; dtau too large near a singularity")
    if abs(n2 - 1.0) > 1e-14:
        log.debug("renormalising proper velocity, v·v - 1 = %.3e", n2 - 1.0)
    v1 = v1 / np.sqrt(n2)
    return replace(charge, x=x1, v=v1)


def integrate_worldline(charge: ProbeCharge, F: Field, dtau: float, n_steps: int) -> np.ndarray:
    """States ``[tau, x^mu, v^mu]`` per step, shape ``(n_steps + 1, 9)``."""
    rows = [np.concatenate([[0.0], charge.x, charge.v])]
    for i in range(n_steps):
        try:
            charge = lorentz_force_step(charge, F, dtau)
        except SingularityError as exc:
            raise WorldlineAborted(str(exc), np.array(rows)) from exc
        rows.append(np.concatenate([[(i + 1) * dtau], charge.x, charge.v]))
    return np.array(rows)
