"""Tetrads, connection bivectors, Pfaff/covariant/spinor derivatives and torsion.

Every field in this module carries *frame* components: a multivector value
is expanded on the coframe ``θ^a`` identified with ``g^a``, so the algebra
kernel applies unchanged. Frame derivatives are ``∂_{e_a} = (h⁻¹)^mu_a ∂_mu``.

Index conventions used throughout (arrays carry event axes first):

* ``h[..., a, mu] = h^a_mu`` with ``θ^a = h^a_mu dx^mu``;
* ``ω_{e_a} = ½ ω_a^{bc} θ_b∧θ_c`` and ``ω^r_{nk} = ω_n^{rs} η_sk``;
* ``[e_n, e_k] = c^r_{nk} e_r``, stored as ``c[..., r, n, k]``;
* ``T^r_{nk} = ω^r_{nk} − ω^r_{kn} − c^r_{nk}``, covector ``T_a = T^b_{ab}``;
* ``Λ^m_n`` is defined by ``R θ^m R̃ = Λ^m_n θ^n``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import algebra as ga
from .fields import Field, reverse_field, sandwich_field

log = logging.getLogger(__name__)

ETA = ga.ETA
_BIV = np.zeros((4, 4), dtype=int)
for _b in range(4):
    for _c in range(4):
        _BIV[_b, _c] = (1 << _b) | (1 << _c)
_BIV_SIGN = np.sign(np.subtract.outer(np.arange(4), np.arange(4))).astype(float) * -1.0


class TorsionPreconditionError(ValueError):
    """The input connection was required to be torsion free but is not."""


def bivector_coefficients(B) -> np.ndarray:
    """Antisymmetric ``C[..., b, c]`` with ``B = ½ C^{bc} g_b∧g_c``."""
    B = np.asarray(B, dtype=float)
    return B[..., _BIV] * _BIV_SIGN


def bivector_from_coefficients(C) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    out = np.zeros(C.shape[:-2] + (ga.N_BLADES,))
    for b in range(4):
        for c in range(b + 1, 4):
            out[..., _BIV[b, c]] = 0.5 * (C[..., b, c] - C[..., c, b])
    return out


def frame_transform(R) -> np.ndarray:
    """``Λ[..., m, n]`` with ``R g^m R̃ = Λ^m_n g^n``."""
    R = np.asarray(R, dtype=float)
    Lam = np.empty(R.shape[:-1] + (4, 4))
    for m in range(4):
        img = ga.sandwich(R, ga.GAMMA_UP[m])
        for n in range(4):
            Lam[..., m, n] = ga.geometric_product(img, ga.GAMMA[n])[..., 0]
    return Lam


# ---------------------------------------------------------------- tetrads


@dataclass(frozen=True)
class TetradField:
    """Coframe coefficients ``h^a_mu`` and their coordinate partials.

    ``dh_fn`` returns ``(..., 4, 4, 4)`` with the derivative index first.
    """

    h_fn: Callable[[np.ndarray], np.ndarray]
    dh_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "tetrad"

    def h(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = np.broadcast_to(self.h_fn(x), x.shape[:-1] + (4, 4))
        if np.any(np.abs(np.linalg.det(h)) < 1e-12):
            raise ga.ContractViolation(f"{self.name}: tetrad not invertible")
        return h

    def frame(self, x) -> np.ndarray:
        """``E[..., mu, a] = (h⁻¹)^mu_a``, components of ``e_a``."""
        return np.linalg.inv(self.h(x))

    def dh(self, x, step: float = 1e-5) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dh_fn is not None:
            return np.broadcast_to(self.dh_fn(x), x.shape[:-1] + (4, 4, 4))
        log.debug("%s: finite-difference tetrad derivative", self.name)
        cols = []
        for mu in range(4):
            dx = np.zeros(4)
            dx[mu] = step
            cols.append((self.h(x + dx) - self.h(x - dx)) / (2 * step))
        return np.stack(cols, axis=-3)

    def metric(self, x) -> np.ndarray:
        """``g_mu_nu = η_ab h^a_mu h^b_nu``."""
        h = self.h(x)
        return np.einsum("...am,ab,...bn->...mn", h, ETA, h)

    def volume(self, x) -> np.ndarray:
        """``sqrt|det g| = |det h|``."""
        return np.abs(np.linalg.det(self.h(x)))

    @classmethod
    def cartesian(cls) -> "TetradField":
        return cls(lambda x: np.broadcast_to(np.eye(4), x.shape[:-1] + (4, 4)),
                   lambda x: np.zeros(x.shape[:-1] + (4, 4, 4)), "cartesian")

    @classmethod
    def rotating(cls, omega: float = 0.5) -> "TetradField":
        """Frame spinning about x³ at angular rate ``omega``:
        ``e_1 = cos(ωt)∂_x + sin(ωt)∂_y``, ``e_2 = −sin(ωt)∂_x + cos(ωt)∂_y``."""

        def h_fn(x):
            c, s = np.cos(omega * x[..., 0]), np.sin(omega * x[..., 0])
            h = np.zeros(x.shape[:-1] + (4, 4))
            h[..., 0, 0] = h[..., 3, 3] = 1.0
            h[..., 1, 1], h[..., 1, 2] = c, s
            h[..., 2, 1], h[..., 2, 2] = -s, c
            return h

        def dh_fn(x):
            c, s = np.cos(omega * x[..., 0]), np.sin(omega * x[..., 0])
            d = np.zeros(x.shape[:-1] + (4, 4, 4))
            d[..., 0, 1, 1], d[..., 0, 1, 2] = -omega * s, omega * c
            d[..., 0, 2, 1], d[..., 0, 2, 2] = -omega * c, -omega * s
            return d

        return cls(h_fn, dh_fn, f"rotating({omega})")


# ---------------------------------------------------------------- connections


@dataclass(frozen=True)
class ConnectionField:
    """``x -> (..., 4, 16)``: the bivector ``ω_{e_a}`` for each frame index."""

    omega_fn: Callable[[np.ndarray], np.ndarray]
    name: str = "connection"

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = np.broadcast_to(self.omega_fn(x), x.shape[:-1] + (4, ga.N_BLADES))
        if not ga.is_grade(w, 2, tol=1e-10):
            raise ga.ContractViolation(f"{self.name}: connection is not a pure bivector")
        return w

    def coefficients(self, x) -> np.ndarray:
        """``ω_a^{bc}`` as ``[..., a, b, c]``."""
        return bivector_coefficients(self(x))

    def mixed(self, x) -> np.ndarray:
        """``ω^r_{nk}`` as ``[..., r, n, k]``."""
        return mixed_components(self(x))

    @classmethod
    def from_coefficients(cls, table, name: str = "table") -> "ConnectionField":
        w = bivector_from_coefficients(np.asarray(table, dtype=float))
        return cls(lambda x: np.broadcast_to(w, x.shape[:-1] + (4, ga.N_BLADES)), name)

    @classmethod
    def zero(cls) -> "ConnectionField":
        return cls(lambda x: np.zeros(x.shape[:-1] + (4, ga.N_BLADES)), "zero")

    @classmethod
    def rotating_levi_civita(cls, omega: float = 0.5) -> "ConnectionField":
        """Torsion-free connection of :meth:`TetradField.rotating`."""
        table = np.zeros((4, 4, 4))
        table[0, 1, 2], table[0, 2, 1] = omega, -omega
        return cls.from_coefficients(table, f"levi-civita-rotating({omega})")

    @classmethod
    def torsional(cls, kappa: float = 0.4) -> "ConnectionField":
        """Flat Cartesian with ``ω_{e_1} = κ g0∧g1``: ``T = κ θ⁰``."""
        table = np.zeros((4, 4, 4))
        table[1, 0, 1], table[1, 1, 0] = kappa, -kappa
        return cls.from_coefficients(table, f"torsional({kappa})")


def mixed_components(omega) -> np.ndarray:
    """``ω^r_{nk} = ω_n^{rs} η_sk`` from bivectors ``omega[..., n, :]``."""
    C = bivector_coefficients(omega)
    return np.einsum("...nrs,sk->...rnk", C, ETA)


# ---------------------------------------------------------------- derivatives


def frame_partials(A: Field, tetrad: TetradField, x) -> np.ndarray:
    """``∂_{e_a} A`` for all ``a``: shape ``(..., 4, 16)``."""
    x = np.asarray(x, dtype=float)
    return np.einsum("...ma,...mk->...ak", tetrad.frame(x), A.partials(x))


def _select(values: np.ndarray, X: Optional[int]) -> np.ndarray:
    return values if X is None else values[..., X, :]


def pfaff_derivative(X: Optional[int], A: Field, tetrad: TetradField, x,
                     rotor: Optional[Field] = None) -> np.ndarray:
    """Differentiate frame components of ``A`` along ``e_X`` (all ``X`` if None).

    With ``rotor = U`` the components are taken on the rotated coframe
    ``U θ^a Ũ``: the result is ``U ∂_X(Ũ A U) Ũ``.
    """
    if not A.has_partials:
        log.debug("%s: Pfaff derivative by finite differences", A.name)
    if rotor is None:
        return _select(frame_partials(A, tetrad, x), X)
    inner = sandwich_field(reverse_field(rotor), A)
    d = frame_partials(inner, tetrad, x)
    U = rotor.fn(np.asarray(x, dtype=float))[..., None, :]
    return _select(ga.sandwich(U, d), X)


def covariant_derivative(X: Optional[int], A: Field, omega: ConnectionField,
                         tetrad: TetradField, x, pfaff_rotor: Optional[Field] = None) -> np.ndarray:
    """``∇_X A = ∂_X A + ½[ω_X, A]``."""
    x = np.asarray(x, dtype=float)
    d = pfaff_derivative(None, A, tetrad, x, pfaff_rotor)
    a = A.fn(x)[..., None, :]
    return _select(d + 0.5 * ga.commutator(omega(x), a), X)


def spinor_derivative(X: Optional[int], psi: Field, omega: ConnectionField,
                      tetrad: TetradField, x, pfaff_rotor: Optional[Field] = None) -> np.ndarray:
    """``∇^(s)_X ψ = ∂_X ψ + ½ ω_X ψ`` for even ``ψ``."""
    x = np.asarray(x, dtype=float)
    p = psi.fn(x)
    if not ga.is_grade(p, (0, 2, 4), tol=1e-12):
        raise ga.ContractViolation("spinor derivative needs an even field")
    d = pfaff_derivative(None, psi, tetrad, x, pfaff_rotor)
    return _select(d + 0.5 * ga.geometric_product(omega(x), p[..., None, :]), X)


# ---------------------------------------------------------------- gauge transforms


def _rotor_frame_partials(R: Field, tetrad: TetradField, x):
    x = np.asarray(x, dtype=float)
    Rv = R.fn(x)
    return Rv, frame_partials(R, tetrad, x)


def passive_gauge_transform(R: Field, omega: ConnectionField, tetrad: TetradField) -> ConnectionField:
    """``ω'_X = R ω_X R̃ + 2 (∇_X R) R̃`` with ``∇_X R = ∂_X R + ½[ω_X, R]``.

    The primed Pfaff derivative is the one with ``rotor=R``; with both,
    ``∇'^(s)(ψ R̃) = (∇^(s) ψ) R̃``.
    """

    def fn(x):
        Rv, dR = _rotor_frame_partials(R, tetrad, x)
        w = omega(x)
        Rb = Rv[..., None, :]
        covR = dR + 0.5 * ga.commutator(w, Rb)
        return ga.sandwich(Rb, w) + 2.0 * ga.geometric_product(covR, ga.reverse(Rb))

    return ConnectionField(fn, f"passive[{R.name}]({omega.name})")


def active_gauge_transform(R: Field, omega: ConnectionField, tetrad: TetradField) -> ConnectionField:
    """``ω'_m = R ω_m R̃ − 2 (∂_{e_m} R) R̃``, so ``∇'_m(Rψ) = R ∇_m ψ``."""

    def fn(x):
        Rv, dR = _rotor_frame_partials(R, tetrad, x)
        Rb = Rv[..., None, :]
        return ga.sandwich(Rb, omega(x)) - 2.0 * ga.geometric_product(dR, ga.reverse(Rb))

    return ConnectionField(fn, f"active[{R.name}]({omega.name})")


def active_connection_component_form(R: Field, generator: Field, omega: ConnectionField,
                                     tetrad: TetradField, x) -> np.ndarray:
    """Mixed components of ``Λ^m_n ω'_m`` built from components only.

    ``Λ^m_n Λ^b_k (Λ⁻¹)^r_p ω^p_{mb} − 2 η_sk Λ^m_n ∂_{e_m} F^{rs}``
    where ``R = exp(F)`` and ``F = ½ F^{rs} θ_r∧θ_s``.
    """
    x = np.asarray(x, dtype=float)
    Lam = frame_transform(R.fn(x))
    Linv = np.linalg.inv(Lam)
    w = omega.mixed(x)
    dF = bivector_coefficients(frame_partials(generator, tetrad, x))
    rot = np.einsum("...mn,...bk,...rp,...pmb->...rnk", Lam, Lam, Linv, w)
    grad = np.einsum("...mn,...mrs,sk->...rnk", Lam, dF, ETA)
    return rot - 2.0 * grad


# ---------------------------------------------------------------- structure and torsion


@dataclass(frozen=True)
class StructureCoefficients:
    c_fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        return self.c_fn(np.asarray(x, dtype=float))


def structure_coefficients(tetrad: TetradField) -> StructureCoefficients:
    """``c^r_{nk} = h^r_mu [e_n, e_k]^mu``."""

    def c_fn(x):
        h = tetrad.h(x)
        E = np.linalg.inv(h)
        dE = -np.einsum("...mb,...vbc,...ca->...vma", E, tetrad.dh(x), E)
        lie = np.einsum("...vn,...vmk->...mnk", E, dE)
        lie = lie - np.swapaxes(lie, -1, -2)
        return np.einsum("...rm,...mnk->...rnk", h, lie)

    return StructureCoefficients(c_fn)


@dataclass(frozen=True)
class TorsionComponents:
    T_fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        return self.T_fn(np.asarray(x, dtype=float))

    def covector(self, x) -> np.ndarray:
        """``T_a = T^b_{ab}``."""
        return np.einsum("...bab->...a", self(x))

    def covector_multivector(self, x, coframe_rotor: Optional[Field] = None) -> np.ndarray:
        """``T_a θ^a``, optionally on a rotated coframe."""
        x = np.asarray(x, dtype=float)
        Ta = self.covector(x)
        out = ga.vector(np.einsum("...a,ab->...b", Ta, ETA))
        if coframe_rotor is not None:
            out = ga.sandwich(coframe_rotor.fn(x), out)
        return out


def torsion_from_mixed(w: np.ndarray, c: np.ndarray) -> np.ndarray:
    return w - np.swapaxes(w, -1, -2) - c


def torsion_components(omega, c: StructureCoefficients) -> TorsionComponents:
    """``T^r_{nk} = ω^r_{nk} − ω^r_{kn} − c^r_{nk}``."""
    mixed = omega.mixed if isinstance(omega, ConnectionField) else (lambda x: mixed_components(omega(x)))
    return TorsionComponents(lambda x: torsion_from_mixed(mixed(x), c(x)))


@dataclass(frozen=True)
class TorsionCrosscheck:
    route_i: np.ndarray
    route_ii: np.ndarray
    input_torsion: float

    @property
    def difference(self) -> float:
        return float(np.max(np.abs(self.route_i - self.route_ii), initial=0.0))

    @property
    def torsion_norm(self) -> float:
        """Largest pointwise Frobenius norm of ``T'``."""
        n = np.sqrt(np.sum(self.route_i**2, axis=(-3, -2, -1)))
        return float(np.max(n, initial=0.0))

    def to_dict(self) -> dict:
        return {"input_torsion": self.input_torsion, "route_difference": self.difference,
                "torsion_norm": self.torsion_norm}


def torsion_transform_crosscheck(R: Field, tetrad: TetradField, omega: ConnectionField, x,
                                 generator: Optional[Field] = None, tol: float = 1e-10) -> TorsionCrosscheck:
    """Torsion of the actively transformed connection, computed two ways.

    Route (i) transforms the connection, reindexes it along the unprimed
    frame (``Λ^m_n ω'_m``) and takes torsion against the fiducial ``c``.
    Route (ii) evaluates the closed formula
    ``Λ^m_n Λ^b_k (Λ⁻¹)^r_p c^p_{mb} − c^r_{nk} − 2 ∂_{e_m}F^{rs}(η_sk Λ^m_n − η_sn Λ^m_k)``,
    which needs the rotor's generator ``F`` (``R = exp F`` in a fixed plane).
    """
    x = np.asarray(x, dtype=float)
    c = structure_coefficients(tetrad)(x)
    T0 = torsion_components(omega, structure_coefficients(tetrad))(x)
    t0 = float(np.max(np.abs(T0), initial=0.0))
    if t0 > tol:
        raise TorsionPreconditionError(f"input torsion {t0:.3e} exceeds {tol:.1e}")

    Lam = frame_transform(R.fn(x))
    wp = active_gauge_transform(R, omega, tetrad)(x)
    w_hat = np.einsum("...mn,...mk->...nk", Lam, wp)
    route_i = torsion_from_mixed(mixed_components(w_hat), c)

    if generator is None:
        generator = getattr(R, "generator", None)
    if generator is None:
        raise ga.ContractViolation("route (ii) needs the rotor generator")
    Linv = np.linalg.inv(Lam)
    dF = bivector_coefficients(frame_partials(generator, tetrad, x))
    rot = np.einsum("...mn,...bk,...rp,...pmb->...rnk", Lam, Lam, Linv, c)
    grad = np.einsum("...mrs,sk,...mn->...rnk", dF, ETA, Lam)
    route_ii = rot - c - 2.0 * (grad - np.swapaxes(grad, -1, -2))
    return TorsionCrosscheck(route_i, route_ii, t0)
