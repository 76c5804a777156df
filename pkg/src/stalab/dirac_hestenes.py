"""Dirac-Hestenes spinor fields on a tetrad with connection and torsion.

A :class:`GaugeModel` bundles everything the operator needs in one gauge:
tetrad, connection, and the rotors that say how coframe, Pfaff derivative
and the right-hand coframe factors have been moved away from the fiducial
gauge. ``GaugeModel.active`` and ``GaugeModel.passive`` build the two
transformed models from a fiducial one.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import algebra as ga
from .boosts import rotor_from_velocity
from .connections import (ConnectionField, TetradField, TorsionComponents, active_gauge_transform,
                          frame_transform, mixed_components, passive_gauge_transform,
                          spinor_derivative, structure_coefficients, torsion_components,
                          torsion_from_mixed)
from .fields import Field, constant_field, product_field, reverse_field


@dataclass(frozen=True)
class SpinorField(Field):
    def check(self, x) -> None:
        if not ga.is_grade(self.fn(np.asarray(x, dtype=float)), (0, 2, 4)):
            raise ga.ContractViolation(f"{self.name}: spinor field must be even")

    @classmethod
    def wrap(cls, f: Field, name: Optional[str] = None) -> "SpinorField":
        return cls(f.fn, f.partials_fn, f.singular_distance, name or f.name)

    @classmethod
    def rest_plane_wave(cls, m: float) -> "SpinorField":
        """``ψ = exp(−g2g1 m x⁰)``."""
        B = ga.blade(2, 1)
        one = ga.blade()

        def fn(x):
            a = m * x[..., 0, None]
            return np.cos(a) * one - np.sin(a) * B

        def dfn(x):
            out = np.zeros(x.shape[:-1] + (4, ga.N_BLADES))
            out[..., 0, :] = -m * ga.geometric_product(B, fn(x))
            return out

        return cls(fn, dfn, None, f"rest-plane-wave({m})")

    @classmethod
    def boosted_plane_wave(cls, m: float, v: float = 0.6) -> "SpinorField":
        """``R ψ`` for the rest plane wave and the constant boost rotor ``R``."""
        R = constant_field(rotor_from_velocity(v))
        return cls.wrap(product_field(R, cls.rest_plane_wave(m)), f"boosted-plane-wave({m},{v})")

    @classmethod
    def linear(cls, A0, A, name: str = "linear") -> "SpinorField":
        """``A_0 + x^mu A_mu`` for even coefficients ``A0`` (16,) and ``A`` (4, 16)."""
        A0 = np.asarray(A0, dtype=float)
        A = np.asarray(A, dtype=float)
        if A0.shape != (ga.N_BLADES,) or A.shape != (4, ga.N_BLADES):
            raise ValueError("linear spinor needs 16 constant and 4x16 gradient coefficients")
        if not (ga.is_grade(A0, (0, 2, 4)) and ga.is_grade(A, (0, 2, 4))):
            raise ga.ContractViolation(f"{name}: spinor coefficients must be even")

        def fn(x):
            return A0 + x @ A

        def dfn(x):
            return np.broadcast_to(A, x.shape[:-1] + (4, ga.N_BLADES)).copy()

        return cls(fn, dfn, None, name)

    @classmethod
    def generic_even(cls, seed: int = 7, scale: float = 0.3) -> "SpinorField":
        """Linear spinor with seeded random even coefficients."""
        rng = np.random.default_rng(seed)
        even = (ga.GRADE % 2 == 0).astype(float)
        A0 = rng.normal(size=ga.N_BLADES) * even
        A = scale * rng.normal(size=(4, ga.N_BLADES)) * even
        return cls.linear(A0, A, f"generic-even({seed})")


def _rotate(rotor: Optional[Field], x, value) -> np.ndarray:
    if rotor is None:
        return np.broadcast_to(value, x.shape[:-1] + (ga.N_BLADES,))
    return ga.sandwich(rotor.fn(x), value)


@dataclass(frozen=True)
class GaugeModel:
    """One gauge: the operator is ``θ^a (∂_{e_a} + ½ ω_a)`` with

    * ``θ^a = C g^a C̃`` for ``coframe_rotor = C``;
    * the Pfaff derivative taken on the coframe rotated by ``pfaff_rotor``;
    * the right-hand factors ``θ⁰θ²θ¹`` etc. rotated by ``trivector_rotor``;
    * ``torsion`` overriding the covector computed from the connection.
    """

    tetrad: TetradField
    connection: ConnectionField
    coframe_rotor: Optional[Field] = None
    pfaff_rotor: Optional[Field] = None
    trivector_rotor: Optional[Field] = None
    torsion: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def flat(cls, connection: Optional[ConnectionField] = None) -> "GaugeModel":
        return cls(TetradField.cartesian(), connection or ConnectionField.zero())

    def coframe(self, x) -> list[np.ndarray]:
        return [_rotate(self.coframe_rotor, x, g) for g in ga.GAMMA_UP]

    def right(self, x, *indices: int) -> np.ndarray:
        """``θ^i θ^j ...`` (upper indices, printed order) on the right-hand coframe."""
        out = ga.blade()
        for i in indices:
            out = ga.geometric_product(out, ga.GAMMA_UP[i])
        return _rotate(self.trivector_rotor, x, out)

    def torsion_components(self) -> TorsionComponents:
        return torsion_components(self.connection, structure_coefficients(self.tetrad))

    def torsion_covector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.torsion is not None:
            return self.torsion(x)
        return self.torsion_components().covector_multivector(x, self.coframe_rotor)

    def active(self, R: Field, transform_connection: bool = True) -> "GaugeModel":
        """``ψ -> Rψ``, ``θ^a -> R θ^a R̃``, connection by the active law.

        The right-hand coframe factors stay fiducial. The torsion covector is
        that of ``Λ^m_n ω'_m`` against the fiducial structure coefficients,
        placed on the rotated coframe.
        """
        omega = active_gauge_transform(R, self.connection, self.tetrad) if transform_connection \
            else self.connection
        c = structure_coefficients(self.tetrad)

        def torsion(x):
            Lam = frame_transform(R.fn(x))
            w_hat = np.einsum("...mn,...mk->...nk", Lam, omega(x))
            T = TorsionComponents(lambda y: torsion_from_mixed(mixed_components(w_hat), c(y)))
            return T.covector_multivector(x, R)

        return replace(self, connection=omega, coframe_rotor=R, torsion=torsion)

    def passive(self, R: Field) -> "GaugeModel":
        """``ψ -> ψR̃`` with the passive connection, primed Pfaff derivative and
        rotated right-hand factors; torsion is carried over unchanged."""
        base = self

        def torsion(x):
            return base.torsion_covector(x)

        return replace(self, connection=passive_gauge_transform(R, self.connection, self.tetrad),
                       pfaff_rotor=R, trivector_rotor=R, torsion=torsion)


def spin_dirac_operator(psi: Field, model: GaugeModel, x) -> np.ndarray:
    """``θ^a ∇^(s)_{e_a} ψ``."""
    x = np.asarray(x, dtype=float)
    D = spinor_derivative(None, psi, model.connection, model.tetrad, x, model.pfaff_rotor)
    theta = model.coframe(x)
    return sum(ga.geometric_product(theta[a], D[..., a, :]) for a in range(4))


def dh_residual(psi: Field, m: float, model: GaugeModel, x, include_torsion: bool = True) -> np.ndarray:
    """``∂^(s)ψ θ²θ¹ + ½ T ψ θ⁰θ²θ¹ − m ψ θ⁰`` as a multivector."""
    x = np.asarray(x, dtype=float)
    p = psi.fn(x)
    out = ga.geometric_product(spin_dirac_operator(psi, model, x), model.right(x, 2, 1))
    out = out - m * ga.geometric_product(p, model.right(x, 0))
    if include_torsion:
        T = model.torsion_covector(x)
        out = out + 0.5 * ga.geometric_product(ga.geometric_product(T, p), model.right(x, 0, 2, 1))
    return out


def dh_residual_norm(psi: Field, m: float, model: GaugeModel, x, include_torsion: bool = True) -> np.ndarray:
    return ga.norm(dh_residual(psi, m, model, x, include_torsion))


def dh_lagrangian(psi: Field, m: float, model: GaugeModel, x) -> np.ndarray:
    """``[(∂^(s)ψ θ⁰θ²θ¹)·ψ − m ψ·ψ] |det h|``."""
    x = np.asarray(x, dtype=float)
    p = psi.fn(x)
    kinetic = ga.geometric_product(spin_dirac_operator(psi, model, x), model.right(x, 0, 2, 1))
    density = ga.scalar_product(kinetic, p) - m * ga.scalar_product(p, p)
    return density * model.tetrad.volume(x)


def active_gauge_lagrangian_check(R: Field, psi: Field, m: float, model: GaugeModel, x,
                                  transform_connection: bool = True) -> dict:
    """Max pointwise change of the Lagrangian density under ``ψ -> Rψ``."""
    x = np.asarray(x, dtype=float)
    before = dh_lagrangian(psi, m, model, x)
    after = dh_lagrangian(product_field(R, psi), m, model.active(R, transform_connection), x)
    return {"deviation": float(np.max(np.abs(after - before), initial=0.0)),
            "transform_connection": transform_connection}


def passive_gauge_lagrangian_check(R: Field, psi: Field, m: float, model: GaugeModel, x) -> dict:
    """Max pointwise change of the Lagrangian density under ``ψ -> ψR̃``."""
    x = np.asarray(x, dtype=float)
    before = dh_lagrangian(psi, m, model, x)
    after = dh_lagrangian(product_field(psi, reverse_field(R)), m, model.passive(R), x)
    return {"deviation": float(np.max(np.abs(after - before), initial=0.0))}
