"""Local rotor fields acting on multivector fields.

Covers the active map ``F -> R F R̃``, its failure to commute with the flat
Dirac operator when ``R`` varies, the gauge-covariant operator built from the
rotated coframe and transformed connection, and the global (affine) case
where a constant rotor also moves the events.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import algebra as ga
from .boosts import rotor_from_velocity, rotor_matrix
from .connections import (ConnectionField, TetradField, active_gauge_transform,
                          covariant_derivative)
from .fields import (FD_STEP, Field, apply_dirac, central_partials, constant_field,
                     product_field, sandwich_field)

NONCOMMUTATION_STEP = 1e-3


@dataclass(frozen=True)
class RotorField(Field):
    """A unit even field. ``generator`` is ``F`` with ``R = exp F`` in a fixed
    plane, when known; the torsion formula needs it."""

    generator: Optional[Field] = None

    def check(self, x, tol: float = 1e-10) -> None:
        ga.assert_rotor(self.fn(np.asarray(x, dtype=float)), tol)

    @classmethod
    def constant(cls, R, name: str = "constant-rotor", generator=None) -> "RotorField":
        c = constant_field(R)
        ga.assert_rotor(np.asarray(R, dtype=float))
        return cls(c.fn, c.partials_fn, None, name, generator)

    @classmethod
    def identity(cls) -> "RotorField":
        return cls.constant(ga.blade(), "identity", constant_field(np.zeros(ga.N_BLADES)))

    @classmethod
    def boost(cls, v: float) -> "RotorField":
        R = rotor_from_velocity(v)
        gen = constant_field(ga.blade(1, 0, coeff=0.5 * np.arctanh(v)))
        return cls.constant(R, f"boost({v})", gen)

    @classmethod
    def planar(cls, plane, phase0: float = 0.0, gradient=(0.0, 0.0, 0.0, 0.0),
               name: Optional[str] = None) -> "RotorField":
        """``R = exp(½ φ(x) B)`` with ``B`` the unit blade on ``plane`` and
        ``φ = phase0 + gradient·x``."""
        B = ga.blade(*plane)
        sq = ga.geometric_product(B, B)[0]
        if not (ga.is_grade(B, 2) and abs(abs(sq) - 1.0) < 1e-12):
            raise ga.ContractViolation(f"plane {plane} is not a unit bivector blade")
        g = np.asarray(gradient, dtype=float)
        one = ga.blade()

        def phase(x):
            return phase0 + x @ g

        def fn(x):
            a = 0.5 * phase(x)[..., None]
            if sq < 0:
                return np.cos(a) * one + np.sin(a) * B
            return np.cosh(a) * one + np.sinh(a) * B

        def dfn(x):
            BR = ga.geometric_product(B, fn(x))
            return 0.5 * g[:, None] * BR[..., None, :]

        gen = Field(lambda x: 0.5 * phase(x)[..., None] * B,
                    lambda x: np.broadcast_to(0.5 * g[:, None] * B, x.shape[:-1] + (4, ga.N_BLADES)),
                    name="generator")
        label = name or f"planar{tuple(plane)}"
        return cls(fn, dfn, None, label, gen)

    @classmethod
    def product(cls, a: "RotorField", b: "RotorField") -> "RotorField":
        p = product_field(a, b)
        return cls(p.fn, p.partials_fn, None, f"{a.name}*{b.name}", None)


def rotor_presets() -> dict[str, RotorField]:
    local_rot = RotorField.planar((2, 1), gradient=(0, 0.3, 0, 0), name="local-rotation")
    local_boost = RotorField.planar((1, 0), gradient=(0, 0, 0.2, 0), name="local-boost")
    return {
        "identity": RotorField.identity(),
        "boost-0.6": RotorField.boost(0.6),
        "rotation": RotorField.planar((3, 2), phase0=0.7, name="rotation"),
        "local-rotation": local_rot,
        "local-boost": local_boost,
        "local-product": RotorField.product(local_rot, local_boost),
    }


def active_rotate_field(Rf: Field, F: Field) -> Field:
    return sandwich_field(Rf, F)


def noncommutation_defect(Rf: Field, F: Field, x, h: float = NONCOMMUTATION_STEP,
                          coframe: str = "rotated") -> np.ndarray:
    """Pointwise ``|D(R F R̃) − R (∂F) R̃|`` with the first term by central differences.

    ``coframe="rotated"`` uses ``D = (R g^mu R̃) ∂_mu``: the defect is then
    exactly the part carried by derivatives of ``R`` and vanishes for constant
    rotors. ``coframe="fixed"`` uses the flat ``g^mu ∂_mu``, which also picks
    up ``g^mu R ≠ R g^mu`` for constant boosts and rotations.
    """
    x = np.asarray(x, dtype=float)
    R = Rf(x)
    parts = central_partials(active_rotate_field(Rf, F).evaluate, x, h)
    if coframe == "fixed":
        lhs = apply_dirac(parts)
    elif coframe == "rotated":
        lhs = sum(ga.geometric_product(ga.sandwich(R, ga.GAMMA_UP[mu]), parts[..., mu, :])
                  for mu in range(4))
    else:
        raise ValueError(f"unknown coframe {coframe!r}")
    rhs = ga.sandwich(R, apply_dirac(F.partials(x)))
    return ga.norm(lhs - rhs)


@dataclass(frozen=True)
class GaugeResidual:
    direct: np.ndarray
    sandwiched: np.ndarray

    @property
    def difference(self) -> np.ndarray:
        return ga.norm(self.direct - self.sandwiched)

    @property
    def residual(self) -> np.ndarray:
        return ga.norm(self.direct)


def gauge_dirac(Rf: Field, F: Field, tetrad: TetradField, omega: ConnectionField, x) -> np.ndarray:
    """``θ'^a ∇'_a (R F R̃)`` with ``θ'^a = R θ^a R̃`` and the active connection."""
    x = np.asarray(x, dtype=float)
    w_new = active_gauge_transform(Rf, omega, tetrad)
    D = covariant_derivative(None, sandwich_field(Rf, F), w_new, tetrad, x)
    R = Rf.fn(x)
    out = np.zeros(x.shape[:-1] + (ga.N_BLADES,))
    for a in range(4):
        out += ga.geometric_product(ga.sandwich(R, ga.GAMMA_UP[a]), D[..., a, :])
    return out


def gauge_dirac_residual(Rf: Field, F: Field, J: Field, x, tetrad: Optional[TetradField] = None,
                         omega: Optional[ConnectionField] = None) -> GaugeResidual:
    """Direct ``ᴿ∂ ᴿF − ᴿJ`` next to ``R (∂F − J) R̃`` from the fiducial gauge."""
    x = np.asarray(x, dtype=float)
    tetrad = tetrad or TetradField.cartesian()
    omega = omega or ConnectionField.zero()
    R = Rf.fn(x)
    direct = gauge_dirac(Rf, F, tetrad, omega, x) - ga.sandwich(R, J.fn(x))
    ident = RotorField.identity()
    fiducial = gauge_dirac(ident, F, tetrad, omega, x) - J.fn(x)
    return GaugeResidual(direct, ga.sandwich(R, fiducial))


@dataclass(frozen=True)
class AffineReport:
    derivative_deviation: float
    coordinate_deviation: float
    duality_deviation: float
    source_deviation: float

    def to_dict(self) -> dict:
        return {"derivative_deviation": self.derivative_deviation,
                "coordinate_deviation": self.coordinate_deviation,
                "duality_deviation": self.duality_deviation,
                "source_deviation": self.source_deviation}


def affine_vector_derivative_check(R, F: Field, x, J: Optional[Field] = None,
                                   h: float = FD_STEP) -> AffineReport:
    """Global rotor moving both events and values.

    ``x' = R x R̃`` and ``F'(x') = R F(x) R̃``; the flat operator in the new
    coordinates, evaluated by central differences, is compared with
    ``R (∂F)(x) R̃``. Also reports the coordinate relation
    ``x^mu e'_mu = R x R̃`` and the duality ``e'^mu·e'_nu = δ``.
    """
    R = np.asarray(R, dtype=float)
    ga.assert_rotor(R)
    x = np.asarray(x, dtype=float)
    M = rotor_matrix(R)
    Minv = np.linalg.inv(M)

    def F_new(y):
        return ga.sandwich(R, F.evaluate(y @ Minv.T))

    y = x @ M.T
    lhs = apply_dirac(central_partials(F_new, y, h))
    dF = apply_dirac(F.partials(x))
    rhs = ga.sandwich(R, dF)
    dev = float(np.max(ga.norm(lhs - rhs), initial=0.0))

    src = 0.0
    if J is not None:
        src = float(np.max(ga.norm(lhs - ga.sandwich(R, J.fn(x))), initial=0.0))

    e_new = [ga.sandwich(R, g) for g in ga.GAMMA]
    e_new_up = [ga.sandwich(R, g) for g in ga.GAMMA_UP]
    moved = ga.sandwich(R, ga.vector(x))
    expanded = sum(x[..., mu, None] * e_new[mu] for mu in range(4))
    coord = float(np.max(np.abs(moved - expanded), initial=0.0))
    coord = max(coord, float(np.max(np.abs(ga.vector_components(moved) - y), initial=0.0)))

    gram = np.array([[ga.scalar_product(ga.reverse(a), b) for b in e_new] for a in e_new_up])
    duality = float(np.max(np.abs(gram - np.eye(4))))
    return AffineReport(dev, coord, duality, src)


def gauge_report(Rf: Field, F: Field, J: Field, x) -> dict:
    """The JSON-facing summary: defect norms, gauge identity and global-rotor check."""
    d = noncommutation_defect(Rf, F, x)
    g = gauge_dirac_residual(Rf, F, J, x)
    R0 = Rf.fn(np.zeros(4))
    app = affine_vector_derivative_check(R0, F, x, J)
    return {
        "defect_linf": float(np.max(d)),
        "defect_l2": float(np.sqrt(np.mean(d**2))),
        "gauge_identity_err": float(np.max(g.difference)),
        "appendix_deviation": app.derivative_deviation,
    }
