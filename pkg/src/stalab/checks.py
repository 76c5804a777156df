"""Named numerical checks run by scenarios and by the acceptance suite.

Each check returns a list of :class:`Measurement`; a measurement passes when
its value sits on the right side of its tolerance (``bound="upper"`` means
``value <= tolerance``, ``"lower"`` means ``value >= tolerance``).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import algebra as ga
from .boosts import boost_matrix, frame_triple, rotor_from_velocity, rotor_matrix
from .connections import (ConnectionField, TetradField, active_gauge_transform, covariant_derivative,
                          passive_gauge_transform, spinor_derivative, structure_coefficients,
                          torsion_components, torsion_transform_crosscheck)
from .dirac_hestenes import (GaugeModel, SpinorField, active_gauge_lagrangian_check,
                             dh_residual_norm)
from .em import (ProbeCharge, boosted_coulomb_closed_form, coulomb_field, eb_decompose,
                 integrate_worldline, lienard_wiechert_uniform, maxwell_action_density,
                 pullback_field)
from .fields import Field, constant_field, convergence_study, product_field, reverse_field
from .rotor_gauge import (RotorField, active_rotate_field, affine_vector_derivative_check,
                          gauge_dirac_residual, noncommutation_defect, rotor_presets)
from .scenario import Scenario, build_presets

# central differences at step 1e-3 on unit-scale Coulomb data: 100 h² of headroom
FD_TOLERANCE = 1e-4
CONSTANT_ROTORS = ("identity", "boost-0.6", "rotation")
LOCAL_ROTORS = ("local-rotation", "local-boost", "local-product")


@dataclass(frozen=True)
class Measurement:
    label: str
    value: float
    tolerance: float
    bound: str = "upper"
    volatile: bool = False  # wall-clock values; reported under timing only

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.tolerance if self.bound == "upper" else self.value >= self.tolerance

    def to_dict(self) -> dict:
        return {"label": self.label, "measured": self.value, "tolerance": self.tolerance,
                "bound": self.bound, "pass": self.passed}


@dataclass(frozen=True)
class CheckResult:
    name: str
    measurements: tuple
    seconds: float

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.measurements)

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed,
                "measurements": [m.to_dict() for m in self.measurements if not m.volatile]}

    def timing(self) -> dict:
        out = {m.label: m.to_dict() for m in self.measurements if m.volatile}
        out["seconds"] = self.seconds
        return out

    def summary(self) -> str:
        worst = ", ".join(f"{m.label}={m.value:.3e} ({'<=' if m.bound == 'upper' else '>='} {m.tolerance:.1e})"
                          for m in self.measurements)
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {worst}"


@dataclass(frozen=True)
class Check:
    name: str
    doc: str
    fn: Callable[["Context"], list]


REGISTRY: dict[str, Check] = {}


def register(name: str, doc: str):
    def deco(fn):
        REGISTRY[name] = Check(name, doc, fn)
        return fn
    return deco


def list_checks() -> list[tuple[str, str]]:
    return [(c.name, c.doc) for c in REGISTRY.values()]


class Context:
    """Scenario plus a seeded PCG64 generator and lazily built presets."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.rng = np.random.default_rng(scenario.seed)
        self.presets = build_presets(scenario)

    @property
    def physics(self):
        return self.scenario.physics

    def events(self, n: int | None = None, half_width: float = 2.0, clearance: float = 0.5) -> np.ndarray:
        """Random events away from the rest charge and from the boosted worldline."""
        n = self.scenario.grid.events if n is None else n
        v = self.physics.velocity
        out = []
        while sum(len(o) for o in out) < n:
            x = self.rng.uniform(-half_width, half_width, size=(4 * n, 4))
            rest = np.linalg.norm(x[:, 1:], axis=1)
            moving = np.sqrt((x[:, 1] + v * x[:, 0]) ** 2 + x[:, 2] ** 2 + x[:, 3] ** 2)
            out.append(x[(rest > clearance) & (moving > clearance)])
        return np.concatenate(out)[:n]


def run_check(name: str, ctx: Context, tolerances: dict | None = None) -> CheckResult:
    if name not in REGISTRY:
        raise KeyError(f"unknown check {name!r}; available: {', '.join(REGISTRY)}")
    t0 = time.perf_counter()
    ms = REGISTRY[name].fn(ctx)
    tol = tolerances or {}
    ms = tuple(replace(m, tolerance=tol.get(m.label, m.tolerance)) for m in ms)
    return CheckResult(name, ms, time.perf_counter() - t0)


def _max(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


# ---------------------------------------------------------------- algebra and boosts


@register("algebra-oracle", "geometric product vs Dirac-matrix representation on random pairs")
def _algebra_oracle(ctx: Context):
    t0 = time.perf_counter()
    a = ctx.rng.normal(size=(1000, ga.N_BLADES))
    b = ctx.rng.normal(size=(1000, ga.N_BLADES))
    err = np.abs(ga.matrix_rep(ga.geometric_product(a, b)) - ga.matrix_rep(a) @ ga.matrix_rep(b)).max()
    return [Measurement("homomorphism_error", float(err), 1e-12),
            Measurement("wall_seconds", time.perf_counter() - t0, 1.0, volatile=True)]


@register("boost-consistency", "rotor sandwich vs boost matrix on all four basis vectors")
def _boost_consistency(ctx: Context):
    err_prime = err_double = err_formula = 0.0
    for v in np.linspace(-0.95, 0.95, 50):
        R = rotor_from_velocity(v)
        L, Linv = boost_matrix(v)
        triple = frame_triple(v)
        for mu in range(4):
            by_matrix = sum(Linv[a, mu] * ga.GAMMA[a] for a in range(4))
            err_prime = max(err_prime, _max(ga.sandwich(R, ga.GAMMA[mu]) - by_matrix))
            err_formula = max(err_formula, _max(triple.prime[mu] - by_matrix))
            by_L = sum(L[a, mu] * ga.GAMMA[a] for a in range(4))
            err_double = max(err_double, _max(triple.double_prime[mu] - by_L))
        err_prime = max(err_prime, _max(rotor_matrix(R) - Linv))
    return [Measurement("prime_frame", err_prime, 1e-12),
            Measurement("prime_formulas", err_formula, 1e-12),
            Measurement("double_prime_frame", err_double, 1e-12)]


# ---------------------------------------------------------------- fields


@register("oracle-triangle", "pullback vs closed form vs Liénard-Wiechert for the boosted charge")
def _oracle_triangle(ctx: Context):
    q, v = ctx.physics.charge, ctx.physics.velocity
    x = ctx.events(100)
    L, _ = boost_matrix(v)
    a = pullback_field(L, coulomb_field(q))(x)
    b = boosted_coulomb_closed_form(q, v)(x)
    c = lienard_wiechert_uniform(q, (-v, 0.0, 0.0))(x)
    scale = np.maximum(ga.norm(a), 1e-300)
    rel = max(_max(ga.norm(a - b) / scale), _max(ga.norm(b - c) / scale), _max(ga.norm(a - c) / scale))
    eb = eb_decompose(a)
    cross = _max(eb.B - np.cross(np.array([-v, 0.0, 0.0]), eb.E))
    return [Measurement("pairwise_relative", rel, 1e-12), Measurement("b_equals_v_cross_e", cross, 1e-12)]


@register("maxwell-residual", "grid Dirac operator on Coulomb fields converges at second order")
def _maxwell_residual(ctx: Context):
    q, v = ctx.physics.charge, ctx.physics.velocity
    g = ctx.scenario.grid
    J = constant_field(np.zeros(ga.N_BLADES))
    L, _ = boost_matrix(v)
    spacings = (g.h, g.h / 2, g.h / 4)
    out = []
    for label, F in (("coulomb", coulomb_field(q)), ("boosted_coulomb", pullback_field(L, coulomb_field(q)))):
        study = convergence_study(F, J, g.center, spacings, g.n)
        for i, r in enumerate(study.ratios):
            out.append(Measurement(f"{label}_ratio{i}_low", r, 3.6, "lower"))
            out.append(Measurement(f"{label}_ratio{i}_high", r, 4.4))
    return out


@register("action-invariance", "pointwise F∧⋆F unchanged by R F R̃ for rotor presets")
def _action_invariance(ctx: Context):
    x = ctx.events()
    F = coulomb_field(ctx.physics.charge)
    base = maxwell_action_density(F(x))
    out = []
    for name in ("boost-0.6", "rotation") + LOCAL_ROTORS:
        R = rotor_presets()[name]
        rotated = maxwell_action_density(active_rotate_field(R, F)(x))
        out.append(Measurement(name, _max(rotated - base), 1e-12))
    return out


@register("noncommutation", "defect vanishes for constant rotors and not for local ones")
def _noncommutation(ctx: Context):
    x = ctx.events()
    F = coulomb_field(ctx.physics.charge)
    presets = rotor_presets()
    out = [Measurement(f"{n}_max", float(noncommutation_defect(presets[n], F, x).max()), FD_TOLERANCE)
           for n in CONSTANT_ROTORS]
    local = ctx.presets.rotor
    out.append(Measurement(f"{local.name}_min", float(noncommutation_defect(local, F, x).min()), 1e-3, "lower"))
    return out


@register("gauge-maxwell-identity", "direct gauge-covariant residual equals the rotated fiducial one")
def _gauge_maxwell(ctx: Context):
    x = ctx.events()
    L, _ = boost_matrix(ctx.physics.velocity)
    F = pullback_field(L, coulomb_field(ctx.physics.charge))
    J = constant_field(np.zeros(ga.N_BLADES))
    out = []
    for name, R in rotor_presets().items():
        res = gauge_dirac_residual(R, F, J, x)
        out.append(Measurement(f"{name}_identity", _max(res.difference), 1e-10))
    res = gauge_dirac_residual(ctx.presets.rotor, F, J, x)
    out.append(Measurement("gauge_residual", _max(res.residual), 1e-10))
    return out


# ---------------------------------------------------------------- connections


def _connection_presets():
    return [
        ("flat", TetradField.cartesian(), ConnectionField.zero()),
        ("torsional", TetradField.cartesian(), ConnectionField.torsional(0.4)),
        ("rotating", TetradField.rotating(0.5), ConnectionField.rotating_levi_civita(0.5)),
    ]


def covariance_residuals(x, spinor: Field, clifford: Field) -> dict[str, float]:
    """Passive, active and Leibniz residuals across connection and rotor presets."""
    worst = {"passive": 0.0, "active": 0.0, "leibniz": 0.0, "clifford_active": 0.0}
    for _, tetrad, omega in _connection_presets():
        base = spinor_derivative(None, spinor, omega, tetrad, x)
        for R in rotor_presets().values():
            Rx = R.fn(x)[..., None, :]
            w_p = passive_gauge_transform(R, omega, tetrad)
            lhs = spinor_derivative(None, product_field(spinor, reverse_field(R)), w_p, tetrad, x, R)
            worst["passive"] = max(worst["passive"], _max(lhs - ga.geometric_product(base, ga.reverse(Rx))))
            w_a = active_gauge_transform(R, omega, tetrad)
            lhs = spinor_derivative(None, product_field(R, spinor), w_a, tetrad, x)
            worst["active"] = max(worst["active"], _max(lhs - ga.geometric_product(Rx, base)))
            rot = active_rotate_field(R, clifford)
            lhs = covariant_derivative(None, rot, w_a, tetrad, x)
            rhs = ga.sandwich(Rx, covariant_derivative(None, clifford, omega, tetrad, x))
            worst["clifford_active"] = max(worst["clifford_active"], _max(lhs - rhs))
        even = Field(lambda y: ga.even_part(clifford.fn(y)), lambda y: ga.even_part(clifford.partials(y)))
        lhs = spinor_derivative(None, product_field(even, spinor), omega, tetrad, x)
        rhs = (ga.geometric_product(covariant_derivative(None, even, omega, tetrad, x), spinor.fn(x)[..., None, :])
               + ga.geometric_product(even.fn(x)[..., None, :], base))
        worst["leibniz"] = max(worst["leibniz"], _max(lhs - rhs))
    return worst


def generic_clifford_field(seed: int = 11) -> Field:
    """``A_0 + x^mu A_mu`` with seeded random coefficients on all grades."""
    rng = np.random.default_rng(seed)
    A0 = rng.normal(size=ga.N_BLADES)
    A = 0.3 * rng.normal(size=(4, ga.N_BLADES))
    return Field(lambda x: A0 + x @ A,
                 lambda x: np.broadcast_to(A, x.shape[:-1] + (4, ga.N_BLADES)).copy(), None, "generic")


@register("covariance", "passive, active and Leibniz identities of the covariant derivatives")
def _covariance(ctx: Context):
    x = ctx.events(30)
    worst = covariance_residuals(x, SpinorField.generic_even(ctx.scenario.seed + 7), generic_clifford_field())
    return [Measurement(k, v, 1e-10) for k, v in worst.items()]


@register("eq-ari8-crosscheck", "torsion after an active local rotation: direct route vs closed formula")
def _ari8(ctx: Context):
    x = ctx.events(30)
    pre = ctx.presets
    rep = torsion_transform_crosscheck(pre.rotor, pre.tetrad, pre.connection, x)
    ident = torsion_transform_crosscheck(RotorField.identity(), pre.tetrad, pre.connection, x)
    # identity must reproduce the input torsion bit for bit (zero on flat Cartesian data)
    T0 = torsion_components(pre.connection, structure_coefficients(pre.tetrad))(x)
    return [Measurement("route_difference", rep.difference, 1e-8),
            Measurement("torsion_norm", rep.torsion_norm, 1e-6, "lower"),
            Measurement("identity_torsion", _max(ident.route_i - T0), 0.0)]


# ---------------------------------------------------------------- Dirac-Hestenes


@register("dh-plane-wave", "rest and boosted plane waves solve the spinor equation")
def _dh_plane_wave(ctx: Context):
    m, v = ctx.physics.mass, ctx.physics.velocity
    x = ctx.events()
    flat = GaugeModel.flat()
    rest = dh_residual_norm(SpinorField.rest_plane_wave(m), m, flat, x)
    boosted_model = flat.active(RotorField.boost(v))
    boosted = dh_residual_norm(SpinorField.boosted_plane_wave(m, v), m, boosted_model, x)
    return [Measurement("rest", _max(rest), 1e-10), Measurement("boosted", _max(boosted), 1e-10)]


@register("dh-lagrangian-active", "Lagrangian density invariant only with the transformed connection")
def _dh_lagrangian(ctx: Context):
    x = ctx.events()
    pre = ctx.presets
    m = ctx.physics.mass
    with_w = active_gauge_lagrangian_check(pre.rotor, pre.spinor, m, pre.model, x)["deviation"]
    without = active_gauge_lagrangian_check(pre.rotor, pre.spinor, m, pre.model, x, False)["deviation"]
    return [Measurement("with_connection", with_w, 1e-10),
            Measurement("without_connection", without, 1e-3, "lower")]


# ---------------------------------------------------------------- worldlines and global rotors


def hyperbolic_motion(q_over_m_E: float, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``(x, v)`` from rest at the origin in ``F = E g1g0`` under ``m dv/dτ = q v⌟F``."""
    a = q_over_m_E
    x = np.array([np.sinh(a * tau) / a, -(np.cosh(a * tau) - 1.0) / a, 0.0, 0.0])
    v = np.array([np.cosh(a * tau), -np.sinh(a * tau), 0.0, 0.0])
    return x, v


@register("lorentz-force", "constant-E hyperbolic motion and constant-B speed conservation")
def _lorentz(ctx: Context):
    m, q, E, B = 1.0, ctx.physics.charge, 0.7, 0.8
    F = constant_field(ga.blade(1, 0, coeff=E))
    tr = integrate_worldline(ProbeCharge(m, q, np.zeros(4), np.array([1.0, 0, 0, 0])), F, 1e-3, 1000)
    x, v = hyperbolic_motion(q * E / m, 1.0)
    rel = max(np.linalg.norm(tr[-1, 1:5] - x) / np.linalg.norm(x), np.linalg.norm(tr[-1, 5:] - v) / np.linalg.norm(v))
    FB = constant_field(ga.geometric_product(ga.TAU, ga.blade(3, 0, coeff=B)))
    v0 = np.array([np.sqrt(1.25), 0.5, 0.0, 0.0])
    tr = integrate_worldline(ProbeCharge(m, q, np.zeros(4), v0), FB, 1e-3, 10_000)
    speed = np.linalg.norm(tr[:, 6:], axis=1)
    return [Measurement("hyperbolic_relative", float(rel), 1e-8),
            Measurement("speed_drift", _max(speed - speed[0]), 1e-10)]


@register("global-rotor-derivative", "global boost moving events and values keeps ∂F = J")
def _global_rotor(ctx: Context):
    x = ctx.events(50)
    F = coulomb_field(ctx.physics.charge)
    J = constant_field(np.zeros(ga.N_BLADES))
    rep = affine_vector_derivative_check(rotor_from_velocity(ctx.physics.velocity), F, x, J)
    return [Measurement("derivative_deviation", rep.derivative_deviation, FD_TOLERANCE),
            Measurement("source_deviation", rep.source_deviation, FD_TOLERANCE),
            Measurement("coordinate_deviation", rep.coordinate_deviation, 1e-12),
            Measurement("duality_deviation", rep.duality_deviation, 1e-12)]
