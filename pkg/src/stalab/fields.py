"""Multivector fields over Minkowski events and the flat Dirac operator.

A :class:`Field` wraps a vectorised closure ``x -> values`` where ``x`` has
shape ``(..., 4)`` (coordinates ``x^0..x^3``) and values have shape
``(..., 16)``. Fields may carry analytic partial derivatives
``x -> (..., 4, 16)`` (axis -2 is ``mu`` in ``∂_mu``); combinators propagate
them with the product rule so identity checks can run at round-off level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import algebra as ga

ArrayFn = Callable[[np.ndarray], np.ndarray]

DEFAULT_POINT_BUDGET = 33**4
FD_STEP = 1e-4


class SingularityError(ArithmeticError):
    """A field was evaluated on (or too close to) one of its singular points."""


@dataclass(frozen=True)
class Field:
    fn: ArrayFn
    partials_fn: Optional[ArrayFn] = None
    singular_distance: Optional[ArrayFn] = None
    name: str = "field"

    def evaluate(self, x) -> np.ndarray:
        """Values with NaN/inf left in place at singular events."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.fn(x)

    def __call__(self, x) -> np.ndarray:
        out = self.evaluate(x)
        if not np.all(np.isfinite(out)):
            raise SingularityError(f"{self.name}: singular evaluation")
        return out

    @property
    def has_partials(self) -> bool:
        return self.partials_fn is not None

    def partials(self, x, h: float = FD_STEP) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.partials_fn is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.partials_fn(x)
        else:
            out = central_partials(self.evaluate, x, h)
        if not np.all(np.isfinite(out)):
            raise SingularityError(f"{self.name}: singular derivative")
        return out

    def without_partials(self) -> "Field":
        return Field(self.fn, None, self.singular_distance, self.name + "[fd]")


def central_partials(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    """Second-order central differences along each coordinate axis."""
    cols = []
    for mu in range(4):
        dx = np.zeros(4)
        dx[mu] = h
        cols.append((fn(x + dx) - fn(x - dx)) / (2.0 * h))
    return np.stack(cols, axis=-2)


def constant_field(value, name: str = "constant") -> Field:
    v = np.asarray(value, dtype=float)

    def fn(x):
        return np.broadcast_to(v, x.shape[:-1] + (ga.N_BLADES,)).copy()

    def dfn(x):
        return np.zeros(x.shape[:-1] + (4, ga.N_BLADES))

    return Field(fn, dfn, None, name)


def _min_dist(a: Field, b: Field):
    fs = [f.singular_distance for f in (a, b) if f.singular_distance is not None]
    if not fs:
        return None
    if len(fs) == 1:
        return fs[0]
    return lambda x: np.minimum(fs[0](x), fs[1](x))


def _both_partials(a: Field, b: Field) -> bool:
    return a.partials_fn is not None and b.partials_fn is not None


def add_fields(a: Field, b: Field, scale_b: float = 1.0) -> Field:
    def fn(x):
        return a.fn(x) + scale_b * b.fn(x)

    dfn = None
    if _both_partials(a, b):
        def dfn(x):
            return a.partials_fn(x) + scale_b * b.partials_fn(x)

    return Field(fn, dfn, _min_dist(a, b), f"({a.name}+{b.name})")


def product_field(a: Field, b: Field) -> Field:
    """Pointwise geometric product, with Leibniz-rule partials."""

    def fn(x):
        return ga.geometric_product(a.fn(x), b.fn(x))

    dfn = None
    if _both_partials(a, b):
        def dfn(x):
            av, bv = a.fn(x), b.fn(x)
            da, db = a.partials_fn(x), b.partials_fn(x)
            return ga.geometric_product(da, bv[..., None, :]) + ga.geometric_product(av[..., None, :], db)

    return Field(fn, dfn, _min_dist(a, b), f"{a.name}*{b.name}")


def reverse_field(a: Field) -> Field:
    dfn = None
    if a.partials_fn is not None:
        def dfn(x):
            return ga.reverse(a.partials_fn(x))

    return Field(lambda x: ga.reverse(a.fn(x)), dfn, a.singular_distance, f"~{a.name}")


def sandwich_field(r: Field, a: Field) -> Field:
    """``R A R̃`` pointwise (unit rotor fields)."""
    out = product_field(product_field(r, a), reverse_field(r))
    return Field(out.fn, out.partials_fn, out.singular_distance, f"{r.name}({a.name})")


# ---------------------------------------------------------------- grids


@dataclass(frozen=True)
class EventGrid:
    origin: tuple
    h: float
    extents: tuple
    budget: int = DEFAULT_POINT_BUDGET

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if len(self.origin) != 4 or len(self.extents) != 4:
            raise ValueError("grid needs 4 origin coordinates and 4 extents")
        if any(int(n) < 1 for n in self.extents):
            raise ValueError("extents must be positive")
        if self.size > self.budget:
            raise ValueError(f"grid has {self.size} points, budget is {self.budget}")

    @classmethod
    def centered(cls, center, h: float, n: int, **kw) -> "EventGrid":
        c = np.asarray(center, dtype=float)
        origin = tuple(float(v) for v in c - h * (n - 1) / 2.0)
        return cls(origin, float(h), (n, n, n, n), **kw)

    @property
    def size(self) -> int:
        return int(np.prod(self.extents))

    def axes(self) -> list[np.ndarray]:
        return [self.origin[mu] + self.h * np.arange(self.extents[mu]) for mu in range(4)]

    def points(self) -> np.ndarray:
        """Event coordinates, shape ``extents + (4,)`` (C order, x^3 fastest)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)


@dataclass
class SampledField:
    grid: EventGrid
    values: np.ndarray
    valid: np.ndarray = field(default=None)

    def __post_init__(self):
        expect = tuple(self.grid.extents) + (ga.N_BLADES,)
        if self.values.shape != expect:
            raise ValueError(f"values shape {self.values.shape} != {expect}")
        if self.valid is None:
            self.valid = np.all(np.isfinite(self.values), axis=-1)


def sample(f: Field, grid: EventGrid, exclusion_radius: Optional[float] = None) -> SampledField:
    """Sample ``f``; events within ``exclusion_radius`` (default ``2h``) of a singularity are flagged."""
    pts = grid.points()
    vals = f.evaluate(pts)
    valid = np.all(np.isfinite(vals), axis=-1)
    if f.singular_distance is not None:
        r = 2.0 * grid.h if exclusion_radius is None else exclusion_radius
        valid &= f.singular_distance(pts) > r
    return SampledField(grid, vals, valid)


# ----------------------------------------------------------- Dirac operator


def apply_dirac(partials: np.ndarray) -> np.ndarray:
    """``g^mu ∂_mu F`` from partials of shape ``(..., 4, 16)``."""
    out = np.zeros(partials.shape[:-2] + (ga.N_BLADES,))
    for mu in range(4):
        out += ga.geometric_product(ga.GAMMA_UP[mu], partials[..., mu, :])
    return out


def dirac_split(partials: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(∂∧F, ∂⌟F)`` built directly from wedge and contraction stencils."""
    w = np.zeros(partials.shape[:-2] + (ga.N_BLADES,))
    c = np.zeros_like(w)
    for mu in range(4):
        w += ga.wedge(ga.GAMMA_UP[mu], partials[..., mu, :])
        c += ga.left_contraction(ga.GAMMA_UP[mu], partials[..., mu, :])
    return w, c


def grid_partials(s: SampledField) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference partials at interior samples.

    Returns ``(partials, valid)`` for the interior block (each axis trimmed by
    one); a sample is valid only if its whole stencil is.
    """
    v, ok, h = s.values, s.valid, s.grid.h
    interior = tuple(slice(1, -1) for _ in range(4))
    parts = []
    valid = ok[interior].copy()
    for mu in range(4):
        plus = [slice(1, -1)] * 4
        minus = [slice(1, -1)] * 4
        plus[mu] = slice(2, None)
        minus[mu] = slice(None, -2)
        parts.append((v[tuple(plus)] - v[tuple(minus)]) / (2.0 * h))
        valid &= ok[tuple(plus)] & ok[tuple(minus)]
    return np.stack(parts, axis=-2), valid


def dirac_operator_flat(f, x=None, h: Optional[float] = None):
    """Flat ``∂F = g^mu ∂_mu F``.

    For a :class:`Field` pass events ``x``; analytic partials are used when the
    field has them, else central differences with step ``h``. For a
    :class:`SampledField` the result covers the interior block and comes with a
    validity mask.
    """
    if isinstance(f, SampledField):
        parts, valid = grid_partials(f)
        return apply_dirac(parts), valid
    step = FD_STEP if h is None else h
    return apply_dirac(f.partials(x, step))


@dataclass
class MaxwellResidual:
    total: np.ndarray
    grade1: np.ndarray
    grade3: np.ndarray
    valid: np.ndarray

    def l2(self) -> float:
        r = self.total[self.valid]
        return float(np.sqrt(np.mean(r**2))) if r.size else float("nan")

    def linf(self) -> float:
        r = self.total[self.valid]
        return float(np.max(r)) if r.size else float("nan")

    @property
    def excluded(self) -> int:
        return int(self.valid.size - np.count_nonzero(self.valid))


def maxwell_residual(F, J, x=None, h: Optional[float] = None,
                     exclusion_radius: Optional[float] = None) -> MaxwellResidual:
    """Pointwise ``|∂F - J|`` plus its grade-1 (``δF = -J``) and grade-3 (``dF = 0``) parts.

    ``F`` is a :class:`Field` (evaluated at ``x``, or sampled on an
    :class:`EventGrid` passed as ``x``) or a :class:`SampledField`.
    """
    if isinstance(x, EventGrid):
        F = sample(F, x, exclusion_radius)
    if isinstance(F, SampledField):
        dF, valid = dirac_operator_flat(F)
        pts = F.grid.points()[tuple(slice(1, -1) for _ in range(4))]
        Jv = J.evaluate(pts)
        valid = valid & np.all(np.isfinite(Jv), axis=-1)
    else:
        pts = np.asarray(x, dtype=float)
        dF = dirac_operator_flat(F, pts, h)
        Jv = J(pts)
        valid = np.ones(pts.shape[:-1], dtype=bool)
    r = dF - Jv
    with np.errstate(invalid="ignore"):
        return MaxwellResidual(
            total=ga.norm(r),
            grade1=ga.norm(ga.grade_project(r, 1)),
            grade3=ga.norm(ga.grade_project(r, 3)),
            valid=valid,
        )


@dataclass
class ConvergenceStudy:
    spacings: tuple
    residual_l2: tuple
    ratios: tuple
    common_events: int

    @property
    def orders(self) -> tuple:
        return tuple(float(np.log2(r)) for r in self.ratios)


def convergence_study(F: Field, J: Field, center, spacings=(0.1, 0.05, 0.025), n: int = 17,
                      exclusion_radius: Optional[float] = None) -> ConvergenceStudy:
    """Residual RMS at successive halvings of ``h`` on ``n``-point grids about ``center``.

    The grid shrinks with ``h``, so norms are taken only over interior events
    shared by every grid (coarse-grid points inside the finest interior);
    otherwise the ratio mixes truncation error with the change of region.
    """
    hs = tuple(float(h) for h in spacings)
    for a, b in zip(hs, hs[1:]):
        if abs(a / b - round(a / b)) > 1e-9:
            raise ValueError("spacings must be successive integer refinements")
    half = (n - 1) // 2
    reach = (half - 1) * hs[-1] + 1e-12
    norms = []
    count = 0
    for h in hs:
        grid = EventGrid.centered(center, h, n)
        res = maxwell_residual(F, J, grid, exclusion_radius=exclusion_radius)
        k = np.arange(1, n - 1) - half
        stride = int(round(hs[0] / h))
        sel = np.where((k % stride == 0) & (np.abs(k * h) <= reach))[0]
        idx = np.ix_(sel, sel, sel, sel)
        sub, ok = res.total[idx], res.valid[idx]
        norms.append(float(np.sqrt(np.mean(sub[ok] ** 2))))
        count = int(np.count_nonzero(ok))
    ratios = tuple(a / b for a, b in zip(norms, norms[1:]))
    return ConvergenceStudy(hs, tuple(norms), ratios, count)


def residual_report(scenario: str, F: Field, J: Field, center, h: float, n: int = 17,
                    exclusion_radius: Optional[float] = None) -> dict:
    """Residual norms on the ``h`` grid plus the observed order from halving ``h`` twice."""
    res = maxwell_residual(F, J, EventGrid.centered(center, h, n), exclusion_radius=exclusion_radius)
    study = convergence_study(F, J, center, (h, h / 2, h / 4), n, exclusion_radius)
    return {
        "scenario": scenario,
        "h": h,
        "residual_l2": res.l2(),
        "residual_linf": res.linf(),
        "excluded_points": res.excluded,
        "convergence_order": study.orders[-1],
    }
