"""Spacetime algebra Cl(1,3) kernel.

Multivectors are stored as 16 float64 coefficients indexed by blade bitmask:
bit ``mu`` set means the factor ``g_mu`` is present, with factors in ascending
index order (``g0`` before ``g1`` ...). Every kernel function accepts arrays of
shape ``(..., 16)`` and broadcasts over the leading axes, which is what the
field code relies on. :class:`Multivector` is a thin immutable wrapper for
interactive use and for the public single-value API.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

SIGNATURE = (1.0, -1.0, -1.0, -1.0)
ETA = np.diag(SIGNATURE)
N_BLADES = 16
PSEUDOSCALAR_BLADE = 0b1111

GRADE = np.array([bin(b).count("1") for b in range(N_BLADES)])
BLADE_NAMES = tuple(
    "1" if b == 0 else "g" + "".join(str(mu) for mu in range(4) if b >> mu & 1)
    for b in range(N_BLADES)
)


class ContractViolation(ValueError):
    """Raised when an operation's precondition is not met."""


def _reorder_sign(a: int, b: int) -> int:
    # number of transpositions needed to sort the concatenation of a and b
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _blade_product(a: int, b: int) -> tuple[float, int]:
    sign = float(_reorder_sign(a, b))
    common = a & b
    for mu in range(4):
        if common >> mu & 1:
            sign *= SIGNATURE[mu]
    return sign, a ^ b


# _SIGNS[i, k] is the sign of blade(i) * blade(i ^ k), which lands on blade k
_SIGNS = np.empty((N_BLADES, N_BLADES))
_PARTNER = np.empty((N_BLADES, N_BLADES), dtype=int)
for _i in range(N_BLADES):
    for _k in range(N_BLADES):
        _PARTNER[_i, _k] = _i ^ _k
        _SIGNS[_i, _k] = _blade_product(_i, _i ^ _k)[0]

_REVERSE_SIGN = np.array([(-1.0) ** (g * (g - 1) // 2) for g in GRADE])
_GRADE_MASKS = [(GRADE == k).astype(float) for k in range(5)]


def _product_with_mask(a: np.ndarray, b: np.ndarray, keep) -> np.ndarray:
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i in range(N_BLADES):
        ai = a[..., i : i + 1]
        if not np.any(ai):
            continue
        term = ai * b[..., _PARTNER[i]] * _SIGNS[i]
        if keep is not None:
            term = term * keep[i]
        out += term
    return out


def _grade_keep(rule) -> np.ndarray:
    keep = np.zeros((N_BLADES, N_BLADES))
    for i in range(N_BLADES):
        for k in range(N_BLADES):
            j = i ^ k
            keep[i, k] = 1.0 if rule(GRADE[i], GRADE[j], GRADE[k]) else 0.0
    return keep


_WEDGE_KEEP = _grade_keep(lambda r, s, g: g == r + s)
_LCONTRACT_KEEP = _grade_keep(lambda r, s, g: s >= r and g == s - r)


MVLike = Union["Multivector", np.ndarray, Sequence[float]]


def _arr(x) -> np.ndarray:
    if isinstance(x, Multivector):
        return x.coeffs
    return np.asarray(x, dtype=float)


def _wrap(out: np.ndarray, *inputs):
    if any(isinstance(x, Multivector) for x in inputs):
        return Multivector(out)
    return out


def geometric_product(a: MVLike, b: MVLike):
    return _wrap(_product_with_mask(_arr(a), _arr(b), None), a, b)


def wedge(a: MVLike, b: MVLike):
    """Outer product: the grade ``r + s`` part of blade products, bilinearly."""
    return _wrap(_product_with_mask(_arr(a), _arr(b), _WEDGE_KEEP), a, b)


def left_contraction(a: MVLike, b: MVLike):
    """Left contraction ``a ⌟ b``: the grade ``s - r`` part of blade products."""
    return _wrap(_product_with_mask(_arr(a), _arr(b), _LCONTRACT_KEEP), a, b)


def reverse(a: MVLike):
    return _wrap(_arr(a) * _REVERSE_SIGN, a)


def grade_project(a: MVLike, k: int):
    if not 0 <= k <= 4:
        raise ContractViolation(f"grade must be in 0..4, got {k}")
    return _wrap(_arr(a) * _GRADE_MASKS[k], a)


def even_part(a: MVLike):
    return _wrap(_arr(a) * (GRADE % 2 == 0), a)


def scalar_product(a: MVLike, b: MVLike):
    """``<reverse(a) b>_0``; this is the ``A·B`` used for ``F·F`` and ``ψ·ψ``."""
    x, y = _arr(a), _arr(b)
    # <~a b>_0 = sum_i ~a_i b_i <e_i e_i>_0
    out = np.sum(x * _REVERSE_SIGN * y * _SIGNS[:, 0], axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def commutator(a: MVLike, b: MVLike):
    """``ab - ba`` (no factor one half)."""
    x, y = _arr(a), _arr(b)
    return _wrap(_product_with_mask(x, y, None) - _product_with_mask(y, x, None), a, b)


TAU = np.zeros(N_BLADES)
TAU[PSEUDOSCALAR_BLADE] = 1.0


def hodge_star(a: MVLike):
    """``⋆B = reverse(B) τ``, which gives ``A ∧ ⋆B = (A·B) τ`` for equal grades."""
    return _wrap(_product_with_mask(_arr(a) * _REVERSE_SIGN, TAU, None), a)


def sandwich(r: MVLike, a: MVLike):
    """``R a R⁻¹`` with ``R⁻¹ = reverse(R)``; callers guarantee unit rotors."""
    rr = _arr(r)
    out = _product_with_mask(_product_with_mask(rr, _arr(a), None), rr * _REVERSE_SIGN, None)
    return _wrap(out, r, a)


def norm(a: MVLike):
    """Euclidean norm of the 16 coefficients."""
    return np.linalg.norm(_arr(a), axis=-1)


def is_grade(a: MVLike, k: int | Sequence[int], tol: float = 1e-12) -> bool:
    ks = {k} if isinstance(k, int) else set(k)
    x = _arr(a)
    off = np.isin(GRADE, list(ks), invert=True)
    scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
    return bool(np.all(np.abs(x[..., off]) <= tol * scale))


def rotor_defect(r: MVLike) -> float:
    """Max deviation of ``R R̃`` from 1."""
    rr = _arr(r)
    prod = _product_with_mask(rr, rr * _REVERSE_SIGN, None)
    prod[..., 0] -= 1.0
    return float(np.max(np.abs(prod)))


def assert_rotor(r: MVLike, tol: float = 1e-10) -> None:
    if not is_grade(r, (0, 2, 4)):
        raise ContractViolation("rotor must be even")
    if rotor_defect(r) > tol:
        raise ContractViolation(f"R R~ deviates from 1 by {rotor_defect(r):.3e}")


def exp_bivector(b: MVLike):
    """Exponential of a bivector.

    Closed form when ``B²`` is a scalar (every boost and rotation used here);
    otherwise a 24-term series with scaling and squaring.
    """
    x = _arr(b)
    if x.shape != (N_BLADES,):
        raise ContractViolation("exp_bivector takes a single multivector")
    if not is_grade(x, 2):
        raise ContractViolation("exp_bivector requires a pure bivector")
    sq = _product_with_mask(x, x, None)
    scale = max(1.0, float(np.abs(sq).max()))
    out = np.zeros(N_BLADES)
    if abs(sq[PSEUDOSCALAR_BLADE]) <= 1e-14 * scale:
        s = sq[0]
        if s > 0:
            r = math.sqrt(s)
            out = x * (math.sinh(r) / r)
            out[0] = math.cosh(r)
        elif s < 0:
            r = math.sqrt(-s)
            out = x * (math.sin(r) / r)
            out[0] = math.cos(r)
        else:
            out = x.copy()
            out[0] = 1.0
    else:
        n_sq = max(0, int(math.ceil(math.log2(max(float(np.abs(x).sum()), 1e-300)))) + 1)
        y = x / 2.0**n_sq
        term = np.zeros(N_BLADES)
        term[0] = 1.0
        out = term.copy()
        for k in range(1, 25):
            term = _product_with_mask(term, y, None) / k
            out = out + term
        for _ in range(n_sq):
            out = _product_with_mask(out, out, None)
    return _wrap(out, b)


# Dirac representation: g0 = diag(I, -I), gk = [[0, s_k], [-s_k, 0]]
_PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
DIRAC_GAMMAS = [np.block([[_I2, _Z2], [_Z2, -_I2]])] + [
    np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI
]


def _blade_matrix(b: int) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    for mu in range(4):
        if b >> mu & 1:
            m = m @ DIRAC_GAMMAS[mu]
    return m


BLADE_MATRICES = np.array([_blade_matrix(b) for b in range(N_BLADES)])


def matrix_rep(a: MVLike) -> np.ndarray:
    """4x4 complex Dirac-matrix image; an independent check on the product."""
    return np.tensordot(_arr(a).astype(complex), BLADE_MATRICES, axes=([-1], [0]))


def basis_vector(mu: int, upper: bool = False) -> np.ndarray:
    """``g_mu`` or, with ``upper``, the reciprocal ``g^mu = eta^{mu mu} g_mu``."""
    v = np.zeros(N_BLADES)
    v[1 << mu] = SIGNATURE[mu] if upper else 1.0
    return v


def vector(components: Sequence[float]) -> np.ndarray:
    """Grade-1 multivector ``sum_mu c^mu g_mu`` from contravariant components."""
    c = np.asarray(components, dtype=float)
    out = np.zeros(c.shape[:-1] + (N_BLADES,))
    for mu in range(4):
        out[..., 1 << mu] = c[..., mu]
    return out


def vector_components(v: MVLike) -> np.ndarray:
    """Contravariant components ``c^mu`` of the grade-1 part."""
    x = _arr(v)
    return np.stack([x[..., 1 << mu] for mu in range(4)], axis=-1)


def blade(*indices: int, coeff: float = 1.0) -> np.ndarray:
    """Product ``g_i g_j ...`` of lower-index generators in the given order."""
    out = np.zeros(N_BLADES)
    out[0] = coeff
    for mu in indices:
        out = _product_with_mask(out, basis_vector(mu), None)
    return out


GAMMA = [basis_vector(mu) for mu in range(4)]
GAMMA_UP = [basis_vector(mu, upper=True) for mu in range(4)]


@dataclass(frozen=True, eq=False)
class Multivector:
    """Immutable Cl(1,3) element; operators map onto the kernel functions.

    ``*`` geometric product, ``^`` wedge, ``<<`` left contraction, ``~`` reverse.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (N_BLADES,):
            raise ContractViolation(f"need 16 coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def scalar(cls, s: float) -> "Multivector":
        c = np.zeros(N_BLADES)
        c[0] = s
        return cls(c)

    @classmethod
    def from_blade(cls, *indices: int, coeff: float = 1.0) -> "Multivector":
        return cls(blade(*indices, coeff=coeff))

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, (int, float)):
            return Multivector.scalar(other).coeffs
        return _arr(other)

    def __add__(self, other):
        return Multivector(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Multivector(self.coeffs - self._coerce(other))

    def __rsub__(self, other):
        return Multivector(self._coerce(other) - self.coeffs)

    def __neg__(self):
        return Multivector(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.coeffs * other)
        return Multivector(_product_with_mask(self.coeffs, _arr(other), None))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.coeffs * other)
        return Multivector(_product_with_mask(_arr(other), self.coeffs, None))

    def __truediv__(self, s: float):
        return Multivector(self.coeffs / s)

    def __xor__(self, other):
        return wedge(self, Multivector(self._coerce(other)))

    def __lshift__(self, other):
        return left_contraction(self, Multivector(self._coerce(other)))

    def __invert__(self):
        return reverse(self)

    def __getitem__(self, blade_index: int) -> float:
        return float(self.coeffs[blade_index])

    def grade(self, k: int) -> "Multivector":
        return grade_project(self, k)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, self._coerce(other), rtol=0.0, atol=atol))

    def to_json(self) -> str:
        return json.dumps([float(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "Multivector":
        data = json.loads(text)
        if not isinstance(data, list) or len(data) != N_BLADES:
            raise ContractViolation("multivector JSON must be an array of 16 numbers")
        return cls(np.array(data, dtype=float))

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g}{'' if b == 0 else '*' + BLADE_NAMES[b]}"
            for b, c in enumerate(self.coeffs)
            if c != 0.0
        ]
        return "Multivector(" + (" ".join(terms) if terms else "0") + ")"
