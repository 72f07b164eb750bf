"""Products of elementary exponentials.

A Plan lists factors exp(sigma_1(t) V_1) exp(sigma_2(t) V_2) ...; every V is a
sparse basis element whose exponential is known in closed form (a plane
rotation, a shear, a diagonal scaling or a hyperbolic rotation), so each
factor is applied as an update of two rows or two columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import BasisSpec, SparseBasisElement
from .coords import AlphaPolynomials
from .flops import FlopCounter, ensure


@dataclass(frozen=True, eq=False)
class Factor:
    element: SparseBasisElement
    coeffs: np.ndarray  # ascending powers of t
    index: int | None = None

    def __call__(self, t: float, flops: FlopCounter | None = None) -> float:
        c = self.coeffs
        s = 0.0
        for a in c[::-1]:
            s = s * t + a
        ensure(flops).count(mul=len(c) - 1, add=len(c) - 1)
        return float(s)

    @property
    def is_odd(self) -> bool:
        return not np.any(self.coeffs[::2])


@dataclass(frozen=True, eq=False)
class Plan:
    """Ordered factors; the leftmost factor multiplies on the left."""

    n: int
    factors: tuple[Factor, ...]
    symmetric: bool = False
    basis: BasisSpec | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.symmetric:
            keys = [(f.element.kind, f.element.i, f.element.j) for f in self.factors]
            if keys != keys[::-1]:
                raise ValueError("symmetric plan must be palindromic in its elements")
            if not all(f.is_odd for f in self.factors):
                raise ValueError("symmetric plan needs odd polynomials")

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def indices(self) -> list[int | None]:
        return [f.index for f in self.factors]

    def reversed(self) -> Plan:
        return Plan(self.n, self.factors[::-1], self.symmetric, self.basis)


def plan_skc(a: AlphaPolynomials, elements=None) -> Plan:
    """exp(alpha_1 V_1) ... exp(alpha_d V_d) in basis order, zero polynomials dropped."""
    basis = a.basis
    if elements is None:
        elements = basis.elements
    n = basis.n if basis is not None else max(max(e.i, e.j) for e in elements) + 1
    factors = tuple(
        Factor(e, a.coeffs[k].copy(), k)
        for k, e in enumerate(elements)
        if np.any(a.coeffs[k])
    )
    return Plan(n, factors, False, basis)


def elem_exp_apply(element: SparseBasisElement, s: float, M: np.ndarray, side: str = "left",
                   cols=None, flops: FlopCounter | None = None) -> np.ndarray:
    """M <- exp(sV) M (side="left") or M exp(sV) (side="right"), in place.

    ``cols`` restricts the update to the given columns (rows for side="right"),
    which is how callers exploit known zero structure.  M may be a vector
    for side="left".
    """
    if s == 0.0:
        return M
    fl = ensure(flops)
    i, j, kind = element.i, element.j, element.kind
    if M.ndim == 1:
        # a vector: same formulas, one entry per row
        view = M.reshape(-1, 1)
        sel = slice(None)
        m = 1
    else:
        if side == "right":
            view = M.T
        elif side == "left":
            view = M
        else:
            raise ValueError(f"side must be 'left' or 'right', not {side!r}")
        sel = slice(None) if cols is None else cols
        m = view.shape[1] if cols is None else len(cols)
    if side == "right":
        # M exp(sV) = (exp(sV)^T M^T)^T; transpose the generator
        if kind == "F":
            s = -s
        elif kind == "E":
            i, j = j, i
    if kind == "F" or kind == "H":
        if kind == "F":
            c, sn, sg = np.cos(s), np.sin(s), -1.0
        else:
            c, sn, sg = np.cosh(s), np.sinh(s), 1.0
        ri, rj = view[i, sel], view[j, sel]
        view[i, sel], view[j, sel] = c * ri + sn * rj, sg * sn * ri + c * rj
        fl.count(mul=4 * m + 2, add=2 * m)
    elif kind == "E":
        view[i, sel] += s * view[j, sel]
        fl.count(mul=m, add=m)
    elif kind == "D":
        a = np.exp(s)
        view[i, sel] *= a
        view[j, sel] /= a
        fl.count(mul=2 * m + 2)
    else:
        raise ValueError(f"unsupported element kind {kind!r}")
    return M


def evaluate(plan: Plan, t: float, flops: FlopCounter | None = None) -> np.ndarray:
    """Dense product of the plan at time t.

    Factors are applied to the identity from the right end, so only the
    rows and columns already touched take part in each update.
    """
    fl = ensure(flops)
    n = plan.n
    M = np.eye(n)
    touched = np.zeros(n, dtype=bool)
    for f in reversed(plan.factors):
        s = f(t, fl)
        if s == 0.0:
            continue
        e = f.element
        touched[e.i] = touched[e.j] = True
        elem_exp_apply(e, s, M, "left", np.flatnonzero(touched), fl)
    return M


def evaluate_action(plan: Plan, t: float, v: np.ndarray, flops: FlopCounter | None = None) -> np.ndarray:
    """plan(t) @ v without forming the matrix."""
    v = np.array(v, dtype=float)
    if v.shape != (plan.n,):
        raise ValueError(f"vector of length {plan.n} expected, got shape {v.shape}")
    fl = ensure(flops)
    for f in reversed(plan.factors):
        elem_exp_apply(f.element, f(t, fl), v, "left", None, fl)
    return v
