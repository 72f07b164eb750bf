"""Order-2 plans for tridiagonal matrices in O(n), and band truncation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraKind, d_elem, e_elem, f_elem, sl_basis, so_basis
from .compose import Factor, Plan
from .coords import AlphaPolynomials
from .flops import FlopCounter, ensure

# Above this size plans are built without a BasisSpec (d would be ~n^2).
_BASIS_LIMIT = 64


@dataclass(frozen=True, eq=False)
class TridiagSO:
    """B = sum_k beta_k F(k, k+1)."""

    beta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.beta) + 1

    def dense(self) -> np.ndarray:
        return np.diag(self.beta, 1) - np.diag(self.beta, -1)

    @classmethod
    def from_dense(cls, B: np.ndarray) -> TridiagSO:
        return cls(np.diag(B, 1).copy())


@dataclass(frozen=True, eq=False)
class TridiagSL:
    """Trace-free tridiagonal matrix: diagonal gamma, superdiagonal eta, subdiagonal mu."""

    gamma: np.ndarray
    eta: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if abs(g.sum()) > 1e-13 * max(1.0, np.abs(g).sum()):
            raise ValueError(f"diagonal must sum to zero, got {g.sum():.3e}")
        if not (len(self.eta) == len(self.mu) == len(g) - 1):
            raise ValueError("eta and mu need n-1 entries")

    @property
    def n(self) -> int:
        return len(self.gamma)

    def dense(self) -> np.ndarray:
        return np.diag(self.gamma) + np.diag(self.eta, 1) + np.diag(self.mu, -1)

    @classmethod
    def from_dense(cls, B: np.ndarray) -> TridiagSL:
        return cls(np.diag(B).copy(), np.diag(B, 1).copy(), np.diag(B, -1).copy())


def skc2_tridiag_son(x: TridiagSO, flops: FlopCounter | None = None) -> Plan:
    """exp(b_{n-1} t F(n-1,n)) exp(b_{n-2} t F(n-2,n-1)) exp(b_{n-2} b_{n-1} t^2/2 F(n-2,n)) ...

    This is the order-2 second-kind product over ``so_basis(n, "row_reversed")``
    (rows from the bottom up, columns ascending), in which the only nonzero
    quadratic terms sit on F(k, k+2) and equal +b_k b_{k+1}/2.  With the
    lexicographic order the same terms carry the opposite sign.
    """
    fl = ensure(flops)
    n, b = x.n, np.asarray(x.beta, dtype=float)
    basis = so_basis(n, "row_reversed") if n <= _BASIS_LIMIT else None
    idx = _row_reversed_index(n)
    factors = []
    for k in range(n - 2, -1, -1):
        if b[k] != 0.0:
            factors.append(Factor(f_elem(k, k + 1), np.array([0.0, b[k], 0.0]), idx(k, k + 1)))
        if k + 2 < n:
            c = 0.5 * b[k] * b[k + 1]
            fl.count(mul=2)
            if c != 0.0:
                factors.append(Factor(f_elem(k, k + 2), np.array([0.0, 0.0, c]), idx(k, k + 2)))
    return Plan(n, tuple(factors), False, basis)


def _row_reversed_index(n: int):
    def idx(i, j):
        # rows n-2..i+1 hold (n-1-r) elements each: sum_{m=1}^{n-2-i} m
        before = (n - 2 - i) * (n - 1 - i) // 2
        return before + (j - i - 1)
    return idx


def skc2_tridiag_sln(x: TridiagSL, flops: FlopCounter | None = None) -> Plan:
    """Order-2 product over ``sl_basis(n)`` for a tridiagonal trace-free matrix.

    With g the diagonal of B (0-based, D coordinates G_k = g_0 + ... + g_k):

        E(k,k+1): eta_k t + (g_k - g_{k+1}) eta_k t^2/2
        E(k+1,k): mu_k t  + (g_{k+1} - g_k) mu_k t^2/2
        E(k,k+2): -eta_k eta_{k+1} t^2/2
        E(k+2,k): mu_k mu_{k+1} t^2/2
        D(k):     G_k t - eta_k mu_k t^2/2

    Factors stay within bandwidth 2 and the construction is O(n).
    """
    fl = ensure(flops)
    n = x.n
    g = np.asarray(x.gamma, dtype=float)
    eta = np.asarray(x.eta, dtype=float)
    mu = np.asarray(x.mu, dtype=float)
    basis = sl_basis(n) if n <= _BASIS_LIMIT else None

    def sl_idx(i, j):
        return i * (n - 1) + j - (1 if j > i else 0)

    # coefficient (linear, quadratic) of each E(i, j) in the band
    coef: dict[tuple[int, int], tuple[float, float]] = {}
    for k in range(n - 1):
        dd = g[k] - g[k + 1]
        coef[(k, k + 1)] = (eta[k], 0.5 * dd * eta[k])
        coef[(k + 1, k)] = (mu[k], -0.5 * dd * mu[k])
        fl.count(mul=4, add=2)
        if k + 2 < n:
            coef[(k, k + 2)] = (0.0, -0.5 * eta[k] * eta[k + 1])
            coef[(k + 2, k)] = (0.0, 0.5 * mu[k] * mu[k + 1])
            fl.count(mul=4)
    factors = []
    for i in range(n):
        for j in (i - 2, i - 1, i + 1, i + 2):
            c = coef.get((i, j))
            if c is not None and (c[0] != 0.0 or c[1] != 0.0):
                factors.append(Factor(e_elem(i, j), np.array([0.0, c[0], c[1]]), sl_idx(i, j)))
    G = 0.0
    for k in range(n - 1):
        G += g[k]
        q = -0.5 * eta[k] * mu[k]
        fl.count(mul=2, add=1)
        if G != 0.0 or q != 0.0:
            factors.append(Factor(d_elem(k), np.array([0.0, G, q]), n * (n - 1) + k))
    return Plan(n, tuple(factors), False, basis)


def truncate_to_band(a: AlphaPolynomials, r: int) -> AlphaPolynomials:
    """Zero every alpha_k whose basis element lies outside bandwidth r."""
    basis = a.basis
    if basis is None or basis.kind is AlgebraKind.LORENZ:
        raise ValueError("band truncation needs an so(n) or sl(n) basis")
    coeffs = a.coeffs.copy()
    for k, e in enumerate(basis.elements):
        if e.kind != "D" and abs(e.j - e.i) > r:
            coeffs[k] = 0.0
    return AlphaPolynomials(basis, coeffs)


def band_count(basis, r: int) -> int:
    """Number of basis elements within bandwidth r."""
    return sum(1 for e in basis.elements if e.kind == "D" or abs(e.j - e.i) <= r)
