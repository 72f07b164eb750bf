"""Taylor coefficients of the second-kind coordinate functions.

We look for scalar functions alpha_1..alpha_d with alpha_k(0) = 0 such that

    exp(alpha_1(t) V_1) exp(alpha_2(t) V_2) ... exp(alpha_d(t) V_d) = exp(tB)

to order p.  Differentiating the product gives the condition

    sum_i alpha_i'(t) P_i(t) = B,   P_i = exp(alpha_1 ad_1) ... exp(alpha_{i-1} ad_{i-1}) V_i

and the r-th derivative of this identity at t = 0 determines g^{(r+1)} = alpha^{(r+1)}(0)
from the lower ones.  All algebra is carried out on coordinate vectors
through the sparse structure constant table, never on dense matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .algebra import AlgebraElement, AlgebraKind, BasisSpec, decompose, sl_basis, so_basis
from .errors import UnsupportedOrder
from .flops import FlopCounter, ensure

MAX_ORDER = 4


@dataclass(frozen=True, eq=False)
class CoeffSet:
    """g[k, r-1] = g_k^{(r)}(0) for r = 1..order."""

    basis: BasisSpec
    order: int
    g: np.ndarray

    def __post_init__(self):
        if self.g.shape != (self.basis.d, self.order):
            raise ValueError(f"g must be {self.basis.d}x{self.order}, got {self.g.shape}")


@dataclass(frozen=True, eq=False)
class AlphaPolynomials:
    """alpha_k(t) = sum_r coeffs[k, r] t^r, ascending powers, coeffs[:, 0] = 0."""

    basis: BasisSpec | None
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def __call__(self, t: float) -> np.ndarray:
        out = np.zeros(self.coeffs.shape[0])
        for c in self.coeffs.T[::-1]:
            out = out * t + c
        return out


def _check_order(p: int, pmax: int = MAX_ORDER) -> None:
    if not 1 <= p <= pmax:
        raise UnsupportedOrder(f"order {p} is outside 1..{pmax}")


def order_coeffs_generic(x: AlgebraElement, p: int, method: str = "explicit") -> CoeffSet:
    """Order-p coefficients for any implemented basis.

    ``method="explicit"`` evaluates the closed derivative formulas for P_i,
    P_i'' and P_i''' term by term.  ``"recursive"`` expands every factor
    exp(alpha_i ad_i) as a truncated power series and accumulates the
    condition by Horner's rule; it needs no hand-derived formula and scales
    better in d, and serves as a cross-check.
    """
    _check_order(p)
    if method == "explicit":
        g = _explicit(x.basis, x.beta, p)
    elif method == "recursive":
        g = _recursive(x.basis, x.beta, p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CoeffSet(x.basis, p, g)


def _ad_cols(basis: BasisSpec, i: int) -> dict[int, np.ndarray]:
    """{k: coordinates of [V_k, V_i]} over the k that do not commute with V_i."""
    src, dst, coef = basis._ad_arrays[i]
    cols: dict[int, np.ndarray] = {}
    for k, target, c in zip(src, dst, coef):
        v = cols.setdefault(int(k), np.zeros(basis.d))
        v[target] -= c  # [V_k, V_i] = -[V_i, V_k]
    return cols


def _explicit(basis: BasisSpec, beta: np.ndarray, p: int) -> np.ndarray:
    d = basis.d
    G = np.zeros((d, p + 1))  # G[:, r] = g^{(r)}, column 0 unused
    G[:, 1] = beta
    ad, br = basis.ad, basis.bracket

    def head(v, k):
        """v restricted to indices < k (a prefix sum S_k)."""
        w = v.copy()
        w[k:] = 0.0
        return w

    for r in range(1, p):
        G1, G2, G3 = G[:, 1], G[:, 2], G[:, 3] if p > 3 else None
        acc = np.zeros(d)
        for i in range(d):
            cols = _ad_cols(basis, i)  # u_k = ad_k V_i for k != i
            lower = {k: u for k, u in cols.items() if k < i}
            # P_i' = [S1_i, V_i]
            P = [None, -ad(i, head(G1, i))]
            if r >= 2:
                P2 = -ad(i, head(G2, i))
                for k, u in lower.items():
                    if G1[k] != 0.0:
                        P2 += 2.0 * G1[k] * br(head(G1, k), u) + G1[k] ** 2 * ad(k, u)
                P.append(P2)
            if r >= 3:
                P3 = -ad(i, head(G3, i))
                for k, u in lower.items():
                    g1, g2 = G1[k], G2[k]
                    if g1 == 0.0 and g2 == 0.0:
                        continue
                    adk_u = ad(k, u)
                    adk2_u = ad(k, adk_u)
                    S1k, S2k = head(G1, k), head(G2, k)
                    inner = np.zeros(d)
                    inner2 = np.zeros(d)
                    for l in range(k):
                        if G1[l] != 0.0:
                            w = ad(l, u)
                            if w.any():
                                inner += G1[l] * br(head(G1, l), w)
                                inner2 += G1[l] ** 2 * ad(l, w)
                    P3 += (6.0 * g1 * inner + 3.0 * g1 * inner2
                           + 3.0 * g1 ** 2 * br(S1k, adk_u) + g1 ** 3 * adk2_u
                           + 3.0 * g2 * br(S1k, u) + 3.0 * g1 * br(S2k, u)
                           + 3.0 * g2 * g1 * adk_u)
                P.append(P3)
            for k in range(1, r + 1):
                c = comb(r, k) * G[i, r - k + 1]
                if c != 0.0:
                    acc += c * P[k]
        G[:, r + 1] = -acc
    return G[:, 1:].copy()


def _series_mul(a: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Product of a scalar series a (a[0] = 0) with a vector series Y, truncated."""
    out = np.zeros_like(Y)
    m = Y.shape[0]
    for s in range(1, m):
        if a[s] != 0.0:
            out[s:] += a[s] * Y[: m - s]
    return out


def _recursive(basis: BasisSpec, beta: np.ndarray, p: int) -> np.ndarray:
    d = basis.d
    # dalpha[i, r] = coefficient of t^r in alpha_i'(t)
    dalpha = np.zeros((d, p))
    dalpha[:, 0] = beta
    for r in range(1, p):
        alpha = np.zeros((d, p))  # alpha_i truncated to degree p-1
        for s in range(1, p):
            alpha[:, s] = dalpha[:, s - 1] / s
        R = np.zeros((p, d))
        for i in range(d - 1, -1, -1):
            R[:, i] += dalpha[i]
            if i == 0:
                break
            k = i - 1
            a = alpha[k]
            if not a.any() or not R.any():
                continue
            # R <- exp(alpha_k ad_k) R as a truncated series
            term, out = R, R.copy()
            for m in range(1, p):
                term = _series_mul(a, basis.ad(k, term)) / m
                if not term.any():
                    break
                out += term
            R = out
        dalpha[:, r] = -R[r]
    return np.stack([factorial(r) * dalpha[:, r] for r in range(p)], axis=1)


def alphas_from_coeffs(c: CoeffSet) -> AlphaPolynomials:
    coeffs = np.zeros((c.basis.d, c.order + 1))
    for r in range(1, c.order + 1):
        coeffs[:, r] = c.g[:, r - 1] / factorial(r)
    return AlphaPolynomials(c.basis, coeffs)


def skc_alphas(x: AlgebraElement, p: int, method: str = "explicit") -> AlphaPolynomials:
    return alphas_from_coeffs(order_coeffs_generic(x, p, method))


# ---------------------------------------------------------------------------
# closed forms for order 2


def order_coeffs_son_fast(B: np.ndarray, p: int = 2, flops: FlopCounter | None = None) -> CoeffSet:
    """Order <= 2 coefficients on ``so_basis(n)`` straight from the matrix entries.

    With lexicographic ordering the three partial sums of the order-2
    condition merge, by skew symmetry, into g''_{ij} = -(B^2)_{ij}, i < j.
    Only the upper triangle of B^2 is formed, n - 2 products per entry.
    """
    _check_order(p, 2)
    fl = ensure(flops)
    basis = so_basis(B.shape[0])
    beta = decompose(B, basis).beta
    g = np.zeros((basis.d, p))
    g[:, 0] = beta
    n = B.shape[0]
    if p == 2:
        iu = np.triu_indices(n, 1)
        g[:, 1] = -(B @ B)[iu]
        npairs = len(iu[0])
        fl.count(mul=npairs * (n - 2), add=npairs * max(n - 3, 0))
    return CoeffSet(basis, p, g)


def order_coeffs_sln_fast(B: np.ndarray, p: int = 2, flops: FlopCounter | None = None) -> CoeffSet:
    """Order <= 2 coefficients on ``sl_basis(n)``.

    With O the off-diagonal part of B and gamma the diagonal prefix sums,

        g''_{kl} = sum_{i<k} O_ki O_il - sum_{i>k} O_ki O_il + O_kl (B_kk - B_ll),
        g''_k    = -sum_{i<=k<j} O_ij O_ji,

    where B_kk - B_ll = gamma_k + gamma_{l-1} - gamma_{k-1} - gamma_l.  The
    sign of the diagonal term is the one the general order-2 condition
    produces with E(i,j) ordered before D(k).
    """
    _check_order(p, 2)
    fl = ensure(flops)
    n = B.shape[0]
    basis = sl_basis(n)
    beta = decompose(B, basis).beta
    g = np.zeros((basis.d, p))
    g[:, 0] = beta
    if p == 1:
        return CoeffSet(basis, p, g)
    O = B - np.diag(np.diag(B))
    dg = np.diag(B)
    L = np.tril(O, -1)
    U = np.triu(O, 1)
    # row k of L @ O sums i < k, row k of U @ O sums i > k
    G2 = L @ O - U @ O + O * (dg[:, None] - dg[None, :])
    fl.count(mul=n * n * (n - 1), add=n * n * (n - 1))
    off = ~np.eye(n, dtype=bool)
    g[: n * (n - 1), 1] = G2[off]
    W = O * O.T
    s = 0.0
    for k in range(n - 1):
        s += W[k, k + 1:].sum() - W[:k, k].sum()
        g[n * (n - 1) + k, 1] = -s
    fl.count(mul=n * n, add=n * n)
    return CoeffSet(basis, p, g)


def order_coeffs_fast(B: np.ndarray, kind: AlgebraKind | str, p: int = 2,
                      flops: FlopCounter | None = None) -> CoeffSet:
    kind = AlgebraKind(kind)
    if kind is AlgebraKind.SO:
        return order_coeffs_son_fast(B, p, flops)
    if kind is AlgebraKind.SL:
        return order_coeffs_sln_fast(B, p, flops)
    raise ValueError("no closed form for this algebra")
