"""Splittings, the leading symmetric BCH term, and the symmetric order-4 plan.

A split is a list of terms C_1..C_s summing to B, each either an
AlgebraElement or a dense matrix.  ``strang`` follows the usual layout with
C_1 outermost.  The Q2 routines list the split innermost first, i.e. they
describe

    e^{tC_s/2} ... e^{tC_2/2} e^{tC_1} e^{tC_2/2} ... e^{tC_s/2},

whose logarithm is tB + (t^3/12) Q2 + O(t^5), so ``strang(split[::-1], t)``
is the product that ``q2_generic(split)`` describes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraKind, BasisSpec, commutator, decompose
from .compose import Factor, Plan, elem_exp_apply, evaluate
from .errors import NotInAlgebra, UnsupportedBasis
from .flops import FlopCounter, ensure
from .oracle import expm_ref

# Triple-jump weights: S(w1 t) S(w0 t) S(w1 t) is order 4 when 2 w1 + w0 = 1
# and 2 w1^3 + w0^3 = 0, whose real solution is w1 = 1/(2 - 2^(1/3)).
W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
W0 = 1.0 - 2.0 * W1


def _dense(term) -> np.ndarray:
    return term.materialize() if isinstance(term, AlgebraElement) else np.asarray(term, dtype=float)


def _single(term):
    """(element, coefficient) when the term is a multiple of one basis element."""
    if not isinstance(term, AlgebraElement):
        return None
    nz = np.flatnonzero(term.beta)
    if len(nz) != 1:
        return None
    k = int(nz[0])
    return term.basis.elements[k], float(term.beta[k])


def _exp_term(term, s: float) -> np.ndarray:
    single = _single(term)
    if single is not None:
        e, c = single
        return elem_exp_apply(e, s * c, np.eye(term.basis.n))
    if isinstance(term, AlgebraElement) and not term.beta.any():
        return np.eye(term.basis.n)
    return expm_ref(s * _dense(term))


def _split_n(split) -> int:
    t0 = split[0]
    return t0.basis.n if isinstance(t0, AlgebraElement) else np.asarray(t0).shape[0]


def strang(split: Sequence, t: float) -> np.ndarray:
    """e^{tC_1/2} ... e^{tC_{s-1}/2} e^{tC_s} e^{tC_{s-1}/2} ... e^{tC_1/2}."""
    if len(split) == 1:
        return _exp_term(split[0], t)
    half = [_exp_term(c, 0.5 * t) for c in split[:-1]]
    M = _exp_term(split[-1], t)
    for H in reversed(half):
        M = H @ M @ H
    return M


def yoshida4(split: Sequence, t: float) -> np.ndarray:
    """Triple jump S(w1 t) S(w0 t) S(w1 t) of the Strang splitting."""
    A = strang(split, W1 * t)
    return A @ strang(split, W0 * t) @ A


def basis_split(x: AlgebraElement) -> list[AlgebraElement]:
    """One term beta_k V_k per nonzero coordinate, in basis order."""
    out = []
    for k in np.flatnonzero(x.beta):
        beta = np.zeros(x.basis.d)
        beta[k] = x.beta[k]
        out.append(AlgebraElement(x.basis, beta))
    return out


def strang_plan(x: AlgebraElement) -> Plan:
    """The Strang splitting over the basis terms as a symmetric Plan (V_d in the middle)."""
    idx = [int(k) for k in np.flatnonzero(x.beta)]
    if not idx:
        return Plan(x.basis.n, (), True, x.basis)
    els = x.basis.elements
    outer = [Factor(els[k], np.array([0.0, 0.5 * x.beta[k]]), k) for k in idx[:-1]]
    c = idx[-1]
    mid = Factor(els[c], np.array([0.0, x.beta[c]]), c)
    return Plan(x.basis.n, tuple(outer + [mid] + outer[::-1]), True, x.basis)


def compose_plans(*plans: Plan) -> Plan:
    return Plan(plans[0].n, tuple(f for p in plans for f in p.factors), False, plans[0].basis)


def scaled_plan(plan: Plan, w: float) -> Plan:
    """sigma_k(t) -> sigma_k(w t)."""
    fs = tuple(
        Factor(f.element, f.coeffs * w ** np.arange(len(f.coeffs)), f.index) for f in plan.factors
    )
    return Plan(plan.n, fs, plan.symmetric, plan.basis)


def yoshida4_plan(x: AlgebraElement) -> Plan:
    s = strang_plan(x)
    return compose_plans(scaled_plan(s, W1), scaled_plan(s, W0), scaled_plan(s, W1))


def q2_generic(split: Sequence) -> np.ndarray:
    """sum_{l>=2} [S_{l-1} + C_l/2, [S_{l-1}, C_l]], S_l = C_1 + ... + C_l.

    The split is listed innermost first; the caller applies t^3/12.
    """
    n = _split_n(split)
    S = np.zeros((n, n))
    Q = np.zeros((n, n))
    for l, term in enumerate(split):
        C = _dense(term)
        if l > 0:
            K = commutator(S, C)
            Q += commutator(S + 0.5 * C, K)
        S += C
    return Q


def q2_son_fast(B: np.ndarray, flops: FlopCounter | None = None, tol: float = 1e-12) -> np.ndarray:
    """Q2 of the lexicographic split b_12 F_12, b_13 F_13, ..., b_{n-1,n} F_{n-1,n}.

    Same value as ``q2_generic`` on that split (F_12 innermost) for O(n^3)
    work, and O(n w^2) work when B has half-bandwidth w.  With S the partial
    sum preceding F_ij, s_m its m-th column and W(u, m) = u e_m^T - e_m u^T,

        [S, [S, F_ij]]   = W(S s_i, j) - W(S s_j, i) + 2 (s_i s_j^T - s_j s_i^T),
        [F_ij, [S, F_ij]] = W(s_i, i) + W(s_j, j),

    and s_i, s_j are truncated columns of B.  The sums over j are then
    regrouped into matrix-vector products, prefix and suffix sums.  Only the
    half G with Q2 = G - G^T is accumulated.
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if np.linalg.norm(B + B.T) > tol * max(np.linalg.norm(B), 1.0):
        raise NotInAlgebra("q2_son_fast needs a skew-symmetric matrix")
    fl = ensure(flops)
    rows_nz = np.nonzero(np.triu(B, 1))
    w = int(np.max(rows_nz[1] - rows_nz[0])) if len(rows_nz[0]) else 0
    G = np.zeros((n, n))
    if w == 0:
        return G
    for i in range(n - 1):
        hi = min(n, i + w + 1)
        J = np.arange(i + 1, hi)
        bJ = B[i, i + 1:hi]
        if not bJ.any():
            continue
        lo = max(0, i - w)
        r0, r1 = max(0, lo - w), min(n, i + w)
        ni, nr, nj = i - lo, r1 - r0, len(J)
        A = B[lo:i, i + 1:hi]  # a_j for j in J, as columns
        ai = B[lo:i, i]
        Tc = B[r0:r1, lo:i]  # columns of the partial sum that reach row i
        if ni:
            h = Tc @ ai
            m = A @ bJ
            G[r0:r1, i] -= Tc @ m
            G[lo:i, lo:i] += 2.0 * np.outer(ai, m)
            fl.matvec(nr, ni)
            fl.matvec(ni, nj)
            fl.matvec(nr, ni)
            fl.count(add=nr)
            fl.count(mul=ni + ni * ni, add=ni * ni)
        b2 = bJ * bJ
        fl.count(mul=nj)
        # prefix sums over j: pi_j = sum_{i<l<j} b_il a_l, nu_j = sum b_il^2
        pi = np.zeros(ni)
        nu = 0.0
        for c, j in enumerate(J):
            b = bJ[c]
            if b != 0.0:
                if ni:
                    G[r0:r1, j] += b * h
                    G[lo:i, j] += 0.5 * b2[c] * A[:, c] - b * pi
                    fl.axpy(nr)
                    fl.count(mul=2 * ni + 1, add=2 * ni)
                G[i, j] -= b * nu
                fl.count(mul=1, add=1)
                if ni:
                    pi += b * A[:, c]
                    fl.axpy(ni)
                nu += b2[c]
                fl.count(add=1)
        # suffix sums over k: M_k = sum_{j>k} b_ij a_j, tau_k = sum_{j>k} b_ij^2
        Msuf = np.zeros(ni)
        tau = 0.0
        for c in range(nj - 1, -1, -1):
            k = J[c]
            b = bJ[c]
            if b != 0.0:
                if ni:
                    G[k, lo:i] -= (2.0 * b) * Msuf
                    fl.count(mul=ni + 1, add=ni)
                G[k, i] -= 0.5 * b * tau
                fl.count(mul=2, add=1)
                if ni:
                    Msuf += b * A[:, c]
                    fl.axpy(ni)
                tau += b2[c]
                fl.count(add=1)
        if ni:
            G[lo:i, i] += (0.5 * nu) * ai
            fl.count(mul=ni + 1, add=ni)
    # Q2 = G - G^T over the band of width 3w that G can occupy
    Q = G - G.T
    band = min(n, 3 * w + 1)
    fl.count(add=n * band)
    return Q


def q2_lex_fast_applicable(basis: BasisSpec) -> bool:
    return basis.kind is AlgebraKind.SO and basis.ordering == "lex"


def symmetric_skc4(x: AlgebraElement, center: str = "last", flops: FlopCounter | None = None,
                   use_fast: bool = True) -> Plan:
    """Time-symmetric order-4 plan exp(a_1 V_1) ... exp(a_d V_d) ... exp(a_1 V_1).

    The Strang seed a_l = beta_l t/2 (a_c = beta_c t for the middle factor)
    is corrected by the cubic terms that cancel the leading BCH error:
    a_l -= q_l t^3/24 and a_c -= q_c t^3/12, with q the coordinates of Q2.
    ``center="last"`` puts V_d in the middle; ``"first"`` puts V_1 there,
    which on the lexicographic so(n) basis lets Q2 come from
    ``q2_son_fast`` in O(n^3).
    """
    basis = x.basis
    if basis.kind not in tuple(AlgebraKind):
        raise UnsupportedBasis(f"no symmetric construction for {basis!r}")
    d = basis.d
    if center == "last":
        order = list(range(d))
    elif center == "first":
        order = list(range(d - 1, -1, -1))
    else:
        raise ValueError(f"center must be 'last' or 'first', not {center!r}")
    # order lists the factors from the outside in; the split is inside out
    inner_first = order[::-1]
    fl = ensure(flops)
    if center == "first" and use_fast and q2_lex_fast_applicable(basis):
        Q = q2_son_fast(x.materialize(), fl)
    else:
        split = [_term(basis, k, x.beta[k]) for k in inner_first if x.beta[k] != 0.0]
        Q = q2_generic(split) if split else np.zeros((basis.n, basis.n))
    q = decompose(Q, basis, tol=1e-9).beta
    c = order[-1]
    els = basis.elements
    outer = [
        Factor(els[k], np.array([0.0, 0.5 * x.beta[k], 0.0, -q[k] / 24.0]), k)
        for k in order[:-1]
        if x.beta[k] != 0.0 or q[k] != 0.0
    ]
    mid = [Factor(els[c], np.array([0.0, x.beta[c], 0.0, -q[c] / 12.0]), c)]
    if not mid[0].coeffs.any():
        mid = []
    return Plan(basis.n, tuple(outer + mid + outer[::-1]), True, basis)


def _term(basis: BasisSpec, k: int, b: float) -> AlgebraElement:
    beta = np.zeros(basis.d)
    beta[k] = b
    return AlgebraElement(basis, beta)


def evaluate_symmetric_skc4(x: AlgebraElement, t: float, center: str = "last") -> np.ndarray:
    return evaluate(symmetric_skc4(x, center), t)
