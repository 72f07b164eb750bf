"""Reference exponential and logarithm, error metric, convergence fits.

Nothing here is structure preserving; it only serves to measure the
approximants built elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotNearIdentity

EPS = np.finfo(float).eps

# Degree 13 Pade coefficients and the 1-norm bound below which the unscaled
# approximant is accurate to unit roundoff (Higham, 2005).
_PADE13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def expm_ref(A: np.ndarray) -> np.ndarray:
    """exp(A) by scaling and squaring with a [13/13] Pade approximant."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    ident = np.eye(n)
    norm1 = np.linalg.norm(A, 1)
    if norm1 == 0.0:
        return ident
    s = max(0, int(np.ceil(np.log2(norm1 / _THETA13))))
    A = A / 2.0**s
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X


def _sqrtm_db(U: np.ndarray, tol: float = 1e-15, maxit: int = 60) -> np.ndarray:
    """Principal square root by the product form of the Denman-Beavers iteration."""
    n = U.shape[0]
    M = U.copy()
    Y = U.copy()
    ident = np.eye(n)
    for _ in range(maxit):
        Minv = np.linalg.inv(M)
        Y = 0.5 * Y @ (ident + Minv)
        M = 0.5 * (ident + 0.5 * (M + Minv))
        if np.linalg.norm(M - ident, 1) <= tol:
            break
    return Y


def logm_ref(U: np.ndarray, nterms: int = 18) -> np.ndarray:
    """Principal logarithm of a matrix near the identity.

    Square roots are taken until ||U - I||_1 < 0.05, then the Gregory series
    log(X) = 2 atanh((X - I)(X + I)^{-1}) is summed and scaled back.
    """
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    ident = np.eye(n)
    dist = np.linalg.norm(U - ident, 2)
    if not dist < 1.0:
        raise NotNearIdentity(f"||U - I||_2 = {dist:.3g} is not below 1")
    k = 0
    X = U
    while np.linalg.norm(X - ident, 1) > 0.05:
        X = _sqrtm_db(X)
        k += 1
    Z = np.linalg.solve((X + ident).T, (X - ident).T).T
    Z2 = Z @ Z
    # atanh(Z) = Z + Z^3/3 + Z^5/5 + ...; |Z| <~ 0.025 so 18 terms is ample
    S = np.zeros_like(Z)
    P = Z.copy()
    for m in range(nterms):
        S += P / (2 * m + 1)
        P = P @ Z2
    return 2.0**(k + 1) * S


def error_frob(B: np.ndarray, t: float, F: np.ndarray) -> float:
    """||exp(-tB) F - I||_F."""
    n = F.shape[0]
    return float(np.linalg.norm(expm_ref(-t * np.asarray(B)) @ F - np.eye(n)))


def group_defect(F: np.ndarray, kind: str) -> float:
    """Distance of F from the group whose algebra is ``kind``."""
    kind = getattr(kind, "value", kind)
    n = F.shape[0]
    if kind == "so":
        return float(np.linalg.norm(F.T @ F - np.eye(n)))
    if kind == "sl":
        return abs(float(np.linalg.det(F)) - 1.0)
    J = np.diag([1.0, 1.0, 1.0, -1.0])
    return float(np.linalg.norm(F @ J @ F.T - J))


def fit_slope(ts: Sequence[float], errs: Sequence[float], floor: float = 1e2 * EPS) -> float:
    """Least-squares slope of log2(err) against log2(t).

    Points with error below ``floor`` are treated as noise and dropped; nan is
    returned when fewer than two remain.
    """
    ts = np.asarray(ts, dtype=float)
    errs = np.asarray(errs, dtype=float)
    keep = errs >= floor
    if keep.sum() < 2:
        return float("nan")
    x, y = np.log2(ts[keep]), np.log2(errs[keep])
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ErrorReport:
    ts: np.ndarray
    errors: np.ndarray
    slope: float

    @property
    def exact(self) -> bool:
        """True when every error sits at the roundoff floor, so no slope exists."""
        return bool(np.isnan(self.slope))


def convergence_study(method: Callable[[np.ndarray, float], np.ndarray],
                      B: np.ndarray, ts: Sequence[float]) -> ErrorReport:
    """Errors of ``method(B, t)`` against expm_ref over the grid, with fitted slope."""
    ts = np.asarray(ts, dtype=float)
    if ts.size < 3:
        raise ValueError("convergence study needs at least 3 grid points")
    errs = np.array([error_frob(B, t, method(B, t)) for t in ts])
    # an exact method can hit zero; keep errors strictly positive
    errs = np.maximum(errs, np.finfo(float).tiny)
    return ErrorReport(ts, errs, fit_slope(ts, errs))


def t_grid(kmin: int = 1, kmax: int = 5) -> np.ndarray:
    return 2.0 ** -np.arange(kmin, kmax + 1)
