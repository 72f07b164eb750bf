"""Fourth-order Runge-Kutta-Munthe-Kaas integration of y' = A(t, y) y.

Stages are formed in the Lie algebra and mapped back through an exponential.
The exponential is selectable: the reference ``expm_ref`` or one of the
structure-preserving products, applied to the state vector directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import BasisSpec, commutator, decompose, sl_basis
from .compose import evaluate_action, plan_skc
from .coords import skc_alphas
from .errors import NotInAlgebra, StepRejected
from .oracle import expm_ref
from .splitting import symmetric_skc4

EXP_MODES = ("oracle", "skc4_symmetric", "skc1", "skc2", "skc3", "skc4")

KDV_Y0 = np.array([1.0, 0.0, -1.5])
KDV_T = 5.0
KDV_SPEED = math.sqrt(3.0) / 2.0  # y1(t) = sech^2(KDV_SPEED t) solves the system


@dataclass
class LieOde:
    rhs: Callable[[float, np.ndarray], np.ndarray]
    y0: np.ndarray
    basis: BasisSpec


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time

    def to_csv(self, path) -> None:
        m = self.states.shape[1]
        header = "t," + ",".join(f"y{k + 1}" for k in range(m))
        np.savetxt(path, np.column_stack([self.times, self.states]), delimiter=",",
                   header=header, comments="", fmt="%.16e")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def apply_exp(theta: np.ndarray, y: np.ndarray, basis: BasisSpec, mode: str) -> np.ndarray:
    """exp(theta) y with the chosen exponential."""
    if mode == "oracle":
        return expm_ref(theta) @ y
    x = decompose(theta, basis, tol=1e-10)
    if mode == "skc4_symmetric":
        plan = symmetric_skc4(x)
    elif mode.startswith("skc") and mode[3:].isdigit():
        plan = plan_skc(skc_alphas(x, int(mode[3:])))
    else:
        raise ValueError(f"unknown exponential mode {mode!r}; choose from {EXP_MODES}")
    return evaluate_action(plan, 1.0, y)


def _field(ode: LieOde, t: float, y: np.ndarray) -> np.ndarray:
    A = np.asarray(ode.rhs(t, y), dtype=float)
    try:
        decompose(A, ode.basis, tol=1e-10)
    except NotInAlgebra as exc:
        raise StepRejected(f"right-hand side left the algebra at t={t:g}: {exc}") from exc
    return A


def rkmk4_step(ode: LieOde, t: float, y: np.ndarray, h: float, exp_mode: str = "oracle") -> np.ndarray:
    """One step of the classical RK4 tableau lifted to the algebra.

    dexpinv is truncated to the two commutators needed for order 4:

        F1 = h A(t, y)
        F2 = h A(t + h/2, exp(F1/2) y)
        F3 = h A(t + h/2, exp(F2/2 - [F1, F2]/8) y)
        F4 = h A(t + h, exp(F3) y)
        y+ = exp((F1 + 2 F2 + 2 F3 + F4)/6 - [F1, F4]/12) y
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    ex = lambda th: apply_exp(th, y, ode.basis, exp_mode)  # noqa: E731
    F1 = h * _field(ode, t, y)
    F2 = h * _field(ode, t + 0.5 * h, ex(0.5 * F1))
    F3 = h * _field(ode, t + 0.5 * h, ex(0.5 * F2 - commutator(F1, F2) / 8.0))
    F4 = h * _field(ode, t + h, ex(F3))
    theta = (F1 + 2.0 * F2 + 2.0 * F3 + F4) / 6.0 - commutator(F1, F4) / 12.0
    return ex(theta)


def integrate(ode: LieOde, h: float, T: float, exp_mode: str = "oracle") -> Trajectory:
    """Fixed steps of size h on [0, T]; the last step is shortened to land on T."""
    nsteps = max(1, math.ceil(T / h - 1e-9))
    times = [0.0]
    y = np.array(ode.y0, dtype=float)
    states = [y.copy()]
    t = 0.0
    for k in range(nsteps):
        step = min(h, T - t) if k == nsteps - 1 else h
        y = rkmk4_step(ode, t, y, step, exp_mode)
        t = T if k == nsteps - 1 else t + h
        times.append(t)
        states.append(y.copy())
    return Trajectory(np.array(times), np.array(states))


def kdv_rhs(y: np.ndarray) -> np.ndarray:
    """Travelling-wave reduction of the KdV equation as y' = A(y) y, A in sl(3)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (3,):
        raise ValueError("the KdV system has three components")
    return np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-9.0 * y[1], 3.0, 0.0]])


def kdv_ode(y0=KDV_Y0) -> LieOde:
    return LieOde(lambda t, y: kdv_rhs(y), np.array(y0, dtype=float), sl_basis(3))


def kdv_exact(t) -> np.ndarray:
    """Closed-form first component, sech^2(sqrt(3) t / 2)."""
    return 1.0 / np.cosh(KDV_SPEED * np.asarray(t)) ** 2


def fit_soliton(times: np.ndarray, y1: np.ndarray, power: int = 2) -> tuple[float, float]:
    """Least-squares beta with y1 ~ sech(beta t)^power, and the rms residual.

    Uses arccosh(y1^(-1/power)) = beta |t|, a line through the origin.
    """
    times = np.asarray(times, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    keep = (y1 > 1e-8) & (y1 <= 1.0)
    u = np.arccosh(np.clip(y1[keep], 1e-300, 1.0) ** (-1.0 / power))
    tt = np.abs(times[keep])
    beta = float(tt @ u / (tt @ tt))
    resid = y1 - 1.0 / np.cosh(beta * times) ** power
    return beta, float(np.sqrt(np.mean(resid ** 2)))
