"""Lie-group-preserving approximations of exp(tB) by products of elementary exponentials."""

from .algebra import (
    AlgebraElement,
    AlgebraKind,
    BasisSpec,
    SparseBasisElement,
    decompose,
    levi_split,
    lorenz_basis,
    materialize,
    sl_basis,
    so_basis,
)
from .compose import Factor, Plan, elem_exp_apply, evaluate, evaluate_action, plan_skc
from .coords import (
    AlphaPolynomials,
    CoeffSet,
    alphas_from_coeffs,
    order_coeffs_generic,
    order_coeffs_sln_fast,
    order_coeffs_son_fast,
    skc_alphas,
)
from .errors import LieExpError, NotInAlgebra, NotNearIdentity, StepRejected, UnsupportedBasis, UnsupportedOrder
from .flops import FlopCounter
from .integrator import LieOde, Trajectory, integrate, kdv_rhs, rkmk4_step
from .oracle import ErrorReport, convergence_study, error_frob, expm_ref, logm_ref
from .sparse import TridiagSL, TridiagSO, skc2_tridiag_sln, skc2_tridiag_son, truncate_to_band
from .splitting import q2_generic, q2_son_fast, strang, symmetric_skc4, yoshida4

__version__ = "0.1.0"
