"""Matrix Lie algebras with sparse bases and structure constants.

Three algebras are supported: so(n) with the elementary skew matrices
F(i,j), sl(n) with the matrix units E(i,j) and the diagonal differences
D(i), and the Lorenz algebra so(3,1).  Indices are 0-based internally;
labels use the 1-based mathematical convention.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotInAlgebra

DEFAULT_TOL = 1e-12

LORENZ_J = np.diag([1.0, 1.0, 1.0, -1.0])


class AlgebraKind(str, enum.Enum):
    SO = "so"
    SL = "sl"
    LORENZ = "lorenz"


@dataclass(frozen=True)
class SparseBasisElement:
    """One basis matrix, described by its kind and index pair.

    ``kind`` is one of

    * ``"F"``: e_i e_j^T - e_j e_i^T (i < j), a plane rotation generator;
    * ``"E"``: e_i e_j^T (i != j);
    * ``"D"``: e_i e_i^T - e_{i+1} e_{i+1}^T, with ``j == i + 1``;
    * ``"H"``: e_i e_j^T + e_j e_i^T, a boost generator (Lorenz V4..V6).
    """

    kind: str
    i: int
    j: int
    label: str = ""

    @property
    def entries(self) -> tuple[tuple[int, int, float], ...]:
        i, j = self.i, self.j
        if self.kind == "F":
            return ((i, j, 1.0), (j, i, -1.0))
        if self.kind == "E":
            return ((i, j, 1.0),)
        if self.kind == "D":
            return ((i, i, 1.0), (j, j, -1.0))
        if self.kind == "H":
            return ((i, j, 1.0), (j, i, 1.0))
        raise ValueError(f"unknown element kind {self.kind!r}")

    def dense(self, n: int) -> np.ndarray:
        M = np.zeros((n, n))
        for r, c, v in self.entries:
            M[r, c] = v
        return M

    def bandwidth(self) -> int:
        return abs(self.j - self.i) if self.kind != "D" else 0

    def __str__(self) -> str:
        return self.label or f"{self.kind}({self.i + 1},{self.j + 1})"


def f_elem(i: int, j: int) -> SparseBasisElement:
    return SparseBasisElement("F", i, j, f"F({i + 1},{j + 1})")


def e_elem(i: int, j: int) -> SparseBasisElement:
    return SparseBasisElement("E", i, j, f"E({i + 1},{j + 1})")


def d_elem(i: int) -> SparseBasisElement:
    return SparseBasisElement("D", i, i + 1, f"D({i + 1})")


# Commutators as {basis index: coefficient}; only k < l is stored.
SCEntry = tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """An ordered basis of a matrix Lie algebra.

    The structure constant table is built on first use from ``bracket_rule``,
    which maps an ordered index pair (k, l) to the coordinates of
    [V_k, V_l]; entries are stored only for k < l and mirrored by sign.
    """

    kind: AlgebraKind
    n: int
    elements: tuple[SparseBasisElement, ...]
    ordering: str = "lex"
    _rule: object = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict[tuple[str, int, int], int]:
        return {(e.kind, e.i, e.j): k for k, e in enumerate(self.elements)}

    @cached_property
    def sc_table(self) -> dict[tuple[int, int], SCEntry]:
        return self._rule(self)

    def structure_constants(self, k: int, l: int) -> SCEntry:
        """Coordinates of [V_k, V_l] as ((i, c), ...)."""
        if k == l:
            return ()
        if k < l:
            return self.sc_table.get((k, l), ())
        return tuple((i, -c) for i, c in self.sc_table.get((l, k), ()))

    def nonzero_count(self) -> int:
        """Number of nonzero c^i_{k,l} over all ordered pairs (k, l)."""
        return 2 * sum(len(v) for v in self.sc_table.values())

    @cached_property
    def _ad_arrays(self):
        src = [[] for _ in range(self.d)]
        dst = [[] for _ in range(self.d)]
        coef = [[] for _ in range(self.d)]
        for (k, l), entries in self.sc_table.items():
            for i, c in entries:
                # [V_k, V_l] = c V_i  and  [V_l, V_k] = -c V_i
                src[k].append(l), dst[k].append(i), coef[k].append(c)
                src[l].append(k), dst[l].append(i), coef[l].append(-c)
        return [
            (np.array(s, dtype=np.intp), np.array(t, dtype=np.intp), np.array(c, dtype=float))
            for s, t, c in zip(src, dst, coef)
        ]

    def ad(self, k: int, y: np.ndarray) -> np.ndarray:
        """Coordinates of [V_k, Y] where Y has coordinates ``y`` (last axis)."""
        src, dst, coef = self._ad_arrays[k]
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            return np.bincount(dst, weights=coef * y[src], minlength=self.d)
        out = np.zeros(y.shape)
        for row in range(y.shape[0]):
            out[row] = np.bincount(dst, weights=coef * y[row, src], minlength=self.d)
        return out

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coordinates of [X, Y], looping over the sparser argument."""
        nx, ny = np.flatnonzero(x), np.flatnonzero(y)
        out = np.zeros(self.d)
        if len(nx) <= len(ny):
            for k in nx:
                out += x[k] * self.ad(k, y)
        else:
            for k in ny:
                out -= y[k] * self.ad(k, x)
        return out

    def dense_elements(self) -> np.ndarray:
        return np.stack([e.dense(self.n) for e in self.elements])

    def element(self, beta) -> AlgebraElement:
        return AlgebraElement(self, np.asarray(beta, dtype=float))

    def dump(self) -> str:
        """One line ``k l i c`` per stored structure constant (k < l, 0-based)."""
        lines = []
        for (k, l) in sorted(self.sc_table):
            for i, c in sorted(self.sc_table[(k, l)]):
                lines.append(f"{k} {l} {i} {c}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"BasisSpec({self.kind.value}, n={self.n}, d={self.d}, ordering={self.ordering!r})"


def parse_dump(text: str) -> dict[tuple[int, int], SCEntry]:
    table: dict[tuple[int, int], list] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        k, l, i, c = (int(tok) for tok in line.split())
        table.setdefault((k, l), []).append((i, c))
    return {key: tuple(v) for key, v in table.items()}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    basis: BasisSpec
    beta: np.ndarray

    def __post_init__(self):
        if self.beta.shape != (self.basis.d,):
            raise ValueError(f"expected {self.basis.d} coefficients, got shape {self.beta.shape}")

    def materialize(self) -> np.ndarray:
        return materialize(self)

    def __mul__(self, c: float) -> AlgebraElement:
        return AlgebraElement(self.basis, c * self.beta)

    __rmul__ = __mul__


def materialize(x: AlgebraElement) -> np.ndarray:
    """Dense matrix sum_i beta_i V_i."""
    n = x.basis.n
    M = np.zeros((n, n))
    for b, e in zip(x.beta, x.basis.elements):
        if b != 0.0:
            for r, c, v in e.entries:
                M[r, c] += b * v
    return M


# ---------------------------------------------------------------------------
# so(n)


def _so_pair_bracket(p, q):
    """[F_{i,j}, F_{l,k}] for i<j, l<k as (pair, sign) or None."""
    (i, j), (l, k) = p, q
    if i == l and j != k:
        a, b, s = j, k, -1
    elif i != l and j == k:
        a, b, s = i, l, -1
    elif i != k and j == l:
        a, b, s = i, k, 1
    elif i == k and j != l:
        a, b, s = j, l, 1
    else:
        return None
    if a > b:
        a, b, s = b, a, -s
    return (a, b), s


def _so_rule(basis: BasisSpec):
    idx = {(e.i, e.j): k for k, e in enumerate(basis.elements)}
    n = basis.n
    table = {}
    for a, e in enumerate(basis.elements):
        p = (e.i, e.j)
        for m in range(n):
            for u in (e.i, e.j):
                if m == u:
                    continue
                q = (min(u, m), max(u, m))
                b = idx[q]
                if b <= a:
                    continue
                res = _so_pair_bracket(p, q)
                if res is not None:
                    pair, s = res
                    table[(a, b)] = ((idx[pair], s),)
    return table


@functools.lru_cache(maxsize=None)
def so_basis(n: int, ordering: str = "lex") -> BasisSpec:
    """Basis F(i,j), i < j, of the skew-symmetric n x n matrices.

    ``ordering="lex"`` sorts the pairs lexicographically.  ``"row_reversed"``
    takes the rows i = n-1, ..., 1 in turn and j ascending within a row; it is
    the arrangement under which the banded product of :mod:`liexp.sparse`
    is an ordinary second-kind coordinate product.
    """
    if n < 2:
        raise ValueError("so(n) requires n >= 2")
    if ordering == "lex":
        rows = range(n - 1)
    elif ordering == "row_reversed":
        rows = reversed(range(n - 1))
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    elements = tuple(f_elem(i, j) for i in rows for j in range(i + 1, n))
    return BasisSpec(AlgebraKind.SO, n, elements, ordering, _so_rule)


def so_index(i: int, j: int, n: int, ordering: str = "lex") -> int:
    """Position of F(i,j) (0-based, i < j) in ``so_basis(n, ordering)``."""
    if ordering == "lex":
        return i * n - i * (i + 1) // 2 + (j - i - 1)
    # rows n-2, ..., i+1 precede row i; row r holds n-1-r elements
    before = sum(n - 1 - r for r in range(i + 1, n - 1))
    return before + (j - i - 1)


# ---------------------------------------------------------------------------
# sl(n)


def _sl_rule(basis: BasisSpec):
    n = basis.n
    idx = basis.index
    E = lambda i, j: idx[("E", i, j)]  # noqa: E731
    D = lambda r: idx[("D", r, r + 1)]  # noqa: E731
    table: dict[tuple[int, int], SCEntry] = {}

    def put(a, b, entries):
        entries = tuple((k, c) for k, c in entries if c != 0)
        if not entries or a == b:
            return
        if a > b:
            a, b = b, a
            entries = tuple((k, -c) for k, c in entries)
        table[(a, b)] = entries

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a = E(i, j)
            # [E_ij, E_js] = E_is (s != i)
            for s in range(n):
                if s != j and s != i:
                    put(a, E(j, s), ((E(i, s), 1),))
            # [E_ij, E_ri] = -E_rj (r != j)
            for r in range(n):
                if r != i and r != j:
                    put(a, E(r, i), ((E(r, j), -1),))
            # [E_ij, E_ji] = E_ii - E_jj as a sum of D's
            if i < j:
                put(a, E(j, i), tuple((D(l), 1) for l in range(i, j)))
            # [E_ij, D_r] = (d_jr - d_ir - d_{j,r+1} + d_{i,r+1}) E_ij
            for r in {i - 1, i, j - 1, j}:
                if 0 <= r < n - 1:
                    c = (j == r) - (i == r) - (j == r + 1) + (i == r + 1)
                    put(a, D(r), ((a, c),))
    return table


@functools.lru_cache(maxsize=None)
def sl_basis(n: int) -> BasisSpec:
    """Basis of trace-free matrices: E(i,j), i != j, lexicographic, then D(1..n-1)."""
    if n < 2:
        raise ValueError("sl(n) requires n >= 2")
    elements = tuple(e_elem(i, j) for i in range(n) for j in range(n) if i != j)
    elements += tuple(d_elem(i) for i in range(n - 1))
    return BasisSpec(AlgebraKind.SL, n, elements, "lex", _sl_rule)


def sl_index(i: int, j: int, n: int) -> int:
    """Position of E(i,j) (i != j) in ``sl_basis(n)``; D(k) sits at n(n-1)+k."""
    return i * (n - 1) + j - (1 if j > i else 0)


# ---------------------------------------------------------------------------
# so(3,1)

# [V_k, V_l] for k < l, 1-based, from the Lorenz commutator table.
_LORENZ_TABLE = {
    (1, 2): (3, -1), (1, 3): (2, 1), (1, 4): (5, -1), (1, 5): (4, 1),
    (2, 3): (1, -1), (2, 4): (6, -1), (2, 6): (4, 1),
    (3, 5): (6, -1), (3, 6): (5, 1),
    (4, 5): (1, 1), (4, 6): (2, 1),
    (5, 6): (3, 1),
}


def _lorenz_rule(basis: BasisSpec):
    return {(k - 1, l - 1): ((i - 1, c),) for (k, l), (i, c) in _LORENZ_TABLE.items()}


@functools.lru_cache(maxsize=None)
def lorenz_basis() -> BasisSpec:
    """V1..V3 rotate the planes (1,2), (1,3), (2,3); V4..V6 boost (1,4), (2,4), (3,4)."""
    elements = (
        SparseBasisElement("F", 0, 1, "V1"),
        SparseBasisElement("F", 0, 2, "V2"),
        SparseBasisElement("F", 1, 2, "V3"),
        SparseBasisElement("H", 0, 3, "V4"),
        SparseBasisElement("H", 1, 3, "V5"),
        SparseBasisElement("H", 2, 3, "V6"),
    )
    return BasisSpec(AlgebraKind.LORENZ, 4, elements, "lex", _lorenz_rule)


def make_basis(kind: str | AlgebraKind, n: int | None = None) -> BasisSpec:
    kind = AlgebraKind(kind)
    if kind is AlgebraKind.LORENZ:
        return lorenz_basis()
    if n is None:
        raise ValueError(f"{kind.value}(n) needs n")
    return so_basis(n) if kind is AlgebraKind.SO else sl_basis(n)


# ---------------------------------------------------------------------------
# coordinates


def constraint_residual(B: np.ndarray, kind: AlgebraKind) -> float:
    """Frobenius norm of the defining constraint of the algebra evaluated at B."""
    if kind is AlgebraKind.SO:
        return float(np.linalg.norm(B + B.T))
    if kind is AlgebraKind.SL:
        return abs(float(np.trace(B)))
    return float(np.linalg.norm(B @ LORENZ_J + LORENZ_J @ B.T))


def project(B: np.ndarray, kind: str | AlgebraKind) -> np.ndarray:
    """Nearest (Frobenius) matrix satisfying the algebra constraint."""
    kind = AlgebraKind(kind)
    B = np.asarray(B, dtype=float)
    if kind is AlgebraKind.SO:
        return 0.5 * (B - B.T)
    if kind is AlgebraKind.SL:
        return B - np.trace(B) / B.shape[0] * np.eye(B.shape[0])
    BJ = B @ LORENZ_J
    return 0.5 * (BJ - BJ.T) @ LORENZ_J


def decompose(B: np.ndarray, basis: BasisSpec, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Coordinates of B in ``basis``.

    Raises NotInAlgebra when the constraint residual exceeds ``tol * ||B||_F``.
    """
    B = np.asarray(B, dtype=float)
    n = basis.n
    if B.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {B.shape}")
    norm = float(np.linalg.norm(B))
    res = constraint_residual(B, basis.kind)
    if res > tol * norm:
        raise NotInAlgebra(
            f"constraint residual {res:.3e} exceeds {tol:.1e} * ||B|| for {basis.kind.value}({n})"
        )
    beta = np.zeros(basis.d)
    if basis.kind is AlgebraKind.SL:
        diag = np.diag(B) - np.trace(B) / n
        gamma = np.cumsum(diag)[:-1]
        for k, e in enumerate(basis.elements):
            beta[k] = B[e.i, e.j] if e.kind == "E" else gamma[e.i]
        return AlgebraElement(basis, beta)
    for k, e in enumerate(basis.elements):
        sign = 1.0 if e.kind == "H" else -1.0
        beta[k] = 0.5 * (B[e.i, e.j] + sign * B[e.j, e.i])
    return AlgebraElement(basis, beta)


def levi_split(B: np.ndarray) -> tuple[AlgebraElement, float]:
    """Split B into a trace-free part over sl(n) and the scalar trace(B)/n.

    The parts commute, so exp(tB) = exp(t B_s) * exp(t delta).
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    delta = float(np.trace(B)) / n
    Bs = B - delta * np.eye(n)
    return decompose(Bs, sl_basis(n), tol=np.inf), delta


def commutator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X
