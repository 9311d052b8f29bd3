"""Frames, brackets, Levi-Civita connection and curvature in frame components.

Index conventions (all arrays are numpy object arrays of ScalarExpr):

* ``E[a, i]``        coordinate component ``a`` of frame vector ``e_i``
* ``c[i, j, k]``     ``[e_i, e_j] = sum_k c[i, j, k] e_k``
* ``gamma[i, j, k]`` ``nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k``
* ``R[i, j, k, l]``  ``R(e_i, e_j) e_k = sum_l R[i, j, k, l] e_l`` with
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``
* operators ``T[k, j]`` = component ``k`` of ``T(e_j)``

The metric is constant and diagonal in the frame, ``g(e_i, e_j) = g_i delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .symexpr import NonMonomialDivision, ScalarExpr

__all__ = [
    "FrameError",
    "DegeneratePlane",
    "Frame",
    "ConnectionTable",
    "CurvatureTable",
    "lie_bracket",
    "frame_decompose",
    "structure_constants",
    "koszul_connection",
    "curvature_tensor",
    "ricci_tensor",
    "ricci_operator",
    "covariant_derivative_operator",
    "covariant_derivative_two_form",
    "sectional_curvature",
    "evaluate",
    "is_zero_array",
]


class FrameError(ValueError):
    pass


class DegeneratePlane(ValueError):
    pass


def zeros(coords: Sequence[str], shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    zero = ScalarExpr(coords)
    for idx in np.ndindex(out.shape):
        out[idx] = zero
    return out


def vec(items) -> np.ndarray:
    items = list(items)
    out = np.empty(len(items), dtype=object)
    out[:] = items
    return out


def is_zero_array(arr) -> bool:
    return all(x == 0 for x in np.asarray(arr, dtype=object).flat)


def evaluate(arr, point: Mapping[str, object]):
    """Evaluate every entry at a rational point; plain numbers pass through."""
    def ev(x):
        return x.eval_at(point) if isinstance(x, ScalarExpr) else Fraction(x)

    if isinstance(arr, np.ndarray):
        out = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            out[idx] = ev(arr[idx])
        return out
    return ev(arr)


def lie_bracket(X: Sequence[ScalarExpr], Y: Sequence[ScalarExpr], coords: Sequence[str]) -> np.ndarray:
    """Coordinate-basis bracket ``[X, Y]^a = X^b d_b Y^a - Y^b d_b X^a``."""
    out = []
    for a in range(len(coords)):
        s = ScalarExpr(coords)
        for b, cb in enumerate(coords):
            s = s + X[b] * Y[a].diff(cb) - Y[b] * X[a].diff(cb)
        out.append(s)
    return vec(out)


def _det_and_adjugate(M: np.ndarray):
    n = M.shape[0]
    memo: dict = {}

    def det(rows: tuple[int, ...], cols: tuple[int, ...]):
        if not rows:
            return 1
        key = (rows, cols)
        if key in memo:
            return memo[key]
        r, rest = rows[0], rows[1:]
        total = 0
        for pos, c in enumerate(cols):
            entry = M[r, c]
            if entry == 0:
                continue
            minor = det(rest, cols[:pos] + cols[pos + 1:])
            term = entry * minor
            total = total + term if pos % 2 == 0 else total - term
        memo[key] = total
        return total

    all_idx = tuple(range(n))
    D = det(all_idx, all_idx)
    adj = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            minor = det(tuple(r for r in all_idx if r != j), tuple(c for c in all_idx if c != i))
            adj[i, j] = minor if (i + j) % 2 == 0 else -minor
    return D, adj


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered frame of vector fields with a constant diagonal metric."""

    coords: tuple[str, ...]
    E: np.ndarray
    metric: tuple[Fraction, ...]

    def __post_init__(self):
        d = len(self.coords)
        if self.E.shape != (d, d):
            raise FrameError(f"frame matrix must be {d}x{d}, got {self.E.shape}")
        if len(self.metric) != d:
            raise FrameError("metric diagonal length does not match dimension")
        if any(m == 0 for m in self.metric):
            raise FrameError("metric diagonal entries must be nonzero")
        object.__setattr__(self, "metric", tuple(Fraction(m) for m in self.metric))
        E = np.empty((d, d), dtype=object)
        for idx in np.ndindex(d, d):
            v = self.E[idx]
            E[idx] = v if isinstance(v, ScalarExpr) else ScalarExpr.const(self.coords, v)
        object.__setattr__(self, "E", E)
        _ = self.inverse

    @classmethod
    def from_vectors(cls, coords: Sequence[str], vectors: Sequence[Sequence[ScalarExpr]], metric: Sequence) -> Frame:
        coords = tuple(coords)
        d = len(coords)
        E = np.empty((d, d), dtype=object)
        for i, v in enumerate(vectors):
            if len(v) != d:
                raise FrameError(f"vector e{i + 1} has {len(v)} components, expected {d}")
            for a in range(d):
                E[a, i] = v[a]
        return cls(coords, E, tuple(metric))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(1 if m > 0 else -1 for m in self.metric)

    def vector(self, i: int) -> np.ndarray:
        return self.E[:, i].copy()

    @cached_property
    def inverse(self) -> np.ndarray:
        """Coordinate-to-frame change of basis; requires a monomial determinant."""
        D, adj = _det_and_adjugate(self.E)
        if not isinstance(D, ScalarExpr):
            D = ScalarExpr.const(self.coords, D)
        if D == 0:
            raise FrameError("frame vectors are linearly dependent")
        if not D.is_monomial():
            raise FrameError(f"frame determinant {D} is not a monomial; inverse is not Laurent")
        inv = D.inverse()
        out = np.empty_like(adj)
        for idx in np.ndindex(adj.shape):
            out[idx] = adj[idx] * inv
        return out

    @cached_property
    def determinant(self) -> ScalarExpr:
        D, _ = _det_and_adjugate(self.E)
        return D if isinstance(D, ScalarExpr) else ScalarExpr.const(self.coords, D)

    def zero(self) -> ScalarExpr:
        return ScalarExpr(self.coords)

    def unit(self, i: int) -> np.ndarray:
        v = zeros(self.coords, self.dim)
        v[i] = ScalarExpr.const(self.coords, 1)
        return v

    def deriv(self, i: int, f) -> ScalarExpr:
        """Directional derivative ``e_i(f)``."""
        if not isinstance(f, ScalarExpr):
            return self.zero()
        s = self.zero()
        for a, ca in enumerate(self.coords):
            if self.E[a, i] != 0:
                s = s + self.E[a, i] * f.diff(ca)
        return s

    def apply(self, X, f) -> ScalarExpr:
        """``X(f)`` for ``X`` given in frame components."""
        s = self.zero()
        for i in range(self.dim):
            if X[i] != 0:
                s = s + X[i] * self.deriv(i, f)
        return s

    def g(self, X, Y):
        return sum((self.metric[i] * X[i] * Y[i] for i in range(self.dim)), self.zero())

    def to_coordinates(self, X) -> np.ndarray:
        return self.E.dot(np.asarray(X, dtype=object))

    def negative_exponent_coords(self) -> set[str]:
        out = set()
        for arr in (self.E, self.inverse):
            for x in arr.flat:
                out |= x.negative_exponent_coords()
        return out


def frame_decompose(v, frame: Frame) -> np.ndarray:
    """Frame components of a coordinate-basis vector field."""
    return frame.inverse.dot(np.asarray(v, dtype=object))


def structure_constants(frame: Frame) -> np.ndarray:
    d = frame.dim
    c = zeros(frame.coords, (d, d, d))
    for i, j in combinations(range(d), 2):
        comps = frame_decompose(lie_bracket(frame.E[:, i], frame.E[:, j], frame.coords), frame)
        c[i, j, :] = comps
        c[j, i, :] = -comps
    return c


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    frame: Frame
    c: np.ndarray
    gamma: np.ndarray

    def matrix(self, i: int) -> np.ndarray:
        """``G_i`` with ``nabla_{e_i} v = e_i(v) + G_i v`` for frame components ``v``."""
        return self.gamma[i].T.copy()

    def nabla(self, X, Y) -> np.ndarray:
        """``nabla_X Y`` for frame-component vector fields."""
        f = self.frame
        out = zeros(f.coords, f.dim)
        for i in range(f.dim):
            if X[i] == 0:
                continue
            dY = vec(f.deriv(i, y) for y in Y)
            out = out + X[i] * (dY + self.matrix(i).dot(np.asarray(Y, dtype=object)))
        return out

    def bracket(self, X, Y) -> np.ndarray:
        """``[X, Y]`` for frame-component vector fields."""
        f = self.frame
        out = zeros(f.coords, f.dim)
        for k in range(f.dim):
            out[k] = f.apply(X, Y[k]) - f.apply(Y, X[k])
        for i in range(f.dim):
            for j in range(f.dim):
                if X[i] != 0 and Y[j] != 0:
                    out = out + (X[i] * Y[j]) * self.c[i, j]
        return out

    def with_perturbation(self, i: int, j: int, k: int, delta: ScalarExpr) -> ConnectionTable:
        gamma = self.gamma.copy()
        gamma[i, j, k] = gamma[i, j, k] + delta
        return ConnectionTable(self.frame, self.c, gamma)


def koszul_connection(frame: Frame, c: np.ndarray | None = None) -> ConnectionTable:
    """Levi-Civita connection of a constant diagonal frame metric.

    With constant ``g_i`` the Koszul formula reduces to
    ``2 g_k gamma[i,j,k] = g_k c[i,j,k] - g_i c[j,k,i] + g_j c[k,i,j]``.
    """
    if c is None:
        c = structure_constants(frame)
    d = frame.dim
    gm = frame.metric
    gamma = zeros(frame.coords, (d, d, d))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                num = gm[k] * c[i, j, k] - gm[i] * c[j, k, i] + gm[j] * c[k, i, j]
                gamma[i, j, k] = num * Fraction(1, 2) / gm[k]
    return ConnectionTable(frame, c, gamma)


@dataclass(frozen=True, eq=False)
class CurvatureTable:
    conn: ConnectionTable
    R: np.ndarray

    @property
    def frame(self) -> Frame:
        return self.conn.frame

    def apply(self, X, Y, Z) -> np.ndarray:
        """``R(X, Y) Z`` for frame-component vectors (tensorial)."""
        return curvature_apply(self.R, X, Y, Z)

    @cached_property
    def lowered(self) -> np.ndarray:
        """``Rm[w, z, x, y] = g(R(e_x, e_y) e_z, e_w)``."""
        d = self.frame.dim
        gm = self.frame.metric
        out = zeros(self.frame.coords, (d, d, d, d))
        for w, z, x, y in np.ndindex(d, d, d, d):
            out[w, z, x, y] = gm[w] * self.R[x, y, z, w]
        return out


def curvature_apply(R, X, Y, Z):
    d = R.shape[0]
    out = None
    for i in range(d):
        if X[i] == 0:
            continue
        for j in range(d):
            if Y[j] == 0:
                continue
            for k in range(d):
                if Z[k] == 0:
                    continue
                term = (X[i] * Y[j] * Z[k]) * R[i, j, k]
                out = term if out is None else out + term
    if out is None:
        out = vec(0 * x for x in R[0, 0, 0])
    return out


def curvature_tensor(conn: ConnectionTable) -> CurvatureTable:
    f = conn.frame
    d = f.dim
    G, c = conn.gamma, conn.c
    R = zeros(f.coords, (d, d, d, d))
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                for l in range(d):
                    s = f.deriv(i, G[j, k, l]) - f.deriv(j, G[i, k, l])
                    for m in range(d):
                        s = s + G[j, k, m] * G[i, m, l] - G[i, k, m] * G[j, m, l] - c[i, j, m] * G[m, k, l]
                    R[i, j, k, l] = s
                    R[j, i, k, l] = -s
    return CurvatureTable(conn, R)


def ricci_tensor(curv: CurvatureTable) -> np.ndarray:
    """``Ric[j, k] = trace(X -> R(X, e_j) e_k)``."""
    d = curv.frame.dim
    Ric = zeros(curv.frame.coords, (d, d))
    for j in range(d):
        for k in range(d):
            Ric[j, k] = sum((curv.R[i, j, k, i] for i in range(d)), curv.frame.zero())
    return Ric


def ricci_operator(curv: CurvatureTable) -> np.ndarray:
    """Ricci operator ``Q`` with ``g(Q X, Y) = Ric(X, Y)``."""
    Ric = ricci_tensor(curv)
    gm = curv.frame.metric
    d = curv.frame.dim
    Q = zeros(curv.frame.coords, (d, d))
    for j in range(d):
        for k in range(d):
            Q[k, j] = Ric[j, k] / gm[k]
    return Q


def covariant_derivative_operator(conn: ConnectionTable, T: np.ndarray, i: int) -> np.ndarray:
    """``(nabla_{e_i} T)`` as a frame matrix: ``e_i(T) + G_i T - T G_i``."""
    f = conn.frame
    G = conn.matrix(i)
    dT = np.empty(T.shape, dtype=object)
    for idx in np.ndindex(T.shape):
        dT[idx] = f.deriv(i, T[idx])
    return dT + G.dot(T) - T.dot(G)


def covariant_derivative_two_form(conn: ConnectionTable, F: np.ndarray, i: int) -> np.ndarray:
    """``(nabla_{e_i} F)(e_j, e_k)`` for a 2-form (or any bilinear form) ``F[j, k]``."""
    f = conn.frame
    d = f.dim
    gam = conn.gamma
    out = zeros(f.coords, (d, d))
    for j in range(d):
        for k in range(d):
            s = f.deriv(i, F[j, k])
            for m in range(d):
                s = s - gam[i, j, m] * F[m, k] - gam[i, k, m] * F[j, m]
            out[j, k] = s
    return out


def sectional_curvature(curv: CurvatureTable, X, Y):
    """``K = Rm(X, Y, X, Y) / (g(X,X) g(Y,Y) - g(X,Y)^2)``.

    Raises DegeneratePlane for a null plane and NonMonomialDivision when the
    denominator cannot be inverted inside the Laurent ring; callers fall back
    to pointwise evaluation in that case.
    """
    f = curv.frame
    num = f.g(curv.apply(X, Y, Y), X)
    den = f.g(X, X) * f.g(Y, Y) - f.g(X, Y) ** 2
    if den == 0:
        raise DegeneratePlane("plane is degenerate (zero Gram determinant)")
    if not den.is_monomial():
        raise NonMonomialDivision(f"sectional curvature denominator {den} is not a monomial")
    return num / den
