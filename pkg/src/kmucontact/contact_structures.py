"""Almost contact pseudo-metric structures on a frame and their identity suite."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .frame_geometry import (
    ConnectionTable,
    CurvatureTable,
    Frame,
    covariant_derivative_operator,
    covariant_derivative_two_form,
    curvature_apply,
    evaluate,
    ricci_operator,
    vec,
    zeros,
)
from .symexpr import ScalarExpr
from .verdicts import StructureReport, boolean_verdict, verdict_from_residuals

__all__ = [
    "AlmostContactStructure",
    "FieldBundle",
    "Identity",
    "check_almost_contact_axioms",
    "exterior_derivative_eta",
    "fundamental_two_form",
    "compute_h",
    "compute_ell",
    "build_bundle",
    "check_contact_condition",
    "check_standard_identities",
    "sasakian_residual",
    "is_sasakian",
    "STANDARD_IDENTITIES",
    "run_identity",
]


@dataclass(frozen=True, eq=False)
class AlmostContactStructure:
    """``(phi, xi, eta, g)`` with ``phi`` in frame components and ``xi = e_{xi}``."""

    frame: Frame
    phi: np.ndarray
    xi: int
    eps: int

    def __post_init__(self):
        d = self.frame.dim
        if d % 2 != 1:
            raise ValueError(f"dimension must be odd, got {d}")
        if self.eps not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        if not 0 <= self.xi < d:
            raise ValueError(f"xi index {self.xi} out of range")
        phi = np.empty((d, d), dtype=object)
        for idx in np.ndindex(d, d):
            v = self.phi[idx]
            phi[idx] = v if isinstance(v, ScalarExpr) else ScalarExpr.const(self.frame.coords, v)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return (self.frame.dim - 1) // 2

    @property
    def xi_vector(self) -> np.ndarray:
        return self.frame.unit(self.xi)

    @property
    def eta(self) -> np.ndarray:
        """``eta(e_j) = eps g(xi, e_j)``."""
        f = self.frame
        out = zeros(f.coords, f.dim)
        out[self.xi] = ScalarExpr.const(f.coords, self.eps * f.metric[self.xi])
        return out

    def with_phi(self, phi: np.ndarray) -> AlmostContactStructure:
        return replace(self, phi=phi)


def fundamental_two_form(s: AlmostContactStructure) -> np.ndarray:
    """``Phi[j, k] = g(e_j, phi e_k)``."""
    gm = s.frame.metric
    d = s.frame.dim
    out = zeros(s.frame.coords, (d, d))
    for j, k in np.ndindex(d, d):
        out[j, k] = gm[j] * s.phi[j, k]
    return out


def exterior_derivative_eta(s: AlmostContactStructure, conn: ConnectionTable) -> np.ndarray:
    """``d eta(X, Y) = (X eta(Y) - Y eta(X) - eta([X, Y])) / 2`` on frame pairs."""
    f = s.frame
    d = f.dim
    eta = s.eta
    out = zeros(f.coords, (d, d))
    for i, j in np.ndindex(d, d):
        bracket_term = sum((conn.c[i, j, m] * eta[m] for m in range(d)), f.zero())
        out[i, j] = (f.deriv(i, eta[j]) - f.deriv(j, eta[i]) - bracket_term) * Fraction(1, 2)
    return out


def compute_h(s: AlmostContactStructure, conn: ConnectionTable) -> np.ndarray:
    """``h = (1/2) L_xi phi`` with ``(L_xi phi)X = [xi, phi X] - phi [xi, X]``."""
    f = s.frame
    d = f.dim
    x = s.xi
    c = conn.c
    h = zeros(f.coords, (d, d))
    for j in range(d):
        col = vec(f.deriv(x, s.phi[k, j]) for k in range(d))
        for k in range(d):
            if s.phi[k, j] != 0:
                col = col + s.phi[k, j] * c[x, k]
        col = col - s.phi.dot(c[x, j])
        h[:, j] = col * Fraction(1, 2)
    return h


def compute_ell(s: AlmostContactStructure, curv: CurvatureTable) -> np.ndarray:
    """Jacobi operator ``l X = R(X, xi) xi``."""
    d = s.frame.dim
    x = s.xi
    ell = zeros(s.frame.coords, (d, d))
    for j in range(d):
        ell[:, j] = curv.R[j, x, x]
    return ell


@dataclass(frozen=True, eq=False)
class FieldBundle:
    """All frame tables an identity needs, symbolic or evaluated at a point.

    Identity formulas only use ring operations on the entries, so the same
    code runs on ScalarExpr tables and on rational tables from :meth:`at`.
    """

    dim: int
    n: int
    eps: int
    xi: int
    metric: tuple[Fraction, ...]
    phi: np.ndarray
    h: np.ndarray
    ell: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    nabla_xi: np.ndarray
    nabla_phi: np.ndarray
    nabla_h: np.ndarray
    nabla_phih: np.ndarray
    nabla_Phi: np.ndarray
    gamma: np.ndarray
    kappa: object = None
    mu: object = None
    lam: object = None

    # -- algebra on frame-component vectors ---------------------------------
    def e(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=object)
        v[i] = 1
        return v

    @property
    def xi_vec(self) -> np.ndarray:
        return self.e(self.xi)

    def g(self, X, Y):
        return sum((self.metric[i] * X[i] * Y[i] for i in range(self.dim) if X[i] != 0 and Y[i] != 0), 0)

    def eta(self, X):
        return self.eps * self.metric[self.xi] * X[self.xi]

    def op(self, T, X):
        # identity arguments are mostly frame vectors, so skip zero components
        out = None
        for j in range(self.dim):
            if X[j] != 0:
                col = T[:, j] if X[j] == 1 else X[j] * T[:, j]
                out = col if out is None else out + col
        return 0 * X if out is None else out

    def curv(self, X, Y, Z):
        return curvature_apply(self.R, X, Y, Z)

    def nabla(self, table, X):
        """Contract the direction slot of a stacked covariant-derivative table."""
        out = 0
        for i in range(self.dim):
            if X[i] != 0:
                out = out + X[i] * table[i]
        return out

    def identity(self) -> np.ndarray:
        return np.identity(self.dim, dtype=int).astype(object)

    def trace(self, T):
        return sum((T[i, i] for i in range(self.dim)), 0)

    def with_nullity(self, kappa, mu, lam=None) -> FieldBundle:
        return replace(self, kappa=kappa, mu=mu, lam=lam)

    def with_R(self, R) -> FieldBundle:
        return replace(self, R=R)

    def at(self, point: Mapping[str, object]) -> FieldBundle:
        def ev(x):
            return None if x is None else evaluate(x, point)

        return replace(
            self,
            phi=ev(self.phi), h=ev(self.h), ell=ev(self.ell), Q=ev(self.Q), R=ev(self.R),
            nabla_xi=ev(self.nabla_xi), nabla_phi=ev(self.nabla_phi), nabla_h=ev(self.nabla_h),
            nabla_phih=ev(self.nabla_phih), nabla_Phi=ev(self.nabla_Phi), gamma=ev(self.gamma),
            kappa=ev(self.kappa), mu=ev(self.mu), lam=ev(self.lam),
        )


def build_bundle(s: AlmostContactStructure, conn: ConnectionTable, curv: CurvatureTable,
                 h: np.ndarray | None = None, ell: np.ndarray | None = None) -> FieldBundle:
    f = s.frame
    d = f.dim
    h = compute_h(s, conn) if h is None else h
    ell = compute_ell(s, curv) if ell is None else ell
    Phi = fundamental_two_form(s)
    phih = s.phi.dot(h)
    nabla_xi = zeros(f.coords, (d, d))
    for i in range(d):
        nabla_xi[i] = conn.gamma[i, s.xi]
    stack = lambda T: np.array([covariant_derivative_operator(conn, T, i) for i in range(d)], dtype=object)
    return FieldBundle(
        dim=d, n=s.n, eps=s.eps, xi=s.xi, metric=f.metric,
        phi=s.phi, h=h, ell=ell, Q=ricci_operator(curv), R=curv.R,
        nabla_xi=nabla_xi,
        nabla_phi=stack(s.phi),
        nabla_h=stack(h),
        nabla_phih=stack(phih),
        nabla_Phi=np.array([covariant_derivative_two_form(conn, Phi, i) for i in range(d)], dtype=object),
        gamma=conn.gamma,
    )


@dataclass(frozen=True)
class Identity:
    """An identity ``lhs - rhs`` evaluated on every tuple of frame vectors."""

    tag: str
    arity: int
    residual: Callable[..., object]


def _label(idx: Sequence[int]) -> str:
    return "(" + ",".join(f"e{i + 1}" for i in idx) + ")" if idx else ""


def identity_residuals(F: FieldBundle, ident: Identity, tuples=None):
    if tuples is None:
        tuples = product(range(F.dim), repeat=ident.arity)
    for idx in tuples:
        yield _label(idx), ident.residual(F, *[F.e(i) for i in idx])


def run_identity(F: FieldBundle, ident: Identity, *, informational: bool = False, note: str | None = None,
                 tuples=None):
    return verdict_from_residuals(ident.tag, identity_residuals(F, ident, tuples),
                                  informational=informational, note=note)


# -- almost contact axioms ---------------------------------------------------

def check_almost_contact_axioms(s: AlmostContactStructure, points: Sequence[Mapping] = ()) -> StructureReport:
    f = s.frame
    d = f.dim
    phi, eta, xi = s.phi, s.eta, s.xi_vector
    report = StructureReport()
    eye = np.identity(d, dtype=int).astype(object)
    eta_xi = eta.dot(xi)
    eta_x_xi = np.outer(xi, eta)
    report.add(verdict_from_residuals("001", [
        ("eta(xi)-1", eta_xi - 1),
        ("phi^2+I-eta(x)xi", phi.dot(phi) + eye - eta_x_xi),
    ]))

    def ax002():
        for i, j in np.ndindex(d, d):
            ei, ej = f.unit(i), f.unit(j)
            lhs = f.g(phi.dot(ei), phi.dot(ej))
            rhs = f.g(ei, ej) - s.eps * eta.dot(ei) * eta.dot(ej)
            yield _label((i, j)), lhs - rhs

    report.add(verdict_from_residuals("002", ax002()))
    report.add(verdict_from_residuals("phi-xi", [("phi xi", phi.dot(xi))]))
    report.add(verdict_from_residuals("eta-phi", [("eta o phi", eta.dot(phi))]))
    report.add(verdict_from_residuals("xi-causal", [
        ("g(xi,xi)-eps", f.g(xi, xi) - s.eps),
        ("eta-eps g(xi,.)", eta - vec(s.eps * f.g(xi, f.unit(j)) for j in range(d))),
    ]))

    def skew():
        for i, j in np.ndindex(d, d):
            ei, ej = f.unit(i), f.unit(j)
            yield _label((i, j)), f.g(phi.dot(ei), ej) + f.g(ei, phi.dot(ej))

    report.add(verdict_from_residuals("phi-skew", skew()))
    ranks = []
    for p in points:
        num = evaluate(phi, p).astype(float)
        ranks.append(int(np.linalg.matrix_rank(num)))
    holds = all(r == 2 * s.n for r in ranks)
    report.add(boolean_verdict("phi-rank", holds, witness=f"ranks at sample points {ranks}",
                               value=",".join(map(str, sorted(set(ranks)))) or None,
                               note=None if ranks else "no sample points"))
    return report


def check_contact_condition(s: AlmostContactStructure, conn: ConnectionTable) -> StructureReport:
    report = StructureReport()
    deta = exterior_derivative_eta(s, conn)
    report.add(verdict_from_residuals("contact", [("d eta - Phi", deta - fundamental_two_form(s))]))
    return report


# -- standard contact identities --------------------------------------------

def _id050(F, X, Y):
    return vec([F.g(F.op(F.h, X), Y) - F.g(X, F.op(F.h, Y)),
                F.g(F.op(F.ell, X), Y) - F.g(X, F.op(F.ell, Y))])


def _id051(F):
    return vec([F.trace(F.h), F.trace(F.h.dot(F.phi))])


def _id055(F, X):
    return vec([F.eta(F.op(F.h, X)), *F.op(F.ell, F.xi_vec)])


def _id013(F):
    return F.h.dot(F.phi) + F.phi.dot(F.h)


def _id052(F):
    return F.op(F.h, F.xi_vec)


def _id033(F, X):
    return F.nabla(F.nabla_xi, X) + F.eps * F.op(F.phi, X) + F.op(F.phi, F.op(F.h, X))


def _id031(F, X, Y):
    eps = F.eps
    A = eps * X + F.op(F.h, X)
    rhs = eps * F.g(A, Y) * F.xi_vec - F.eta(Y) * A
    return F.op(F.nabla(F.nabla_phi, X), Y) - rhs


def _id072(F):
    return F.nabla(F.nabla_phi, F.xi_vec)


def _id073(F):
    phi, ell, h = F.phi, F.ell, F.h
    return F.nabla(F.nabla_h, F.xi_vec) - (phi - phi.dot(ell) - phi.dot(h).dot(h))


def _id027(F):
    phi, ell, h = F.phi, F.ell, F.h
    return phi.dot(ell).dot(phi) - ell - 2 * (phi.dot(phi) + h.dot(h))


def _id035(F):
    xi = F.xi_vec
    return F.g(F.op(F.Q, xi), xi) - (2 * F.n - F.trace(F.h.dot(F.h)))


def _id032(F, X, Y, Z):
    lhs = F.g(F.curv(Y, Z, X), F.xi_vec)
    nPhi = F.nabla(F.nabla_Phi, X)
    rhs = (F.eps * Y.dot(nPhi).dot(Z)
           + F.g(F.op(F.nabla(F.nabla_phih, Y), Z), X)
           - F.g(F.op(F.nabla(F.nabla_phih, Z), Y), X))
    return lhs - rhs


STANDARD_IDENTITIES = (
    Identity("050", 2, _id050),
    Identity("051", 0, _id051),
    Identity("055", 1, _id055),
    Identity("013", 0, _id013),
    Identity("052", 0, _id052),
    Identity("033", 1, _id033),
    Identity("031", 2, _id031),
    Identity("072", 0, _id072),
    Identity("073", 0, _id073),
    Identity("027", 0, _id027),
    Identity("035", 0, _id035),
    Identity("032", 3, _id032),
)


def check_standard_identities(F: FieldBundle) -> StructureReport:
    report = StructureReport()
    for ident in STANDARD_IDENTITIES:
        report.add(run_identity(F, ident))
    return report


# -- Sasakian test -------------------------------------------------------------

def _sasaki(F, X, Y):
    return F.curv(X, Y, F.xi_vec) - (F.eta(Y) * X - F.eta(X) * Y)


SASAKIAN_IDENTITY = Identity("sasakicurvature", 2, _sasaki)


def sasakian_residual(F: FieldBundle):
    return run_identity(F, SASAKIAN_IDENTITY)


def is_sasakian(F: FieldBundle) -> bool:
    """Curvature characterization ``R(X,Y)xi = eta(Y)X - eta(X)Y`` on all frame pairs."""
    return bool(sasakian_residual(F).holds)
