"""Identity catalog: every verdict tag the engine can emit.

Numeric tags are the conventional equation labels of the identities;
descriptive tags cover conventions and consistency checks that have no label.
``gated`` entries are stated for constant kappa and mu, so on fixtures where
either is a non-constant function they are evaluated but reported as
informational.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CatalogEntry:
    tag: str
    section: str
    statement: str
    gated: bool = False


SECTIONS = (
    ("frame", "Frame, connection and curvature"),
    ("axioms", "Almost contact pseudo-metric axioms"),
    ("contact", "Contact condition"),
    ("standard", "Contact pseudo-metric identities"),
    ("sasakian", "Sasakian test"),
    ("nullity", "(kappa, mu)-nullity"),
    ("kmu", "(kappa, mu) identities"),
    ("components", "Curvature components and sectional curvatures"),
    ("model", "Constant phi-sectional curvature model"),
    ("deformation", "D-homothetic deformation"),
    ("numeric", "Pointwise cross-check"),
)

_ENTRIES = [
    CatalogEntry("frame-inverse", "frame", "frame matrix has a monomial determinant (Laurent inverse)"),
    CatalogEntry("torsion", "frame", "nabla_X Y - nabla_Y X - [X,Y] = 0"),
    CatalogEntry("metric-compat", "frame", "g(nabla_Z X, Y) + g(X, nabla_Z Y) = Z g(X,Y)"),
    CatalogEntry("curv-antisym", "frame", "R(X,Y) = -R(Y,X)"),
    CatalogEntry("curv-skew", "frame", "Rm(W,Z,X,Y) = -Rm(Z,W,X,Y)"),
    CatalogEntry("curv-pair", "frame", "Rm(W,Z,X,Y) = Rm(X,Y,W,Z)"),
    CatalogEntry("bianchi", "frame", "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0"),
    CatalogEntry("ricci-sym", "frame", "g(QX,Y) = g(X,QY)"),
    CatalogEntry("001", "axioms", "eta(xi) = 1, phi^2 = -I + eta (x) xi"),
    CatalogEntry("002", "axioms", "g(phi X, phi Y) = g(X,Y) - eps eta(X) eta(Y)"),
    CatalogEntry("phi-xi", "axioms", "phi xi = 0"),
    CatalogEntry("eta-phi", "axioms", "eta o phi = 0"),
    CatalogEntry("xi-causal", "axioms", "g(xi,xi) = eps, eta(X) = eps g(xi,X)"),
    CatalogEntry("phi-skew", "axioms", "g(phi X, Y) = -g(X, phi Y)"),
    CatalogEntry("phi-rank", "axioms", "rank phi = 2n"),
    CatalogEntry("contact", "contact", "d eta = Phi with Phi(X,Y) = g(X, phi Y)"),
    CatalogEntry("050", "standard", "h = (1/2) L_xi phi and l = R(., xi) xi are g-self-adjoint"),
    CatalogEntry("051", "standard", "tr h = tr(h phi) = 0"),
    CatalogEntry("055", "standard", "eta o h = 0, l xi = 0"),
    CatalogEntry("013", "standard", "h phi = -phi h"),
    CatalogEntry("052", "standard", "h xi = 0"),
    CatalogEntry("033", "standard", "nabla_X xi = -eps phi X - phi h X"),
    CatalogEntry("031", "standard", "(nabla_X phi)Y = eps g(eps X + hX, Y) xi - eta(Y)(eps X + hX)"),
    CatalogEntry("072", "standard", "nabla_xi phi = 0"),
    CatalogEntry("073", "standard", "nabla_xi h = phi - phi l - phi h^2"),
    CatalogEntry("027", "standard", "phi l phi - l = 2(phi^2 + h^2)"),
    CatalogEntry("035", "standard", "Ric(xi,xi) = 2n - tr(h^2)"),
    CatalogEntry("032", "standard",
                 "Rm(xi,X,Y,Z) = eps (nabla_X Phi)(Y,Z) + g((nabla_Y phi h)Z, X) - g((nabla_Z phi h)Y, X)"),
    CatalogEntry("sasakicurvature", "sasakian", "R(X,Y)xi = eta(Y)X - eta(X)Y"),
    CatalogEntry("62", "nullity",
                 "R(X,Y)xi = eps kappa (eta(Y)X - eta(X)Y) + eps mu (eta(Y)hX - eta(X)hY)"),
    CatalogEntry("expect-kappa", "nullity", "detected kappa equals the value declared in the spec file"),
    CatalogEntry("expect-mu", "nullity", "detected mu equals the value declared in the spec file"),
    CatalogEntry("kmu-constancy", "nullity",
                 "non-Sasakian generalized (kappa, mu) with n > 1 forces constant kappa, mu"),
    CatalogEntry("030", "kmu", "h^2 = (eps kappa - 1) phi^2, eps kappa <= 1, kappa = eps iff Sasakian"),
    CatalogEntry("053", "kmu", "l phi - phi l = 2 eps mu h phi"),
    CatalogEntry("023", "kmu",
                 "R(xi,X)Y = kappa (g(X,Y) xi - eps eta(Y) X) + mu (g(hX,Y) xi - eps eta(Y) hX)"),
    CatalogEntry("054", "kmu", "Q xi = 2n kappa xi"),
    CatalogEntry("48", "kmu",
                 "(nabla_X h)Y - (nabla_Y h)X = (1 - eps kappa){2 eps g(X,phi Y) xi + eta(X) phi Y - eta(Y) phi X}"
                 " + eps (1 - mu){eta(X) phi h Y - eta(Y) phi h X}", gated=True),
    CatalogEntry("070", "kmu", "ξκ = 0"),
    CatalogEntry("006", "kmu", "R(X,Y) phi Z - phi R(X,Y) Z in closed form"),
    CatalogEntry("006-eps", "kmu",
                 "the same closed form with its xi-coefficient multiplied by eps (rederived from 48)"),
    CatalogEntry("041", "kmu",
                 "(nabla_X h)Y = {(eps - kappa) g(X, phi Y) + g(X, h phi Y)} xi"
                 " + eta(Y) h(eps phi X + phi h X) - eps mu eta(X) phi h Y", gated=True),
    CatalogEntry("045", "kmu", "R(X,Y) hZ - h R(X,Y) Z in closed form", gated=True),
    CatalogEntry("037", "components",
                 "h has eigenvalues +-lambda on ker eta, lambda^2 = 1 - eps kappa, D(lambda), D(-lambda), D(0) orthogonal"),
    CatalogEntry("47", "components", "nabla preserves D(lambda) and D(-lambda)", gated=True),
    CatalogEntry("41", "components", "R(X+,Y+)Z- = (kappa - eps mu)[g(phi Y+,Z-) phi X+ - g(phi X+,Z-) phi Y+]",
                 gated=True),
    CatalogEntry("42", "components", "R(X-,Y-)Z+ = (kappa - eps mu)[g(phi Y-,Z+) phi X- - g(phi X-,Z+) phi Y-]",
                 gated=True),
    CatalogEntry("43", "components", "R(X-,Y+)Z- = -kappa g(phi Y+,Z-) phi X- - eps mu g(phi Y+,X-) phi Z-",
                 gated=True),
    CatalogEntry("44", "components", "R(X-,Y+)Z+ = kappa g(phi X-,Z+) phi Y+ + eps mu g(phi X-,Y+) phi Z+",
                 gated=True),
    CatalogEntry("45", "components", "R(X+,Y+)Z+ = [2(eps + lambda) - eps mu][g(Y,Z)X - g(X,Z)Y]", gated=True),
    CatalogEntry("46", "components", "R(X-,Y-)Z- = [2(eps - lambda) - eps mu][g(Y,Z)X - g(X,Z)Y]", gated=True),
    CatalogEntry("xi-sectional", "components",
                 "K(X,xi) = kappa + mu g(hX,X)/g(X,X), i.e. kappa + lambda mu on D(lambda), kappa - lambda mu on D(-lambda)"),
    CatalogEntry("025", "components", "sectional curvature of planes normal to xi", gated=True),
    CatalogEntry("024", "components",
                 "QX = eps[2(n-1) - n mu]X + (2(n-1) + mu)hX + [2(1-n) eps + 2n kappa + n eps mu] eta(X) xi",
                 gated=True),
    CatalogEntry("phi-sectional", "model", "phi-sectional curvature K(X, phi X) is independent of the phi-section"),
    CatalogEntry("022", "model", "curvature tensor equals the constant phi-sectional curvature model", gated=True),
    CatalogEntry("061", "model", "(n+1)c = (n-1) eps - 2n eps mu - 2 kappa", gated=True),
    CatalogEntry("062", "model", "c = -(kappa + eps mu)", gated=True),
    CatalogEntry("087", "model", "c = -2 kappa - eps, and mu = eps kappa + 1 when kappa != eps", gated=True),
    CatalogEntry("088", "model", "constant phi-sectional curvature iff mu = eps kappa + 1 (n > 1, eps kappa < 1)",
                 gated=True),
    CatalogEntry("089", "deformation",
                 "kappa' = (kappa + eps a^2 - eps)/a^2, mu' = (mu + 2a - 2)/a under the D-homothetic deformation"),
    CatalogEntry("numeric-agreement", "numeric",
                 "pointwise evaluation at seeded rational points agrees exactly with the symbolic residuals"),
]

CATALOG: dict[str, CatalogEntry] = {e.tag: e for e in _ENTRIES}


def entry(tag: str) -> CatalogEntry:
    return CATALOG[tag]
