from fractions import Fraction

import numpy as np
import pytest

from conftest import geometry
from kmucontact.frame_geometry import curvature_tensor, koszul_connection
from kmucontact.contact_structures import build_bundle
from kmucontact.nullity import (
    MuIndeterminate,
    NotDiagonalizableSymbolically,
    NotNullity,
    NullityError,
    NullityFunctions,
    constant_phi_sectional_model,
    d_homothetic_deform,
    deformation_prediction,
    detect_nullity,
    generalized_constancy_report,
    lambda_and_distributions,
    numeric_eigen_check,
    phi_sectional_values,
    verify_curvature_components,
    verify_kmu_identities,
    xi_sectional_curvatures,
)
from kmucontact.verdicts import FAIL, INFO, PASS, SKIP


@pytest.mark.parametrize("name,kappa,mu", [
    ("paper_example", "1 - z^-8", "2 + 2*z^-4"),
    ("paper_example_eps_minus", "-1 + z^-8", "2 - 2*z^-4"),
    ("sol_kmu", "0", "4"),
    ("heisenberg_sasakian", "1", None),
    ("heisenberg_lorentzian", "-1", None),
    ("heisenberg5_sasakian", "1", None),
])
def test_detected_kappa_mu(name, kappa, mu):
    G = geometry(name)
    nf = detect_nullity(G.F)
    assert nf.kappa == G.P(kappa)
    if mu is None:
        assert nf.mu_indeterminate
    else:
        assert nf.mu == G.P(mu)


def test_constancy_flags():
    assert not detect_nullity(geometry("paper_example").F).constant
    sol = detect_nullity(geometry("sol_kmu").F)
    assert sol.kappa_constant and sol.mu_constant


def test_mu_accessors():
    nf = detect_nullity(geometry("heisenberg_sasakian").F)
    assert nf.mu_or_zero() == 0
    with pytest.raises(MuIndeterminate):
        nf.require_mu()


def test_perturbed_curvature_is_not_nullity():
    G = geometry("paper_example")
    R = G.F.R.copy()
    R[1, 0, 0, 1] = R[1, 0, 0, 1] + G.P("x")
    R[0, 1, 0, 1] = R[0, 1, 0, 1] - G.P("x")
    with pytest.raises(NotNullity) as info:
        detect_nullity(G.F.with_R(R))
    assert info.value.witness


def test_perturbed_connection_is_not_nullity():
    G = geometry("sol_kmu")
    conn = G.conn.with_perturbation(1, 0, 0, G.P("1"))
    with pytest.raises(NotNullity, match="nullity condition"):
        detect_nullity(build_bundle(G.s, conn, curvature_tensor(conn)))


class TestDecomposition:
    def test_worked_example(self, example):
        dec = lambda_and_distributions(example.F, detect_nullity(example.F))
        assert dec.lam == example.P("z^-4")
        assert dec.basis_plus == (1,) and dec.basis_minus == (2,)

    def test_sasakian_has_none(self):
        F = geometry("heisenberg_sasakian").F
        with pytest.raises(NullityError):
            lambda_and_distributions(F, detect_nullity(F))

    def test_rotated_frame_needs_fallback(self):
        G = geometry("paper_example_rotated")
        nf = detect_nullity(G.F)
        with pytest.raises(NotDiagonalizableSymbolically):
            lambda_and_distributions(G.F, nf)
        v = numeric_eigen_check(G.F, nf, [{"x": 1, "y": 2, "z": 3}, {"x": -1, "y": 0, "z": Fraction(1, 2)}])
        assert v.status == PASS
        assert v.value.startswith("numeric spectra")


def test_kmu_suite_on_constant_fixture():
    G = geometry("sol_kmu")
    rep = verify_kmu_identities(G.F, G.frame, detect_nullity(G.F), [{"x": 1, "y": 1, "z": 1}])
    assert all(v.status == PASS for v in rep), [(v.tag, v.witness) for v in rep if v.status != PASS]


def test_kmu_suite_gates_generalized_fixture():
    G = geometry("paper_example")
    rep = verify_kmu_identities(G.F, G.frame, detect_nullity(G.F))
    for tag in ("030", "053", "023", "054", "070", "006-eps"):
        assert rep[tag].status == PASS, tag
    assert rep["48"].status == INFO and rep["48"].holds
    assert rep["041"].status == INFO and not rep["041"].holds
    assert rep["041"].witness == "(e2,e2)[3] = -4*z^-11"


def test_printed_xi_coefficient_needs_eps():
    G = geometry("paper_example_eps_minus")
    rep = verify_kmu_identities(G.F, G.frame, detect_nullity(G.F))
    assert rep["006"].status == FAIL
    assert rep["006-eps"].status == PASS


def test_components_on_constant_fixture():
    G = geometry("sol_kmu")
    nf = detect_nullity(G.F)
    rep = verify_curvature_components(G.F, nf, lambda_and_distributions(G.F, nf))
    bad = [(v.tag, v.witness) for v in rep if v.status not in (PASS, SKIP)]
    assert not bad


def test_xi_sectional_on_sol():
    G = geometry("sol_kmu")
    K = xi_sectional_curvatures(G.F)
    assert K == {1: 4, 2: -4}


def test_phi_sectional_heisenberg5():
    G = geometry("heisenberg5_sasakian")
    values = {v for _, v in phi_sectional_values(G.F)}
    assert values == {-3}
    rep = constant_phi_sectional_model(G.F, detect_nullity(G.F))
    assert rep["022"].status == PASS
    assert rep["087"].status == PASS


class TestDeformation:
    def test_prediction_formula(self):
        nf = detect_nullity(geometry("sol_kmu").F)
        kappa, mu = deformation_prediction(nf, 2)
        assert kappa == Fraction(3, 4) and mu == 3

    def test_identity_at_one(self):
        G = geometry("paper_example")
        res = d_homothetic_deform(G.s, detect_nullity(G.F), 1)
        assert np.array_equal(res.structure.frame.E, G.frame.E)

    @pytest.mark.parametrize("a", [0, -1, Fraction(-1, 2)])
    def test_nonpositive_rejected(self, a):
        G = geometry("paper_example")
        with pytest.raises(ValueError):
            d_homothetic_deform(G.s, detect_nullity(G.F), a)

    def test_detected_after_deformation(self):
        G = geometry("sol_kmu")
        nf = detect_nullity(G.F)
        res = d_homothetic_deform(G.s, nf, Fraction(1, 3))
        conn = koszul_connection(res.structure.frame)
        got = detect_nullity(build_bundle(res.structure, conn, curvature_tensor(conn)))
        assert got.kappa == res.kappa and got.mu == res.mu


def _nf(kappa_const, mu, n_coords=("x",)):
    from kmucontact.symexpr import ScalarExpr

    return NullityFunctions(ScalarExpr.const(n_coords, 0), mu, kappa_const, True, 1)


@pytest.mark.parametrize("kappa_const,n,status", [
    (True, 1, PASS),
    (False, 1, PASS),
    (True, 2, PASS),
    (False, 2, FAIL),
])
def test_constancy_report(kappa_const, n, status):
    from kmucontact.symexpr import ScalarExpr

    assert generalized_constancy_report(_nf(kappa_const, ScalarExpr.const(("x",), 1)), n).status == status


def test_constancy_report_skips_sasakian():
    assert generalized_constancy_report(_nf(True, None), 2).status == SKIP
