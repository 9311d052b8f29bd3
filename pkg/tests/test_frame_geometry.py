from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import FIXTURES, geometry
from kmucontact.cli import check_frame_invariants
from kmucontact.frame_geometry import (
    DegeneratePlane,
    Frame,
    FrameError,
    curvature_tensor,
    frame_decompose,
    is_zero_array,
    koszul_connection,
    lie_bracket,
    ricci_operator,
    ricci_tensor,
    sectional_curvature,
    structure_constants,
    vec,
)
from kmucontact.symexpr import parse_expr

C = ("x", "y", "z")


def P(text):
    return parse_expr(text, C)


def frame_of(rows, metric=(1, 1, 1)):
    return Frame.from_vectors(C, [[P(t) for t in r] for r in rows], metric)


WORKED = [["1", "0", "0"], ["0", "z^-2", "0"], ["2*y*z^2", "2*x*z^-6", "z^-6"]]


def test_lie_bracket_in_coordinates():
    f = frame_of(WORKED)
    e1, e2, e3 = (f.vector(i) for i in range(3))
    assert is_zero_array(lie_bracket(e1, e2, C))
    assert list(lie_bracket(e1, e3, C)) == [P("0"), P("2*z^-6"), P("0")]
    assert list(frame_decompose(lie_bracket(e1, e3, C), f)) == [P("0"), P("2*z^-4"), P("0")]


def test_structure_constants_antisymmetric():
    c = structure_constants(frame_of(WORKED))
    for i in range(3):
        for j in range(3):
            assert is_zero_array(c[i, j] + c[j, i])
    assert list(c[1, 2]) == [P("2"), P("2*z^-7"), P("0")]


def test_frame_inverse_is_laurent():
    f = frame_of(WORKED)
    assert f.determinant == P("z^-8")
    prod = f.E.dot(f.inverse)
    for a, b in np.ndindex(3, 3):
        assert prod[a, b] == (1 if a == b else 0)


def test_non_monomial_determinant_rejected():
    with pytest.raises(FrameError, match="not a monomial"):
        frame_of([["1", "0", "0"], ["0", "1 + z", "0"], ["0", "0", "1"]])


def test_dependent_vectors_rejected():
    with pytest.raises(FrameError, match="dependent"):
        frame_of([["1", "0", "0"], ["2", "0", "0"], ["0", "0", "1"]])


def test_zero_metric_entry_rejected():
    with pytest.raises(FrameError):
        frame_of(WORKED, metric=(1, 0, 1))


def test_coordinate_frame_is_flat():
    f = frame_of([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], metric=(-1, 1, 1))
    conn = koszul_connection(f)
    curv = curvature_tensor(conn)
    assert is_zero_array(conn.gamma)
    assert is_zero_array(curv.R)
    assert is_zero_array(ricci_tensor(curv))


def test_sectional_curvature_and_degenerate_plane():
    G = geometry("heisenberg_sasakian")
    e = [G.frame.unit(i) for i in range(3)]
    assert sectional_curvature(G.curv, e[1], e[2]) == -3
    assert sectional_curvature(G.curv, e[0], e[1]) == 1
    lor = geometry("heisenberg_lorentzian")
    null = vec([P("1"), P("1"), P("0")])
    with pytest.raises(DegeneratePlane):
        sectional_curvature(lor.curv, null, vec([P("0"), P("0"), P("1")]))


def test_ricci_operator_lowers_to_ricci_tensor():
    G = geometry("paper_example")
    Q, Ric = ricci_operator(G.curv), ricci_tensor(G.curv)
    for j, k in np.ndindex(3, 3):
        assert G.frame.metric[k] * Q[k, j] == Ric[j, k]


def test_perturbed_connection_breaks_invariants():
    G = geometry("paper_example")
    conn = G.conn.with_perturbation(0, 1, 2, P("z"))
    rep = check_frame_invariants(conn, curvature_tensor(conn))
    assert not rep["torsion"].holds
    assert not rep["metric-compat"].holds
    assert rep["torsion"].witness


@pytest.mark.parametrize("name", FIXTURES)
def test_curvature_symmetries(name):
    rep = check_frame_invariants(geometry(name).conn, geometry(name).curv)
    assert rep.ok, [v.tag for v in rep.failures()]


# -- independent oracle: coordinate Christoffel symbols via sympy ---------------

def _sym(e, syms):
    return sum((sympy.Rational(v.numerator, v.denominator) * sympy.Mul(*(s**k for s, k in zip(syms, ex)))
                for ex, v in e.terms.items()), sympy.Integer(0))


def _oracle(name):
    G = geometry(name)
    syms = sympy.symbols(G.spec.coords)
    d = len(syms)
    E = sympy.Matrix(d, d, lambda a, i: _sym(G.frame.E[a, i], syms))
    theta = E.inv()
    gc = sympy.simplify(theta.T * sympy.diag(*[sympy.Rational(m.numerator, m.denominator) for m in G.frame.metric])
                        * theta)
    gi = gc.inv()
    Gam = [[[sympy.simplify(sum(gi[a, m] * (sympy.diff(gc[m, b], syms[c]) + sympy.diff(gc[m, c], syms[b])
                                               - sympy.diff(gc[b, c], syms[m])) for m in range(d)) / 2)
             for c in range(d)] for b in range(d)] for a in range(d)]

    def nabla(X, Y):
        return sympy.Matrix([sum(X[b] * sympy.diff(Y[a], syms[b]) for b in range(d))
                             + sum(Gam[a][b][c] * X[b] * Y[c] for b in range(d) for c in range(d))
                             for a in range(d)])

    return G, syms, E, theta, nabla


@pytest.mark.parametrize("name", ["paper_example", "paper_example_eps_minus", "sol_kmu"])
def test_connection_matches_christoffel_oracle(name):
    G, syms, E, theta, nabla = _oracle(name)
    d = len(syms)
    for i, j in np.ndindex(d, d):
        comps = sympy.simplify(theta * nabla(E[:, i], E[:, j]))
        for k in range(d):
            assert sympy.simplify(comps[k] - _sym(G.conn.gamma[i, j, k], syms)) == 0, (i, j, k)


@pytest.mark.parametrize("name", ["paper_example", "sol_kmu"])
def test_curvature_matches_christoffel_oracle(name):
    G, syms, E, theta, nabla = _oracle(name)
    d = len(syms)
    cols = [E[:, i] for i in range(d)]

    def bracket(X, Y):
        return sympy.Matrix(
            [sum(X[b] * sympy.diff(Y[a], syms[b]) - Y[b] * sympy.diff(X[a], syms[b]) for b in range(d))
             for a in range(d)])

    for i, j, k in [(1, 0, 0), (2, 0, 0), (1, 2, 0), (1, 2, 1), (1, 2, 2)]:
        X, Y, Z = cols[i], cols[j], cols[k]
        R = nabla(X, nabla(Y, Z)) - nabla(Y, nabla(X, Z)) - nabla(bracket(X, Y), Z)
        comps = sympy.simplify(theta * R)
        for l in range(d):
            assert sympy.simplify(comps[l] - _sym(G.curv.R[i, j, k, l], syms)) == 0, (i, j, k, l)


def test_metric_accepts_rationals():
    f = frame_of(WORKED, metric=(1, Fraction(2), Fraction(1, 2)))
    assert f.metric == (1, 2, Fraction(1, 2))
    assert f.signature == (1, 1, 1)
