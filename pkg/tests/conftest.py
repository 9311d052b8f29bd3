from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache

import pytest

from kmucontact.cli import build_structure, run_verify
from kmucontact.contact_structures import AlmostContactStructure, FieldBundle, build_bundle
from kmucontact.frame_geometry import ConnectionTable, CurvatureTable, curvature_tensor, koszul_connection
from kmucontact.specfile import ManifoldSpec, bundled_fixtures, load_spec

FIXTURES = [name[:-4] for name in bundled_fixtures()]


@dataclass
class Geometry:
    spec: ManifoldSpec
    s: AlmostContactStructure
    conn: ConnectionTable
    curv: CurvatureTable
    F: FieldBundle

    @property
    def frame(self):
        return self.s.frame

    def P(self, text):
        from kmucontact.symexpr import parse_expr

        return parse_expr(text, self.spec.coords)


@lru_cache(maxsize=None)
def geometry(name: str) -> Geometry:
    spec = load_spec(name)
    s = build_structure(spec)
    conn = koszul_connection(s.frame)
    curv = curvature_tensor(conn)
    return Geometry(spec, s, conn, curv, build_bundle(s, conn, curv))


@lru_cache(maxsize=None)
def verified(name: str):
    return run_verify(load_spec(name))


@pytest.fixture(params=[1, -1], ids=["eps+", "eps-"])
def example(request) -> Geometry:
    return geometry("paper_example" if request.param == 1 else "paper_example_eps_minus")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, title = RESULTS[number]
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}")
