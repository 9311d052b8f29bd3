"""Command-line front end: ``kmucontact verify | deform | catalog``."""

from __future__ import annotations

import json
import random
import re
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

import click
import numpy as np

from .catalog import CATALOG, SECTIONS
from .contact_structures import (
    STANDARD_IDENTITIES,
    AlmostContactStructure,
    FieldBundle,
    Identity,
    build_bundle,
    check_almost_contact_axioms,
    check_contact_condition,
    check_standard_identities,
    sasakian_residual,
)
from .frame_geometry import (
    ConnectionTable,
    CurvatureTable,
    Frame,
    FrameError,
    curvature_tensor,
    evaluate,
    koszul_connection,
    ricci_operator,
)
from .nullity import (
    KMU_IDENTITIES,
    NULLITY_IDENTITY,
    NotDiagonalizableSymbolically,
    NotNullity,
    NullityError,
    NullityFunctions,
    constant_phi_sectional_model,
    d_homothetic_deform,
    decomposition_verdict,
    detect_nullity,
    generalized_constancy_report,
    lambda_and_distributions,
    numeric_agreement,
    numeric_eigen_check,
    verify_curvature_components,
    verify_kmu_identities,
)
from .specfile import ManifoldSpec, SpecError, bundled_fixtures, format_spec, load_spec, parse_spec
from .symexpr import InadmissiblePoint, ScalarExpr, SymexprError, parse_expr
from .verdicts import FAIL, INFO, PASS, SKIP, StructureReport, Verdict, boolean_verdict, skipped, verdict_from_residuals

__all__ = [
    "VerificationReport",
    "build_structure",
    "sample_points",
    "check_frame_invariants",
    "run_verify",
    "run_deform",
    "emit_report",
    "main",
]

N_SAMPLES = 8
SAMPLE_BOUND = 7


@dataclass
class VerificationReport:
    fixture: str
    dimension: int | None = None
    n: int | None = None
    epsilon: int | None = None
    seed: int = 0
    points: list[dict] = field(default_factory=list)
    nullity: dict | None = None
    verdicts: StructureReport = field(default_factory=StructureReport)
    errors: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    nf: NullityFunctions | None = None
    bundle: FieldBundle | None = None

    @property
    def ok(self) -> bool:
        return not self.errors and self.verdicts.ok

    def __getitem__(self, tag: str) -> Verdict:
        return self.verdicts[tag]

    def to_dict(self) -> dict:
        counts = {s: 0 for s in (PASS, FAIL, INFO, SKIP)}
        for v in self.verdicts:
            counts[v.status] += 1
        return {
            "fixture": self.fixture,
            "dimension": self.dimension,
            "n": self.n,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "sample_points": [_fmt_point(p) for p in self.points],
            "nullity": self.nullity,
            "identity_verdicts": {v.tag: v.to_dict() for v in _ordered(self.verdicts)},
            "summary": counts,
            "errors": list(self.errors),
            "ok": self.ok,
        }


def _ordered(report: StructureReport) -> list[Verdict]:
    rank = {tag: i for i, tag in enumerate(CATALOG)}
    return sorted(report, key=lambda v: rank.get(v.tag, len(rank)))


def _fmt_point(p: Mapping) -> str:
    return " ".join(f"{k}={v}" for k, v in p.items())


# -- construction ------------------------------------------------------------

def build_structure(spec: ManifoldSpec) -> AlmostContactStructure:
    frame = Frame.from_vectors(spec.coords, spec.frame, spec.metric)
    phi = np.empty((spec.dim, spec.dim), dtype=object)
    for k in range(spec.dim):
        for j in range(spec.dim):
            phi[k, j] = spec.phi[k][j]
    return AlmostContactStructure(frame, phi, spec.xi, spec.epsilon)


def sample_points(spec: ManifoldSpec, frame: Frame, seed: int, count: int = N_SAMPLES) -> list[dict]:
    """User samples first, then ``count`` seeded rational points avoiding poles."""
    avoid = set(frame.negative_exponent_coords())
    for row in spec.phi:
        for e in row:
            avoid |= e.negative_exponent_coords()
    rng = random.Random(seed)
    pts = [dict(p) for p in spec.samples]
    while len(pts) < len(spec.samples) + count:
        pt = {}
        for c in spec.coords:
            while True:
                v = Fraction(rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND), rng.randint(1, SAMPLE_BOUND))
                if v != 0 or c not in avoid:
                    break
            pt[c] = v
        pts.append(pt)
    return pts


def check_frame_invariants(conn: ConnectionTable, curv: CurvatureTable) -> StructureReport:
    f = conn.frame
    d = f.dim
    gm = f.metric
    G, c, R = conn.gamma, conn.c, curv.R
    report = StructureReport()
    report.add(boolean_verdict("frame-inverse", True, value=f"det = {f.determinant}"))
    idx2 = list(np.ndindex(d, d))
    idx3 = list(np.ndindex(d, d, d))
    report.add(verdict_from_residuals("torsion", (
        (f"T(e{i + 1},e{j + 1})", G[i, j] - G[j, i] - c[i, j]) for i, j in idx2)))
    report.add(verdict_from_residuals("metric-compat", (
        (f"nabla_e{k + 1} g(e{i + 1},e{j + 1})", gm[j] * G[k, i, j] + gm[i] * G[k, j, i]) for k, i, j in idx3)))
    report.add(verdict_from_residuals("curv-antisym", (
        (f"R(e{i + 1},e{j + 1})+R(e{j + 1},e{i + 1})", R[i, j] + R[j, i]) for i, j in idx2)))
    Rm = curv.lowered
    idx4 = list(np.ndindex(d, d, d, d))
    report.add(verdict_from_residuals("curv-skew", (
        (f"Rm{(w + 1, z + 1, x + 1, y + 1)}", Rm[w, z, x, y] + Rm[z, w, x, y]) for w, z, x, y in idx4)))
    report.add(verdict_from_residuals("curv-pair", (
        (f"Rm{(w + 1, z + 1, x + 1, y + 1)}", Rm[w, z, x, y] - Rm[x, y, w, z]) for w, z, x, y in idx4)))
    report.add(verdict_from_residuals("bianchi", (
        (f"(e{i + 1},e{j + 1},e{k + 1})", R[i, j, k] + R[j, k, i] + R[k, i, j]) for i, j, k in idx3)))
    Q = ricci_operator(curv)
    report.add(verdict_from_residuals("ricci-sym", (
        (f"g(Qe{j + 1},e{k + 1})-g(e{j + 1},Qe{k + 1})", gm[k] * Q[k, j] - gm[j] * Q[j, k]) for j, k in idx2)))
    return report


# -- pipeline ----------------------------------------------------------------

def run_verify(spec: ManifoldSpec, *, seed: int = 0, numeric_fallback: bool = False,
               perturb_gamma: tuple[int, int, int, str] | None = None) -> VerificationReport:
    """axioms -> connection -> curvature -> h, l -> standard identities -> nullity -> (kappa, mu) suite -> models."""
    t0 = time.perf_counter()
    rep = VerificationReport(fixture=spec.name, dimension=spec.dim, n=(spec.dim - 1) // 2,
                             epsilon=spec.epsilon, seed=seed)
    V = rep.verdicts
    try:
        s = build_structure(spec)
    except FrameError as err:
        V.add(boolean_verdict("frame-inverse", False, witness=str(err)))
        rep.errors.append(f"frame: {err}")
        rep.elapsed = time.perf_counter() - t0
        return rep
    frame = s.frame
    rep.points = sample_points(spec, frame, seed)

    conn = koszul_connection(frame)
    if perturb_gamma is not None:
        i, j, k, text = perturb_gamma
        conn = conn.with_perturbation(i - 1, j - 1, k - 1, parse_expr(text, spec.coords))
    curv = curvature_tensor(conn)
    V.merge(check_frame_invariants(conn, curv))

    axioms = check_almost_contact_axioms(s, rep.points)
    V.merge(axioms)
    if not axioms.ok:
        _skip_rest(V, "almost contact axioms fail")
        return _finish(rep, t0)
    contact = check_contact_condition(s, conn)
    V.merge(contact)
    if not contact.ok:
        _skip_rest(V, "contact condition d eta = Phi fails")
        return _finish(rep, t0)

    F = build_bundle(s, conn, curv)
    rep.bundle = F
    V.merge(check_standard_identities(F))
    sas = sasakian_residual(F)
    sas.status = INFO if not sas.holds else PASS
    V.add(sas)

    try:
        nf = detect_nullity(F)
    except NotNullity as err:
        V.add(boolean_verdict("62", False, witness=err.witness or str(err)))
        _skip_rest(V, "not a (kappa, mu)-nullity structure")
        identities = list(STANDARD_IDENTITIES)
        V.add(numeric_agreement(F, identities, _admissible(F, rep.points)))
        return _finish(rep, t0)
    rep.nf = nf
    V.add(boolean_verdict("62", True, value=f"kappa = {nf.kappa}; mu = {'indeterminate' if nf.mu is None else nf.mu}"))
    _expectations(V, spec, nf)

    nul = {
        "kappa": str(nf.kappa),
        "mu": None if nf.mu is None else str(nf.mu),
        "kappa_constant": nf.kappa_constant,
        "mu_constant": nf.mu_constant,
        "mu_indeterminate": nf.mu is None,
        "sasakian": bool(sas.holds),
        "generalized": not nf.constant,
        "lambda": None,
        "D(lambda)": None,
        "D(-lambda)": None,
    }
    rep.nullity = nul

    V.merge(verify_kmu_identities(F, frame, nf, rep.points))
    V.add(generalized_constancy_report(nf, s.n))

    dec = None
    if nf.mu is None:
        V.add(skipped("037", "eps kappa = 1: Sasakian, h = 0"))
    else:
        try:
            dec = lambda_and_distributions(F, nf)
            V.add(decomposition_verdict(F, nf, dec))
            nul["lambda"] = str(dec.lam)
            nul["D(lambda)"] = [f"e{i + 1}" for i in dec.basis_plus]
            nul["D(-lambda)"] = [f"e{i + 1}" for i in dec.basis_minus]
        except NotDiagonalizableSymbolically as err:
            if numeric_fallback:
                V.add(numeric_eigen_check(F, nf, rep.points))
            else:
                V.add(skipped("037", f"{err}; rerun with --numeric-fallback"))
        except NullityError as err:
            V.add(boolean_verdict("037", False, witness=str(err)))
    V.merge(verify_curvature_components(F, nf, dec))
    V.merge(constant_phi_sectional_model(F, nf))

    G = F.with_nullity(nf.kappa, nf.mu_or_zero(), None if dec is None else dec.lam)
    identities = list(STANDARD_IDENTITIES) + [NULLITY_IDENTITY] + list(KMU_IDENTITIES)
    V.add(numeric_agreement(G, identities, _admissible(G, rep.points)))
    return _finish(rep, t0)


def _admissible(F: FieldBundle, points):
    ok = []
    for p in points:
        try:
            F.at(p)
        except InadmissiblePoint:
            continue
        ok.append(p)
    return ok


def _expectations(V: StructureReport, spec: ManifoldSpec, nf: NullityFunctions) -> None:
    if spec.expect_kappa is not None:
        V.add(verdict_from_residuals("expect-kappa", [("kappa-expected", nf.kappa - spec.expect_kappa)]))
    if spec.expect_mu is not None:
        if nf.mu is None:
            V.add(skipped("expect-mu", "mu is indeterminate (h = 0)"))
        else:
            V.add(verdict_from_residuals("expect-mu", [("mu-expected", nf.mu - spec.expect_mu)]))


def _skip_rest(V: StructureReport, why: str) -> None:
    for tag, e in CATALOG.items():
        if tag not in V and e.section not in ("frame", "axioms", "deformation", "numeric"):
            V.add(skipped(tag, why))


def _finish(rep: VerificationReport, t0: float) -> VerificationReport:
    rep.elapsed = time.perf_counter() - t0
    return rep


# -- deformation -------------------------------------------------------------

class DeformError(ValueError):
    pass


def run_deform(spec: ManifoldSpec, a, *, seed: int = 0) -> tuple[str, VerificationReport]:
    a = Fraction(a)
    if a <= 0:
        raise DeformError(f"deformation parameter must be positive, got {a}")
    s = build_structure(spec)
    conn = koszul_connection(s.frame)
    F = build_bundle(s, conn, curvature_tensor(conn))
    nf = detect_nullity(F)
    res = d_homothetic_deform(s, nf, a)
    f = res.structure.frame
    new = replace(
        spec,
        name=f"{spec.name}_a{str(a).replace('/', '_')}",
        metric=f.metric,
        frame=[[f.E[r, i] for r in range(f.dim)] for i in range(f.dim)],
        expect_kappa=res.kappa,
        expect_mu=res.mu,
    )
    text = format_spec(new, header=f"D-homothetic deformation of {spec.name} with a = {a}\n"
                                   f"predicted kappa = {res.kappa}, mu = {'indeterminate' if res.mu is None else res.mu}")
    rep = run_verify(parse_spec(text, name=new.name), seed=seed)
    if rep.nf is None:
        rep.verdicts.add(boolean_verdict("089", False, witness="deformed structure is not a nullity structure"))
    else:
        residuals = [("kappa-predicted", rep.nf.kappa - res.kappa)]
        if res.mu is None or rep.nf.mu is None:
            residuals.append(("mu indeterminacy", int((res.mu is None) != (rep.nf.mu is None))))
        else:
            residuals.append(("mu-predicted", rep.nf.mu - res.mu))
        v = rep.verdicts.add(verdict_from_residuals("089", residuals))
        v.value = f"a = {a}; kappa' = {res.kappa}; mu' = {'indeterminate' if res.mu is None else res.mu}"
    return text, rep


# -- output ------------------------------------------------------------------

def _label(tag: str) -> str:
    return f"Eq. {tag}" if re.fullmatch(r"\d+", tag) else tag


def emit_report(rep: VerificationReport, fmt: str = "text", timing: bool = False) -> str:
    if fmt == "json":
        return json.dumps(rep.to_dict(), indent=2, ensure_ascii=False) + "\n"
    out = [f"fixture: {rep.fixture}"]
    if rep.dimension is not None:
        out.append(f"dimension {rep.dimension} (n = {rep.n}), epsilon = {rep.epsilon:+d}, seed = {rep.seed}")
    if rep.nullity:
        nl = rep.nullity
        mu = "indeterminate" if nl["mu"] is None else nl["mu"]
        out.append(f"kappa = {nl['kappa']} ({'constant' if nl['kappa_constant'] else 'non-constant'}), "
                   f"mu = {mu} ({'constant' if nl['mu_constant'] else 'non-constant'})")
        if nl["lambda"] is not None:
            out.append(f"lambda = {nl['lambda']}, D(lambda) = {nl['D(lambda)']}, D(-lambda) = {nl['D(-lambda)']}")
    for err in rep.errors:
        out.append(f"error: {err}")
    by_section: dict[str, list[Verdict]] = {}
    for v in _ordered(rep.verdicts):
        sec = CATALOG[v.tag].section if v.tag in CATALOG else "other"
        by_section.setdefault(sec, []).append(v)
    for key, title in SECTIONS:
        if key not in by_section:
            continue
        out.append("")
        out.append(f"== {title} ==")
        for v in by_section[key]:
            statement = CATALOG[v.tag].statement
            out.append(f"  {statement} … {v.status.upper()} ({_label(v.tag)})")
            if v.value:
                out.append(f"      {v.value}")
            if v.witness:
                out.append(f"      witness: {v.witness}")
            if v.note:
                out.append(f"      note: {v.note}")
    d = rep.to_dict()["summary"]
    out.append("")
    out.append(f"summary: {d['pass']} pass, {d['fail']} fail, {d['info']} info, {d['skip']} skip")
    if timing:
        out.append(f"elapsed: {rep.elapsed:.2f}s")
    return "\n".join(out) + "\n"


# -- click commands ------------------------------------------------------------

def _load(spec_arg: str) -> ManifoldSpec:
    try:
        return load_spec(spec_arg)
    except (SpecError, FileNotFoundError) as err:
        raise click.UsageError(str(err)) from None


@click.group()
def main():
    """Exact verification of (kappa, mu)-contact pseudo-metric frame geometries."""


@main.command()
@click.argument("spec")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="seed for the rational sample points")
@click.option("--numeric-fallback", is_flag=True, help="check h pointwise when it is not frame-diagonal")
@click.option("--perturb-gamma", nargs=4, type=(int, int, int, str), default=None,
              metavar="I J K EXPR", help="add EXPR to the connection coefficient of e_K in nabla_{e_I} e_J")
@click.option("--timing", is_flag=True, help="print elapsed time (text format only)")
def verify(spec, fmt, seed, numeric_fallback, perturb_gamma, timing):
    """Verify a spec file or bundled fixture."""
    ms = _load(spec)
    if perturb_gamma is not None:
        i, j, k, _ = perturb_gamma
        if not all(1 <= t <= ms.dim for t in (i, j, k)):
            raise click.UsageError(f"--perturb-gamma indices must lie in 1..{ms.dim}")
        try:
            parse_expr(perturb_gamma[3], ms.coords)
        except SymexprError as err:
            raise click.UsageError(f"--perturb-gamma: {err}") from None
    rep = run_verify(ms, seed=seed, numeric_fallback=numeric_fallback, perturb_gamma=perturb_gamma)
    click.echo(emit_report(rep, fmt, timing=timing), nl=False)
    sys.exit(0 if rep.ok else 1)


@main.command()
@click.argument("spec")
@click.option("--a", "a", required=True, help="positive rational deformation constant")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="write the deformed spec here instead of printing it")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def deform(spec, a, out, fmt, seed):
    """Apply a D-homothetic deformation and verify the predicted (kappa, mu)."""
    ms = _load(spec)
    try:
        av = Fraction(a)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{a!r} is not a rational number", param_hint="--a") from None
    if av <= 0:
        raise click.BadParameter(f"must be positive, got {a}", param_hint="--a")
    try:
        text, rep = run_deform(ms, av, seed=seed)
    except (NullityError, FrameError) as err:
        click.echo(f"error: cannot deform {ms.name}: {err}", err=True)
        sys.exit(1)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if fmt == "json":
        doc = {"deformed_spec": text, "report": rep.to_dict()}
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        if not out:
            click.echo(text)
        click.echo(emit_report(rep, "text"), nl=False)
    sys.exit(0 if rep.ok else 1)


@main.command()
def catalog():
    """List every identity tag the verifier can report."""
    for key, title in SECTIONS:
        click.echo(f"== {title} ==")
        for e in CATALOG.values():
            if e.section == key:
                flag = " [constant kappa, mu]" if e.gated else ""
                click.echo(f"  {_label(e.tag):<20} {e.statement}{flag}")


@main.command()
def fixtures():
    """List the bundled fixtures."""
    for name in bundled_fixtures():
        click.echo(name)


if __name__ == "__main__":  # pragma: no cover
    main()
