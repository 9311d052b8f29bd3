"""Line-oriented ``.cpm`` manifold specification files.

::

    # comment
    coords: x y z
    epsilon: +1
    signature: +1 +1 +1        # or  metric: 1 2 2  (rational diagonal)
    frame e1: 1 0 0
    frame e2: 0 z^-2 0
    frame e3: 2*y*z^2, 2*x*z^-6, z^-6
    phi: 0 0 0
    phi: 0 0 -1
    phi: 0 1 0
    xi: e1
    expect_kappa: 1 - z^-8
    sample: x=1 y=2 z=3

Row entries are separated by whitespace, or by commas when any entry
contains spaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .symexpr import ExprSyntaxError, ScalarExpr, SymexprError, parse_expr

__all__ = ["SpecError", "ManifoldSpec", "parse_spec", "load_spec", "format_spec", "bundled_fixtures"]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_FRAME_KEY = re.compile(r"frame\s+e(\d+)$")


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = "" if line is None else f"line {line}" + ("" if column is None else f", column {column}") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class ManifoldSpec:
    name: str
    coords: tuple[str, ...]
    epsilon: int
    metric: tuple[Fraction, ...]
    frame: list[list[ScalarExpr]]
    phi: list[list[ScalarExpr]]
    xi: int
    expect_kappa: ScalarExpr | None = None
    expect_mu: ScalarExpr | None = None
    samples: list[dict[str, Fraction]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.coords)


def _split_row(text: str) -> list[tuple[str, int]]:
    """Split a row into (entry, offset) pairs."""
    sep = "," if "," in text else None
    out, pos = [], 0
    parts = text.split(",") if sep else re.split(r"(\s+)", text)
    for part in parts:
        if sep or not part.isspace():
            stripped = part.strip()
            if stripped:
                out.append((stripped, pos + len(part) - len(part.lstrip())))
            elif sep:
                out.append(("", pos))
        pos += len(part) + (1 if sep else 0)
    return out


def _rational(text: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"expected a rational number, got {text!r}", line, col) from None


def parse_spec(text: str, name: str = "<spec>") -> ManifoldSpec:
    coords = epsilon = metric = xi = None
    frame: dict[int, list[ScalarExpr]] = {}
    phi: list[list[ScalarExpr]] = []
    expect: dict[str, ScalarExpr] = {}
    samples: list[dict[str, Fraction]] = []
    deferred: list[tuple[str, str, int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            raise SpecError("expected 'key: value'", lineno, len(body) - len(body.lstrip()) + 1)
        key, value = body.split(":", 1)
        key = key.strip()
        vcol = len(body.split(":", 1)[0]) + 2 + (len(value) - len(value.lstrip()))
        key_col = len(body) - len(body.lstrip()) + 1
        if key == "coords":
            names = value.split()
            if not names or not all(_IDENT.match(n) for n in names):
                raise SpecError("coords must be a list of identifiers", lineno, vcol)
            if len(set(names)) != len(names):
                raise SpecError("coordinate names must be unique", lineno, vcol)
            coords = tuple(names)
        elif key == "epsilon":
            v = value.strip()
            if v not in ("+1", "1", "-1"):
                raise SpecError(f"epsilon must be +1 or -1, got {v!r}", lineno, vcol)
            epsilon = int(v)
        elif key == "signature":
            entries = value.split()
            if any(e not in ("+1", "1", "-1") for e in entries):
                raise SpecError("signature entries must be +1 or -1", lineno, vcol)
            metric = tuple(Fraction(int(e)) for e in entries)
        elif key == "metric":
            metric = tuple(_rational(e, lineno, vcol + off) for e, off in _split_row(value.strip()))
            if any(m == 0 for m in metric):
                raise SpecError("metric entries must be nonzero", lineno, vcol)
        elif key == "xi":
            m = re.fullmatch(r"\s*e(\d+)\s*", value)
            if not m or int(m.group(1)) < 1:
                raise SpecError("xi must name a frame vector, e.g. 'xi: e1'", lineno, vcol)
            xi = int(m.group(1)) - 1
        elif key in ("frame", "phi", "expect_kappa", "expect_mu") or _FRAME_KEY.match(key):
            deferred.append((key, value, lineno, vcol))
        elif key == "sample":
            deferred.append((key, value, lineno, vcol))
        else:
            raise SpecError(f"unknown key {key!r}", lineno, key_col)

    if coords is None:
        raise SpecError("missing 'coords:' line")
    d = len(coords)
    if d % 2 != 1:
        raise SpecError(f"dimension must be odd (2n+1), got {d} coordinates")
    if epsilon is None:
        raise SpecError("missing 'epsilon:' line")
    if metric is None:
        raise SpecError("missing 'signature:' or 'metric:' line")
    if len(metric) != d:
        raise SpecError(f"signature has {len(metric)} entries, expected {d}")
    if xi is None:
        raise SpecError("missing 'xi:' line")
    if xi >= d:
        raise SpecError(f"xi = e{xi + 1} is out of range for dimension {d}")

    def expr(text: str, line: int, col: int) -> ScalarExpr:
        try:
            return parse_expr(text, coords)
        except ExprSyntaxError as err:
            raise SpecError(str(err), line, col + err.pos) from None
        except SymexprError as err:
            raise SpecError(str(err), line, col) from None

    def row(value: str, line: int, col: int) -> list[ScalarExpr]:
        entries = _split_row(value.strip())
        if len(entries) != d:
            raise SpecError(f"expected {d} entries, got {len(entries)}", line, col)
        return [expr(e, line, col + off) for e, off in entries]

    for key, value, line, col in deferred:
        m = _FRAME_KEY.match(key)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= d:
                raise SpecError(f"frame index e{k} out of range", line, 1)
            if k - 1 in frame:
                raise SpecError(f"frame vector e{k} given twice", line, 1)
            frame[k - 1] = row(value, line, col)
        elif key == "frame":
            raise SpecError("frame lines need a vector name, e.g. 'frame e1: ...'", line, 1)
        elif key == "phi":
            phi.append(row(value, line, col))
        elif key == "sample":
            pt = {}
            for item, off in _split_row(value.strip()):
                if "=" not in item:
                    raise SpecError(f"sample entries look like x=1, got {item!r}", line, col + off)
                cname, v = item.split("=", 1)
                if cname not in coords:
                    raise SpecError(f"unknown coordinate {cname!r} in sample", line, col + off)
                pt[cname] = _rational(v, line, col + off)
            if set(pt) != set(coords):
                raise SpecError("sample must assign every coordinate", line, col)
            samples.append(pt)
        else:
            expect[key] = expr(value.strip(), line, col)

    missing = [f"e{i + 1}" for i in range(d) if i not in frame]
    if missing:
        raise SpecError(f"missing frame vectors {missing}")
    if len(phi) != d:
        raise SpecError(f"phi needs {d} rows, got {len(phi)}")
    return ManifoldSpec(
        name=name, coords=coords, epsilon=epsilon, metric=metric,
        frame=[frame[i] for i in range(d)], phi=phi, xi=xi,
        expect_kappa=expect.get("expect_kappa"), expect_mu=expect.get("expect_mu"), samples=samples,
    )


def bundled_fixtures() -> list[str]:
    root = resources.files("kmucontact") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cpm"))


def load_spec(path_or_name: str) -> ManifoldSpec:
    """Read a spec from a path, or from the bundled fixtures by (stem) name."""
    p = Path(path_or_name)
    if p.is_file():
        return parse_spec(p.read_text(encoding="utf-8"), name=p.stem)
    root = resources.files("kmucontact") / "fixtures"
    for candidate in (path_or_name, path_or_name + ".cpm"):
        f = root / candidate
        if f.is_file():
            return parse_spec(f.read_text(encoding="utf-8"), name=Path(candidate).stem)
    raise FileNotFoundError(f"no spec file or bundled fixture named {path_or_name!r}")


def _fmt_number(q: Fraction) -> str:
    return str(q)


def format_spec(spec: ManifoldSpec, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append("coords: " + " ".join(spec.coords))
    lines.append(f"epsilon: {spec.epsilon:+d}")
    if all(abs(m) == 1 for m in spec.metric):
        lines.append("signature: " + " ".join(f"{int(m):+d}" for m in spec.metric))
    else:
        lines.append("metric: " + " ".join(_fmt_number(m) for m in spec.metric))
    for i, v in enumerate(spec.frame):
        lines.append(f"frame e{i + 1}: " + ", ".join(str(e) for e in v))
    for r in spec.phi:
        lines.append("phi: " + ", ".join(str(e) for e in r))
    lines.append(f"xi: e{spec.xi + 1}")
    if spec.expect_kappa is not None:
        lines.append(f"expect_kappa: {spec.expect_kappa}")
    if spec.expect_mu is not None:
        lines.append(f"expect_mu: {spec.expect_mu}")
    for pt in spec.samples:
        lines.append("sample: " + " ".join(f"{c}={pt[c]}" for c in spec.coords))
    return "\n".join(lines) + "\n"
