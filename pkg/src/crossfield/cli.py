"""Command-line front end.

Fields travel in small UTF-8 documents (key: value header, then the field
expression), automorphisms in map documents; commands dispatch onto the
library and print either aligned text or versioned JSON ("schema": 1).
Reports are byte-deterministic for identical inputs: keys are emitted in a
fixed order, all algebraic values are exact canonical strings, and the only
floats (holonomy, conjugacy residuals) are formatted to 12 significant
digits.

Exit codes: 0 success, 1 a mathematical finding flagged as a failure (a
noncommuting pair under check-commute, a centralizer monomial violating the
no-negative-resonance expectation, a conjugacy residual over the bound), 2
usage errors including syntax errors with positions.
"""

from __future__ import annotations

import argparse
import json
import sys

from .coeff import CoefficientSyntaxError, GaussianRational
from .holonomy import (
    HolonomyJet,
    IntegrationError,
    LeafEscapeError,
    conjugacy_residual,
    holonomy_jet,
)
from .lie import (
    Automorphism,
    NotNilpotentError,
    NotTangentToIdentityError,
    SingularLinearPartError,
    VectorField,
    exp,
    log,
)
from .normalform import (
    LinearPartError,
    centralizer_check,
    normalize,
)
from .parsing import FieldSyntaxError, parse_field, parse_series
from .resonance import (
    classify_dim2,
    classify_dim3,
    decide_ntnr,
    enumerate_resonances,
)
from .series import DimensionMismatchError, TransverseSeries

__all__ = ["main", "FieldDocument", "MapDocument", "DocumentError"]


class DocumentError(ValueError):
    """Malformed field or map document."""


class Finding(Exception):
    """A mathematical result flagged as a failure (exit code 1)."""


def _fmt_float(v: float) -> str:
    return format(float(v), ".12g")


def _fmt_complex(v: complex) -> dict:
    return {"re": _fmt_float(v.real), "im": _fmt_float(v.imag)}


class FieldDocument:
    """n / degree / optional x-cap, mu, name, plus the field expression."""

    def __init__(self, n, degree, field_text, field_line, x_cap=None, mu=None, name=None):
        self.n = n
        self.degree = degree
        self.field_text = field_text
        self.field_line = field_line
        self.x_cap = x_cap
        self.mu = mu
        self.name = name

    @classmethod
    def parse(cls, text: str, source: str = "<document>") -> "FieldDocument":
        header = {}
        field_text = None
        field_line = 0
        lines = text.splitlines()
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise DocumentError(
                    f"{source}:{lineno}: expected 'key: value', found {raw!r}"
                )
            key, _, value = line.partition(":")
            key = key.strip().lower()
            value = value.strip()
            if key == "field":
                rest = [value] + lines[lineno:]
                field_text = "\n".join(rest)
                field_line = lineno
                break
            header[key] = (value, lineno)
        if field_text is None:
            raise DocumentError(f"{source}: missing 'field:' entry")
        for key in ("n", "degree"):
            if key not in header:
                raise DocumentError(f"{source}: missing '{key}:' entry")
        n = _int_header(header, "n", source)
        degree = _int_header(header, "degree", source)
        x_cap = _int_header(header, "x-cap", source) if "x-cap" in header else None
        mu = None
        if "mu" in header:
            raw, lineno = header["mu"]
            try:
                mu = tuple(
                    GaussianRational.from_string(part) for part in raw.split(",")
                )
            except CoefficientSyntaxError as e:
                raise DocumentError(f"{source}:{lineno}: bad mu value: {e}")
            if len(mu) != n:
                raise DocumentError(
                    f"{source}:{lineno}: mu lists {len(mu)} values for n = {n}"
                )
        name = header.get("name", (None, 0))[0]
        return cls(n, degree, field_text, field_line, x_cap=x_cap, mu=mu, name=name)

    def field(self, degree=None) -> VectorField:
        cap = degree if degree is not None else self.degree
        raw_col = len("field:") + 1
        return parse_field(
            self.field_text,
            self.n,
            cap,
            line_offset=self.field_line - 1,
            col_offset=raw_col,
        )


def _int_header(header, key, source):
    raw, lineno = header[key]
    try:
        return int(raw)
    except ValueError:
        raise DocumentError(f"{source}:{lineno}: '{key}' must be an integer, got {raw!r}")


class MapDocument:
    """n / degree header plus 'map z<k>: expression' lines (and 'map x: x')."""

    def __init__(self, n, degree, images):
        self.n = n
        self.degree = degree
        self.images = images

    @classmethod
    def parse(cls, text: str, source: str = "<map>") -> "MapDocument":
        header = {}
        maps = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise DocumentError(
                    f"{source}:{lineno}: expected 'key: value', found {raw!r}"
                )
            key, _, value = line.partition(":")
            key = key.strip().lower()
            value = value.strip()
            if key.startswith("map "):
                maps[key[4:].strip()] = (value, lineno)
            else:
                header[key] = (value, lineno)
        for key in ("n", "degree"):
            if key not in header:
                raise DocumentError(f"{source}: missing '{key}:' entry")
        n = _int_header(header, "n", source)
        degree = _int_header(header, "degree", source)
        images = {}
        for var, (expr, lineno) in maps.items():
            if var == "x":
                if expr.replace(" ", "") != "x":
                    raise DocumentError(
                        f"{source}:{lineno}: only 'map x: x' is supported"
                    )
                continue
            if not (var.startswith("z") and var[1:].isdigit()):
                raise DocumentError(f"{source}:{lineno}: unknown map target {var!r}")
            idx = int(var[1:])
            if not 1 <= idx <= n:
                raise DocumentError(
                    f"{source}:{lineno}: map target {var!r} out of range (n = {n})"
                )
            images[idx] = parse_series(expr, n, degree, line_offset=lineno - 1,
                                       col_offset=len(f"map {var}:") + 1)
        for idx in range(1, n + 1):
            if idx not in images:
                raise DocumentError(f"{source}: missing 'map z{idx}:' entry")
        return cls(n, degree, images)

    def automorphism(self) -> Automorphism:
        return Automorphism(
            TransverseSeries.x_series(self.n, self.degree),
            [self.images[i] for i in range(1, self.n + 1)],
        )


# --- rendering ---------------------------------------------------------------


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return
    for key, value in report.items():
        if key == "schema":
            continue
        sys.stdout.write(_text_block(key, value))


def _text_block(key, value, indent="") -> str:
    if isinstance(value, dict):
        out = f"{indent}{key}:\n"
        for k, v in value.items():
            out += _text_block(k, v, indent + "  ")
        return out
    if isinstance(value, list):
        if not value:
            return f"{indent}{key}: (none)\n"
        out = f"{indent}{key}:\n"
        for item in value:
            if isinstance(item, dict):
                flat = ", ".join(f"{k}={_flat(v)}" for k, v in item.items())
                out += f"{indent}  - {flat}\n"
            else:
                out += f"{indent}  - {_flat(item)}\n"
        return out
    return f"{indent}{key}: {_flat(value)}\n"


def _flat(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_flat(x)}" for k, x in v.items()) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    return str(v)


# --- command helpers -----------------------------------------------------------


def _load_document(args) -> FieldDocument:
    path = args.field
    if path is None:
        raise DocumentError("this command requires --field <path>")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}")
    return FieldDocument.parse(text, source=path)


def _load_field(args, use_degree_flag=False):
    doc = _load_document(args)
    cap = None
    if use_degree_flag and getattr(args, "degree", None) is not None:
        cap = args.degree
    X = doc.field(cap)
    if getattr(args, "require_x_normalized", False) and not X.is_x_normalized():
        raise DocumentError(
            "field rejected by --require-x-normalized (need x*dx, z-components "
            "in m with a constant z-linear part)"
        )
    return doc, X

def _load_map(args) -> Automorphism:
    path = args.map
    if path is None:
        raise DocumentError("this command requires --map <path>")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}")
    return MapDocument.parse(text, source=path).automorphism()


def _mu_from(args, doc=None):
    if getattr(args, "mu", None):
        try:
            return tuple(
                GaussianRational.from_string(part) for part in args.mu.split(",")
            )
        except CoefficientSyntaxError as e:
            raise DocumentError(f"bad --mu value: {e}")
    if doc is not None and doc.mu is not None:
        return doc.mu
    raise DocumentError("eigenvalues required: pass --mu or declare mu in the document")


def _coeff_arg(value: str, flag: str) -> GaussianRational:
    try:
        return GaussianRational.from_string(value)
    except CoefficientSyntaxError as e:
        raise DocumentError(f"bad {flag} value: {e}")


def _window_arg(raw: str):
    try:
        lo, hi = raw.split(",")
        return int(lo), int(hi)
    except ValueError:
        raise DocumentError(f"--x-window expects 'lo,hi', got {raw!r}")


def _validate_declared_mu(doc, X):
    if doc.mu is None:
        return
    diag = X.constant_linear_matrix()
    if diag is None:
        return
    for i, m in enumerate(doc.mu):
        if diag[i][i] != m:
            raise DocumentError(
                f"declared mu[{i+1}] = {m} does not match the linear part "
                f"diagonal {diag[i][i]}"
            )


# --- commands ------------------------------------------------------------------


def _cmd_normalize(args) -> int:
    doc, X = _load_field(args, use_degree_flag=True)
    mu = _mu_from(args, doc) if (args.mu or doc.mu) else _diagonal_mu(X)
    _validate_declared_mu(doc, X)
    x_cap = args.x_cap if args.x_cap is not None else doc.x_cap
    result = normalize(X, mu, x_cap=x_cap)
    report = {
        "schema": 1,
        "command": "normalize",
        "n": X.n,
        "degree": X.cap,
        "mu": [str(m) for m in result.mu],
        "x_window": result.x_window,
        "linear": [
            [str(p) for p in row] for row in result.normal_field.z_linear_matrix()
        ],
        "eps": list(result.eps),
        "resonant": result.resonant_json(),
        "normal_field": str(result.normal_field),
        "normalizer": {
            "x": str(result.normalizer.img_x),
            "z": [str(c) for c in result.normalizer.img_z],
        },
        "steps": [{"K": list(i.K), "j": i.j} for i in result.steps],
        "certified": result.certified,
    }
    _emit(report, args.json)
    return 0


def _diagonal_mu(X: VectorField):
    diag = X.constant_linear_matrix()
    if diag is None:
        raise DocumentError(
            "cannot infer eigenvalues from an x-dependent linear part; "
            "declare mu in the document or pass --mu"
        )
    return tuple(diag[i][i] for i in range(X.n))


def _cmd_resonances(args) -> int:
    doc = _load_document(args) if args.field else None
    mu = _mu_from(args, doc)
    degree = args.degree if args.degree is not None else 8
    report_obj = enumerate_resonances(mu, degree)
    ntnr = decide_ntnr(mu)
    witness = ntnr.witness or report_obj.witness()
    report = {
        "schema": 1,
        "command": "resonances",
        "mu": [str(m) for m in mu],
        "bound": degree,
        "resonant": [r.to_json() for r in report_obj.resonant],
        "negative": [w.to_json() for w in report_obj.negative],
        "ntnr": ntnr.holds,
        "exact": ntnr.exact,
        "witness": witness.to_json() if witness else None,
    }
    _emit(report, args.json)
    return 0


def _cmd_classify2(args) -> int:
    lam = _coeff_arg(args.lam, "--lambda")
    report = {
        "schema": 1,
        "command": "classify2",
        "lambda": str(lam),
        "case": classify_dim2(lam),
    }
    _emit(report, args.json)
    return 0


def _cmd_classify3(args) -> int:
    lam = _coeff_arg(args.lam, "--lambda")
    mu = _coeff_arg(args.mu, "--mu")
    c = classify_dim3(lam, mu)
    report = {
        "schema": 1,
        "command": "classify3",
        "lambda": str(lam),
        "mu": str(mu),
        "siegel": c.siegel,
        "case": c.case,
        "witness": c.witness,
    }
    _emit(report, args.json)
    return 0


def _cmd_centralizer(args) -> int:
    doc = _load_document(args) if args.field else None
    mu = _mu_from(args, doc)
    window = _window_arg(args.x_window)
    degree = args.degree if args.degree is not None else (doc.degree if doc else 6)
    check = centralizer_check(mu, window, degree)
    report = {
        "schema": 1,
        "command": "centralizer",
        "mu": [str(m) for m in mu],
        "x_window": list(window),
        "degree": degree,
        "ntnr": check.ntnr.holds,
        "ntnr_exact": check.ntnr.exact,
        "basis": [e.to_json() for e in check.result.elements],
        "negative": [e.to_json() for e in check.offenders],
        "taylor_centralizer_ok": check.ok,
    }
    _emit(report, args.json)
    if not check.ok:
        raise Finding("no-negative-resonance holds but the centralizer has negative x-exponents")
    return 0


def _cmd_check_commute(args) -> int:
    doc, X = _load_field(args)
    if args.field2 is None:
        raise DocumentError("check-commute requires --field2 <path>")
    try:
        with open(args.field2, "r", encoding="utf-8") as fh:
            text2 = fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {args.field2}: {e}")
    doc2 = FieldDocument.parse(text2, source=args.field2)
    if doc2.n != doc.n:
        raise DocumentError("the two fields have different n")
    Y = doc2.field(X.cap)
    br = X.bracket(Y)
    commute = br.is_zero()
    report = {
        "schema": 1,
        "command": "check-commute",
        "commute": commute,
        "bracket": str(br),
    }
    _emit(report, args.json)
    if not commute:
        raise Finding("fields do not commute")
    return 0


def _cmd_exp(args) -> int:
    doc, X = _load_field(args, use_degree_flag=True)
    t = _coeff_arg(args.time, "--time")
    x_cap = args.x_cap if args.x_cap is not None else doc.x_cap
    phi = exp(X, t, x_window=x_cap)
    report = {
        "schema": 1,
        "command": "exp",
        "time": str(t),
        "x_window": x_cap,
        "x": str(phi.img_x),
        "z": [str(c) for c in phi.img_z],
    }
    _emit(report, args.json)
    return 0


def _cmd_log(args) -> int:
    phi = _load_map(args)
    X = log(phi)
    report = {
        "schema": 1,
        "command": "log",
        "field": str(X),
        "one_flat": X.is_k_flat(1),
    }
    _emit(report, args.json)
    return 0


def _cmd_holonomy(args) -> int:
    doc, X = _load_field(args)
    if not X.is_x_normalized():
        raise DocumentError("holonomy requires an x-normalized field")
    degree = args.degree if args.degree is not None else 2
    if degree > X.cap:
        raise DocumentError(
            f"jet degree {degree} exceeds the document's truncation degree {X.cap}"
        )
    jet = holonomy_jet(X, degree, tol=args.tol, windings=args.windings)
    coeffs = {}
    for i in range(1, jet.n + 1):
        entries = []
        for K in sorted(jet.coeffs.get(i, {}), key=lambda K: (sum(K), K)):
            entries.append({"K": list(K), **_fmt_complex(jet.coeffs[i][K])})
        coeffs[f"z{i}"] = entries
    report = {
        "schema": 1,
        "command": "holonomy",
        "degree": degree,
        "tol": _fmt_float(args.tol),
        "windings": args.windings,
        "base_point": "1",
        "jet": coeffs,
    }
    _emit(report, args.json)
    return 0


def _cmd_conjugacy_check(args) -> int:
    doc, X = _load_field(args)
    psi = _load_map(args)
    degree = args.degree if args.degree is not None else 2
    if psi.cap != X.cap:
        raise DocumentError(
            f"map degree {psi.cap} does not match field degree {X.cap}"
        )
    residual = conjugacy_residual(X, psi, degree, tol=args.tol)
    ok = args.max_residual is None or residual <= args.max_residual
    report = {
        "schema": 1,
        "command": "conjugacy-check",
        "degree": degree,
        "tol": _fmt_float(args.tol),
        "residual": _fmt_float(residual),
        "max_residual": _fmt_float(args.max_residual) if args.max_residual is not None else None,
        "ok": ok,
    }
    _emit(report, args.json)
    if not ok:
        raise Finding(f"conjugacy residual {residual:.3g} exceeds the bound")
    return 0


_COMMANDS = {
    "normalize": _cmd_normalize,
    "resonances": _cmd_resonances,
    "classify2": _cmd_classify2,
    "classify3": _cmd_classify3,
    "centralizer": _cmd_centralizer,
    "check-commute": _cmd_check_commute,
    "exp": _cmd_exp,
    "log": _cmd_log,
    "holonomy": _cmd_holonomy,
    "conjugacy-check": _cmd_conjugacy_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossfield",
        description="Exact normal forms, resonance classification and numeric "
        "holonomy for crossing-type vector fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, field=False, field2=False, mapdoc=False, mu_flag=False,
            lam_flag=False, degree=False, x_cap=False, x_window=False, tol=False,
            time_flag=False, windings=False, max_residual=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if field:
            p.add_argument("--field", metavar="PATH", help="field document")
            p.add_argument(
                "--require-x-normalized",
                action="store_true",
                help="reject fields that are not x-normalized",
            )
        if field2:
            p.add_argument("--field2", metavar="PATH", help="second field document")
        if mapdoc:
            p.add_argument("--map", metavar="PATH", help="automorphism map document")
        if mu_flag:
            p.add_argument("--mu", metavar="COEFFS", help="comma-separated eigenvalues")
        if lam_flag:
            p.add_argument("--lambda", dest="lam", metavar="COEFF", required=True)
        if degree:
            p.add_argument("--degree", type=int, metavar="D")
        if x_cap:
            p.add_argument("--x-cap", dest="x_cap", type=int, metavar="M")
        if x_window:
            p.add_argument("--x-window", dest="x_window", default="-6,6", metavar="LO,HI")
        if tol:
            p.add_argument("--tol", type=float, default=1e-10, metavar="TOL")
        if time_flag:
            p.add_argument("--time", default="1", metavar="COEFF")
        if windings:
            p.add_argument("--windings", type=int, default=1, metavar="W")
        if max_residual:
            p.add_argument("--max-residual", dest="max_residual", type=float, metavar="R")
        return p

    add("normalize", "eliminate nonresonant terms and certify the conjugation",
        field=True, mu_flag=True, degree=True, x_cap=True)
    add("resonances", "resonant monomials and the negative-resonance decision",
        field=True, mu_flag=True, degree=True)
    add("classify2", "two-variable classification by the transverse eigenvalue",
        lam_flag=True)
    p3 = add("classify3", "three-variable classification of (1, lambda, mu)",
             lam_flag=True)
    p3.add_argument("--mu", metavar="COEFF", required=True)
    add("centralizer", "basis of fields commuting with the semisimple part",
        field=True, mu_flag=True, degree=True, x_window=True)
    add("check-commute", "bracket of two fields", field=True, field2=True)
    add("exp", "time-t exponential of a nilpotent field",
        field=True, time_flag=True, x_cap=True, degree=True)
    add("log", "logarithm of a tangent-to-identity map document", mapdoc=True)
    add("holonomy", "jet of the return map around the separatrix",
        field=True, degree=True, tol=True, windings=True)
    add("conjugacy-check", "holonomy conjugation residual for a map document",
        field=True, mapdoc=True, degree=True, tol=True, max_residual=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except Finding as e:
        sys.stderr.write(f"finding: {e}\n")
        return 1
    except (
        DocumentError,
        FieldSyntaxError,
        CoefficientSyntaxError,
        LinearPartError,
        DimensionMismatchError,
        NotNilpotentError,
        NotTangentToIdentityError,
        SingularLinearPartError,
        IntegrationError,
        LeafEscapeError,
        ValueError,
    ) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
