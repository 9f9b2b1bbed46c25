"""Command-line front end.

    diffspaces transform --seq "expr:1/(k+1)" --band 1,-2,1 --lambda arithmetic:1,1
    diffspaces classify  --space domain:c0 --seq thm5 --N 100000
    diffspaces dual      --dual beta --space c0 --a "expr:2^(-k)"
    diffspaces matclass  --thm 17 --A "diagonal:2^(-n)"
    diffspaces selfcheck --seed 7

Reports go to stdout as JSON (schema ``diffspaces.report/v1``); warnings
go to stderr.  Exit status: 0 on success (Inconclusive verdicts included),
2 on a spec or usage error, 3 when a precondition is violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .basis import basis_vector, error_table
from .core import (BandParams, DiffSpacesError, LambdaSeq, Membership, NotConvergentError, RealSeq,
                   SpecError, Tolerances, random_band_params, validate_lambda)
from .duals import DEFAULT_SCHEDULE, dual_check, pairing_test, product_identity_test
from .expr import compile_expr
from .matclass import THEOREMS, InfiniteMatrix, MatrixEvaluator, class_verdict, partial_sum_identity
from .spaces import SpaceTag, classify_base, classify_domain, inclusion_check, thm6_z, witness
from .transform import forward, inverse, norms, roundtrip_error
from .trend import jsonable
from .triangles import (band_inverse, catalog, compose, lambda_mean, lambda_mean_inverse, triple_band,
                        what_matrix)

SCHEMA = "diffspaces.report/v1"
EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION = 0, 2, 3

__all__ = ["RunConfig", "Report", "parse_spec", "parse_band", "parse_lambda", "parse_sequence",
           "parse_matrix", "dispatch", "selfcheck", "main", "SCHEMA"]


# ---------------------------------------------------------------------------
# spec grammar


def _split_kind(text: str) -> tuple[str, str, int]:
    text = text.strip()
    if ":" in text:
        kind, rest = text.split(":", 1)
        return kind.strip(), rest, len(kind) + 1
    return text, "", len(text)


def _numbers(args: str, text: str, offset: int, count: Optional[int] = None) -> list[float]:
    out, pos = [], offset
    for part in args.split(","):
        try:
            out.append(float(part))
        except ValueError:
            raise SpecError(f"expected a number, got {part.strip()!r}", text, pos) from None
        pos += len(part) + 1
    if count is not None and len(out) != count:
        raise SpecError(f"expected {count} comma-separated numbers", text, offset)
    return out


def parse_band(text: str) -> BandParams:
    """``r,s,t`` (a leading ``band:`` is accepted)."""
    body = text.strip()
    offset = 0
    if body.startswith("band:"):
        body, offset = body[5:], 5
    r, s, t = _numbers(body, text, offset, 3)
    p = BandParams(r, s, t)
    if p.r == 0.0:
        raise SpecError("r must be nonzero for B(r, s, t) to be invertible", text, offset)
    return p


def parse_lambda(text: str, check: int = 4096) -> LambdaSeq:
    """``arithmetic:a,b`` | ``log`` | ``squares`` | ``values:l0,l1,...`` | ``expr:<in k>``."""
    kind, args, offset = _split_kind(text)
    if kind == "arithmetic":
        a, b = _numbers(args, text, offset, 2)
        lam = LambdaSeq.arithmetic(a, b)
    elif kind == "log":
        lam = LambdaSeq.from_function(lambda k: np.log(k + 2.0), label="log")
    elif kind == "squares":
        lam = LambdaSeq.from_function(lambda k: (k + 1.0) ** 2, label="squares")
    elif kind == "values":
        lam = LambdaSeq.from_values(_numbers(args, text, offset), label=text.strip())
    elif kind == "expr":
        fn = _compile(args, text, offset, ("k",))
        lam = LambdaSeq.from_function(fn, label=text.strip())
    else:
        raise SpecError(f"unknown lambda kind {kind!r}", text, 0)
    n = check if lam.limit is None else max(2, lam.limit - 1)
    verdict = validate_lambda(lam, n)
    if verdict.status is Membership.NON_MEMBER:
        first = verdict.evidence.get("first_failure")
        raise SpecError(f"lambda must be positive and strictly increasing (fails at index {first})", text, 0)
    return lam


def _compile(expr: str, text: str, offset: int, variables):
    try:
        return compile_expr(expr, variables)
    except SpecError as exc:
        pos = offset + (exc.position or 0)
        raise SpecError(str(exc).split(" (at position")[0], text, pos) from None


def parse_sequence(text: str, p: Optional[BandParams] = None, lam: Optional[LambdaSeq] = None) -> RealSeq:
    """``expr:<in k>`` | ``values:x0,x1,...`` | ``const:c`` | ``zero`` | ``unit:j`` |
    witness names (``thm4``, ``thm5``, ``thm7``, ``e``, ``e_k(j)``) | ``thm6_z``."""
    kind, args, offset = _split_kind(text)
    label = text.strip()
    if kind == "expr":
        fn = _compile(args, text, offset, ("k",))
        return RealSeq.from_function(fn, label=label)
    if kind == "values":
        return RealSeq.from_values(_numbers(args, text, offset), label=label)
    if kind == "const":
        return RealSeq.constant(_numbers(args, text, offset, 1)[0])
    if kind == "zero":
        return RealSeq.zero()
    if kind == "thm6_z":
        if p is None or lam is None:
            raise SpecError("thm6_z needs band parameters and lambda", text, 0)
        return thm6_z(p, lam)
    try:
        return witness(label, p)
    except ValueError as exc:
        raise SpecError(f"unknown sequence spec: {exc}", text, 0) from None


def parse_matrix(text: str, p: Optional[BandParams] = None, lam: Optional[LambdaSeq] = None) -> InfiniteMatrix:
    """Matrix specs.

    ``zero`` | ``identity`` | ``band:r,s,t`` | ``band-inverse[:r,s,t]`` |
    ``lambda-mean[:<lambda>]`` | ``lambda-mean-inverse[:<lambda>]`` | ``what[:r,s,t]`` |
    ``diagonal:<expr in n>`` | ``rows:<expr in n, k>`` | ``file:<csv path>`` |
    catalog kinds ``cesaro``, ``summation``, ``diff1``, ``diffm:m``, ``euler:r``,
    ``band2:r,s``, ``riesz:<q expr>``, ``a_r_u:r;<u expr>``, ``factorable:<u>;<v>``.
    """
    kind, args, offset = _split_kind(text)
    tri = None
    if kind == "zero":
        return InfiniteMatrix.zero()
    if kind == "identity":
        return InfiniteMatrix.diagonal(RealSeq.constant(1.0))
    if kind == "diagonal":
        fn = _compile(args, text, offset, ("n", "k"))
        return InfiniteMatrix.diagonal(RealSeq.from_function(lambda n: fn(n, n), label=text.strip()))
    if kind == "rows":
        fn = _compile(args, text, offset, ("n", "k"))
        return InfiniteMatrix.from_function(fn, label=text.strip())
    if kind == "file":
        try:
            values = np.loadtxt(args.strip(), delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise SpecError(f"cannot read matrix file: {exc}", text, offset) from None
        return InfiniteMatrix.from_dense(values, label=text.strip())
    band_like = lambda: parse_band(args) if args else _need(p, "band parameters", text)
    lam_like = lambda: parse_lambda(args) if args else _need(lam, "lambda", text)
    if kind == "band":
        tri = triple_band(band_like())
    elif kind == "band-inverse":
        tri = band_inverse(band_like())
    elif kind == "lambda-mean":
        tri = lambda_mean(lam_like())
    elif kind == "lambda-mean-inverse":
        tri = lambda_mean_inverse(lam_like())
    elif kind == "what":
        tri = what_matrix(band_like(), _need(lam, "lambda", text))
    elif kind in ("cesaro", "summation", "diff1"):
        tri = catalog(kind)
    elif kind == "diffm":
        tri = catalog(kind, m=_numbers(args, text, offset, 1)[0])
    elif kind == "euler":
        tri = catalog(kind, r=_numbers(args, text, offset, 1)[0])
    elif kind == "band2":
        r, s = _numbers(args, text, offset, 2)
        tri = catalog(kind, r=r, s=s)
    elif kind == "riesz":
        tri = catalog(kind, q=RealSeq.from_function(_compile(args, text, offset, ("k",)), label=args))
    elif kind in ("a_r_u", "factorable"):
        parts = args.split(";")
        if len(parts) != 2:
            raise SpecError(f"{kind} needs two ';'-separated arguments", text, offset)
        first, second = parts
        if kind == "a_r_u":
            r = _numbers(first, text, offset, 1)[0]
            u = RealSeq.from_function(_compile(second, text, offset + len(first) + 1, ("k",)), label=second)
            tri = catalog(kind, r=r, u=u)
        else:
            u = RealSeq.from_function(_compile(first, text, offset, ("k",)), label=first)
            v = RealSeq.from_function(_compile(second, text, offset + len(first) + 1, ("k",)), label=second)
            tri = catalog(kind, u=u, v=v)
    else:
        raise SpecError(f"unknown matrix kind {kind!r}", text, 0)
    return InfiniteMatrix.from_triangle(tri)


def _need(value, what: str, text: str):
    if value is None:
        raise SpecError(f"this spec needs {what}", text, 0)
    return value


def parse_spec(text: str, role: str = "sequence", p: Optional[BandParams] = None,
               lam: Optional[LambdaSeq] = None):
    """Parse ``text`` as a ``sequence``, ``lambda``, ``matrix`` or ``band`` spec."""
    if role == "sequence":
        return parse_sequence(text, p, lam)
    if role == "lambda":
        return parse_lambda(text)
    if role == "matrix":
        return parse_matrix(text, p, lam)
    if role == "band":
        return parse_band(text)
    raise ValueError(f"unknown spec role {role!r}")


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass
class RunConfig:
    band: str = "1,-2,1"
    lam: str = "arithmetic:1,1"
    tolerances: dict = field(default_factory=dict)
    schedule: list = field(default_factory=lambda: list(DEFAULT_SCHEDULE))
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.format not in ("json", "csv", "table"):
            raise ValueError("format must be json, csv or table")
        self.schedule = [int(v) for v in self.schedule]
        self.tolerances = {k: self.tolerances[k] for k in sorted(self.tolerances)}

    def band_params(self) -> BandParams:
        return parse_band(self.band)

    def lambda_seq(self) -> LambdaSeq:
        return parse_lambda(self.lam)

    def tol(self) -> Tolerances:
        return Tolerances.from_env(**self.tolerances)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        unknown = set(data) - {"band", "lam", "tolerances", "schedule", "format", "seed"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    warnings: list = field(default_factory=list)
    schema: str = SCHEMA

    def to_dict(self) -> dict:
        return jsonable({"schema": self.schema, "version": __version__, "command": self.command,
                         "inputs": self.inputs, "results": self.results, "warnings": self.warnings})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)


def _collect_inconclusive(obj, path="results") -> list[str]:
    found = []
    if isinstance(obj, dict):
        for key in ("verdict", "status"):
            if obj.get(key) == Membership.INCONCLUSIVE.value:
                found.append(f"{path}: verdict is Inconclusive at this truncation")
        for k, v in obj.items():
            found.extend(_collect_inconclusive(v, f"{path}.{k}"))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            found.extend(_collect_inconclusive(v, f"{path}[{i}]"))
    return found


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


class PreconditionError(DiffSpacesError):
    """A stated precondition was classified NonMember."""


def _cmd_transform(args, cfg: RunConfig, inverse_map: bool = False):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    seq = parse_sequence(args.seq, p, lam)
    N = args.N or 64
    values = inverse(p, lam, seq, N) if inverse_map else forward(p, lam, seq, N)
    summary = {"N": N, **norms(values)}
    results = {"summary": summary, "values": values}
    csv_text = _csv(enumerate(values.tolist()), ["n", "value"])
    return {"seq": args.seq, "N": N}, results, csv_text


def _cmd_classify(args, cfg: RunConfig):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    tol = cfg.tol()
    N = args.N or tol.N_default
    inputs = {"N": N}
    if args.theorem is not None:
        rep = inclusion_check(args.theorem, p, lam, N, tol, seed=cfg.seed, p_exp=args.p)
        inputs["theorem"] = args.theorem
        if not rep.hypothesis_ok:
            raise PreconditionError(f"hypotheses of theorem {args.theorem} do not hold: {rep.hypotheses}")
        return inputs, rep.to_dict(), None
    if not args.seq or not args.space:
        raise SpecError("classify needs --seq and --space (or --theorem)")
    tag = SpaceTag.parse(args.space)
    seq = parse_sequence(args.seq, p, lam)
    inputs.update({"seq": args.seq, "space": str(tag)})
    diag = classify_domain(seq, tag, p, lam, N, tol) if tag.wrapped else classify_base(seq, tag, N, tol)
    return inputs, diag.to_dict(), None


def _cmd_basis(args, cfg: RunConfig):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    N = args.N or 64
    results, csv_text = {}, None
    if args.k is not None:
        vec = basis_vector(p, lam, args.k).prefix(N)
        results["basis_vector"] = {"k": args.k, "values": vec}
        csv_text = _csv(enumerate(vec.tolist()), ["n", f"b({args.k})"])
    if args.seq:
        table = error_table(p, lam, parse_sequence(args.seq, p, lam), N)
        results["error_table"] = [{"m": m, "domain_norm_error": e} for m, e in table]
        csv_text = _csv(table, ["m", "domain_norm_error"])
    if not results:
        raise SpecError("basis needs --k and/or --seq")
    return {"k": args.k, "seq": args.seq, "N": N}, results, csv_text


def _cmd_dual(args, cfg: RunConfig):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    a = parse_sequence(args.a, p, lam)
    rep = dual_check(args.dual, args.space, p, lam, a, cfg.schedule, cfg.tol())
    return {"dual": args.dual, "space": args.space, "a": args.a}, rep.to_dict(), None


def _cmd_matclass(args, cfg: RunConfig):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    A = parse_matrix(args.A, p, lam)
    ev = MatrixEvaluator(A, p, lam, cfg.schedule, cfg.tol())
    conds = [c for c in args.conditions.split(",") if c.strip()] if args.conditions else None
    if args.thm is None and conds is None:
        raise SpecError("matclass needs --thm or --conditions")
    if conds is not None and args.thm is None:
        records = [ev.condition(c, None, args.p) for c in conds]
        verdict = Membership.conjunction(r.verdict for r in records)
        results = {"verdict": verdict.value, "conditions": [r.to_dict() for r in records]}
    else:
        results = class_verdict(args.thm, A, p, lam, cfg.schedule, args.p, evaluator=ev,
                                conditions=conds).to_dict()
    return {"A": args.A, "thm": args.thm, "conditions": args.conditions, "p": args.p}, results, None


def _cmd_witness(args, cfg: RunConfig):
    p, lam = cfg.band_params(), cfg.lambda_seq()
    N = args.N or 32
    seq = parse_sequence(args.name, p, lam)
    values = seq.prefix(N)
    return {"name": args.name, "N": N}, {"values": values}, _csv(enumerate(values.tolist()), ["n", "value"])


def _fmt(x: float) -> str:
    return f"{x:.3e}"


def selfcheck(seed: int = 0, tol: Optional[Tolerances] = None) -> dict:
    """Run the identity suite on seeded random inputs; returns pass counts."""
    from .basis import basis_matrix

    rng = np.random.default_rng(seed)
    cases = ("complex", "double", "distinct")
    params = [random_band_params(rng, 1.2, cases[i % 3]) for i in range(9)]
    lams = [LambdaSeq.arithmetic(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))) for _ in range(3)]
    lams.append(LambdaSeq.from_function(lambda k: (k + 1.0) ** 2, label="squares"))
    checks = {}

    def record(name, errors, bound):
        errors = [float(e) for e in errors]
        checks[name] = {"cases": len(errors), "passed": sum(e < bound for e in errors),
                        "bound": bound, "max_error": _fmt(max(errors))}

    N = 64
    eye = np.eye(N)
    record("band_inverse", [np.max(np.abs(triple_band(p).dense(N) @ band_inverse(p).dense(N) - eye))
                            for p in params], 1e-9)
    record("lambda_mean_inverse", [np.max(np.abs(lambda_mean(l).dense(N) @ lambda_mean_inverse(l).dense(N) - eye))
                                   for l in lams], 1e-9)
    record("factorization", [np.max(np.abs(what_matrix(p, l).dense(N) - compose(lambda_mean(l), triple_band(p)).dense(N)))
                             for p in params for l in lams[:2]], 1e-12)
    # amplification of rounding in the inverse grows like rho^N, so N = 200 needs rho near 1
    stable = [random_band_params(rng, 1.0, c) for c in cases] + [BandParams(1, -2, 1), BandParams(1, -1, 0)]
    record("round_trip", [roundtrip_error(p, lams[i % len(lams)], rng.uniform(-1, 1, 200), 200)
                          for i, p in enumerate(stable)], 1e-8)
    pair, prod, part = [], [], []
    for i, p in enumerate(params):
        l = lams[i % len(lams)]
        a, x = rng.normal(size=50), rng.normal(size=50)
        prod.append(product_identity_test(p, l, a, x, 50))
        pair.append(pairing_test(p, l, a, x, 50))
        part.append(partial_sum_identity(InfiniteMatrix.from_dense(rng.normal(size=(8, 50))), p, l, x, 50, 8))
    record("product_identity", prod, 1e-8)
    record("pairing_identity", pair, 1e-8)
    record("partial_sum_identity", part, 1e-8)
    basis_err = []
    for i, p in enumerate(params):
        l = lams[i % len(lams)]
        Bb = basis_matrix(p, l, 40)
        Y = np.column_stack([forward(p, l, Bb[:, k], 40) for k in range(21)])
        basis_err.append(np.max(np.abs(Y - np.eye(40)[:, :21])))
    record("basis_duality", basis_err, 1e-10)
    total = sum(c["cases"] for c in checks.values())
    passed = sum(c["passed"] for c in checks.values())
    return {"seed": seed, "checks": checks, "passed": passed, "total": total, "ok": passed == total}


def _cmd_selfcheck(args, cfg: RunConfig):
    return {"seed": cfg.seed}, selfcheck(cfg.seed, cfg.tol()), None


_COMMANDS = {
    "transform": lambda a, c: _cmd_transform(a, c, False),
    "invert": lambda a, c: _cmd_transform(a, c, True),
    "classify": _cmd_classify,
    "basis": _cmd_basis,
    "dual": _cmd_dual,
    "matclass": _cmd_matclass,
    "witness": _cmd_witness,
    "selfcheck": _cmd_selfcheck,
}


def dispatch(command: str, args: argparse.Namespace, cfg: RunConfig) -> tuple[Report, Optional[str]]:
    """Run one command; returns the report and optional CSV text."""
    if command not in _COMMANDS:
        raise SpecError(f"unknown command {command!r}")
    inputs, results, csv_text = _COMMANDS[command](args, cfg)
    inputs = {**inputs, "config": json.loads(cfg.to_json())}
    report = Report(command, inputs, jsonable(results))
    report.warnings = _collect_inconclusive(report.to_dict()["results"])
    return report, csv_text


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--band", help="r,s,t (default 1,-2,1)")
    common.add_argument("--lambda", dest="lam", help="lambda spec (default arithmetic:1,1)")
    common.add_argument("--schedule", help="comma-separated truncations (default 64,128,256,512)")
    common.add_argument("--format", choices=("json", "csv", "table"))
    common.add_argument("--seed", type=int)
    common.add_argument("--N", type=int, help="truncation length")
    common.add_argument("--emit-config", action="store_true", help="print the effective config and exit")

    parser = argparse.ArgumentParser(prog="diffspaces", description="Generalized difference sequence spaces toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("transform", "invert"):
        sp = sub.add_parser(name, parents=[common], help=f"{name} a sequence")
        sp.add_argument("--seq", required=True)
    sp = sub.add_parser("classify", parents=[common], help="classify a sequence or run an inclusion check")
    sp.add_argument("--seq")
    sp.add_argument("--space", help="c0, c, linf, lp:P, optionally prefixed by domain:")
    sp.add_argument("--theorem", type=int, choices=(4, 5, 6, 7))
    sp.add_argument("--p", type=float, default=2.0)
    sp = sub.add_parser("basis", parents=[common], help="basis vectors and reconstruction error")
    sp.add_argument("--k", type=int)
    sp.add_argument("--seq")
    sp = sub.add_parser("dual", parents=[common], help="dual-set membership")
    sp.add_argument("--dual", required=True, choices=("alpha", "beta", "gamma"))
    sp.add_argument("--space", required=True)
    sp.add_argument("--a", required=True)
    sp = sub.add_parser("matclass", parents=[common], help="matrix class conditions")
    sp.add_argument("--thm", choices=sorted(THEOREMS))
    sp.add_argument("--A", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--conditions")
    sp = sub.add_parser("witness", parents=[common], help="print a witness sequence")
    sp.add_argument("--name", required=True)
    sub.add_parser("selfcheck", parents=[common], help="run the identity suite")
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = RunConfig.from_json(fh.read())
    if args.band:
        cfg.band = args.band
    if args.lam:
        cfg.lam = args.lam
    if args.schedule:
        cfg.schedule = [int(v) for v in args.schedule.split(",")]
    if args.format:
        cfg.format = args.format
    if args.seed is not None:
        cfg.seed = args.seed
    return RunConfig(**asdict(cfg))


def _table(report: dict) -> str:
    lines = []

    def walk(obj, prefix):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(obj[k], f"{prefix}.{k}" if prefix else k)
        elif isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
            for i, v in enumerate(obj):
                walk(v, f"{prefix}[{v.get('id', i)}]")
        elif isinstance(obj, list) and len(obj) > 8:
            lines.append(f"{prefix:<48} [{len(obj)} values]")
        else:
            lines.append(f"{prefix:<48} {obj}")

    walk(report["results"], "")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        cfg = _config(args)
        if args.emit_config:
            stdout.write(cfg.to_json() + "\n")
            return EXIT_OK
        report, csv_text = dispatch(args.command, args, cfg)
    except (SpecError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (PreconditionError, NotConvergentError) as exc:
        stderr.write(f"precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    for w in report.warnings:
        stderr.write(f"warning: {w}\n")
    if cfg.format == "csv" and csv_text is not None:
        stdout.write(csv_text)
    elif cfg.format == "table":
        stdout.write(_table(report.to_dict()))
    else:
        stdout.write(report.to_json() + "\n")
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
