"""Command-line entry point: ``abmetric <command> --config FILE``.

Exit codes: 0 success, 1 unreadable or invalid config, 2 a precondition of
the computation failed, 3 a verification residual or verdict failed.
"""
import argparse
import sys

import numpy as np

from . import classifier as cls
from .config import load_config
from .curvature import ClosedEvaluator, analyze_point
from .errors import AbmetricError, ParseError, ValidationError
from .fixtures import direction_set
from .oracle import SOracle
from .report import SCHEMA_ID, SCHEMA_VERSION, dumps, table_csv
from .scalars import randers_type_detect, s_grid, scalar_pack, xi_profile, scalar_profile
from .suites import Check, verify_fixture
from .tolerances import PROFILES

COMMANDS = ("scalars", "analyze", "verify", "classify", "equivalence")
EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3

CONVENTIONS = {
    "Theta": "(Q - s Q') / (2 Delta)",
    "f(b)": "Busemann-Hausdorff ratio sigma_BH / sigma_alpha, 64-node Gauss-Legendre",
    "y_lowering": "y_i = a_ij y^j in the E-curvature blocks",
    "E_coefficients": "corrected: r_00 in the Omega-family terms of C1-C4, Psi' leading C2",
    "E_symmetrization": "oracle E symmetrized as (E + E^T) / 2",
}


class Run:
    """Accumulates per-fixture results, violations and errors for one command."""

    def __init__(self, command, cfg, seed, grid, profile):
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.grid = grid
        self.profile = profile
        self.tol = PROFILES[profile].with_overrides(**cfg.overrides)
        self.fixtures = []
        self.violations = []
        self.errors = []
        self.table = []

    def violation(self, fixture, name, value, tolerance):
        self.violations.append({"fixture": fixture, "name": name, "value": float(value),
                                "tolerance": float(tolerance)})

    def report(self):
        if self.errors:
            code = EXIT_PRECONDITION
        elif self.violations:
            code = EXIT_VERIFY
        else:
            code = EXIT_OK
        status = {EXIT_OK: "ok", EXIT_VERIFY: "violation", EXIT_PRECONDITION: "error"}[code]
        return {
            "schema": SCHEMA_ID,
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "tolerance_profile": self.profile,
            "tolerances": self.tol.to_dict(),
            "conventions": CONVENTIONS,
            "fixtures": self.fixtures,
            "violations": self.violations,
            "errors": self.errors,
            "status": status,
            "exit_code": code,
        }, code


def _b2_at(fx, x):
    bd = ClosedEvaluator(fx).beta(x, np.eye(fx.n)[0])
    return float(bd.b2)


def do_scalars(run, fx, entry):
    b2 = run.cfg.probe.b2 if run.cfg.probe.b2 is not None else _b2_at(fx, fx.points[0])
    grid = s_grid(b2, count=run.grid, b0=fx.phi.b0) if b2 > 0 else np.array([0.0])
    rows = []
    for s in grid:
        row = scalar_pack(fx.phi, float(s), b2, fx.n).row()
        rows.append(row)
        run.table.append({"fixture": fx.name, **row})
    out = {"b2": b2, "n": fx.n, "table": rows}
    if b2 > 0:
        out["xi_profile"] = xi_profile(fx.phi, b2, fx.n, grid, tol=run.tol.closed).to_dict()
        out["upsilon_profile"] = scalar_profile(fx.phi, b2, fx.n, grid, "Upsilon", tol=run.tol.closed).to_dict()
        out["upsilon_branch"] = cls.upsilon_branch(fx.phi, b2, fx.n, grid, run.tol.closed).to_dict()
    rt = randers_type_detect(fx.phi)
    out["randers_type"] = list(rt) if rt else None
    if run.cfg.probe.s is not None:
        out["point"] = scalar_pack(fx.phi, run.cfg.probe.s, b2, fx.n).row()
    entry["scalars"] = out


def do_analyze(run, fx, entry):
    closed = ClosedEvaluator(fx)
    so = SOracle(fx)
    reports = []
    for x in fx.points:
        for y in direction_set(fx.metric, x, max(fx.directions - 2 * fx.n, 0), run.seed):
            rep = analyze_point(fx, x, y, closed, so).to_dict()
            reports.append(rep)
            run.table.append({"fixture": fx.name, "x": " ".join(map(repr, rep["x"])),
                              "y": " ".join(map(repr, rep["y"])), "F": rep["F"],
                              "S_closed": rep["S_closed"], "S_oracle": rep["S_oracle"],
                              "S_delta": rep["S_delta"], "E_delta": rep["E_delta"],
                              "tau": rep["tau"], "sigma_bh": rep["sigma_bh"]})
    entry["curvature"] = reports


def do_verify(run, fx, entry):
    checks = verify_fixture(fx, 20, run.seed, run.tol)
    worst = cls.decomposition_identities(fx.phi, fx.n, np.linspace(-0.4, 0.4, 5) * fx.phi.b0)
    checks += [Check("decomposition", k, v, run.tol.decomposition_rel) for k, v in sorted(worst.items())]
    rows = []
    for c in checks:
        d = c.to_dict()
        rows.append(d)
        run.table.append({"fixture": fx.name, **d})
        if not c.passed:
            run.violation(fx.name, f"{c.suite}.{c.name}", c.value, c.tolerance)
    entry["checks"] = rows


def do_classify(run, fx, entry):
    out = []
    for x in fx.points:
        rep = cls.classify(fx, x, fx.directions - 2 * fx.n, run.seed, run.tol).to_dict()
        out.append(rep)
        run.table.append({"fixture": fx.name, "x": " ".join(map(repr, rep["x"])),
                          "equivalence_verdict": rep["equivalence_verdict"],
                          "xi_constant": rep["xi_constant"], "beta_form_case": rep["beta_form_case"],
                          **{f"{k}_c": v["c"] for k, v in rep["fits"].items()},
                          **{f"{k}_verdict": v["verdict"] for k, v in rep["fits"].items()}})
        if rep["equivalence_verdict"] == "violation":
            run.violation(fx.name, "isotropy_equivalence", 1.0, 0.0)
    entry["classification"] = out


def do_equivalence(run, fx, entry):
    out = []
    for x in fx.points:
        samples = cls.sample_set(fx, x, fx.directions - 2 * fx.n, run.seed)
        verdict, fits = cls.isotropy_equivalence(fx, x, samples, run.tol)
        out.append({"x": [float(v) for v in x], "verdict": verdict,
                    "fits": [f.to_dict() for f in fits] if fits else []})
        run.table.append({"fixture": fx.name, "x": " ".join(map(repr, map(float, x))), "verdict": verdict})
        if verdict == "violation":
            run.violation(fx.name, "isotropy_equivalence", 1.0, 0.0)
    entry["equivalence"] = out


HANDLERS = {
    "scalars": do_scalars,
    "analyze": do_analyze,
    "verify": do_verify,
    "classify": do_classify,
    "equivalence": do_equivalence,
}


def run(command, cfg, seed=0, grid=None, profile="fd"):
    """Execute one command over every fixture of a parsed config; returns (report, table, exit code)."""
    r = Run(command, cfg, seed, grid or cfg.probe.grid, profile)
    for fx in cfg.fixtures:
        entry = {"name": fx.name, "description": fx.describe()}
        try:
            HANDLERS[command](r, fx, entry)
        except (AbmetricError, NotImplementedError) as exc:
            r.errors.append({"fixture": fx.name, "type": type(exc).__name__, "message": str(exc)})
        r.fixtures.append(entry)
    report, code = r.report()
    return report, r.table, code


def _parse_point(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError("--point", f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="abmetric", description="Curvature invariants of (alpha, beta)-metrics.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="fixture configuration file")
    p.add_argument("--point", help="override probe points with one point 'x1,x2,...'")
    p.add_argument("--grid", type=int, help="number of s-grid points for scalar tables")
    p.add_argument("--tol-profile", choices=sorted(PROFILES), default="fd")
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.point is not None:
            point = np.asarray(_parse_point(args.point))
            for fx in cfg.fixtures:
                if point.shape != (fx.n,):
                    raise ValidationError("--point", f"{fx.name} is {fx.n}-dimensional")
                fx.points = [point]
        if args.grid is not None and args.grid < 3:
            raise ValidationError("--grid", "must be at least 3")
    except (OSError, ParseError, ValidationError) as exc:
        print(f"abmetric: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report, table, code = run(args.command, cfg, args.seed, args.grid, args.tol_profile)
    text = table_csv(table) if args.format == "csv" else dumps(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for v in report["violations"]:
        print(f"abmetric: violation {v['fixture']}: {v['name']} = {v['value']:.3g} > {v['tolerance']:.3g}",
              file=sys.stderr)
    for e in report["errors"]:
        print(f"abmetric: {e['fixture']}: {e['type']}: {e['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
