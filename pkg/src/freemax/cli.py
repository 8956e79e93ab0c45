"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 malformed input, 3
numerical failure.  Every failure also writes a JSON error record to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import dist_core as dc
from . import export, maxconv, phi_psi, randmat
from .errors import ContractError, FreemaxError, NumericalError, UnsupportedLawError
from .transforms import cauchy, psi_transform, s_transform

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_OUT = "freemax_out"

LAW_GRAMMAR = {
    "mp[:rate]": "Marchenko-Pastur law, rate 1 by default",
    "twopoint:p,a": "mass p at 0 and 1-p at a",
    "poisson:lam": "Poisson law",
    "fstable:alpha": "positive free stable law",
    "bstable:alpha": "positive Boolean stable law",
    "cstable:alpha": "positive classical stable law",
    "dirac:a": "point mass at a",
    "uniform": "uniform law on [0, 1]",
    "exponential": "exponential law of mean 1",
    "frechet:alpha": "Frechet law",
    "pareto:alpha": "Pareto law on [1, inf)",
    "dagum:alpha": "Dagum law",
    "beta:alpha": "reversed Weibull law on (-inf, 0]",
    "weibull:alpha": "Weibull law",
    "gumbel": "Gumbel law",
    "LAW@c": "LAW dilated by c > 0",
}


def _floats(text, count, name):
    try:
        vals = [float(v) for v in text.split(",")] if text else []
    except ValueError:
        raise ContractError(f"{name}: parameters must be numbers, got {text!r}") from None
    if len(vals) not in count:
        raise ContractError(f"{name}: expected {' or '.join(map(str, count))} parameter(s), got {len(vals)}")
    return vals


def parse_law(spec: str):
    """Build a law from the descriptor grammar in :data:`LAW_GRAMMAR`."""
    spec = spec.strip()
    if "@" in spec:
        inner, _, scale = spec.rpartition("@")
        (c,) = _floats(scale, (1,), "dilation")
        return dc.dilate(parse_law(inner), c)
    name, _, args = spec.partition(":")
    name = name.lower()
    builders = {
        "mp": (lambda v: dc.MarchenkoPastur(*v), (0, 1)),
        "twopoint": (lambda v: dc.TwoPoint(*v), (2,)),
        "poisson": (lambda v: dc.Poisson(*v), (1,)),
        "fstable": (lambda v: dc.FreeStablePos(*v), (1,)),
        "bstable": (lambda v: dc.BooleanStablePos(*v), (1,)),
        "cstable": (lambda v: dc.ClassicalStablePos(*v), (1,)),
        "dirac": (lambda v: dc.Dirac(*v), (1,)),
        "uniform": (lambda v: dc.Uniform01(), (0,)),
        "exponential": (lambda v: dc.Exponential(), (0,)),
        "frechet": (lambda v: dc.Frechet(*v), (1,)),
        "pareto": (lambda v: dc.Pareto(*v), (1,)),
        "dagum": (lambda v: dc.Dagum(*v), (1,)),
        "beta": (lambda v: dc.BetaLaw(*v), (1,)),
        "weibull": (lambda v: dc.Weibull(*v), (1,)),
        "gumbel": (lambda v: dc.Gumbel(), (0,)),
    }
    if name not in builders:
        raise ContractError(f"unknown law {name!r}; see 'freemax catalog'")
    build, counts = builders[name]
    return build(_floats(args, counts, name))


@dataclass
class RunConfig:
    """Parsed command line."""

    command: str
    law_spec: Optional[str] = None
    t: list = field(default_factory=list)
    n: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    grid_points: int = 512
    tolerance: Optional[float] = None
    seed: int = 0
    output_dir: str = DEFAULT_OUT
    emit_svg: bool = False
    theorem: Optional[str] = None
    kind: Optional[str] = None
    path: str = "both"
    z: list = field(default_factory=list)
    ensemble: Optional[str] = None
    dim: int = 256
    repetitions: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.tolerance is not None and not self.tolerance > 0:
            raise ContractError("tolerance must be positive")
        if self.grid_points < 64:
            raise ContractError("grid_points must be at least 64")
        if self.law_spec is not None:
            parse_law(self.law_spec)

    def law(self):
        if self.law_spec is None:
            raise ContractError(f"'{self.command}' needs --law")
        return parse_law(self.law_spec)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("usage", message, EXIT_USAGE)
        raise SystemExit(EXIT_USAGE)


def _emit_error(kind, message, code, out_dir=None):
    record = export.error_record(kind, message, code)
    print(json.dumps(record), file=sys.stderr)
    if out_dir is not None:
        try:
            export.write_json(Path(out_dir) / "error.json", {k: v for k, v in record.items() if k != "schema_version"})
        except OSError:
            pass


def build_parser() -> argparse.ArgumentParser:
    grammar = "\n".join(f"  {k:<16} {v}" for k, v in LAW_GRAMMAR.items())
    p = _Parser(
        prog="freemax",
        description="Transforms, convolution powers and max-convolutions of laws on [0, inf).",
        epilog="law descriptors:\n" + grammar,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, law=True):
        if law:
            sp.add_argument("--law", dest="law_spec", help="law descriptor, see 'freemax --help'")
        sp.add_argument("--grid", dest="grid_points", type=int, default=512, help="grid size (>= 64)")
        sp.add_argument("--out", "--csv", dest="output_dir", default=None,
                        help=f"output directory (default $FREEMAX_OUT or {DEFAULT_OUT})")
        sp.add_argument("--svg", dest="emit_svg", action="store_true", help="also write SVG plots")
        sp.add_argument("--tol", dest="tolerance", type=float, default=None)

    common(sub.add_parser("catalog", help="list the law catalog"), law=False)

    sp = sub.add_parser("phi", help="CDF table of the limit operator Phi")
    common(sp)
    sp.add_argument("--path", choices=("closed", "grid"), default="closed",
                    help="closed: exact S-transform; grid: S-transform of a grid sample")

    sp = sub.add_parser("psi", help="CDF table of Psi on the Poisson / classical stable catalog")
    common(sp)

    sp = sub.add_parser("transform", help="evaluate cauchy, psi or S transforms")
    common(sp)
    sp.add_argument("--kind", choices=("cauchy", "psi", "s"), required=True)
    sp.add_argument("--z", nargs="+", required=True, type=complex,
                    help="evaluation points (complex like 1+0.5j for cauchy)")

    sp = sub.add_parser("maxpow", help="max-convolution powers and value-map operators")
    common(sp)
    sp.add_argument("--kind", required=True,
                    choices=("classical", "free", "boolean", "lambda_vee", "pi_vee", "x_vee", "x_vee_inv", "bt"))
    sp.add_argument("--t", type=float, nargs="+", default=[1.0])

    sp = sub.add_parser("verify", help="run an identity check and report sup-norms")
    common(sp)
    sp.add_argument("--theorem", required=True,
                    choices=("free", "boolean", "bn", "classical", "mult", "free-regular", "diagram"))
    sp.add_argument("--t", type=float, nargs="+", default=[])
    sp.add_argument("--n", type=int, nargs="+", default=[])
    sp.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[])
    sp.add_argument("--path", choices=("closed", "grid", "both"), default="both")

    sp = sub.add_parser("limits", help="prelimit sup-norms for the max limit operators")
    common(sp)
    sp.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10000])

    sp = sub.add_parser("simulate", help="Monte Carlo spectra against their limit laws")
    common(sp, law=False)
    sp.add_argument("--ensemble", choices=("wishart", "ginibre"), required=True)
    sp.add_argument("--N", dest="dim", type=int, default=256)
    sp.add_argument("--n", type=int, nargs="+", default=[1])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--repetitions", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)
    return p


def parse_args(argv) -> RunConfig:
    """Strict parsing into a :class:`RunConfig`; malformed input exits with status 2."""
    ns = build_parser().parse_args(argv)
    values = vars(ns)
    out = values.pop("output_dir", None) or os.environ.get("FREEMAX_OUT") or DEFAULT_OUT
    values["output_dir"] = out
    if "ensemble" in values and values["ensemble"] == "ginibre":
        values["ensemble"] = "ginibre-product"
    try:
        return RunConfig(**values)
    except FreemaxError as exc:
        _emit_error("usage", str(exc), EXIT_USAGE)
        raise SystemExit(EXIT_USAGE) from None


# ---------------------------------------------------------------------------
# commands


def _summary(cfg: RunConfig, status: str, **payload) -> dict:
    record = {"command": cfg.command, "status": status, "config": asdict(cfg)}
    record.update(payload)
    return record


def _cmd_catalog(cfg):
    rows = []
    samples = {
        "mp[:rate]": "mp", "twopoint:p,a": "twopoint:0.5,2", "poisson:lam": "poisson:1", "fstable:alpha": "fstable:0.5",
        "bstable:alpha": "bstable:0.5", "cstable:alpha": "cstable:0.5", "dirac:a": "dirac:1", "uniform": "uniform",
        "exponential": "exponential", "frechet:alpha": "frechet:1", "pareto:alpha": "pareto:1",
        "dagum:alpha": "dagum:1", "beta:alpha": "beta:1", "weibull:alpha": "weibull:1", "gumbel": "gumbel",
    }
    for grammar, example in samples.items():
        law = parse_law(example)
        lo, hi = law.support()
        rows.append({"grammar": grammar, "example": example, "description": LAW_GRAMMAR[grammar],
                     "support_lo": lo, "support_hi": hi, "atom_zero": law.atom_zero,
                     "positive": law.positive, "closed_s": bool(law.positive and law.has_closed_s)})
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "catalog.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(f"{r['example']:<16} {r['description']}")
    return EXIT_OK, _summary(cfg, "ok", laws=rows)


def _write_table(cfg, cdf, stem, density=None):
    x = export.table_grid(cdf, cfg.grid_points)
    dens = density(x) if density is not None else export.difference_density(x, cdf(x), cdf.jumps)
    path = export.write_cdf_table(Path(cfg.output_dir) / f"{stem}.csv", x, cdf(x), dens)
    artifacts = {"csv": str(path)}
    if cfg.emit_svg:
        from .plotting import emit_plot

        artifacts["svg"] = str(emit_plot([(stem, x, cdf(x))], Path(cfg.output_dir) / f"{stem}.svg", stem))
    return artifacts


def _cmd_phi(cfg):
    law = cfg.law()
    target = dc.grid_from_law(law, max(cfg.grid_points, 64)) if cfg.path == "grid" else law
    res = phi_psi.phi(target)
    arts = _write_table(cfg, res.cdf, "phi")
    a, b = res.support
    return EXIT_OK, _summary(cfg, "ok", atom_zero=res.atom_zero, support=[a, b], method=res.method, artifacts=arts)


def _cmd_psi(cfg):
    cdf = phi_psi.psi_op(cfg.law())
    arts = _write_table(cfg, cdf, "psi")
    return EXIT_OK, _summary(cfg, "ok", atom_zero=cdf.atom_zero, artifacts=arts)


def _cmd_transform(cfg):
    law = cfg.law()
    z = np.asarray(cfg.z, dtype=complex)
    if cfg.kind == "cauchy":
        vals = np.asarray(cauchy(law, z), dtype=complex)
    else:
        if np.any(np.abs(z.imag) > 0):
            raise ContractError(f"{cfg.kind} transform takes real arguments")
        if cfg.kind == "psi":
            vals = np.asarray(psi_transform(law, z.real), dtype=complex)
        else:
            vals = np.asarray(s_transform(law).eval(z.real), dtype=complex)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.kind}_transform.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_z", "im_z", "re_value", "im_value"])
        for a, v in zip(z, vals):
            w.writerow([repr(float(c)) for c in (a.real, a.imag, v.real, v.imag)])
    for a, v in zip(z, vals):
        print(f"{a}\t{v}")
    return EXIT_OK, _summary(cfg, "ok", values=[[v.real, v.imag] for v in vals], artifacts={"csv": str(path)})


def _cmd_maxpow(cfg):
    f = maxconv.as_cdf(cfg.law())
    arts = {}
    for t in cfg.t:
        if cfg.kind in maxconv.KINDS:
            g = maxconv.MaxPowerSpec(cfg.kind, t).apply(f)
        elif cfg.kind == "bt":
            g = maxconv.b_t_vee(f, t)
        else:
            g = getattr(maxconv, cfg.kind)(f)
        arts[f"{t:g}"] = _write_table(cfg, g, f"maxpow_{cfg.kind}_{t:g}")
    return EXIT_OK, _summary(cfg, "ok", artifacts=arts)


def _paths(cfg):
    return ("closed", "grid") if cfg.path == "both" else (cfg.path,)


def _tolerances(cfg):
    if cfg.tolerance is None:
        return {}
    return {"tol_closed": cfg.tolerance, "tol_grid": cfg.tolerance}


def _collect_reports(cfg):
    th = cfg.theorem
    n = cfg.grid_points
    if th in ("free", "boolean", "bn"):
        fn = {"free": phi_psi.verify_thm_free, "boolean": phi_psi.verify_thm_boolean, "bn": phi_psi.verify_thm_bn}[th]
        if not cfg.t:
            raise ContractError(f"--theorem {th} needs --t")
        law = cfg.law()
        out = []
        for t in cfg.t:
            out.extend(fn(law, t, paths=_paths(cfg), n=n, **_tolerances(cfg)))
        return out
    if th == "classical":
        lams = cfg.lam or [1.0]
        ts = cfg.t or [2.0]
        tol = {} if cfg.tolerance is None else {"tolerance": cfg.tolerance}
        return [r for lam in lams for t in ts for r in phi_psi.verify_thm_classical(lam, t, n=n, **tol)]
    if th == "mult":
        if not cfg.n:
            raise ContractError("--theorem mult needs --n")
        law = cfg.law()
        tol = {} if cfg.tolerance is None else {"tolerance": cfg.tolerance}
        return [r for k in cfg.n for r in phi_psi.verify_mult_identity(law, k, n=n, **tol)]
    if th == "free-regular":
        law = cfg.law() if cfg.law_spec else dc.TwoPoint(0.5, 2.0)
        return phi_psi.verify_free_regular_formula(law, n=n)
    if th == "diagram":
        return phi_psi.verify_diagram_poisson(n=n)
    raise ContractError(f"unknown theorem {th!r}")


def _emit_reports(cfg, reports):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for r in reports:
        stem = f"verify_{r.theorem_id}_{r.t_or_n:g}_{r.path}"
        s = r.summary()
        if r.grid.size:
            r.to_csv(out / f"{stem}.csv")
            s["csv"] = str(out / f"{stem}.csv")
            if cfg.emit_svg:
                from .plotting import plot_report

                s["svg"] = str(plot_report(r, out / f"{stem}.svg"))
        summaries.append(s)
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.theorem_id} param={r.t_or_n:g} path={r.path} sup={r.sup_norm:.3e} tol={r.tolerance:.1e}"
              + (f" error={r.error}" if r.error else ""))
    return summaries


def _verdict(reports):
    if any(r.error and "Numerical" in r.error for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _cmd_verify(cfg):
    reports = _collect_reports(cfg)
    summaries = _emit_reports(cfg, reports)
    code = _verdict(reports)
    return code, _summary(cfg, "ok" if code == EXIT_OK else "failed", reports=summaries)


def _cmd_limits(cfg):
    law = cfg.law()
    tol = {} if cfg.tolerance is None else {"tolerance": cfg.tolerance}
    reports = phi_psi.verify_limit_props(law, cfg.n, n=cfg.grid_points, **tol)
    summaries = _emit_reports(cfg, reports)
    mono = all(r.extra.get("monotone", False) for r in reports)
    code = _verdict(reports)
    if code == EXIT_OK and not mono:
        code = EXIT_FAILED
    for s, r in zip(summaries, reports):
        s["monotone"] = r.extra.get("monotone")
    return code, _summary(cfg, "ok" if code == EXIT_OK else "failed", reports=summaries, monotone=mono)


def _cmd_simulate(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    ns = cfg.n if cfg.ensemble == "ginibre-product" else [1]
    for k in ns:
        batch = randmat.sample_batch(cfg.ensemble, cfg.dim, k, cfg.seed, cfg.repetitions, cfg.workers)
        target, name = (dc.MarchenkoPastur(1.0), "MarchenkoPastur(1)") if cfg.ensemble == "wishart" else (
            dc.Uniform01(), "Uniform01")
        for s in batch:
            rec = randmat.experiment_summary(s, target.to_cdf(), name)
            rec["index"] = s.index
            stem = f"spectrum_{cfg.ensemble}_N{cfg.dim}_n{k}_seed{cfg.seed}_{s.index}"
            s.to_csv(out / f"{stem}.csv")
            rec["csv"] = str(out / f"{stem}.csv")
            records.append(rec)
            print(f"{cfg.ensemble} N={cfg.dim} n={k} rep={s.index} ks={rec['ks']:.4f}")
        if cfg.emit_svg:
            from .plotting import emit_plot

            ev = batch[0].eigenvalues
            ecdf = (np.arange(ev.size) + 1.0) / ev.size
            emit_plot([("target", ev, target.cdf(ev)), ("empirical", ev, ecdf)],
                      out / f"spectrum_{cfg.ensemble}_n{k}.svg", f"{cfg.ensemble} n={k}")
    return EXIT_OK, _summary(cfg, "ok", rng=randmat.RNG_NAME, experiments=records)


COMMANDS = {
    "catalog": _cmd_catalog,
    "phi": _cmd_phi,
    "psi": _cmd_psi,
    "transform": _cmd_transform,
    "maxpow": _cmd_maxpow,
    "verify": _cmd_verify,
    "limits": _cmd_limits,
    "simulate": _cmd_simulate,
}


def dispatch(cfg: RunConfig) -> int:
    """Run the command and write ``summary.json``; returns the exit status."""
    try:
        code, summary = COMMANDS[cfg.command](cfg)
    except (ContractError, UnsupportedLawError) as exc:
        _emit_error(type(exc).__name__, str(exc), EXIT_USAGE, cfg.output_dir)
        return EXIT_USAGE
    except (NumericalError, FreemaxError, FloatingPointError, ArithmeticError) as exc:
        _emit_error(type(exc).__name__, str(exc), EXIT_NUMERIC, cfg.output_dir)
        return EXIT_NUMERIC
    except OSError as exc:
        _emit_error(type(exc).__name__, str(exc), EXIT_NUMERIC)
        return EXIT_NUMERIC
    summary["exit_code"] = code
    export.write_json(Path(cfg.output_dir) / "summary.json", summary)
    if code != EXIT_OK:
        _emit_error("verification", "one or more checks failed", code, None)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return dispatch(cfg)
    except Exception as exc:  # the exit-code contract is total
        _emit_error(type(exc).__name__, str(exc), EXIT_NUMERIC)
        return EXIT_NUMERIC


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
