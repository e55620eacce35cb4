"""Command-line entry point.

Subcommands::

    compop analyze <config>          run the tasks listed in a JSON config
    compop spectrum <config>         singular-value trend only
    compop weight check <key>        admissibility report for a weight
    compop moments <key> --n N       moment sequence as CSV on stdout
    compop verify [--suite NAME]     invariant suite

Exit codes: 0 success, 1 internal error, 2 invalid input,
3 only inconclusive verdicts, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import criteria as crit
from .errors import CompopError, InvalidInputError
from .nevanlinna import RatioField, ratio_field
from .operator import DEFAULT_N_LIST, TrendReport, compactness_trend
from .suite import SUITES, pair_checks, run_suite
from .symbol import SymbolSpec, make_symbol
from .weight import AdmissibilityReport, WeightProfile, check_admissibility, moments, parse_weight_key

log = logging.getLogger("compop")

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_VERIFY = 0, 1, 2, 3, 4
OUTPUT_ENV = "COMPOP_OUTPUT_DIR"
TASKS = ("admissibility", "moments", "ratio-field", "criteria", "spectrum", "carleson", "verify")
TOLERANCE_KEYS = {
    "k_max": int, "angular_count": int, "moment_count": int, "N_list": list,
    "carleson_rel_tol": float, "carleson_centers": int, "tail_radius": float,
}
CONFIG_KEYS = {"weight", "symbol", "tasks", "output_dir", "tolerances", "seed"}


class ConfigError(InvalidInputError):
    """Configuration problem, with the offending field or source position."""

    def __init__(self, message, field=None, line=None, column=None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{'; '.join(where)}: {message}" if where else message)
        self.field, self.line, self.column = field, line, column


@dataclass
class AnalysisConfig:
    weight_key: str
    symbol_spec: str
    tasks: tuple
    output_dir: Path
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    weight: WeightProfile | None = field(default=None, repr=False, compare=False)
    symbol: SymbolSpec | None = field(default=None, repr=False, compare=False)

    def option(self, name, default):
        return self.tolerances.get(name, default)


@dataclass
class ReportBundle:
    verdicts: list
    artifacts: list
    admissibility: AdmissibilityReport | None
    summary: str
    errors: dict = field(default_factory=dict)
    trend: TrendReport | None = None
    checks: list = field(default_factory=list)

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def exit_code(self) -> int:
        if self.errors:
            kinds = set(self.errors.values())
            return EXIT_INVALID if kinds == {"invalid"} else EXIT_INTERNAL
        if self.checks and not all(c.passed for c in self.checks):
            return EXIT_VERIFY
        states = [v.verdict for v in self.verdicts]
        if self.trend is not None:
            states.append(self.trend.classification)
        if states and all(s == crit.INCONCLUSIVE for s in states):
            return EXIT_INCONCLUSIVE
        return EXIT_OK


# --------------------------------------------------------------------------
# configuration


def _load_source(source):
    if isinstance(source, dict):
        return dict(source), None
    text = str(source)
    if not text.lstrip().startswith("{"):
        path = Path(text)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror or exc}") from exc
        base = path.resolve().parent
    else:
        base = None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    return data, base


def parse_config(source) -> AnalysisConfig:
    """Validate a config given as a path, inline JSON text or a dict.

    Defaults: ``tasks = ["criteria"]``, ``output_dir = "compop-out"``,
    ``seed = 0``.  The weight and symbol are built here, so bad keys and
    non-self-maps fail at parse time.
    """
    data, base = _load_source(source)
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}", field=unknown[0])
    for key in ("weight", "symbol"):
        if key not in data:
            raise ConfigError("required", field=key)
        if not isinstance(data[key], str):
            raise ConfigError("must be a string", field=key)
    try:
        w = parse_weight_key(data["weight"])
    except InvalidInputError as exc:
        raise type(exc)(f"field 'weight': {exc}") from exc
    try:
        phi = make_symbol(data["symbol"])
    except InvalidInputError as exc:
        raise type(exc)(f"field 'symbol': {exc}") from exc

    tasks = data.get("tasks", ["criteria"])
    if isinstance(tasks, str):
        tasks = [tasks]
    if not isinstance(tasks, list) or not tasks:
        raise ConfigError("must be a non-empty list", field="tasks")
    bad = [t for t in tasks if t not in TASKS]
    if bad:
        raise ConfigError(f"unknown task {bad[0]!r}; choose from {', '.join(TASKS)}", field="tasks")
    ordered = tuple(t for t in TASKS if t in tasks)

    tol = data.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise ConfigError("must be an object", field="tolerances")
    clean = {}
    for k, v in tol.items():
        kind = TOLERANCE_KEYS.get(k)
        if kind is None:
            raise ConfigError(f"unknown tolerance {k!r}", field=f"tolerances.{k}")
        try:
            clean[k] = [int(x) for x in v] if kind is list else kind(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value {v!r}", field=f"tolerances.{k}") from exc

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("must be an integer", field="seed")
    out = data.get("output_dir", "compop-out")
    if not isinstance(out, str):
        raise ConfigError("must be a string", field="output_dir")
    out_path = Path(out)
    if base is not None and not out_path.is_absolute():
        out_path = base / out_path
    return AnalysisConfig(data["weight"], data["symbol"], ordered, out_path, clean, seed, w, phi)


def resolve_output_dir(config: AnalysisConfig) -> Path:
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else config.output_dir


# --------------------------------------------------------------------------
# artifacts


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    return path


def write_ratio_field(f: RatioField, path: Path):
    return f.to_csv(path)


def write_moments(w: WeightProfile, n: int, path_or_stream):
    seq = moments(w, n).values
    own = not hasattr(path_or_stream, "write")
    fh = open(path_or_stream, "w", newline="") if own else path_or_stream
    try:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["n", "omega_n"])
        for i, v in enumerate(seq):
            out.writerow([i, repr(float(v))])
    finally:
        if own:
            fh.close()
    return path_or_stream


def read_verdicts(path) -> list:
    data = json.loads(Path(path).read_text())
    return [crit.CriterionVerdict.from_dict(d) for d in data["verdicts"]]


def _summary_table(config, adm, verdicts, trend, checks, errors) -> str:
    buf = io.StringIO()
    buf.write(f"symbol  {config.symbol.label}\nweight  {config.weight.label}\n")
    if adm is not None:
        buf.write(f"admissible  {adm.admissible}  (W2 delta {adm.w2_delta}, W4 class {adm.w4_class})\n")
    if verdicts:
        buf.write(crit.verdict_summary(verdicts))
        buf.write("\n")
    if trend is not None:
        probes = ", ".join(f"{p:.4g}" for p in trend.probes)
        buf.write(f"spectrum trend  {trend.classification}  (s_k at N={list(trend.N_list)}: {probes})\n")
    if checks:
        failed = [c.name for c in checks if not c.passed]
        buf.write(f"verify  {len(checks) - len(failed)}/{len(checks)} passed\n")
        for name in failed:
            buf.write(f"  FAILED {name}\n")
    for task, kind in errors.items():
        buf.write(f"task {task} failed ({kind})\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# execution


def run_analysis(config: AnalysisConfig) -> ReportBundle:
    """Run the configured tasks in dependency order and write the bundle."""
    out_dir = resolve_output_dir(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    w, phi = config.weight, config.symbol
    k_max = config.option("k_max", crit.DEFAULT_K_MAX)
    angles = config.option("angular_count", crit.DEFAULT_ANGLES)
    tasks = set(config.tasks)
    artifacts, verdicts, errors, checks = [], [], {}, []
    adm = trend = field_ = None

    def attempt(name, fn):
        try:
            return fn()
        except InvalidInputError as exc:
            log.error("task %s: %s", name, exc)
            errors[name] = "invalid"
        except CompopError as exc:
            log.error("task %s: %s", name, exc)
            errors[name] = "numerical"
        return None

    if tasks & {"admissibility", "criteria"}:
        r0 = config.option("tail_radius", 0.0)
        adm = attempt("admissibility", lambda: check_admissibility(w, tail_radius=r0))
        if adm is not None and "admissibility" in tasks:
            artifacts.append(_write_json(out_dir / "admissibility.json", adm.to_dict()))

    if "moments" in tasks:
        n = config.option("moment_count", 200)
        if attempt("moments", lambda: write_moments(w, n, out_dir / "moments.csv")) is not None:
            artifacts.append(out_dir / "moments.csv")

    if "criteria" in tasks and adm is not None:
        res = attempt("criteria", lambda: crit.evaluate_all(
            phi, w, k_max, angles, tail_radius=config.option("tail_radius", 0.0)))
        if res is not None:
            field_, found = res
            verdicts.extend(found)
    elif tasks & {"ratio-field", "carleson"}:
        field_ = attempt("ratio-field", lambda: ratio_field(phi, w, k_max, angles))
    if field_ is not None and tasks & {"ratio-field", "criteria"}:
        artifacts.append(write_ratio_field(field_, out_dir / "ratio_field.csv"))

    if "spectrum" in tasks:
        N_list = config.option("N_list", list(DEFAULT_N_LIST))
        trend = attempt("spectrum", lambda: compactness_trend(phi, w, N_list))
        if trend is not None:
            artifacts.append(trend.to_csv(out_dir / "spectrum.csv"))

    if "carleson" in tasks:
        rep = attempt("carleson", lambda: crit.carleson_criterion(
            phi, w, center_count=config.option("carleson_centers", crit.CARLESON_CENTERS),
            rel_tol=config.option("carleson_rel_tol", 1e-3)))
        if rep is not None:
            verdicts.extend([rep.bounded, rep.compact])

    if "verify" in tasks:
        found = attempt("verify", lambda: pair_checks(phi, w, config.seed, full=True))
        if found is not None:
            checks = found
            artifacts.append(_write_json(out_dir / "verify.json",
                                         {"checks": [c.to_dict() for c in checks],
                                          "seed": config.seed}))

    if verdicts:
        artifacts.append(_write_json(out_dir / "verdicts.json", {
            "symbol": phi.label, "weight": w.label,
            "verdicts": [v.to_dict() for v in verdicts]}))
    summary = _summary_table(config, adm, verdicts, trend, checks, errors)
    (out_dir / "summary.txt").write_text(summary)
    artifacts.append(out_dir / "summary.txt")
    return ReportBundle(verdicts, [Path(p) for p in artifacts], adm, summary, errors, trend, checks)


# --------------------------------------------------------------------------
# argparse front end


def _build_parser():
    p = argparse.ArgumentParser(prog="compop", description="Composition operator diagnostics.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the tasks of a JSON config")
    a.add_argument("config", help="config file path or inline JSON")
    a.add_argument("--output-dir", help=f"override output_dir (also via ${OUTPUT_ENV})")
    a.add_argument("--tasks", help="comma-separated task list overriding the config")

    s = sub.add_parser("spectrum", help="singular-value trend for a config")
    s.add_argument("config")
    s.add_argument("--output-dir")

    wp = sub.add_parser("weight", help="weight utilities")
    wsub = wp.add_subparsers(dest="weight_command", required=True)
    wc = wsub.add_parser("check", help="admissibility report as JSON")
    wc.add_argument("key")
    wc.add_argument("--tail-radius", type=float, default=0.0)

    m = sub.add_parser("moments", help="moment sequence as CSV")
    m.add_argument("key")
    m.add_argument("--n", type=int, default=20, help="largest index (default 20)")

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", default="quick", choices=SUITES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true", help="print results as JSON")
    return p


def _with_overrides(args, tasks=None):
    data, base = _load_source(args.config)
    if getattr(args, "output_dir", None):
        data["output_dir"] = str(Path(args.output_dir).resolve())
    if tasks is not None:
        data["tasks"] = tasks
    config = parse_config(data)
    if base is not None and not Path(data.get("output_dir", "compop-out")).is_absolute():
        config.output_dir = base / config.output_dir
    return config


def _cmd_analyze(args, out):
    tasks = [t.strip() for t in args.tasks.split(",")] if args.tasks else None
    bundle = run_analysis(_with_overrides(args, tasks))
    out.write(bundle.summary)
    return bundle.exit_code()


def _cmd_spectrum(args, out):
    bundle = run_analysis(_with_overrides(args, ["spectrum"]))
    out.write(bundle.summary)
    return bundle.exit_code()


def _cmd_weight(args, out):
    rep = check_admissibility(parse_weight_key(args.key), tail_radius=args.tail_radius)
    out.write(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_moments(args, out):
    if args.n < 0:
        raise InvalidInputError("--n must be non-negative")
    write_moments(parse_weight_key(args.key), args.n, out)
    return EXIT_OK


def _cmd_verify(args, out):
    results = run_suite(args.suite, args.seed)
    if args.json:
        out.write(json.dumps([r.to_dict() for r in results], sort_keys=True, indent=2) + "\n")
    else:
        for r in results:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  {r.detail}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"analyze": _cmd_analyze, "spectrum": _cmd_spectrum, "weight": _cmd_weight,
            "moments": _cmd_moments, "verify": _cmd_verify}


def main(argv=None, out=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    out = out or sys.stdout
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CompopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - top-level guard maps to exit 1
        log.debug("internal failure", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
