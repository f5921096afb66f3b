"""Command-line front end: generate, run, sweep and compare.

Every command writes CSV with a header row. Floats carry 9 significant
digits so that files diff cleanly. Exit codes: 0 success, 1 usage,
2 bad input or schema, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import statistics
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import scenario as scn
from .channel import RadioParams
from .core import validate_topology
from .dais import DaisParams
from .metrics import collect
from .sim import STRATEGIES, run

COLUMNS = ("strategy", "n_ues", "seed", "spectral_efficiency", "total_tx_power_mw",
           "power_saved_mw", "cluster_count", "mean_cluster_size", "decision_time_us",
           "link_evaluations")
METRIC_COLUMNS = COLUMNS[3:]

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

# flag dest -> (block, field)
PARAM_FLAGS = {
    "perc_data_rate": ("dais", "perc_data_rate"),
    "battery_threshold": ("dais", "battery_threshold"),
    "battery_option": ("dais", "battery_option_enabled"),
    "sigma_shadow": ("radio", "shadowing_sigma_db"),
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(value):
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def parse_int_list(text):
    """``"10,100"`` or ``"1..10"`` or a mix such as ``"1..3,7"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def parse_sizes(text):
    sizes = parse_int_list(text)
    if min(sizes) < 1:
        raise argparse.ArgumentTypeError("every N must be at least 1")
    return sizes


def parse_names(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in STRATEGIES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown strategy {', '.join(bad) or text!r}; choose from {', '.join(STRATEGIES)}")
    return names


def parse_area(text):
    try:
        w, h = (float(x) for x in text.lower().replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"area must look like 1000x1000, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("area sides must be positive")
    return (w, h)


# --- configuration -------------------------------------------------------

def load_config(path):
    """Read a JSON config with ``radio`` / ``dais`` blocks or flat field names."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path}, line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError(f"config {path} must hold a JSON object")
    fields = {"radio": {f.name for f in dataclasses.fields(RadioParams)},
              "dais": {f.name for f in dataclasses.fields(DaisParams)}}
    out = {"radio": {}, "dais": {}}
    for key, value in raw.items():
        if key in out and isinstance(value, dict):
            unknown = set(value) - fields[key]
            if unknown:
                raise InputError(f"config {path}: unknown {key} field(s) {sorted(unknown)}")
            out[key].update(value)
        elif key in fields["radio"]:
            out["radio"][key] = value
        elif key in fields["dais"]:
            out["dais"][key] = value
        else:
            raise InputError(f"config {path}: unknown field {key!r}")
    return out


def resolve_params(args, base_radio=None, base_dais=None):
    """Flags override the config file, which overrides the defaults."""
    radio = dataclasses.asdict(base_radio or RadioParams())
    dais = dataclasses.asdict(base_dais or DaisParams())
    if getattr(args, "config", None):
        cfg = load_config(args.config)
        radio.update(cfg["radio"])
        dais.update(cfg["dais"])
    blocks = {"radio": radio, "dais": dais}
    for dest, (block, name) in PARAM_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            blocks[block][name] = value
    try:
        return RadioParams(**radio), DaisParams(**dais)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad parameters: {exc}") from None


# --- running -------------------------------------------------------------

def run_row(strategy, n, seed, area, radio, dais, p_ch, timing=False, scenario=None):
    """Run one (scenario, strategy) pair and return its CSV row as a dict."""
    if scenario is None:
        scenario = scn.generate(n, seed, area, radio, dais)
    result = run(strategy, scenario, p_ch)
    violations = validate_topology(result.topology)
    if violations:
        raise InvariantError(f"{strategy} n={scenario.n_ues} seed={scenario.seed}: "
                             f"{violations[0].kind} at node {violations[0].node}")
    m = collect(result.topology, result)
    return {
        "strategy": strategy,
        "n_ues": scenario.n_ues,
        "seed": scenario.seed,
        "spectral_efficiency": m.spectral_efficiency,
        "total_tx_power_mw": m.total_tx_power,
        "power_saved_mw": m.power_saved,
        "cluster_count": m.cluster_count,
        "mean_cluster_size": m.mean_cluster_size,
        # wall-clock time breaks byte-identical output, so it is opt-in
        "decision_time_us": m.decision_time_total if timing else 0.0,
        "link_evaluations": m.link_evaluations,
    }


def _run_job(job):
    return run_row(*job)


def render_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def write_csv(rows, columns, out):
    text = render_csv(rows, columns)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


def summarize(rows):
    """Mean and sample standard deviation of each metric per (strategy, N)."""
    groups = defaultdict(list)
    for r in rows:
        groups[(r["strategy"], r["n_ues"])].append(r)
    out = []
    for (strategy, n), rs in groups.items():
        rec = {"strategy": strategy, "n_ues": n, "runs": len(rs)}
        for c in METRIC_COLUMNS:
            vals = [float(r[c]) for r in rs]
            rec[c + "_mean"] = statistics.fmean(vals)
            rec[c + "_std"] = statistics.stdev(vals) if len(vals) > 1 else 0.0
        out.append(rec)
    return out


SUMMARY_COLUMNS = ("strategy", "n_ues", "runs") + tuple(
    f"{c}_{s}" for c in METRIC_COLUMNS for s in ("mean", "std"))


def read_rows(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames:
        raise InputError(f"{path}: empty CSV, expected columns {','.join(COLUMNS)}")
    missing = [c for c in COLUMNS if c not in reader.fieldnames]
    if missing:
        raise InputError(f"{path}: missing column(s) {','.join(missing)}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            row = {"strategy": rec["strategy"], "n_ues": int(rec["n_ues"]),
                   "seed": int(rec["seed"])}
            for c in METRIC_COLUMNS:
                row[c] = float(rec[c])
        except (TypeError, ValueError):
            raise InputError(f"{path}, line {lineno}: malformed row") from None
        rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def _ratio(a, b):
    if b == 0:
        return 1.0 if a == 0 else float("inf")
    return a / b


COMPARE_COLUMNS = ("n_ues", "strategy", "baseline", "se_ratio", "power_saved_ratio",
                   "link_eval_ratio")


def compare_rows(rows, reference="dais", baselines=None):
    """Ratios of ``reference`` means over each baseline's means, per N."""
    means = {(s["strategy"], s["n_ues"]): s for s in summarize(rows)}
    present = sorted({s for s, _ in means})
    if reference not in present:
        raise InputError(f"no rows for reference strategy {reference!r}")
    baselines = baselines or [s for s in present if s != reference] or [reference]
    out = []
    for n in sorted({n for _, n in means}):
        ref = means.get((reference, n))
        if ref is None:
            continue
        for b in baselines:
            other = means.get((b, n))
            if other is None:
                continue
            out.append({
                "n_ues": n, "strategy": reference, "baseline": b,
                "se_ratio": _ratio(ref["spectral_efficiency_mean"],
                                   other["spectral_efficiency_mean"]),
                "power_saved_ratio": _ratio(ref["power_saved_mw_mean"],
                                            other["power_saved_mw_mean"]),
                # cost of the baseline relative to the reference
                "link_eval_ratio": _ratio(other["link_evaluations_mean"],
                                          ref["link_evaluations_mean"]),
            })
    return out


# --- commands ------------------------------------------------------------

def cmd_generate(args):
    radio, dais = resolve_params(args)
    sc = scn.generate(args.n, args.seed, args.area, radio, dais)
    if args.out in (None, "-"):
        sys.stdout.write(scn.dumps(sc))
    else:
        scn.save(sc, args.out)
    return EXIT_OK


def cmd_run(args):
    scenario = None
    if args.scenario_file:
        try:
            scenario = scn.load(args.scenario_file)
        except OSError as exc:
            raise InputError(f"cannot read {args.scenario_file}: {exc.strerror}") from None
        except scn.ScenarioError as exc:
            raise InputError(f"{args.scenario_file}: {exc}") from None
        radio, dais = resolve_params(args, scenario.radio, scenario.dais)
        scenario = scenario.with_params(radio, dais)
    else:
        radio, dais = resolve_params(args)
    row = run_row(args.strategy, args.n, args.seed, args.area, radio, dais, args.p_ch,
                  args.timing, scenario)
    write_csv([row], COLUMNS, args.out)
    return EXIT_OK


def cmd_sweep(args):
    radio, dais = resolve_params(args)
    jobs = [(s, n, seed, args.area, radio, dais, args.p_ch, args.timing)
            for n in args.n for seed in args.seeds for s in args.strategies]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = [_run_job(j) for j in jobs]
    write_csv(rows, COLUMNS, args.out)
    summary_out = args.summary_out
    if summary_out is None and args.out not in (None, "-"):
        summary_out = str(Path(args.out).with_suffix("")) + ".summary.csv"
    if summary_out:
        write_csv(summarize(rows), SUMMARY_COLUMNS, summary_out)
    return EXIT_OK


def cmd_compare(args):
    rows = read_rows(args.input)
    table = compare_rows(rows, args.reference, args.baselines)
    write_csv(table, COMPARE_COLUMNS, args.out)
    return EXIT_OK


def _add_param_flags(p):
    p.add_argument("--config", help="JSON file with radio/dais parameters")
    p.add_argument("--area", type=parse_area, default=(1000.0, 1000.0),
                   help="width x height in metres (default 1000x1000)")
    p.add_argument("--perc-data-rate", type=float)
    p.add_argument("--battery-threshold", type=float)
    p.add_argument("--battery-option", action=argparse.BooleanOptionalAction, default=None,
                   help="gate serving roles on battery level")
    p.add_argument("--sigma-shadow", type=float, help="shadowing sigma in dB")
    p.add_argument("--p-ch", type=float, default=0.14,
                   help="cluster-head probability for random_cluster")
    p.add_argument("--timing", action="store_true",
                   help="report wall-clock decision time (output is then not reproducible)")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser():
    parser = _Parser(prog="d2dsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a scenario file")
    g.add_argument("--n", type=positive_int, required=True)
    g.add_argument("--seed", type=int, default=1)
    _add_param_flags(g)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="one scenario, one strategy, one CSV row")
    r.add_argument("--n", type=positive_int, default=100)
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--strategy", choices=STRATEGIES, default="dais")
    r.add_argument("--scenario-file", help="run a saved scenario instead of generating one")
    _add_param_flags(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="cross product of N, seeds and strategies")
    s.add_argument("--n", type=parse_sizes, required=True, help="e.g. 10,100,1000")
    s.add_argument("--seeds", type=parse_int_list, default=[1], help="e.g. 1..10")
    s.add_argument("--strategies", type=parse_names, default=list(STRATEGIES))
    s.add_argument("--summary-out", help="mean/stddev file (default: next to --out)")
    s.add_argument("--jobs", type=positive_int, default=1, help="worker processes")
    _add_param_flags(s)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="ratio table from a sweep CSV")
    c.add_argument("input", help="sweep CSV, or - for stdin")
    c.add_argument("--reference", default="dais")
    c.add_argument("--baselines", type=lambda t: [x for x in t.split(",") if x])
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
