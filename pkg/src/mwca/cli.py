"""Command-line interface: ``mwca {mwca,ca,compare,verify}``.

Exit status is 0 on success, 1 on bad input and 2 when an identity check
fails.
"""

import argparse
import logging
import re
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import io
from .analysis import (
    compare,
    isometry_routes,
    relative_error_ca_mwca,
    run_ca,
    run_mwca,
    verify_all,
)
from .decompose import ALGORITHMS, RankError
from .metric import ZeroMarginalError
from .svg import biplot

log = logging.getLogger("mwca")

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class AnalysisConfig:
    ranks: object = "full"
    algorithm: str = "hosvd"
    ca_mode: int = None
    tolerance: float = 1e-9
    axes: tuple = (2, 3)
    coords: str = "Z"
    zero_slices: str = "error"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}")
        if len(self.axes) != 2 or self.axes[0] == self.axes[1] or min(self.axes) < 1:
            raise InputError(f"plot axes must be two distinct components >= 1, got {self.axes}")
        if self.ranks != "full" and any(r != "full" and r < 1 for r in self.ranks):
            raise InputError("ranks must be positive")
        if self.zero_slices not in ("error", "drop"):
            raise InputError(f"zero-slice policy must be 'error' or 'drop', got {self.zero_slices!r}")
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")


def parse_ranks(text):
    if text is None or text.strip() == "full":
        return "full"
    out = []
    for part in text.split(","):
        part = part.strip()
        if part == "full":
            out.append("full")
            continue
        try:
            out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad rank {part!r}") from None
    return tuple(out)


def parse_axes(text):
    try:
        axes = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axes {text!r}") from None
    if len(axes) != 2:
        raise argparse.ArgumentTypeError("axes take two component indices, e.g. 2,3")
    return axes


def parse_shape(text):
    try:
        shape = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}; use e.g. 4x5x6") from None
    if not shape or min(shape) < 1:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}")
    return shape


def _add_input(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--input", type=Path, help="contingency table file")
    src.add_argument("--builtin", choices=["health"], help="use a bundled table")
    p.add_argument("--format", choices=io.FORMATS, help="input format (default: from extension)")
    p.add_argument("--labels", type=Path, help="JSON label-order sidecar for long-csv input")
    p.add_argument("--zero-slices", choices=["error", "drop"], default="error",
                   help="what to do with categories whose counts are all zero")


def _add_analysis(p):
    p.add_argument("--ranks", type=parse_ranks, default="full",
                   help="'full' or comma-separated per-mode ranks, e.g. 2,4,full")
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="hosvd")
    p.add_argument("--tol", type=float, default=1e-9, help="verification tolerance")


def _add_output(p):
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--plot", action="store_true", help="write biplot.svg (needs --out)")
    p.add_argument("--axes", type=parse_axes, default=(2, 3),
                   help="1-based components to plot (default 2,3)")
    p.add_argument("--coords", choices=["Y", "W", "Z"], default="Z",
                   help="coordinate system shown in the plot (default Z, principal coordinates)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mwca", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mwca", help="multiway correspondence analysis")
    _add_input(p)
    _add_analysis(p)
    _add_output(p)
    p.add_argument("--ca-mode", help="mode for the CA/MWCA relative error (default: last)")

    p = sub.add_parser("ca", help="classical CA of one matricization")
    _add_input(p)
    p.add_argument("--mode", required=True, help="mode (number or name) kept as rows")
    p.add_argument("--rank", default="full")
    _add_output(p)

    p = sub.add_parser("compare", help="CA of one matricization against MWCA")
    _add_input(p)
    p.add_argument("--mode", required=True, help="mode (number or name) kept as rows")
    _add_analysis(p)
    _add_output(p)

    p = sub.add_parser("verify", help="check the inter-cloud identities")
    _add_input(p, required=False)
    p.add_argument("--random", nargs=2, metavar=("ORDER", "SHAPE"),
                   help="self-test on a random positive tensor, e.g. --random 3 4x5x6")
    p.add_argument("--seed", type=int, default=0, help="seed for --random")
    _add_analysis(p)
    p.add_argument("--out", type=Path, help="output directory for report.json")
    return parser


def _load(args):
    if args.builtin:
        table = io.load_health_survey()
    else:
        table = io.load_table(args.input, args.format, args.labels)
    dropped = {}
    if args.zero_slices == "drop":
        table, dropped = io.drop_zero_slices(table)
    return table, dropped


def _safe(name):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def _plot_points(coords, axes):
    cols = []
    for a in axes:
        cols.append(coords[:, a - 1] if a <= coords.shape[1] else np.zeros(coords.shape[0]))
    return np.column_stack(cols)


def _input_echo(args, table, dropped):
    return {
        "source": "builtin:" + args.builtin if args.builtin else str(args.input),
        "shape": list(table.shape),
        "mode_names": list(table.mode_names),
        "total": table.total,
        "dropped": dropped,
    }


def _write_all(out, files):
    """Write every ``(name, text)`` pair only after all outputs are computed."""
    out.mkdir(parents=True, exist_ok=True)
    for name, writer in files:
        writer(out / name)


def _coordinate_files(prefix, labels, res_coords):
    files = []
    for kind, coords in res_coords:
        files.append((f"{prefix}-{kind}.csv",
                      lambda p, c=coords: io.write_coordinates(p, labels, c)))
    return files


def _text_writer(text):
    def write(path):
        Path(path).write_text(text, encoding="utf-8")
    return write


def _mwca_outputs(table, res, config):
    files = []
    for k, name in enumerate(table.mode_names, start=1):
        coords = [(kind, res.coordinates(kind, k)) for kind in ("Y", "W", "Z")]
        files += _coordinate_files(f"mode-{_safe(name)}", table.labels[k - 1], coords)
        files.append((f"sigma-{_safe(name)}.csv",
                      lambda p, s=res.sigma[k - 1]: io.write_sigma(p, s)))
    return files


def _mwca_plot(table, res, config):
    clouds = [(name, table.labels[k - 1],
               _plot_points(res.coordinates(config.coords, k), config.axes))
              for k, name in enumerate(table.mode_names, start=1)]
    ax = [f"{config.coords} component {a}" for a in config.axes]
    return biplot(clouds, ax, title="MWCA")


def _ca_outputs(table2, ca):
    files = []
    for side, k in (("row", 0), ("col", 1)):
        name = table2.mode_names[k]
        labels = ca.row_labels if side == "row" else ca.col_labels
        coords = [(kind, ca.coordinates(kind, side)) for kind in ("Y", "W", "Z")]
        files += _coordinate_files(f"ca-{side}-{_safe(name)}", labels, coords)
    files.append(("sigma-ca.csv", lambda p: io.write_sigma(p, ca.sigma)))
    return files


def _ca_plot(table2, ca, config):
    clouds = [(table2.mode_names[0], ca.row_labels,
               _plot_points(ca.coordinates(config.coords, "row"), config.axes)),
              (table2.mode_names[1], ca.col_labels,
               _plot_points(ca.coordinates(config.coords, "col"), config.axes))]
    ax = [f"{config.coords} component {a}" for a in config.axes]
    return biplot(clouds, ax, title="CA")


def _report_verification(reports):
    rows = [r.as_dict() for r in reports]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        extra = "" if r.weight_sum_error is None else f" weight_sum_err={r.weight_sum_error:.3e}"
        print(f"{status} {r.check:<26} mode {r.mode} rel_residual={r.relative_residual:.3e} "
              f"[{r.target}]{extra}")
    return rows, all(r.passed for r in reports)


def cmd_mwca(args):
    table, dropped = _load(args)
    ca_mode = table.mode_index(args.ca_mode) if args.ca_mode else table.order
    config = AnalysisConfig(args.ranks, args.algorithm, ca_mode, args.tol, args.axes,
                            args.coords, args.zero_slices)
    res = run_mwca(table, config.ranks, config.algorithm)
    rel_errors = {}
    for k, name in enumerate(table.mode_names, start=1):
        try:
            rel_errors[name] = relative_error_ca_mwca(*isometry_routes(res.frequencies, k))
        except ZeroMarginalError as exc:
            if k == ca_mode:
                raise
            log.info("no CA comparison for mode %s: %s", name, exc)
            rel_errors[name] = None
    rel_error = rel_errors[table.mode_names[ca_mode - 1]]
    reports, ok = _report_verification(verify_all(res, config.tolerance))
    print(f"relative_error mode {ca_mode} ({table.mode_names[ca_mode - 1]}): "
          f"{rel_error:.6f}")
    report = {
        "command": "mwca",
        "config": asdict(config),
        "input": _input_echo(args, table, dropped),
        "ranks": list(res.ranks),
        "sigma": {n: res.sigma[k].tolist() for k, n in enumerate(table.mode_names)},
        "relative_error": rel_error,
        "relative_errors": rel_errors,
        "verification": reports,
        "verification_passed": ok,
    }
    if args.out:
        files = _mwca_outputs(table, res, config)
        if args.plot:
            files.append(("biplot.svg", _text_writer(_mwca_plot(table, res, config))))
        files.append(("report.json", lambda p: io.write_report(p, report)))
        _write_all(args.out, files)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_ca(args):
    table, dropped = _load(args)
    mode = table.mode_index(args.mode)
    rank = args.rank if args.rank == "full" else int(args.rank)
    config = AnalysisConfig(axes=args.axes, coords=args.coords, zero_slices=args.zero_slices,
                            ca_mode=mode)
    table2 = table.matricize(mode)
    ca = run_ca(table2, rank)
    print(f"CA of mode {mode} ({table.mode_names[mode - 1]}): sigma = "
          + ", ".join(f"{s:.6f}" for s in ca.sigma))
    report = {
        "command": "ca",
        "config": asdict(config),
        "input": _input_echo(args, table, dropped),
        "mode": mode,
        "rank": int(ca.sigma.shape[0]),
        "sigma": ca.sigma.tolist(),
    }
    if args.out:
        files = _ca_outputs(table2, ca)
        if args.plot:
            files.append(("biplot.svg", _text_writer(_ca_plot(table2, ca, config))))
        files.append(("report.json", lambda p: io.write_report(p, report)))
        _write_all(args.out, files)
    return EXIT_OK


def cmd_compare(args):
    table, dropped = _load(args)
    mode = table.mode_index(args.mode)
    config = AnalysisConfig(args.ranks, args.algorithm, mode, args.tol, args.axes,
                            args.coords, args.zero_slices)
    cmp = compare(table, mode, config.ranks, config.algorithm)
    print(f"relative_error mode {mode} ({table.mode_names[mode - 1]}): {cmp.relative_error:.6f}")
    report = {
        "command": "compare",
        "config": asdict(config),
        "input": _input_echo(args, table, dropped),
        "mode": mode,
        "ranks": list(cmp.mwca.ranks),
        "relative_error": cmp.relative_error,
        "sigma_ca": cmp.ca.sigma.tolist(),
        "sigma_mwca": cmp.mwca.sigma[mode - 1].tolist(),
    }
    if args.out:
        table2 = table.matricize(mode)
        files = _mwca_outputs(table, cmp.mwca, config) + _ca_outputs(table2, cmp.ca)
        if args.plot:
            files.append(("biplot.svg", _text_writer(_mwca_plot(table, cmp.mwca, config))))
            files.append(("biplot-ca.svg", _text_writer(_ca_plot(table2, cmp.ca, config))))
        files.append(("report.json", lambda p: io.write_report(p, report)))
        _write_all(args.out, files)
    return EXIT_OK


def random_table(order, shape, seed):
    """Seeded positive random tensor used by ``verify --random``."""
    if len(shape) != order:
        raise InputError(f"shape {shape} does not have {order} modes")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.1, 1.0, size=shape)


def cmd_verify(args):
    if args.random:
        try:
            order = int(args.random[0])
        except ValueError:
            raise InputError(f"bad order {args.random[0]!r}") from None
        try:
            shape = parse_shape(args.random[1])
        except argparse.ArgumentTypeError as exc:
            raise InputError(str(exc)) from None
        data = random_table(order, shape, args.seed)
        source = {"random": {"order": order, "shape": list(shape), "seed": args.seed}}
    elif args.input or args.builtin:
        table, dropped = _load(args)
        data = table
        source = _input_echo(args, table, dropped)
    else:
        raise InputError("verify needs --input, --builtin or --random")
    config = AnalysisConfig(args.ranks, args.algorithm, None, args.tol)
    res = run_mwca(data, config.ranks, config.algorithm)
    reports, ok = _report_verification(verify_all(res, config.tolerance))
    report = {
        "command": "verify",
        "config": asdict(config),
        "input": source,
        "ranks": list(res.ranks),
        "verification": reports,
        "verification_passed": ok,
    }
    if args.out:
        _write_all(args.out, [("report.json", lambda p: io.write_report(p, report))])
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {"mwca": cmd_mwca, "ca": cmd_ca, "compare": cmd_compare, "verify": cmd_verify}


def run_cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "plot", False) and not args.out:
        print("error: --plot needs --out", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError, OSError, RankError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
