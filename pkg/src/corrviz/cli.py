"""Command-line front end: ``corrviz <subcommand> ...``.

Exit status is 0 on success, 1 when the input is invalid and 2 on usage
errors. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from corrviz import examples, geometry, ingest, stats
from corrviz.errors import CorrvizError
from corrviz.render import plots, scene
from corrviz.render.style import StyleConfig, load_style

log = logging.getLogger("corrviz")

STYLE_ENV = "CORRVIZ_STYLE"

STATS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": "1"},
        "n_points": {"type": "integer", "minimum": 1},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "model": {"type": "string"},
                    "d2": {"type": "number", "minimum": 0},
                    "dof": {"type": "integer", "minimum": 1},
                    "p_value": {"type": "number", "minimum": 0, "maximum": 1},
                    "gradient": {"type": "array", "items": {"type": "number"}},
                    "gradient_endpoint_d2": {"type": "number", "minimum": 0},
                },
                "required": ["model", "d2", "dof", "p_value"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema_version", "n_points", "reports"],
    "additionalProperties": False,
}

PLOT_COMMANDS = (
    "plot-pc",
    "plot-classic",
    "plot-corrlines",
    "plot-hinton",
    "plot-heatmap",
    "plot-pairwise",
    "plot-ratio",
)


@dataclass
class CliConfig:
    subcommand: str
    input: Path | None = None
    output: Path | None = None
    input_format: str | None = None
    policy: str = "median"
    n_components: int = 1
    show_lines: bool = True
    show_conditional: bool = True
    lines_on: str = "remaining"
    all_pairs: bool = False
    models: list | None = None
    reference: str | None = None
    matrix: str = "full"
    style: StyleConfig = field(default_factory=StyleConfig)
    # stats
    json: bool = False
    gradient: bool = False
    # generate
    kind: str | None = None
    n_points: int | None = None
    seed: int = 0


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corrviz", description="Correlation-aware statistics and SVG plots.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    subs = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    io = _Parser(add_help=False)
    io.add_argument("input", type=Path, help="dataset file (.json or .csv)")
    io.add_argument("-o", "--output", type=Path, help="output file; stdout when omitted")
    io.add_argument("--format", dest="input_format", choices=ingest.FORMATS,
                    help="input format; taken from the file suffix by default")

    look = _Parser(add_help=False)
    look.add_argument("--style", type=Path,
                      help=f"JSON style file (default: ${STYLE_ENV} if set)")
    look.add_argument("--set", dest="style_set", action="append", default=[],
                      metavar="KEY=VALUE", help="override one style value")

    reduction = _Parser(add_help=False)
    reduction.add_argument("--policy", choices=stats.POLICIES, default="median")
    reduction.add_argument("--n-components", type=_positive_int, default=1)

    markers = _Parser(add_help=False)
    markers.add_argument("--no-corrlines", dest="show_lines", action="store_false")
    markers.add_argument("--no-conditional", dest="show_conditional", action="store_false")
    markers.add_argument("--lines-on", choices=scene.LINES_ON, default="remaining")

    chooser = _Parser(add_help=False)
    chooser.add_argument("--model", dest="models", action="append", metavar="NAME",
                         help="draw only this model (repeatable)")

    pairs = _Parser(add_help=False)
    pairs.add_argument("--all-pairs", action="store_true",
                       help="correlation lines between every pair, not just neighbours")

    subs.add_parser("plot-pc", parents=[io, look, reduction, markers, chooser, pairs],
                    help="principal-component plot with hatched bands")
    subs.add_parser("plot-classic", parents=[io, look, chooser],
                    help="plain error bars with goodness of fit in the legend")
    subs.add_parser("plot-corrlines", parents=[io, look, chooser, pairs],
                    help="error bars with correlation lines")
    for name, what in (("plot-hinton", "Hinton diagram"), ("plot-heatmap", "gray heatmap")):
        p = subs.add_parser(name, parents=[io, look, reduction], help=f"{what} of the correlation")
        p.add_argument("--matrix", choices=("full", "remaining"), default="full")
    subs.add_parser("plot-pairwise", parents=[io, look, reduction],
                    help="full, remaining and conditional ellipses for every pair")
    ratio = subs.add_parser("plot-ratio", parents=[io, look, reduction, markers, chooser],
                            help="data/model ratio with the scaled M-distance gradient")
    ratio.add_argument("--reference", metavar="NAME",
                       help="model to divide by (default: the first one)")

    st = subs.add_parser("stats", parents=[io, chooser], help="goodness of fit for each model")
    st.add_argument("--json", action="store_true", help="print JSON instead of text")
    st.add_argument("--gradient", action="store_true",
                    help="include the M-distance gradient and its scaled endpoint")

    gen = subs.add_parser("generate", help="write a synthetic example dataset")
    gen.add_argument("kind", choices=examples.KINDS)
    gen.add_argument("--n", dest="n_points", type=_positive_int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", type=Path, help="output file; stdout when omitted")
    gen.add_argument("--format", dest="output_format", choices=ingest.FORMATS, default=None,
                     help="output format; taken from the file suffix by default")
    return parser


def _parse_style_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _resolve_style(path: Path | None, overrides: list) -> StyleConfig:
    if path is None and os.environ.get(STYLE_ENV):
        path = Path(os.environ[STYLE_ENV])
    style = load_style(path) if path is not None else StyleConfig()
    changes = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise _UsageError(f"corrviz: error: --set expects KEY=VALUE, got {item!r}")
        changes[key.strip().replace("-", "_")] = _parse_style_value(value)
    return StyleConfig.from_dict({**style.to_dict(), **changes}) if changes else style


def parse_config(argv) -> CliConfig:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    cfg = CliConfig(subcommand=args.subcommand)
    for key in ("input", "output", "input_format", "policy", "n_components", "show_lines",
                "show_conditional", "lines_on", "all_pairs", "models", "reference", "matrix",
                "json", "gradient", "kind", "n_points", "seed"):
        if key in ns:
            setattr(cfg, key, ns[key])
    if "output_format" in ns:
        cfg.input_format = ns["output_format"]
    if "style" in ns:
        try:
            cfg.style = _resolve_style(ns["style"], ns["style_set"])
        except (OSError, ValueError, TypeError) as exc:
            raise _UsageError(f"corrviz: error: bad style: {exc}") from exc
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="corrviz: %(levelname)s: %(message)s")
    return cfg


def write_atomic(path: Path, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output: Path | None, stdout):
    if output is None:
        stdout.write(text)
    else:
        write_atomic(output, text)
        log.info("wrote %s", output)


def _plot(cfg: CliConfig, ds: stats.DataSet) -> str:
    style = cfg.style
    cmd = cfg.subcommand
    if cmd == "plot-classic":
        return plots.render_pc_plot(scene.classic_scene(ds, cfg.models), style)
    if cmd == "plot-corrlines":
        return plots.render_pc_plot(scene.corrlines_scene(ds, cfg.models, cfg.all_pairs), style)
    if cmd == "plot-pc":
        sc = scene.pc_scene(
            ds, cfg.n_components, cfg.policy, cfg.show_lines, cfg.show_conditional,
            cfg.lines_on, cfg.models, cfg.all_pairs,
        )
        return plots.render_pc_plot(sc, style)
    if cmd == "plot-ratio":
        if not ds.models:
            raise ValueError("plot-ratio needs at least one model in the dataset")
        reference = cfg.reference if cfg.reference is not None else 0
        sc = scene.ratio_scene(
            ds, reference, cfg.n_components, cfg.policy, cfg.show_lines,
            cfg.show_conditional, cfg.lines_on, cfg.models,
        )
        return plots.render_ratio_plot(sc, style)
    decomp, reduced, remaining_cov = stats.reduce_covariance(ds.cov, cfg.n_components, cfg.policy)
    if cmd == "plot-pairwise":
        return plots.render_pairwise_grid(geometry.pairwise_ellipse_grid(ds, decomp, reduced), style)
    corr = decomp.correlation
    if cfg.matrix == "remaining" and reduced is not None:
        corr = stats.correlation_of(remaining_cov)
    mode = "hinton" if cmd == "plot-hinton" else "heatmap_gray"
    return plots.render_matrix(corr, mode, style, ds.labels or None)


def stats_payload(ds: stats.DataSet, models=None, with_gradient: bool = False) -> dict:
    names = models if models is not None else ds.model_names
    reports = [stats.gof(ds.y, ds.model(name), ds.cov, name, with_gradient) for name in names]
    return {
        "schema_version": "1",
        "n_points": ds.n,
        "reports": [r.to_dict() for r in reports],
    }


def _stats_text(payload: dict) -> str:
    lines = []
    for r in payload["reports"]:
        line = f"{r['model']}: d2 = {r['d2']:.6g}, dof = {r['dof']}, p = {r['p_value']:.4g}"
        if "gradient_endpoint_d2" in r:
            line += f", gradient endpoint d2 = {r['gradient_endpoint_d2']:.6g}"
        lines.append(line)
    if not lines:
        lines.append("no models in dataset")
    return "\n".join(lines) + "\n"


def execute(cfg: CliConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if cfg.subcommand == "generate":
        ds = examples.generate(cfg.kind, cfg.n_points, cfg.seed)
        fmt = cfg.input_format or (ingest.format_for_path(cfg.output) if cfg.output else "json")
        _emit(ingest.save_dataset(ds, fmt), cfg.output, stdout)
        return 0
    ds = ingest.load_dataset(Path(cfg.input), cfg.input_format)
    if cfg.models:
        for name in cfg.models:
            ds.model(name)
    if cfg.subcommand == "stats":
        payload = stats_payload(ds, cfg.models, cfg.gradient)
        text = json.dumps(payload, indent=2) + "\n" if cfg.json else _stats_text(payload)
        _emit(text, cfg.output, stdout)
        return 0
    _emit(_plot(cfg, ds), cfg.output, stdout)
    return 0


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one command line; returns the process exit status."""
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except _UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    context = str(cfg.input) if cfg.input is not None else cfg.subcommand
    try:
        return execute(cfg, stdout)
    except (CorrvizError, ValueError, KeyError, IndexError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"corrviz: error: {context}: {message}", file=stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
