"""Command-line front end: ``mesondist {sweep,crossover,grid,reproduce}``.

Exit status: 0 on success (including "no crossover found"), 2 for
configuration errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
import textwrap
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import analysis
from .errors import ConfigurationError, NumericalError
from .metrics import METRICS, DistanceKind
from .states import ScenarioKind, StateFamily, make_family

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

FAMILY_FLAGS = ("l", "bg", "f", "f_phase", "f1", "f1_phase", "f2", "f2_phase")
_PARAMS_BY_KIND = {
    ScenarioKind.DECOHERED: {"l"},
    ScenarioKind.DECOHERED_BG: {"l", "bg"},
    ScenarioKind.SINGLET_REGEN_MIX: {"f", "f_phase"},
    ScenarioKind.TWO_SLAB_MIX: {"f1", "f1_phase", "f2", "f2_phase"},
    ScenarioKind.DEPOLARIZED: set(),
    ScenarioKind.REGEN_DEPOLARIZED: {"f", "f_phase"},
}


def fmt(v: float) -> str:
    return format(float(v), ".12g")


def write_csv(out, header: Sequence[str], rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        p = Path(path)
        if p.parent != Path("."):
            p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            yield fh


@dataclass
class RunConfig:
    family: str
    params: dict = field(default_factory=dict)
    param: str | None = None
    start: float | None = None
    stop: float | None = None
    steps: int = 500
    log: bool = False
    metrics: tuple[DistanceKind, ...] = METRICS
    gradients: bool = False
    out: str | None = None

    def build_family(self) -> StateFamily:
        try:
            kind = ScenarioKind(self.family)
        except ValueError:
            tokens = ", ".join(k.value for k in ScenarioKind)
            raise ConfigurationError(f"--family: unknown scenario {self.family!r}; expected one of {tokens}") from None
        allowed = _PARAMS_BY_KIND[kind]
        for name in self.params:
            if name not in allowed:
                raise ConfigurationError(f"--{name.replace('_', '-')}: not a parameter of {kind}")
        p = dict(self.params)
        kw = {}
        if "l" in p:
            kw["l"] = p["l"]
        if "bg" in p:
            kw["bg"] = p["bg"]
        for base in ("f", "f1", "f2"):
            if base in p or f"{base}_phase" in p:
                if base not in p:
                    raise ConfigurationError(f"--{base}-phase given without --{base}")
                phase = p.get(f"{base}_phase", 0.0)
                kw[base] = p[base] * complex(math.cos(phase), math.sin(phase)) if phase else complex(p[base])
        family = make_family(kind, kw)
        if self.param is not None and self.param != family.parameter_name:
            raise ConfigurationError(
                f"--param: {kind} sweeps {family.parameter_name!r}, not {self.param!r}"
            )
        return family

    def grid(self, family: StateFamily):
        if self.steps < 2:
            raise ConfigurationError(f"--steps: must be >= 2, got {self.steps}")
        default = analysis.default_grid(family, 2)
        lo = default[0] if self.start is None else self.start
        hi = default[-1] if self.stop is None else self.stop
        if not lo < hi:
            raise ConfigurationError(f"--from/--to: need from < to, got {lo} and {hi}")
        for name, v in (("--from", lo), ("--to", hi)):
            try:
                family.check_domain(v)
            except ConfigurationError as exc:
                raise ConfigurationError(f"{name}: {exc}") from None
        if self.log:
            if lo <= 0:
                raise ConfigurationError("--from: must be > 0 for a logarithmic grid")
            return analysis.log_grid(lo, hi, self.steps)
        return analysis.linear_grid(lo, hi, self.steps)


def _parse_metrics(text) -> tuple[DistanceKind, ...]:
    if isinstance(text, (list, tuple)):
        tokens = list(text)
    else:
        tokens = [t for t in str(text).split(",") if t.strip()]
    try:
        return tuple(DistanceKind.parse(t) for t in tokens)
    except ValueError:
        raise ConfigurationError(f"--metrics: expected tokens from bures,hs,trace, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that --config values can fill the gaps
    p.add_argument("--config", help="JSON file of defaults; flags take precedence")
    p.add_argument("--family", help="scenario token: " + ", ".join(k.value for k in ScenarioKind))
    p.add_argument("--param", choices=("t", "x"), help="swept parameter (must match the family)")
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int, help="number of grid intervals; rows = steps + 1")
    p.add_argument("--log", action="store_true", default=None, help="logarithmic grid")
    p.add_argument("--metrics", help="comma-separated subset of bures,hs,trace")
    p.add_argument("--gradients", action="store_true", default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--l", type=float, help="decoherence rate; t is in units of 1/l (default 1)")
    p.add_argument("--bg", type=float, help="background fraction for decohered-bg")
    p.add_argument("--f", type=float, help="regeneration amplitude modulus")
    p.add_argument("--f-phase", dest="f_phase", type=float)
    p.add_argument("--f1", type=float)
    p.add_argument("--f1-phase", dest="f1_phase", type=float)
    p.add_argument("--f2", type=float)
    p.add_argument("--f2-phase", dest="f2_phase", type=float)
    p.add_argument("--x-fixed", dest="x_fixed", type=float)


def _merged(args: argparse.Namespace) -> dict:
    """Flags override the optional JSON config file."""
    conf: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"--config: cannot read {args.config}: {exc}") from None
        if not isinstance(conf, dict):
            raise ConfigurationError("--config: top level must be a JSON object")
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        conf.setdefault("start", conf.pop("from", None))
        conf.setdefault("stop", conf.pop("to", None))
    merged = {k: v for k, v in conf.items() if v is not None}
    merged.update({k: v for k, v in vars(args).items() if v is not None})
    return merged


def _run_config(opts: dict, *, default_steps: int = 500) -> RunConfig:
    if not opts.get("family"):
        raise ConfigurationError("--family: required")
    params = {k: float(opts[k]) for k in FAMILY_FLAGS if opts.get(k) is not None}
    return RunConfig(
        family=str(opts["family"]),
        params=params,
        param=opts.get("param"),
        start=opts.get("start"),
        stop=opts.get("stop"),
        steps=int(opts.get("steps", default_steps)),
        log=bool(opts.get("log", False)),
        metrics=_parse_metrics(opts.get("metrics", "bures,hs,trace")),
        gradients=bool(opts.get("gradients", False)),
        out=opts.get("out"),
    )


def cmd_sweep(opts: dict) -> int:
    cfg = _run_config(opts)
    family = cfg.build_family()
    grid = cfg.grid(family)
    result = analysis.sweep(family, grid, with_gradients=cfg.gradients)
    header, rows = result.table(cfg.metrics)
    with _open_out(cfg.out) as fh:
        write_csv(fh, header, rows)
    return EXIT_OK


def default_bracket(family: StateFamily) -> tuple[float, float]:
    if family.parameter_name == "t":
        tau = family.metadata["tau"]
        return 0.1 * tau, 2.0 * tau
    return 0.01, 0.99


def crossover_report(cfg: RunConfig) -> dict:
    family = cfg.build_family()
    if len(cfg.metrics) != 2 or cfg.metrics[0] == cfg.metrics[1]:
        raise ConfigurationError("--metrics: crossover needs exactly two distinct metrics")
    lo, hi = default_bracket(family)
    lo = lo if cfg.start is None else cfg.start
    hi = hi if cfg.stop is None else cfg.stop
    report = analysis.sensitivity_crossover(family, cfg.metrics[0], cfg.metrics[1], (lo, hi))
    out = report.to_json()
    out["family"] = family.describe()
    out["parameter"] = family.parameter_name
    return out


def _dump_json(obj, path) -> None:
    with _open_out(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_crossover(opts: dict) -> int:
    opts = {"metrics": "bures,hs", **opts}
    cfg = _run_config(opts)
    _dump_json(crossover_report(cfg), cfg.out)
    return EXIT_OK


GRID_LO, GRID_HI, GRID_STEPS = 1e-4, 0.5, 59


def grid_result(opts: dict) -> analysis.GridResult:
    steps = int(opts.get("steps", GRID_STEPS))
    if steps < 1:
        raise ConfigurationError(f"--steps: must be >= 1, got {steps}")
    lo, hi = float(opts.get("start", GRID_LO)), float(opts.get("stop", GRID_HI))
    if not 0 < lo < hi < 1:
        raise ConfigurationError(f"--from/--to: need 0 < from < to < 1, got {lo} and {hi}")
    metrics = _parse_metrics(opts.get("metrics", "bures,hs"))
    if len(metrics) != 2:
        raise ConfigurationError("--metrics: grid needs exactly two metrics")
    axis = analysis.log_grid(lo, hi, steps)
    return analysis.sweep_2d(
        axis, axis, float(opts.get("x_fixed", 0.5)),
        f1_phase=float(opts.get("f1_phase", 0.0)),
        f2_phase=float(opts.get("f2_phase", 0.0)),
        metric_a=metrics[0], metric_b=metrics[1],
    ), metrics


def cmd_grid(opts: dict) -> int:
    result, (a, b) = grid_result(opts)
    with _open_out(opts.get("out")) as fh:
        write_csv(fh, ["f1", "f2", f"diff_{a}_{b}"], result.rows())
    return EXIT_OK


# (label, family, params, metrics, bracket, quoted value)
CROSSOVER_TABLE = (
    ("decoherence", "decohered", {"l": 1.0}, ("bures", "hs"), (0.1, 2.0), 0.69),
    ("decoherence, 1% background", "decohered-bg", {"l": 1.0, "bg": 0.01}, ("bures", "hs"), (0.1, 2.0), 0.67),
    ("decoherence, 10% background", "decohered-bg", {"l": 1.0, "bg": 0.10}, ("bures", "hs"), (0.1, 2.0), 0.51),
    ("depolarized, bures vs hs", "depolarized", {}, ("bures", "hs"), (0.1, 0.95), 0.5),
    ("depolarized, bures vs trace", "depolarized", {}, ("bures", "trace"), (0.1, 0.95), 0.6667),
    ("two-slab mixture in x", "two-slab-mix", {"f1": 0.05, "f2": 0.001}, ("bures", "hs"), (0.1, 0.95), 0.75),
)


def crossover_table() -> list[dict]:
    entries = []
    for label, kind, params, (a, b), bracket, quoted in CROSSOVER_TABLE:
        rep = analysis.sensitivity_crossover(make_family(kind, params), a, b, bracket)
        entries.append({
            "label": label,
            "family": kind,
            "params": params,
            "metrics": [a, b],
            "bracket": list(bracket),
            "quoted": quoted,
            "computed": rep.theta_star,
            "crossover_found": rep.found,
            "dominant_low_side": str(rep.dominant_low_side),
            "dominant_high_side": str(rep.dominant_high_side),
        })
    return entries


def _write_curve(path: Path, family: StateFamily, grid, pairs) -> None:
    curves = [analysis.difference_curve(family, a, b, grid) for a, b in pairs]
    header = ["theta"] + [c.column for c in curves]
    rows = zip(curves[0].theta, *(c.diff for c in curves))
    with _open_out(path) as fh:
        write_csv(fh, header, rows)


FIGURES = ("fig1", "fig2", "fig3", "fig4", "table-crossovers")


def reproduce(figure: str, outdir: Path) -> list[Path]:
    """Write the data behind one figure (named by caption content) into ``outdir``.

    fig1: bures - hs, singlet vs decohered singlet, t in [0, 5 tau].
    fig2: bures - hs surface over log f1, log f2 for the two-slab mixture, x = 0.5.
    fig3: bures - hs for the two-slab mixture, f1 = 0.05, f2 = 0.001, versus x.
    fig4: bures - hs and bures - trace for the depolarized singlet versus x.
    table-crossovers: every crossover number, quoted next to the computed value.
    """
    outdir.mkdir(parents=True, exist_ok=True)
    if figure == "fig1":
        fam = make_family("decohered", l=1.0)
        path = outdir / "fig1.csv"
        _write_curve(path, fam, analysis.linear_grid(0.0, 5.0, 500), [("bures", "hs")])
    elif figure == "fig2":
        path = outdir / "fig2.csv"
        result, (a, b) = grid_result({})
        with _open_out(path) as fh:
            write_csv(fh, ["f1", "f2", f"diff_{a}_{b}"], result.rows())
    elif figure == "fig3":
        fam = make_family("two-slab-mix", f1=0.05, f2=0.001)
        path = outdir / "fig3.csv"
        _write_curve(path, fam, analysis.linear_grid(0.0, 1.0, 400), [("bures", "hs")])
    elif figure == "fig4":
        fam = make_family("depolarized")
        path = outdir / "fig4.csv"
        _write_curve(path, fam, analysis.linear_grid(0.0, 0.999, 500), [("bures", "hs"), ("bures", "trace")])
    elif figure == "table-crossovers":
        path = outdir / "crossovers.json"
        _dump_json(crossover_table(), path)
    else:
        raise ConfigurationError(f"figure: expected one of {', '.join(FIGURES)} or all, got {figure!r}")
    return [path]


def cmd_reproduce(opts: dict) -> int:
    outdir = Path(opts.get("out") or ".")
    figures = FIGURES if opts["figure"] == "all" else (opts["figure"],)
    for fig in figures:
        for path in reproduce(fig, outdir):
            print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mesondist",
        description="Distances between two-meson density matrices and their sensitivity crossovers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("sweep", help="distance table along one scenario family (CSV)")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("crossover", help="locate where two metrics' sensitivities are equal (JSON)")
    _add_common(p)
    p.set_defaults(func=cmd_crossover)
    p = sub.add_parser("grid", help="bures - hs over a log (f1, f2) grid for the two-slab mixture (CSV)")
    _add_common(p)
    p.set_defaults(func=cmd_grid)
    p = sub.add_parser(
        "reproduce",
        help="write the data behind a figure",
        description=textwrap.dedent(reproduce.__doc__.split("\n\n", 1)[1]),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("figure", choices=FIGURES + ("all",))
    p.add_argument("--out", help="output directory (default: current directory)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = args.func
    try:
        opts = _merged(args)
        opts.pop("func", None)
        opts.pop("command", None)
        return func(opts)
    except ConfigurationError as exc:
        print(f"mesondist: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"mesondist: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
