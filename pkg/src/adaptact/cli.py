"""Command-line entry point: ``adaptact {list,plot,gradcheck,train,compare}``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import activations as act
from . import gradcheck as gc
from .errors import (
    BadRange,
    ConfigError,
    IdxError,
    ParamDomainError,
    UnknownActivation,
)
from .experiment import RunConfig, compare, train

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def parse_params(text: str | None) -> dict[str, float]:
    """``"alpha=0.5,beta=2"`` -> ``{"alpha": 0.5, "beta": 2.0}``."""
    out: dict[str, float] = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"bad parameter override {item!r}; expected NAME=VALUE")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"parameter {key.strip()!r} needs a number, got {val!r}") from None
    return out


def cmd_list(as_json: bool = False) -> str:
    rows = act.registry_list()
    if as_json:
        payload = [
            {
                "name": r.kind.value,
                "label": r.label,
                "arity": r.arity,
                "params": [
                    {"name": n, "default": d, "trainable": t}
                    for n, d, t in zip(r.names, r.defaults, r.trainable)
                ],
                "kinks": list(r.kinks),
                "benchmark": r.benchmark,
            }
            for r in rows
        ]
        return json.dumps(payload, indent=2) + "\n"
    lines = []
    for r in rows:
        params = ", ".join(
            f"{n}={d:g}{'' if t else ' (frozen)'}" for n, d, t in zip(r.names, r.defaults, r.trainable)
        )
        tag = "benchmark" if r.benchmark else ""
        lines.append(f"{r.kind.value:<10} {r.label:<10} {r.arity}  {params or '-':<42} {tag}".rstrip())
    return "\n".join(lines) + "\n"


def cmd_plot(kind: str, params: dict[str, float] | None = None, lo: float = -6.0,
             hi: float = 6.0, samples: int = 241) -> tuple[np.ndarray, np.ndarray, np.ndarray, str]:
    """Sample f and f' on an inclusive uniform grid; returns (x, f, df, csv_text)."""
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise BadRange(f"range must satisfy min < max, got [{lo}, {hi}]")
    if samples < 2:
        raise BadRange(f"need at least 2 samples, got {samples}")
    inst = act.make(kind, **(params or {}))
    x = np.linspace(lo, hi, samples)
    f = act.forward_batch(inst, x)
    df = act.derivative_batch(inst, x)
    lines = ["x,f,df"] + [f"{a!r},{b!r},{c!r}" for a, b, c in zip(x.tolist(), f.tolist(), df.tolist())]
    return x, f, df, "\n".join(lines) + "\n"


def render_svg(x: np.ndarray, series: dict[str, np.ndarray], width: int = 480,
               height: int = 320, title: str = "") -> str:
    """Plain polyline chart, one line per series."""
    pad = 30
    ys = np.concatenate(list(series.values()))
    ymin, ymax = float(ys.min()), float(ys.max())
    if ymax == ymin:
        ymax = ymin + 1.0
    xmin, xmax = float(x.min()), float(x.max())

    def sx(v):
        return pad + (v - xmin) / (xmax - xmin) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - ymin) / (ymax - ymin) * (height - 2 * pad)

    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if ymin < 0 < ymax:
        parts.append(f'<line x1="{pad}" y1="{sy(0):.2f}" x2="{width - pad}" y2="{sy(0):.2f}" '
                     'stroke="#999" stroke-width="0.5"/>')
    if xmin < 0 < xmax:
        parts.append(f'<line x1="{sx(0):.2f}" y1="{pad}" x2="{sx(0):.2f}" y2="{height - pad}" '
                     'stroke="#999" stroke-width="0.5"/>')
    for i, (name, y) in enumerate(series.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        c = colours[i % len(colours)]
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{pad + 5}" y="{pad + 14 * (i + 1)}" font-size="12" fill="{c}">{name}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="18" font-size="13" text-anchor="middle">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_gradcheck(kinds: Sequence[str] | None = None, points: int = 1000, tol: float = 1e-5,
                  seed: int = 0, corrupt: float | None = None) -> list[gc.GradReport]:
    if not tol > 0:
        raise ConfigError("tol must be positive")
    selected = [act.ActivationKind.parse(k) for k in kinds] if kinds else [
        r.kind for r in act.registry_list()
    ]
    xs = gc.uniform_points(points, -5.0, 5.0, seed)
    analytic_dx = None
    if corrupt is not None:
        def analytic_dx(inst, z):
            return act.derivative_batch(inst, z) * (1.0 + corrupt)
    reports = []
    for kind in selected:
        reports.extend(gc.audit_activation(act.make(kind), xs, tol, analytic_dx=analytic_dx))
    return reports


def _config_from_args(args) -> RunConfig:
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    changes = {}
    if args.activation is not None:
        changes["activation"] = args.activation
    if args.params is not None:
        changes["params"] = parse_params(args.params)
    if args.freeze:
        changes["freeze"] = True
    for name in ("epochs", "batch_size", "lr", "seed", "data_dir", "dataset", "optimizer",
                 "train_limit", "test_limit"):
        val = getattr(args, name)
        if val is not None:
            changes[name] = val
    if args.sizes is not None:
        try:
            changes["sizes"] = [int(s) for s in args.sizes.split(",")]
        except ValueError:
            raise ConfigError(f"bad --sizes {args.sizes!r}") from None
    if args.out is not None:
        changes["out_dir"] = args.out
    return base.replace(**changes)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override it")
    p.add_argument("--activation")
    p.add_argument("--params", help="parameter overrides, e.g. alpha=0.5,beta=2")
    p.add_argument("--freeze", action="store_true", help="keep activation parameters fixed")
    p.add_argument("--sizes", help="layer widths, e.g. 784,128,10")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--optimizer", choices=["adam", "sgd"])
    p.add_argument("--seed", type=int)
    p.add_argument("--dataset", choices=["mnist", "blobs"])
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--train-limit", dest="train_limit", type=int)
    p.add_argument("--test-limit", dest="test_limit", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--json", action="store_true", help="print the metrics JSON to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptact", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="show the activation catalog")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("plot", help="write x,f,df samples of one activation")
    p.add_argument("activation")
    p.add_argument("--params")
    p.add_argument("--range", nargs=2, type=float, default=[-6.0, 6.0], metavar=("MIN", "MAX"))
    p.add_argument("--samples", type=int, default=241)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--svg", help="also write an SVG line chart here")

    p = sub.add_parser("gradcheck", help="finite-difference audit of every derivative")
    p.add_argument("--kinds", help="comma-separated families (default: all)")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the CSV report here (e.g. gradreport.csv)")
    p.add_argument("--json", action="store_true", help="print a JSON summary")
    p.add_argument("--corrupt-derivative", type=float, default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("train", help="train one network")
    _add_run_flags(p)

    p = sub.add_parser("compare", help="train one network per activation")
    _add_run_flags(p)
    p.add_argument("--activations", required=True,
                   help="comma-separated entries, NAME or NAME:frozen")
    return parser


def _run(args) -> int:
    if args.command == "list":
        sys.stdout.write(cmd_list(args.json))
        return EXIT_OK

    if args.command == "plot":
        lo, hi = args.range
        x, f, df, text = cmd_plot(args.activation, parse_params(args.params), lo, hi, args.samples)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.svg:
            Path(args.svg).write_text(render_svg(x, {"f": f, "df": df}, title=args.activation))
        return EXIT_OK

    if args.command == "gradcheck":
        kinds = [k for k in args.kinds.split(",") if k] if args.kinds else None
        reports = cmd_gradcheck(kinds, args.points, args.tol, args.seed, args.corrupt_derivative)
        bad = gc.failures(reports)
        if args.out:
            gc.write_csv(reports, args.out)
        summary = {
            "reports": len(reports),
            "skipped": sum(r.skipped for r in reports),
            "failed": len(bad),
            "max_rel_err": gc.max_rel_err(reports),
        }
        if args.json:
            sys.stdout.write(json.dumps(summary, indent=2) + "\n")
        else:
            print(f"{summary['reports']} checks, {summary['skipped']} skipped near kinks, "
                  f"{summary['failed']} failed, max rel err {summary['max_rel_err']:.3g}")
            for r in bad[:20]:
                print("FAIL", ",".join(r.row()))
        return EXIT_VERIFY if bad else EXIT_OK

    if args.command == "train":
        cfg = _config_from_args(args)
        metrics, _ = train(cfg)
        if args.json:
            sys.stdout.write(metrics.to_json())
        else:
            for e in metrics.epochs:
                print(f"epoch {e.epoch}: loss {e.train_loss:.4f}  train {e.train_accuracy:.4f}  "
                      f"test {e.test_accuracy:.4f}")
            for row in metrics.final_params:
                if row["params"]:
                    print(f"layer {row['layer']} {row['activation']}: {row['params']}")
            print(f"wall time {metrics.wall_time:.1f}s", file=sys.stderr)
        return EXIT_OK

    if args.command == "compare":
        cfg = _config_from_args(args)
        entries = [e for e in args.activations.split(",") if e.strip()]
        result = compare(cfg, entries, out_dir=cfg.out_dir)
        sys.stdout.write(result.to_json() if args.json else result.to_csv())
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, UnknownActivation, BadRange, ParamDomainError) as exc:
        print(f"adaptact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, IdxError) as exc:
        print(f"adaptact: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
