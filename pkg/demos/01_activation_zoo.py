"""
The activation catalog
======================

Every family in the registry, its parameters and their defaults, and an SVG
sketch of f and f' for the ten adaptive ones.

    python demos/01_activation_zoo.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from adaptact import activations as act
from adaptact.cli import cmd_plot, render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

# The registry is ordered and self-describing.
for row in act.registry_list():
    params = ", ".join(f"{n}={d:g}" for n, d in zip(row.names, row.defaults)) or "-"
    print(f"{row.kind.value:<10} {params}")

# One value at a handful of points, just to get a feel for the shapes.
xs = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
print()
print(" " * 10 + "".join(f"{x:>9g}" for x in xs))
for kind in act.BENCHMARK_KINDS:
    ys = act.forward_batch(act.make(kind), xs)
    print(f"{kind.value:<10}" + "".join(f"{y:9.4f}" for y in ys))

# Curves and derivatives, one SVG per adaptive family.
for kind in act.BENCHMARK_KINDS:
    x, f, df, _ = cmd_plot(kind.value, lo=-5, hi=5, samples=401)
    (out / f"{kind.value}.svg").write_text(render_svg(x, {"f": f, "df": df}, title=kind.value))

# ErfReLU with a few slopes on one chart: alpha only reshapes the negative side.
x = np.linspace(-4, 3, 351)
series = {f"alpha={a}": act.forward_batch(act.make("erfrelu", alpha=a), x) for a in (0.25, 0.882267, 1.5)}
(out / "erfrelu_alphas.svg").write_text(render_svg(x, series, title="erfrelu"))
print(f"\nSVGs written to {out}/")
