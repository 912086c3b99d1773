"""
Auditing every derivative
=========================

Each analytic derivative is checked against a central difference of the
forward pass alone. Then the same idea is applied to a whole network.
"""

import numpy as np

from adaptact import activations as act
from adaptact import gradcheck as gc
from adaptact import network as nw

pts = gc.uniform_points(1000, -5, 5, seed=0)

print(f"{'family':<10} {'checks':>7} {'skipped':>8} {'max rel err':>12}")
for row in act.registry_list():
    reps = gc.audit_activation(act.make(row.kind), pts)
    skipped = sum(r.skipped for r in reps)
    flag = "" if gc.all_passed(reps) else "  FAIL"
    print(f"{row.kind.value:<10} {len(reps):>7} {skipped:>8} {gc.max_rel_err(reps):>12.2e}{flag}")

# A wrong derivative does not slip through: scale SiLU's by 1%.
bad = gc.audit_activation(act.make("silu"), pts[:5],
                          analytic_dx=lambda i, z: act.derivative_batch(i, z) * 1.01)
print(f"\ncorrupted silu derivative: {len(gc.failures(bad))} of {len(bad)} checks fail")

# Whole-network audit: weights, biases and the shared alpha of the hidden layer.
rng = np.random.default_rng(0)
net = nw.init_network([20, 12, 4], activation="erfrelu", seed=0)
x, y = rng.normal(size=(8, 20)), rng.integers(0, 4, size=8)
reps = gc.audit_network(net, x, y)
alpha = [r for r in reps if r.target.endswith("alpha")][0]
print(f"\nnetwork: {len(reps)} coordinates, all pass = {gc.all_passed(reps)}")
print(f"dL/dalpha analytic {alpha.analytic:.10f}  numeric {alpha.numeric:.10f}")

print("\nfirst rows of the CSV report:")
print("".join(gc.write_csv(reps).splitlines(keepends=True)[:4]), end="")
