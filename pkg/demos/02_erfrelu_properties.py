"""
ErfReLU up close
================

ErfReLU is the identity for x >= 0 and alpha * erf(x) below zero. This walks
through what that buys: an exact identity branch, a floor at -alpha, and a
derivative that is continuous at 0 only for one special alpha.
"""

import math

import numpy as np

from adaptact import activations as act
from adaptact.numerics import TWO_OVER_SQRT_PI, erf, erf_oracle

# Our erf against a slow quadrature of exp(-t^2). They share nothing but the integrand.
for x in (0.1, 0.5, 1.0, 2.0, 3.0, 5.0):
    print(f"erf({x}) = {float(erf(x)):.16f}   quadrature {erf_oracle(x):.16f}")

f = act.make("erfrelu")
alpha = f.params["alpha"]
print(f"\ndefault alpha = {alpha}")

# Positive side: untouched.
print("f(1.5) =", act.forward(f, 1.5))

# Negative side saturates at -alpha instead of dying at 0 like ReLU.
for x in (-0.5, -1.0, -2.0, -4.0, -8.0):
    print(f"f({x}) = {act.forward(f, x): .12f}")

# Slope at the origin from each side.
left = act.derivative(f, -1e-300)
print(f"\nf'(0+) = {act.derivative(f, 0.0)},  f'(0-) = alpha*2/sqrt(pi) = {left:.6f}")

# The two sides agree only when alpha = sqrt(pi)/2.
smooth = math.sqrt(math.pi) / 2
g = act.make("erfrelu", alpha=smooth)
print(f"alpha = sqrt(pi)/2 = {smooth:.6f} gives f'(0-) = {act.derivative(g, -1e-300):.15f}")
print(f"default alpha differs from it by {smooth - alpha:.6f}")

# And alpha's own gradient is erf(x) on the negative side, 0 elsewhere.
xs = np.array([-2.0, -0.5, 0.5])
print("\nd f / d alpha at", xs, "=", np.round(act.param_gradient_batch(f, xs)[0], 6))
print("erf at the same points         =", np.round(np.where(xs < 0, erf(xs), 0.0), 6))
print("2/sqrt(pi) =", TWO_OVER_SQRT_PI)
