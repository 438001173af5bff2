"""Grids, quadrature, and convolution against rescaled compact kernels.

Run:  python3 demos/01_grid_and_convolution.py
"""

import numpy as np

from sqlab import GridSpec, SampledField, TimeLadder, convolve_scaled, integrate

grid = GridSpec(dim=1, half_width=4.0, points=257)
print(f"grid: {grid.points} nodes on [-{grid.half_width}, {grid.half_width}], "
      f"spacing {grid.spacing}")

# The global trapezoid rule integrates piecewise-linear data exactly.
f = SampledField.from_function(grid, lambda x: np.exp(-(x ** 2)) * np.sin(3.0 * x))
print(f"integral of exp(-x^2) sin(3x): {integrate(f):+.6e} (odd, so ~0)")

square = SampledField.from_function(grid, lambda x: x ** 2)
print(f"integral of x^2 over the box: {integrate(square):.6f} "
      f"(exact {2 * 4.0 ** 3 / 3:.6f})")

# Kernels live on their own unit-box grid; convolve_scaled shrinks the
# support to radius t around each output point.  A kernel with zero mean
# annihilates constants no matter the scale.
kgrid = GridSpec(1, 1.0, 65)
u = kgrid.nodes()[:, 0]
tent_pair = SampledField(kgrid, -np.sign(u) * np.minimum(np.abs(u), 1.0 - np.abs(u)))

const = SampledField(grid, np.full(grid.n_nodes, 3.0))
step = SampledField.from_function(grid, lambda x: np.where(x > 0, 1.0, 0.0))
for t in TimeLadder(0.25, 2.0, 4).nodes:
    at_zero = convolve_scaled(const, tent_pair, float(t), [0.0])
    response = convolve_scaled(step, tent_pair, float(t), [0.0])
    print(f"t = {t:5.3f}: zero-mean kernel on a constant -> {at_zero:+.2e}; "
          f"on the step -> {response:+.6f}")

# The step response is scale-invariant here: substituting z = u/t inside
# the convolution removes every factor of t for this odd kernel.
