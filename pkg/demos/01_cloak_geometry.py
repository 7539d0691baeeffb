#!/usr/bin/env python3
"""Streamlines through a cylindrical cloak and the time spent in its shell.

Every trajectory takes the same total time 2L/v; only the part spent
inside the shell (the dwell time) depends on the impact parameter.
"""

import numpy as np

from cloaksteer import cloak

geom = cloak.CloakGeometry(R=1.0, L=3.0, v=1.0, a=0.5)

print("  y1    dwell   total")
for y1 in (0.0, 0.25, 0.5, 0.75, 0.95, 1.0, 1.5):
    print(f"{y1:5.2f}  {cloak.dwell_time(geom, y1):6.4f}  {cloak.total_traversal_time(geom, y1):6.4f}")

paths = [cloak.trajectory(geom, y1, 101) for y1 in np.linspace(-1.4, 1.4, 15) if abs(y1) > 1e-9]
closest = min(np.hypot(*p.points.T).min() for p in paths)
print(f"\nclosest approach to the hidden region (a = {geom.a}): {closest:.4f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in paths:
        ax.plot(*p.points.T, "b-", lw=0.8)
    th = np.linspace(0, 2 * np.pi, 200)
    for r, style in ((geom.R, "k--"), (geom.a, "k-")):
        ax.plot(r * np.cos(th), r * np.sin(th), style)
    ax.set_aspect("equal")
    ax.set_xlabel("x (1/k)")
    ax.set_ylabel("y (1/k)")
    fig.savefig("cloak_trajectories.png", dpi=120)
    print("wrote cloak_trajectories.png")
