#!/usr/bin/env python3
"""Electron spin coupled to a hidden spin inside the shell.

The flip-flop interaction swaps the excitation back and forth, so the
steering parameter oscillates with period pi/J and dips to 0.875, below
the classical bound, at J t = pi/3 and 2 pi/3.
"""

import math

import numpy as np

from cloaksteer import ExchangeCoupling, SteeringTask, channels, coupling_S_closed_form, qops, steering_exact

J = 1.0
ts = np.linspace(0, 2 * math.pi, 13)
for t in ts:
    S = steering_exact(SteeringTask(ExchangeCoupling(J), t)).S
    bar = "#" * int(round(40 * (S - 0.8)))
    print(f"Jt={J * t:5.2f}  S={S:.4f}  closed={coupling_S_closed_form(J, t):.4f}  {bar}")

# what the probe spin looks like half way through a swap
up = qops.ket_to_dm([1, 0])
print("\nprobe |up> after Jt = pi/4:\n", np.round(channels.apply(ExchangeCoupling(J), up, math.pi / 4), 6))
