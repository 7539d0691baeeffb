#!/usr/bin/env python3
"""Local-hidden-state models cannot push the steering parameter above 1.

Random ensembles are generated and their steering parameter computed;
the maximum creeps towards but never crosses the classical bound. A
quantum channel that does nothing reaches 2.
"""

import numpy as np

from cloaksteer import Identity, SteeringTask, steering, steering_exact

rng = np.random.default_rng(0)
values = [steering.hidden_state_S(steering.random_ensemble(rng, 2), steering.default_bases(2)) for _ in range(5000)]
print(f"hidden-state models: max S = {max(values):.6f} over {len(values)} ensembles")
print(f"free flight:         S = {steering_exact(SteeringTask(Identity(), 1.0)).S}")

# rotating Bob's bases away from Alice's lowers S as 2 cos^2(angle)
for angle in (0, np.pi / 8, np.pi / 4, np.pi / 2):
    s = steering.steering_exact_misaligned(SteeringTask(Identity(), 1.0), angle).S
    print(f"misaligned by {angle:.3f} rad: S = {s:.4f}")
