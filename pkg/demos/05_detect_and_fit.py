#!/usr/bin/env python3
"""From a measurement record to a verdict and a channel estimate.

Simulated traversals at a handful of impact parameters give sampled
steering values. The detector compares each against the free-flight
value 2, and the two channel models are fitted to see which explains the
data.
"""

import numpy as np

from cloaksteer import CloakGeometry, Dephasing, ObservationSet, SteeringTask, cloak, detect, detector, steering_sampled

geom = CloakGeometry(R=1.0, L=3.0, v=2.0)
true_gamma = 0.8
records = []
for i, y1 in enumerate(np.linspace(0.05, 0.95, 12)):
    t = cloak.dwell_time(geom, y1)
    est = steering_sampled(SteeringTask(Dephasing(true_gamma), t), 100_000, seed=i)
    records.append(detector.Record(t, est.S, est.stderr, est.shots_per_basis))
obs = ObservationSet(tuple(records))

verdict = detect(obs)
print(f"verdict: {verdict.decision}  (max |S - 2| = {verdict.max_deviation:.3f})")

gamma_hat, rss_d = detector.fit_dephasing(obs)
J_max = min(5.0, detector.max_resolvable_J(obs.t_s))
J_hat, rss_c = detector.fit_coupling(obs, J_max=J_max)
print(f"dephasing fit: gamma = {gamma_hat:.4f} (true {true_gamma}), rss = {rss_d:.2e}")
print(f"coupling fit:  J = {J_hat:.4f}, rss = {rss_c:.2e}")
print("better model:", "dephasing" if rss_d < rss_c else "coupling")
