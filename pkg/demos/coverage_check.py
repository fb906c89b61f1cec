"""
Does the bootstrap ball cover the smoothed density?
===================================================

The confidence set is a sup-norm ball around the estimate. Its target is the
smoothed density ``p_h`` (the mean of the estimator), which for Gaussian data
and a Gaussian kernel is again Gaussian. Here we count how often the ball
contains it.
"""

import numpy as np
from scipy import stats

from clustertree import EvaluationDomain, Sample, bootstrap_radius, kde_evaluate

h = 0.4
dom = EvaluationDomain.line(-4, 4, 256)
p_h = stats.norm.pdf(dom.vertices[:, 0], scale=np.sqrt(1 + h * h))

rng = np.random.default_rng(0)
hits = 0
reps = 100
for rep in range(reps):
    sample = Sample(rng.standard_normal(200))
    radius = bootstrap_radius(sample, h, dom, B=500, alpha=0.05, rng_seed=rep)
    hits += np.abs(kde_evaluate(sample, h, dom).values - p_h).max() <= radius.t_hat

print(f"coverage {hits / reps:.2f} at nominal 0.95")
