"""
When the modified merge distortion is four times the sup distance, or zero
==========================================================================

Two pairs of step functions show that ``d_MM / d_inf`` can reach both ends of
its range ``[0, 4]``.
"""

import numpy as np

from clustertree import EvaluationDomain, ScalarField, compare

# p is flat on [0, 1]; q puts the same mass into two taller blocks
x = np.linspace(-0.5, 1.5, 400)
dom = EvaluationDomain.grid([x])
p = ScalarField(dom, ((x >= 0) & (x <= 1)).astype(float))
q = ScalarField(dom, 2.0 * (((x >= 0) & (x <= 0.25)) | ((x >= 0.75) & (x <= 1))))
r = compare(p, q)
print(f"d_inf = {r.d_inf}, d_MM = {r.d_modified}, witness pair {r.argmax_pairs['d_modified']}")

# p and q are mirror images: every tree distance is preserved
y = np.arange(400) / 400
dom = EvaluationDomain.grid([y])
r = compare(ScalarField(dom, 2.0 * (y < 0.5)), ScalarField(dom, 2.0 * (y >= 0.5)))
print(f"d_inf = {r.d_inf}, d_MM = {r.d_modified}")
