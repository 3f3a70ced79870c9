"""
Planning class imbalance
========================

The class-balance polluter samples per-class counts that form an arithmetic
progression around the balanced size. Its step is chosen so that the
pairwise class-size differences add up to the requested degree.
"""

import numpy as np

from dqbench.polluters import plan_class_balance
from dqbench.quality import balance, imbalance_from_counts

labels = np.repeat(["ant", "bee", "cat", "dog", "elk"], [620, 540, 700, 580, 660])

for degree in (0.0, 0.2, 0.4, 0.8, 1.0):
    plan = plan_class_balance(labels, degree)
    counts = [plan.counts[c] for c in plan.order]
    print(f"degree {degree:.1f} (applied {plan.degree_effective:.3f}): counts {counts} "
          f"recovered {plan.recovered_degree():.4f}")

# %%
# Degrees above the cap are clipped so that the smallest class keeps at
# least 1% of the largest one. The Balance score of each plan:

for degree in (0.0, 0.5, 1.0):
    plan = plan_class_balance(labels, degree)
    drawn = np.repeat(list(plan.counts), list(plan.counts.values()))
    print(f"degree {degree:.1f}: imbalance {imbalance_from_counts(list(plan.counts.values()))}, "
          f"balance {balance(drawn):.3f}")
