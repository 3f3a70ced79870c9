"""
Measuring and degrading data quality
====================================

We load the bundled three-class dataset, score it, then push each quality
dimension down in turn and watch the score follow.
"""

from dqbench.fixtures import load_bundled
from dqbench.polluters import (CompletenessSpec, ConsistencySpec, FeatureAccuracySpec,
                               TargetAccuracySpec, UniquenessSpec, pollute)
from dqbench.quality import consistency, measure
from dqbench.rng import derive_rng

ds, manifest = load_bundled("classification")
print(ds)
print(measure(ds).to_json())

# %%
# Completeness. A fraction of every feature's cells is replaced with the
# column placeholder; the score drops by exactly that fraction.

for lam in (0.1, 0.3, 0.5):
    p = pollute(ds, CompletenessSpec(lam), derive_rng(0, ["demo", "completeness"]))
    print(f"missing fraction {lam:.1f} -> completeness {measure(p.dataset).completeness:.3f}")

# %%
# Accuracy needs a ground truth, so we pass the clean dataset along.
# Categorical cells are swapped for another category; numeric cells get
# Gaussian noise scaled by the column mean.

p = pollute(ds, FeatureAccuracySpec(0.2), derive_rng(0, ["demo", "accuracy"]))
rep = measure(p.dataset, ground_truth=ds)
print(f"categorical {rep.cFAccuracy:.3f}  numerical {rep.nFAccuracy:.3f}")

p = pollute(ds, TargetAccuracySpec(0.25), derive_rng(0, ["demo", "target"]))
print(f"target accuracy {measure(p.dataset, ground_truth=ds).tAccuracy:.3f}")

# %%
# Consistency of representation. With two representations per value the
# score dips and comes back: rewriting every cell leaves each value with a
# single (new) spelling again.

for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
    p = pollute(ds, ConsistencySpec(lam, k=2), derive_rng(0, ["demo", "consistency"]))
    print(f"rewritten {lam:.2f} -> consistency {consistency(p.dataset, p.rep_map):.3f}")

# %%
# Uniqueness. A duplication factor of 10/8 grows every class by a quarter
# with exact copies of its own rows.

p = pollute(ds, UniquenessSpec(10 / 8), derive_rng(0, ["demo", "uniqueness"]))
print(f"{ds.n} rows -> {p.dataset.n} rows, uniqueness {measure(p.dataset).uniqueness:.4f}")
