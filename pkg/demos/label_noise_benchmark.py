"""
A small label-noise benchmark
=============================

Flip a growing share of training labels and compare kNN with a baseline
that guesses labels at the training class ratio. Once fewer than a third of
the labels are right, the learner has nothing left to beat.
"""

from dqbench.fixtures import load_bundled
from dqbench.runner import ExperimentConfig, run_experiment

ds, manifest = load_bundled("classification")
cfg = ExperimentConfig(task="classification", dimensions=["target_accuracy"], scenarios=[1],
                       algorithms=["knn", "cart", "class_ratio"], seeds=[0, 1, 2],
                       out="demo-results")
result = run_experiment(cfg, ds, manifest, write=False)

table = {}
for r in result.records:
    table.setdefault(r.quality, {})[r.algorithm] = r.mean

print("quality   " + "  ".join(f"{a:>11}" for a in cfg.algorithms))
for q in sorted(table, reverse=True):
    print(f"{q:7.2f}   " + "  ".join(f"{table[q][a]:11.3f}" for a in cfg.algorithms))
