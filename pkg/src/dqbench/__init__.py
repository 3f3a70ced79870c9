"""Measure, degrade and benchmark the quality of tabular datasets."""
from .polluters import (ClassBalanceSpec, CompletenessSpec, ConsistencySpec, DuplicateCount,
                        FeatureAccuracySpec, TargetAccuracySpec, UniquenessSpec, plan_class_balance,
                        pollute)
from .quality import QualityReport, RepresentationMap, measure
from .rng import RngStream, derive_rng
from .tabular import (ColumnMeta, DataError, Dataset, DatasetManifest, PairedDataset, load_csv,
                      save_csv, snapshot_ground_truth)

__version__ = "0.1.0"
