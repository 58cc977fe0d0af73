"""Score the bundled 76-record fixture and show where the four scores disagree.

Run with ``python demos/score_fixture.py``.
"""
import numpy as np

from osreval import fixtures
from osreval.core import build_general_matrix, per_uuc_class_breakdown, validate_records
from osreval.scores import BaseMetric, derive_outer_matrix, score_suite

catalog = fixtures.catalog()
records = fixtures.records()

general = build_general_matrix(validate_records(records, catalog), catalog)
print("general confusion matrix (rows = truth, last row/column = unknown):")
print(general.counts)
print("outer (known vs unknown):", derive_outer_matrix(general))
print("unknown-class breakdown:", per_uuc_class_breakdown(records, catalog))

for base in BaseMetric:
    suite = score_suite(records, catalog, base)
    shown = {k: None if v is None else round(v, 4) for k, v in suite.scores().items()}
    print(f"{base.value:>18}: {shown}")

# Inner ignores every unknown-class sample; Halfpoint charges the known classes
# for samples they lost to the unknown bucket.
suite = score_suite(records, catalog)
print("inner - halfpoint gap:", np.round(suite.inner - suite.halfpoint, 4))
