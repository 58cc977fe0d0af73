"""Openness depends only on class counts, imbalance depends on sample counts.

Two datasets with the same class configuration can have opposite majorities,
which is why a test set should be described by both numbers.
"""
from osreval.protocol import enumerate_configs, openness
from osreval.simulate import imbalance_grid

for k, u in [(2, 8), (8, 6), (6, 100)]:
    print(f"openness({k}, {u}) = {openness(k, u):.4f}")

many_known = {(r.n_kkc, r.n_uuc): r for r in imbalance_grid(7000, 20, 10, 100)}
many_unknown = {(r.n_kkc, r.n_uuc): r for r in imbalance_grid(20, 7000, 10, 100)}
for cfg in [(2, 8), (6, 100), (10, 1)]:
    a, b = many_known[cfg], many_unknown[cfg]
    print(f"{cfg}: openness {a.openness:.3f}, ratio {a.imbalance_ratio:8.2f} vs {b.imbalance_ratio:.4f}")

print("configurations for a 6-class budget, by openness:")
for c in enumerate_configs(dataset_class_budget=6)[-5:]:
    print(f"  {c.n_kkc} known, {c.n_uuc} unknown -> {c.openness:.3f}")
