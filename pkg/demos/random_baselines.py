"""What does a predictor that ignores its input score?

Balanced accuracy stays at 0.5 regardless of the class mix. F1 and plain
accuracy drift with the share of known samples, so a high number can be an
artifact of the test set rather than evidence of skill.
"""
from osreval.simulate import DEFAULT_GRID, RandomPredictorMode, random_baseline_study

for mode in RandomPredictorMode:
    report = random_baseline_study(DEFAULT_GRID, per_class_count=20, trials=1000, mode=mode, seed=0)
    print(f"\nmode = {mode.value}")
    print(f"{'known':>6} {'unknown':>8} {'F1':>7} {'acc':>7} {'BAC':>7}")
    for cell in report.cells:
        m = {k: v.mean for k, v in cell.metrics.items()}
        print(f"{cell.n_kkc_classes:>6} {cell.n_uuc_classes:>8} "
              f"{m['f1']:7.3f} {m['accuracy']:7.3f} {m['balanced_accuracy']:7.3f}")
