"""
Precision, propensity-scored precision and model size
=====================================================

P@k counts true labels among the top k predictions. PSP@k weights each
hit by the inverse training frequency of its label, so rare labels count
for more. The compression report compares parameter counts of a CHRR
network against an FC network of the same trunk shape.
"""

from circular_hrr import datasets, metrics

train = datasets.from_lists(
    labels=[[0], [0, 1], [0, 2], [0, 3]],
    features=[{0: 1.0}] * 4, n_features=1, n_labels=4)
props = metrics.build_propensities(train)
print("propensities:", [props[l] for l in range(4)])

ranking, truth = [0, 3, 1, 2], {0, 3}
for k in (1, 2, 3):
    print(f"k={k}: P@k {metrics.precision_at_k(ranking, truth, k):.3f}  "
          f"PSP@k {metrics.psp_at_k(ranking, truth, k, props):.3f}")

# A 4K-label task with d=800 and a 205K-label task with the same d.
for name, F, L in (("4K labels", 5000, 3993), ("205K labels", 5000, 205443)):
    rep = metrics.compression_report(F, h_chrr=768, h_fc=2048, d=800, L=L)
    print(f"{name:12s} model size saved {rep['model_size_ratio']:.1%}, "
          f"output size saved {rep['output_dim_ratio']:.1%}")
