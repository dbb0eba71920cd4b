"""
Training a network to emit label vectors
========================================

A two-layer ReLU network is trained on a synthetic multi-label task.
The CHRR head predicts 2d Cartesian numbers that become d angles. The FC
baseline predicts one logit per label.
"""

from circular_hrr import datasets, metrics, neural

ds = datasets.generate_synthetic(1200, 300, 30, labels_per_example=3, noise=0.05, seed=0)
train, test = datasets.train_test_split(ds, 1000)
print("train set:", datasets.dataset_stats(train))

cfg = neural.TrainConfig(lr=1.0, batch_size=64, epochs=20, seed=0)
models = {}
for head, dim in (("chrr", 64), ("chrr-half", 64), ("hrr", 64), ("fc", None)):
    model = neural.MlpModel(head, train.n_features, 128, train.n_labels, dim=dim, seed=0)
    trained, history = neural.train(model, train, cfg)
    models[head] = trained
    ranks = neural.predict_ranking(trained, test.features, 3)
    rep = metrics.evaluate_rankings(ranks.tolist(), test.labels, ks=(1, 3))
    print(f"{head:10s} head weights {trained.head_weight_count():6d}  "
          f"loss {history[0]:.3f} -> {history[-1]:.3f}  "
          f"P@1 {rep[('P', 1)]:.3f}  P@3 {rep[('P', 3)]:.3f}")

# A single prediction from the CHRR network.
x = test.features[:1]
print("\ntrue labels of the first test example:", list(test.labels[0]))
print("CHRR network's top 3:", neural.predict_ranking(models["chrr"], x, 3)[0].tolist())
