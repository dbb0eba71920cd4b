"""Shared small fixtures for the network tests."""

import numpy as np
import scipy.sparse as sp

from circular_hrr import neural

GRAD_F, GRAD_H, GRAD_D, GRAD_L, GRAD_B = 32, 16, 8, 20, 6


def gradient_problem(head, seed=0):
    """A model with a matching sparse batch for finite-difference checks."""
    rng = np.random.default_rng(seed)
    dense = rng.random((GRAD_B, GRAD_F)) * (rng.random((GRAD_B, GRAD_F)) < 0.4)
    labels = [sorted(rng.choice(GRAD_L, size=int(rng.integers(1, 4)), replace=False).tolist())
              for _ in range(GRAD_B)]
    model = neural.MlpModel(head, GRAD_F, GRAD_H, GRAD_L, dim=GRAD_D, seed=seed)
    return model, sp.csr_matrix(dense), labels
