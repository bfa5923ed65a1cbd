"""
Geometry of the user-selection metric
=====================================

The selection metric between two subspaces is the squared chordal
distance. This script checks its two algebraic forms against each
other, compares the empirical distribution of the metric between
uniformly drawn subspaces with its closed-form CDF, and measures how
close random codebooks come to the quantization distortion bound.
"""

import numpy as np

from oiasim import (ManifoldParams, chordal_distance_sq, metric_cdf,
                    quantization_bound, sample_uniform_subspace)

rng = np.random.default_rng(2024)

# 1. Two forms of the squared chordal distance agree. The projector
#    form 0.5 * ||AA^H - BB^H||_F^2 never needs the product A^H B.
print("two forms of the metric, worst disagreement over 200 pairs")
for n, d in ((2, 1), (4, 2)):
    worst = 0.0
    for _ in range(200):
        A = sample_uniform_subspace(rng, n, d)
        B = sample_uniform_subspace(rng, n, d)
        direct = chordal_distance_sq(A, B)
        pa = A.basis @ A.basis.conj().T
        pb = B.basis @ B.basis.conj().T
        proj = 0.5 * np.linalg.norm(pa - pb) ** 2
        worst = max(worst, abs(direct - proj))
    print(f"  n={n} d={d}: {worst:.2e}")

# 2. For uniform subspaces the metric has CDF c * x^(d(n-d)) near the
#    origin, exact on [0, 1]. Compare against the empirical CDF.
print("\nempirical CDF of the metric vs c * x^(d(n-d)) on [0, 1]")
for n, d, samples in ((2, 1, 20000), (4, 2, 20000)):
    p = ManifoldParams(n, d)
    dist = np.array([
        chordal_distance_sq(sample_uniform_subspace(rng, n, d),
                            sample_uniform_subspace(rng, n, d))
        for _ in range(samples)])
    xs = np.linspace(0.0, 1.0, 201)
    ecdf = np.searchsorted(np.sort(dist), xs, side="right") / samples
    model = np.array([metric_cdf(float(x), p) for x in xs])
    print(f"  n={n} d={d}: sup |ecdf - model| = "
          f"{np.max(np.abs(ecdf - model)):.4f}")

# 3. A codebook of K random subspaces quantizes a random target with
#    expected best-case distortion below (Gamma(1/D)/D) * (K c)^(-1/D).
print("\nbest-of-K distortion vs the quantization bound (n=2, d=1)")
p21 = ManifoldParams(2, 1)
for K in (1, 4, 16, 64):
    mins = []
    for _ in range(2000):
        w = sample_uniform_subspace(rng, 2, 1)
        best = min(chordal_distance_sq(w, sample_uniform_subspace(rng, 2, 1))
                   for _ in range(K))
        mins.append(best)
    bound = quantization_bound(K, p21)
    print(f"  K={K:3d}: measured {np.mean(mins):.4f}  bound {bound:.4f}")

print("\nthe measured mean sits just under the bound and both shrink "
      "as K^(-1/(d(n-d)))")
