"""Masked factorization from first principles.

Walks through the core mechanic on a small planted problem: build a
non-negative matrix with known structure, forbid some document-topic
pairs through a binary mask, fit with multiplicative updates, and watch
the loss fall while the mask is respected exactly.

Run:  python demos/01_masked_factorization.py
"""

import numpy as np

from tsnmf import FitConfig, fit, loss_ts, update_h, update_w

rng = np.random.default_rng(0)

print("=" * 70)
print("1. A planted problem")
print("=" * 70)

n, t, d = 12, 8, 3
W_true = rng.random((n, d))
H_true = rng.random((d, t))
V = W_true @ H_true
print(f"V = W_true @ H_true with shapes {W_true.shape} x {H_true.shape} -> {V.shape}")

print()
print("=" * 70)
print("2. A supervision mask")
print("=" * 70)

# Forbid topic 0 in the first four documents and topic 2 in the last four.
mask = np.ones((n, d))
mask[:4, 0] = 0.0
mask[-4:, 2] = 0.0
print("mask (0 = forbidden):")
print(mask.astype(int))

print()
print("=" * 70)
print("3. Fit and inspect the loss trace")
print("=" * 70)

config = FitConfig(d=d, seed=1, max_iter=200, rel_tol=1e-6)
model, trace = fit(V, mask, config)
print(f"stop reason: {trace.stop_reason} after {trace.iterations} iterations")
for i in range(0, len(trace.losses), max(1, len(trace.losses) // 8)):
    print(f"  iteration {i:4d}: loss {trace.losses[i]:.6f}")
print(f"  final loss: {trace.final_loss:.6f}")

drops = np.diff(trace.losses)
print(f"loss increases observed: {(drops > 0).sum()} (multiplicative updates are monotone)")

print()
print("=" * 70)
print("4. The mask is enforced exactly, not approximately")
print("=" * 70)

masked_entries = model.W[mask == 0.0]
print(f"max |W| over forbidden entries: {np.abs(masked_entries).max()}")
print(f"min W entry overall: {model.W.min()} (never negative)")

print()
print("=" * 70)
print("5. With an all-ones mask this is plain NMF")
print("=" * 70)

# One manual update step with the mask of ones equals the classic rules.
W0, H0 = rng.random((n, d)), rng.random((d, t))
ones = np.ones((n, d))
eps = 1e-9
H1 = update_h(V, W0, H0, ones, eps)
H1_classic = H0 * (W0.T @ V) / (W0.T @ (W0 @ H0) + eps)
print(f"masked vs classic H step, max abs diff: {np.abs(H1 - H1_classic).max()}")
W1 = update_w(V, W0, H1, ones, eps)
print(f"loss after one manual (H, W) step: {loss_ts(V, W1, H1, ones):.6f}")
print("unsupervised behavior falls out of the same code path.")
