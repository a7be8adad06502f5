"""Independent reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/compute_oracles.py
Uses only numpy/scipy; shares no code with the C++ implementation.
"""
import math

import numpy as np
from scipy import optimize, stats


def conditional_row(d2_row, i, beta):
    w = np.array([0.0 if j == i else math.exp(-beta * d2_row[j]) for j in range(len(d2_row))])
    return w / w.sum()


def entropy_bits(p):
    return -sum(x * math.log2(x) for x in p if x > 0)


def calibrate(points, target):
    pts = np.asarray(points, dtype=float)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    sigmas, rows = [], []
    for i in range(len(pts)):
        f = lambda logb: entropy_bits(conditional_row(d2[i], i, math.exp(logb))) - math.log2(target)
        logb = optimize.brentq(f, -30, 30, xtol=1e-14)
        beta = math.exp(logb)
        sigmas.append(math.sqrt(1.0 / (2.0 * beta)))
        rows.append(conditional_row(d2[i], i, beta))
    return np.array(sigmas), np.array(rows)


print("== calibrate: collinear 0..4, perplexity 2")
s, _ = calibrate([[0.0], [1.0], [2.0], [3.0], [4.0]], 2.0)
print(repr([float("%.15g" % v) for v in s]))

print("== symmetrize: collinear 0,1,3 perplexity 1.5")
_, pc = calibrate([[0.0], [1.0], [3.0]], 1.5)
print("conditional", repr(pc.tolist()))
pj = (pc + pc.T) / (2 * 3)
print("joint", repr(pj.tolist()))

print("== kl: uniform P, isosceles triangle (0,0),(2,0),(1,1)")
Y = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]])
n = 3
W = np.zeros((n, n))
for i in range(n):
    for j in range(n):
        if i != j:
            W[i, j] = 1.0 / (1.0 + ((Y[i] - Y[j]) ** 2).sum())
Q = W / W.sum()
P = np.full((n, n), 1.0 / 6.0)
np.fill_diagonal(P, 0.0)
kl = sum(P[i, j] * math.log(P[i, j] / Q[i, j]) for i in range(n) for j in range(n) if i != j)
print("%.17g" % kl)

print("== rank displacement: 4 points, one swapped pair")
X = np.array([[0.0], [1.0], [3.0], [6.0]])
Yr = np.array([[0.0], [2.5], [2.0], [6.0]])  # points 1 and 2 swap order


def rank_table(Z):
    m = len(Z)
    r = np.zeros((m, m), dtype=int)
    for i in range(m):
        others = sorted((float(np.sum((Z[i] - Z[j]) ** 2)), j) for j in range(m) if j != i)
        for pos, (_, j) in enumerate(others):
            r[i, j] = pos + 1
    return r


k = 2
rx, ry = rank_table(X), rank_table(Yr)
out = []
for i in range(4):
    nbrs = [j for j in range(4) if j != i and rx[i, j] <= k]
    out.append(sum(abs(rx[i, j] - ry[i, j]) for j in nbrs) / k)
print(repr(out))

print("== spearman: 3 clusters, adversarial reorder")
cx = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]])
cy = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 1.0]])


def pair_d(c):
    return [float(np.linalg.norm(c[a] - c[b])) for a in range(3) for b in range(a + 1, 3)]


print(pair_d(cx), pair_d(cy), "%.17g" % stats.spearmanr(pair_d(cx), pair_d(cy)).correlation)

print("== weighted subsample expectation: 900/100, fraction 0.1, damping 0.5")
shares = np.array([0.9, 0.1]) ** 0.5
alloc = 100 * shares / shares.sum()
print(alloc, "minority share", alloc[1] / alloc.sum())
