"""Compiled kernels for growing and evaluating regression trees.

The grower presorts every feature once per tree, then keeps each
feature's index array partitioned as nodes split, so no sorting happens
inside the node loop. Split search scans midpoints between consecutive
distinct sorted values and minimizes the post-split sum of squared
errors, which for a candidate (with left sum s1, total t1) is equivalent
to maximizing s1^2/n_left + (t1-s1)^2/n_right. Ties break toward the
lowest feature index, then the lowest threshold, by scan order.

Trees are flat arrays: left/right child indices, threshold or leaf
value, and feature index (-1 marks a leaf in all of left/right/feat).
Routing uses x[feat] <= threshold into the left child.
"""

import numpy as np
from numba import njit

U64 = np.uint64


@njit(cache=True, inline="always")
def _splitmix64(state):
    state = state + U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True)
def grow_tree(Xb, yb, max_depth, min_leaf, feature_sample, rng_state):
    n, d = Xb.shape
    sorted_idx = np.empty((d, n), np.int64)
    for f in range(d):
        sorted_idx[f] = np.argsort(Xb[:, f])

    cap = 2 * n + 1
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap, np.float64)
    feat = np.full(cap, -1, np.int64)

    depth_cap = min(max_depth, n) + 2
    stack = np.empty((depth_cap, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    goes_left = np.zeros(n, np.bool_)
    buf = np.empty(n, np.int64)
    feat_ids = np.arange(d)
    state = U64(rng_state)

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        nn = end - start

        t1 = 0.0
        ylo = np.inf
        yhi = -np.inf
        for i in range(start, end):
            v = yb[sorted_idx[0, i]]
            t1 += v
            if v < ylo:
                ylo = v
            if v > yhi:
                yhi = v
        if depth >= max_depth or nn < 2 * min_leaf or ylo == yhi:
            value[node] = t1 / nn
            continue

        k = d
        if feature_sample < d:
            k = feature_sample
            for j in range(k):
                state, z = _splitmix64(state)
                r = j + np.int64(z % U64(d - j))
                tmp = feat_ids[j]
                feat_ids[j] = feat_ids[r]
                feat_ids[r] = tmp
            # ascending order keeps the tie-break deterministic within the draw
            for a in range(1, k):
                key = feat_ids[a]
                b = a - 1
                while b >= 0 and feat_ids[b] > key:
                    feat_ids[b + 1] = feat_ids[b]
                    b -= 1
                feat_ids[b + 1] = key

        best_gain = -np.inf
        best_f = -1
        best_thr = 0.0
        for fi in range(k):
            f = feat_ids[fi] if feature_sample < d else fi
            s1 = 0.0
            row_prev = sorted_idx[f, start]
            prev = Xb[row_prev, f]
            for i in range(start + 1, end):
                s1 += yb[row_prev]
                row = sorted_idx[f, i]
                cur = Xb[row, f]
                if cur != prev:
                    nl = i - start
                    nr = nn - nl
                    if nl >= min_leaf and nr >= min_leaf:
                        g = s1 * s1 / nl + (t1 - s1) * (t1 - s1) / nr
                        if g > best_gain:
                            best_gain = g
                            best_f = f
                            best_thr = (prev + cur) / 2.0
                    prev = cur
                row_prev = row

        if best_f < 0:
            value[node] = t1 / nn
            continue

        nl = 0
        for i in range(start, end):
            row = sorted_idx[best_f, i]
            gl = Xb[row, best_f] <= best_thr
            goes_left[row] = gl
            if gl:
                nl += 1
        # stable partition of every feature's sorted segment
        for f in range(d):
            a = 0
            b = nl
            for i in range(start, end):
                row = sorted_idx[f, i]
                if goes_left[row]:
                    buf[a] = row
                    a += 1
                else:
                    buf[b] = row
                    b += 1
            for i in range(nn):
                sorted_idx[f, start + i] = buf[i]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        value[node] = best_thr
        feat[node] = best_f
        stack[top, 0] = lid
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = rid
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1

    return left[:n_nodes], right[:n_nodes], value[:n_nodes], feat[:n_nodes]


@njit(cache=True)
def eval_tree(left, right, value, feat, X, out):
    for i in range(X.shape[0]):
        node = 0
        while feat[node] >= 0:
            if X[i, feat[node]] <= value[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
