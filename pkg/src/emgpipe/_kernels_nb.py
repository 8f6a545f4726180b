"""Numba-compiled twins of the _kernels_np hot kernels.

Same algorithms written as explicit loops for @njit. Integer split
arithmetic matches the numpy path exactly; convolution results agree to
roundoff. Importing this module requires a working numba install.
"""

import numpy as np
from numba import njit, int64, uint64

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True)
def splitmix_next(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return state, z


@njit(cache=True)
def down_convolve(ext, filt, out_len):
    L = filt.shape[0]
    out = np.empty(out_len, np.float64)
    for i in range(out_len):
        base = L + 2 * i
        s = 0.0
        for m in range(L):
            s += filt[m] * ext[base - m]
        out[i] = s
    return out


@njit(cache=True)
def up_convolve_add(ca, cd, rec_lo, rec_hi, target_len):
    L = rec_lo.shape[0]
    la = ca.shape[0]
    y = np.zeros(target_len, np.float64)
    for t in range(target_len):
        i_lo = t // 2
        i_hi = (t + L - 2) // 2
        if i_hi > la - 1:
            i_hi = la - 1
        s = 0.0
        for i in range(i_lo, i_hi + 1):
            m = t + L - 2 - 2 * i
            s += ca[i] * rec_lo[m] + cd[i] * rec_hi[m]
        y[t] = s
    return y


@njit(cache=True)
def grow_tree(X, y, boot_idx, feat_seed, n_classes, max_depth, min_split, m_feats):
    n = boot_idx.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n + 1
    feat = np.full(max_nodes, -1, np.int32)
    thr = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int32)
    right = np.full(max_nodes, -1, np.int32)
    leaf = np.full(max_nodes, -1, np.int32)
    idx = boot_idx.astype(np.int64)
    state = uint64(feat_seed)
    stack = np.zeros((max_nodes, 4), np.int64)
    stack[0, 2] = n
    top = 1
    node_count = 1
    counts = np.zeros(n_classes, np.int64)
    counts_left = np.zeros(n_classes, np.int64)
    perm = np.zeros(d, np.int64)
    buf = np.zeros(n, np.int64)
    while top > 0:
        top -= 1
        node = stack[top, 0]
        lo = stack[top, 1]
        hi = stack[top, 2]
        depth = stack[top, 3]
        size = hi - lo
        for c in range(n_classes):
            counts[c] = 0
        for i in range(lo, hi):
            counts[y[idx[i]]] += 1
        majority = 0
        best_count = counts[0]
        for c in range(1, n_classes):
            if counts[c] > best_count:
                best_count = counts[c]
                majority = c
        if best_count == size or size < min_split or depth >= max_depth:
            leaf[node] = majority
            continue
        for j in range(d):
            perm[j] = j
        for j in range(m_feats):
            state, z = splitmix_next(state)
            r = j + int64(z % uint64(d - j))
            tmp = perm[j]
            perm[j] = perm[r]
            perm[r] = tmp
        best_feat = -1
        best_thr = 0.0
        best_score = -1.0
        for jf in range(m_feats):
            f = perm[jf]
            xv = np.empty(size, np.float64)
            for i in range(size):
                xv[i] = X[idx[lo + i], f]
            order = np.argsort(xv)
            for c in range(n_classes):
                counts_left[c] = 0
            for i in range(size - 1):
                counts_left[y[idx[lo + order[i]]]] += 1
                if xv[order[i]] < xv[order[i + 1]]:
                    sl = int64(0)
                    sr = int64(0)
                    for c in range(n_classes):
                        cl = counts_left[c]
                        cr = counts[c] - cl
                        sl += cl * cl
                        sr += cr * cr
                    nl = i + 1
                    nr = size - nl
                    score = sl / nl + sr / nr
                    if score > best_score:
                        best_score = score
                        best_feat = f
                        best_thr = xv[order[i]]
        if best_feat < 0:
            leaf[node] = majority
            continue
        nl_count = 0
        for i in range(lo, hi):
            if X[idx[i], best_feat] <= best_thr:
                buf[nl_count] = idx[i]
                nl_count += 1
        pos = nl_count
        for i in range(lo, hi):
            if not (X[idx[i], best_feat] <= best_thr):
                buf[pos] = idx[i]
                pos += 1
        for i in range(size):
            idx[lo + i] = buf[i]
        feat[node] = best_feat
        thr[node] = best_thr
        left[node] = node_count
        right[node] = node_count + 1
        stack[top, 0] = node_count + 1
        stack[top, 1] = lo + nl_count
        stack[top, 2] = hi
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = node_count
        stack[top, 1] = lo
        stack[top, 2] = lo + nl_count
        stack[top, 3] = depth + 1
        top += 1
        node_count += 2
    return (feat[:node_count], thr[:node_count], left[:node_count],
            right[:node_count], leaf[:node_count])


@njit(cache=True)
def tree_predict(feat, thr, left, right, leaf, X):
    n = X.shape[0]
    out = np.empty(n, np.int64)
    for i in range(n):
        node = 0
        while feat[node] >= 0:
            if X[i, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf[node]
    return out
