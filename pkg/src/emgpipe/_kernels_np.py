"""Plain numpy implementations of the hot kernels.

These are the fallback path when numba is unavailable or disabled. The
numba twins in _kernels_nb mirror them operation for operation: split
quality is accumulated in exact int64 arithmetic before a single float
division, so trees grown on either backend are identical node for node.
Wavelet convolutions agree to floating-point roundoff.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix_next(state):
    """One splitmix64 step; returns (next_state, 64-bit draw)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def down_convolve(ext, filt, out_len):
    """Filter an extended signal and keep every second output sample.

    out[i] = sum_m filt[m] * ext[L + 2*i - m] with L = len(filt).
    """
    L = filt.shape[0]
    full = np.convolve(ext, filt)
    return full[L:L + 2 * out_len:2].copy()


def up_convolve_add(ca, cd, rec_lo, rec_hi, target_len):
    """Upsample both subbands, filter with the synthesis pair, sum, crop."""
    L = rec_lo.shape[0]
    up_a = np.zeros(2 * ca.shape[0])
    up_d = np.zeros(2 * cd.shape[0])
    up_a[::2] = ca
    up_d[::2] = cd
    y = np.convolve(up_a, rec_lo) + np.convolve(up_d, rec_hi)
    return y[L - 2:L - 2 + target_len].copy()


def grow_tree(X, y, boot_idx, feat_seed, n_classes, max_depth, min_split, m_feats):
    """Grow one classification tree on a bootstrap sample.

    Parameters
    ----------
    X : (n_rows, d) float64 matrix of all training rows
    y : int64 class indices in [0, n_classes)
    boot_idx : int64 row indices forming the bootstrap sample
    feat_seed : seed for the per-node feature subset draws (splitmix64)
    n_classes, max_depth, min_split, m_feats : forest hyperparameters

    Returns flat node arrays (feature, threshold, left, right, leaf);
    feature -1 marks a leaf, whose class sits in the leaf array. Rows
    with value <= threshold go left. Nodes are created depth first,
    left child first, which fixes the feature-draw order.
    """
    n = boot_idx.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n + 1
    feat = np.full(max_nodes, -1, dtype=np.int32)
    thr = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int32)
    right = np.full(max_nodes, -1, dtype=np.int32)
    leaf = np.full(max_nodes, -1, dtype=np.int32)
    idx = boot_idx.astype(np.int64).copy()
    state = int(feat_seed)
    stack = [(0, 0, n, 0)]
    node_count = 1
    while stack:
        node, lo, hi, depth = stack.pop()
        seg = idx[lo:hi]
        size = hi - lo
        counts = np.bincount(y[seg], minlength=n_classes).astype(np.int64)
        majority = int(np.argmax(counts))
        if counts[majority] == size or size < min_split or depth >= max_depth:
            leaf[node] = majority
            continue
        perm = np.arange(d)
        for j in range(m_feats):
            state, z = splitmix_next(state)
            r = j + int(z % (d - j))
            perm[j], perm[r] = perm[r], perm[j]
        best_feat = -1
        best_thr = 0.0
        best_score = -1.0
        for jf in range(m_feats):
            f = int(perm[jf])
            xv = X[seg, f]
            order = np.argsort(xv)
            xs = xv[order]
            # candidate cuts sit between distinct consecutive sorted values
            bound = np.nonzero(xs[:-1] < xs[1:])[0]
            if bound.size == 0:
                continue
            onehot = np.zeros((size, n_classes), dtype=np.int64)
            onehot[np.arange(size), y[seg][order]] = 1
            cum = np.cumsum(onehot, axis=0)
            cl = cum[bound]
            cr = counts[None, :] - cl
            sl = np.sum(cl * cl, axis=1)
            sr = np.sum(cr * cr, axis=1)
            nl = bound + 1
            nr = size - nl
            score = sl / nl + sr / nr
            k = int(np.argmax(score))
            if score[k] > best_score:
                best_score = float(score[k])
                best_feat = f
                best_thr = float(xs[bound[k]])
        if best_feat < 0:
            leaf[node] = majority
            continue
        mask = X[seg, best_feat] <= best_thr
        left_seg = seg[mask]
        right_seg = seg[~mask]
        nl_count = left_seg.shape[0]
        idx[lo:lo + nl_count] = left_seg
        idx[lo + nl_count:hi] = right_seg
        feat[node] = best_feat
        thr[node] = best_thr
        left[node] = node_count
        right[node] = node_count + 1
        stack.append((node_count + 1, lo + nl_count, hi, depth + 1))
        stack.append((node_count, lo, lo + nl_count, depth + 1))
        node_count += 2
    return (feat[:node_count], thr[:node_count], left[:node_count],
            right[:node_count], leaf[:node_count])


def tree_predict(feat, thr, left, right, leaf, X):
    """Route every row of X to a leaf; returns int64 class indices."""
    n = X.shape[0]
    cur = np.zeros(n, dtype=np.int64)
    while True:
        f = feat[cur]
        active = f >= 0
        if not active.any():
            break
        rows = np.nonzero(active)[0]
        ca = cur[rows]
        xa = X[rows, f[rows]]
        go_left = xa <= thr[ca]
        cur[rows] = np.where(go_left, left[ca], right[ca])
    return leaf[cur].astype(np.int64)
