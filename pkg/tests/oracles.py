"""Independent brute-force reference implementations used by the tests.

Everything here is written directly from the defining formulas with plain
loops, deliberately sharing no code with the package. Tolerant of being
slow; these exist to check the real implementations, not to be fast.
"""

import math

import numpy as np

# Daubechies-6 scaling (reconstruction lowpass) coefficients, published values
DB6_REC_LO = [
    0.11154074335008017, 0.4946238903983854, 0.7511339080215775,
    0.3152503517092432, -0.22626469396516913, -0.12976686756709563,
    0.09750160558707936, 0.02752286553001629, -0.031582039318031156,
    0.0005538422009938016, 0.004777257511010651, -0.00107730108499558,
]


def _reflect(t, n):
    # half-sample symmetric extension index
    if t < 0:
        return -t - 1
    if t >= n:
        return 2 * n - t - 1
    return t


def _bank():
    lo = DB6_REC_LO
    L = len(lo)
    dec_lo = lo[::-1]
    dec_hi = [((-1.0) ** k) * lo[k] for k in range(L)]
    rec_hi = dec_hi[::-1]
    return dec_lo, dec_hi, lo, rec_hi, L


def dwt_level(x):
    """One analysis level by direct convolution over reflected indices."""
    dec_lo, dec_hi, _, _, L = _bank()
    n = len(x)
    out_len = (n + L - 1) // 2
    ca = [0.0] * out_len
    cd = [0.0] * out_len
    for i in range(out_len):
        sa = 0.0
        sd = 0.0
        for m in range(L):
            v = x[_reflect(2 * i + 1 - m, n)]
            sa += dec_lo[m] * v
            sd += dec_hi[m] * v
        ca[i] = sa
        cd[i] = sd
    return ca, cd


def idwt_level(ca, cd, target_len):
    """One synthesis level, cropped to target_len."""
    _, _, rec_lo, rec_hi, L = _bank()
    y = [0.0] * target_len
    for t in range(target_len):
        s = 0.0
        for i in range(len(ca)):
            m = t + L - 2 - 2 * i
            if 0 <= m < L:
                s += ca[i] * rec_lo[m] + cd[i] * rec_hi[m]
        y[t] = s
    return y


def dwt_forward(x, levels=4):
    """Full cascade; returns (approx, [details level 1..levels])."""
    a = list(map(float, x))
    details = []
    for _ in range(levels):
        a, d = dwt_level(a)
        details.append(d)
    return a, details


def dwt_inverse(approx, details, original_length):
    lens = [original_length]
    L = len(DB6_REC_LO)
    for _ in range(len(details)):
        lens.append((lens[-1] + L - 1) // 2)
    a = list(approx)
    for lvl in range(len(details) - 1, -1, -1):
        a = idwt_level(a, details[lvl], lens[lvl])
    return a


def band_power(x, rate_hz, f_lo, f_hi):
    """Power in [f_lo, f_hi] from a plain full-length periodogram."""
    x = np.asarray(x, dtype=float)
    spectrum = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x), d=1.0 / rate_hz)
    mask = (freqs >= f_lo) & (freqs <= f_hi)
    return float(np.sum(spectrum[mask]))


def time_features(x):
    """All ten time-domain features from their printed definitions."""
    x = [float(v) for v in x]
    n = len(x)
    d1 = [x[i + 1] - x[i] for i in range(n - 1)]
    d2 = [d1[i + 1] - d1[i] for i in range(len(d1) - 1)]
    d3 = [d2[i + 1] - d2[i] for i in range(len(d2) - 1)]
    mv = [v / 1000.0 for v in x]
    clamped_abs = [min(abs(v), 30.0) for v in mv]
    clamped = [max(-30.0, min(v, 30.0)) for v in mv]
    out = {}
    out["iemg"] = sum(abs(v) for v in x)
    out["iasd"] = sum(abs(v) for v in d2)
    out["iatd"] = sum(abs(v) for v in d3)
    out["ieav"] = sum(math.exp(v) for v in clamped_abs)
    out["ie"] = sum(math.exp(v) for v in clamped)
    out["mav"] = sum(abs(v) for v in x) / n
    out["rms"] = math.sqrt(sum(v * v for v in x) / n)
    out["var"] = sum(v * v for v in x) / (n - 1)
    zc = 0
    for i in range(n - 1):
        if x[i] * x[i + 1] < 0:
            zc += 1
    out["zc"] = float(zc)
    out["wl"] = sum(abs(v) for v in d1)
    return out


def freq_features(freqs, psd, eps=1e-12):
    """All nine frequency-domain features from their printed definitions."""
    freqs = [float(f) for f in freqs]
    psd = [float(p) for p in psd]
    total = sum(psd)
    out = {}
    out["mf"] = sum(f * p for f, p in zip(freqs, psd)) / total
    out["mpf"] = out["mf"]
    acc = 0.0
    mdf = freqs[-1]
    for f, p in zip(freqs, psd):
        acc += p
        if acc >= 0.5 * total:
            mdf = f
            break
    out["mdf"] = mdf
    acc = 0.0
    sef = freqs[-1]
    for f, p in zip(freqs, psd):
        acc += p
        if acc >= 0.95 * total:
            sef = f
            break
    out["sef"] = sef
    best = -1.0
    pf = freqs[0]
    for f, p in zip(freqs, psd):
        if p > best:
            best = p
            pf = f
    out["pf"] = pf
    se = 0.0
    for p in psd:
        q = p / total
        if q > 0.0:
            se -= q * math.log2(q)
    out["se"] = se
    out["tp"] = total
    peak = max(psd)
    hi = [p for p in psd if p >= 0.1 * peak]
    lo = [p for p in psd if p < 0.1 * peak]
    if lo:
        out["snr"] = (sum(hi) / len(hi)) / (sum(lo) / len(lo) + eps)
    else:
        out["snr"] = total / eps
    nyq = freqs[-1]
    num = sum(p for f, p in zip(freqs, psd) if 20.0 <= f <= 250.0)
    den = sum(p for f, p in zip(freqs, psd) if 250.0 <= f <= nyq)
    out["fr"] = num / (den + eps)
    return out


def scaler_moments(X):
    """Per-column mean and population std by a literal two-pass loop."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    means = []
    stds = []
    for j in range(d):
        m = 0.0
        for i in range(n):
            m += X[i, j]
        m /= n
        s = 0.0
        for i in range(n):
            s += (X[i, j] - m) ** 2
        means.append(m)
        stds.append(math.sqrt(s / n))
    return means, stds


def confusion(y_true, y_pred, n_classes):
    cm = [[0] * n_classes for _ in range(n_classes)]
    for t, p in zip(y_true, y_pred):
        cm[int(t)][int(p)] += 1
    return cm


def metrics(cm):
    """Accuracy plus per-class precision, recall, F1 from raw tallies."""
    k = len(cm)
    total = sum(sum(row) for row in cm)
    trace = sum(cm[i][i] for i in range(k))
    per = []
    for c in range(k):
        tp = cm[c][c]
        fp = sum(cm[r][c] for r in range(k)) - tp
        fn = sum(cm[c][r] for r in range(k)) - tp
        prec = tp / (tp + fp) if tp + fp > 0 else 0.0
        rec = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = tp / (tp + 0.5 * (fp + fn)) if tp + 0.5 * (fp + fn) > 0 else 0.0
        per.append((prec, rec, f1))
    macro_p = sum(p for p, _, _ in per) / k
    macro_r = sum(r for _, r, _ in per) / k
    macro_f = sum(f for _, _, f in per) / k
    return trace / total, macro_p, macro_r, macro_f, per


def majority_vote(votes):
    """Plurality with smallest-id tie break."""
    counts = {}
    for v in votes:
        counts[int(v)] = counts.get(int(v), 0) + 1
    best_c = None
    best_n = -1
    for c in sorted(counts):
        if counts[c] > best_n:
            best_n = counts[c]
            best_c = c
    return best_c


def cv_select(X, y, grid, folds, seed, fit_fn, predict_fn):
    """Exhaustive cross-validation re-run sharing the documented seed rules.

    Fold layout: indices shuffled by default_rng(seed), split into
    contiguous blocks, the first n % folds blocks one element larger.
    Forest seed for (value, fold) = SeedSequence([seed, value, fold]).
    """
    n = len(y)
    perm = np.random.default_rng(seed).permutation(n)
    base = n // folds
    extra = n % folds
    blocks = []
    start = 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        blocks.append(perm[start:start + size])
        start += size
    best_value = None
    best_mean = -1.0
    for value in sorted(grid):
        accs = []
        for f in range(folds):
            val_idx = blocks[f]
            tr_idx = np.concatenate([blocks[g] for g in range(folds) if g != f])
            s = int(np.random.SeedSequence([seed, value, f]).generate_state(1)[0])
            model = fit_fn(X[tr_idx], y[tr_idx], value, s)
            pred = [predict_fn(model, X[i]) for i in val_idx]
            hits = sum(1 for i, p in zip(val_idx, pred) if p == y[i])
            accs.append(hits / len(val_idx))
        mean_acc = sum(accs) / folds
        if mean_acc > best_mean:
            best_mean = mean_acc
            best_value = value
    return best_value


def adam_scalar(grad_fn, w0, steps, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """The Adam recurrence on one scalar, straight from its update equations."""
    w = float(w0)
    m = 0.0
    v = 0.0
    for t in range(1, steps + 1):
        g = grad_fn(w)
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        mhat = m / (1 - beta1 ** t)
        vhat = v / (1 - beta2 ** t)
        w -= lr * mhat / (math.sqrt(vhat) + eps)
    return w


def finite_diff_grads(loss_fn, arrays, h=1e-5):
    """Central finite differences of loss_fn over a list of arrays."""
    grads = []
    for a in arrays:
        g = np.zeros_like(a)
        flat = a.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = loss_fn()
            flat[i] = keep - h
            down = loss_fn()
            flat[i] = keep
            gflat[i] = (up - down) / (2 * h)
        grads.append(g)
    return grads
