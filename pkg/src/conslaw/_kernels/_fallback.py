"""Pure-Python backend for the variational scan.

Same inputs, same outputs, bit for bit, as the compiled backend; only the
inner loops differ.  Selected when the extension is unavailable or when
CONSLAW_FORCE_FALLBACK is set.
"""

import numpy as np

NAME = "fallback"


def rightmost_argmax(values, tie_tol=0.0):
    """Index of the rightmost entry within tie_tol of the maximum."""
    v = np.asarray(values, dtype=float)
    m = v.max()
    hits = v >= m - tie_tol
    return int(v.size - 1 - np.argmax(hits[::-1]))


def hopf_lax_scan(u0, suffix_max, phi_tab, j_min, x_idx, tie_tol):
    """Rightmost maximizer of j -> u0[j] - phi_tab[j - k - j_min] per k.

    For each query index k in x_idx, returns the maximum value and the
    rightmost index attaining it within tie_tol.  Exploits that the
    rightmost maximizer is nondecreasing in k (convex cost), and prunes the
    right tail where suffix_max minus the (by then increasing) cost drops
    below the running best: past that crossing no candidate can reach
    best - tie_tol, so the reported pair never depends on the cut.
    """
    u0 = np.asarray(u0, dtype=float)
    suffix_max = np.asarray(suffix_max, dtype=float)
    phi_tab = np.asarray(phi_tab, dtype=float)
    n1 = u0.shape[0]
    n_phi = phi_tab.shape[0]
    i_argmin = int(np.argmin(phi_tab))

    arg = np.empty(len(x_idx), dtype=np.int64)
    val = np.empty(len(x_idx), dtype=float)
    jprev = 0
    for r, k in enumerate(x_idx):
        k = int(k)
        lo = max(jprev, k + j_min)
        hi = min(n1 - 1, k + j_min + n_phi - 1)
        if lo > hi:
            raise ValueError("cost table does not cover query index %d" % k)
        jpos = min(max(lo, k + j_min + i_argmin), hi)

        seg = u0[lo:jpos + 1] - phi_tab[lo - k - j_min:jpos + 1 - k - j_min]
        best = float(seg.max())

        # on [jpos, hi] the bound suffix_max - cost is nonincreasing;
        # bisect for the first index where it falls below best - tie_tol
        def bound(j):
            return suffix_max[j] - phi_tab[j - k - j_min]

        if bound(jpos) < best - tie_tol:
            jstop = jpos
        elif bound(hi) >= best - tie_tol:
            jstop = hi
        else:
            a, b = jpos, hi
            while b - a > 1:
                mid = (a + b) // 2
                if bound(mid) < best - tie_tol:
                    b = mid
                else:
                    a = mid
            jstop = b
        if jstop > jpos:
            tail = u0[jpos:jstop + 1] - phi_tab[jpos - k - j_min:jstop + 1 - k - j_min]
            best = max(best, float(tail.max()))

        window = u0[lo:jstop + 1] - phi_tab[lo - k - j_min:jstop + 1 - k - j_min]
        hits = window >= best - tie_tol
        bestj = lo + int(window.size - 1 - np.argmax(hits[::-1]))

        arg[r] = bestj
        val[r] = best
        jprev = bestj
    return arg, val
