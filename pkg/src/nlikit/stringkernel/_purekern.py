"""Pure-Python (numpy) Gram backend: intersect sorted hash arrays per pair.

Same contract as the compiled `_fastkern.gram_counts`; results are exact
int64 counts, so both backends are bit-for-bit interchangeable.
"""

from __future__ import annotations

import numpy as np


def gram_counts(ha, ca, oa, hb, cb, ob, kind_code: int,
                symmetric: bool) -> np.ndarray:
    n = oa.size - 1
    m = ob.size - 1
    out = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        h1 = ha[oa[i]:oa[i + 1]]
        c1 = ca[oa[i]:oa[i + 1]]
        for j in range(i if symmetric else 0, m):
            h2 = hb[ob[j]:ob[j + 1]]
            c2 = cb[ob[j]:ob[j + 1]]
            common, ia, ib = np.intersect1d(h1, h2, assume_unique=True,
                                            return_indices=True)
            if kind_code == 0:
                val = common.size
            else:
                val = int(np.minimum(c1[ia], c2[ib]).sum()) if common.size else 0
            out[i, j] = val
            if symmetric:
                out[j, i] = val
    return out
