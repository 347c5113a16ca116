"""Pure-numpy fallback for the sub-region hot kernels.

Semantics must match _kernels.pyx exactly: row-major first-occurrence
argmax tie-break and window-index accumulation order.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def select_centers(frame, tops_r, tops_c, window):
    """Recenter each initial window on its brightest pixel.

    Returns (centers_r, centers_c, valid); a center is valid when the
    recentered window lies fully inside the frame.
    """
    height, width = frame.shape
    half = window // 2
    count = tops_r.shape[0]
    centers_r = np.empty(count, dtype=np.int64)
    centers_c = np.empty(count, dtype=np.int64)
    valid = np.empty(count, dtype=np.uint8)
    for i in range(count):
        tr = tops_r[i]
        tc = tops_c[i]
        flat = int(frame[tr : tr + window, tc : tc + window].argmax())
        r = tr + flat // window
        c = tc + flat % window
        centers_r[i] = r
        centers_c[i] = c
        valid[i] = (
            r - half >= 0 and c - half >= 0 and r + half < height and c + half < width
        )
    return centers_r, centers_c, valid


def accumulate_windows(frame, centers_r, centers_c, window, accum):
    """Add the window around each center into accum, in center-list order."""
    half = window // 2
    for i in range(centers_r.shape[0]):
        r = centers_r[i]
        c = centers_c[i]
        accum += frame[r - half : r + half + 1, c - half : c + half + 1]
    return accum
