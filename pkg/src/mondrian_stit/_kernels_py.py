"""Pure numpy pair sums, used when the compiled extension is unavailable."""

import numpy as np


def pair_sums(ax, ay, aw, bx, by, bw, ux, uy, x0, y0, width, height, same):
    """Per-bin sums of ``aw[i] bw[j] / overlap(dx, dy)`` over anchored pairs.

    A pair ``(i, j)`` with ``dx = bx[j] - ax[i]`` and ``dy = by[j] - ay[i]``
    counts when ``0 <= dx <= ux[-1]`` and ``0 <= dy <= uy[-1]``; it lands in
    the first bin ``k`` with ``dx <= ux[k]`` and ``dy <= uy[k]``.  The overlap
    is ``(width - dx) (height - dy)``.  With ``same`` the pairs ``i == j`` are
    skipped (the two point sets must then be identical).
    """
    ax, ay, aw = (np.ascontiguousarray(v, dtype=float) for v in (ax, ay, aw))
    bx, by, bw = (np.ascontiguousarray(v, dtype=float) for v in (bx, by, bw))
    ux = np.ascontiguousarray(ux, dtype=float)
    uy = np.ascontiguousarray(uy, dtype=float)
    nbin = len(ux)
    hist = np.zeros(nbin)
    if len(ax) == 0 or len(bx) == 0 or nbin == 0:
        return hist
    umax, vmax = ux[-1], uy[-1]
    cx = umax * (1.0 + 1e-9) + 1e-300
    cy = vmax * (1.0 + 1e-9) + 1e-300
    ncx = int(np.floor(width / cx)) + 1
    ncy = int(np.floor(height / cy)) + 1

    def cell_of(x, y):
        i = np.clip(np.floor((x - x0) / cx).astype(np.intp), 0, ncx - 1)
        j = np.clip(np.floor((y - y0) / cy).astype(np.intp), 0, ncy - 1)
        return i * ncy + j

    bcell = cell_of(bx, by)
    order = np.argsort(bcell, kind="stable")
    start = np.searchsorted(bcell[order], np.arange(ncx * ncy + 1), side="left")
    acell = cell_of(ax, ay)
    a_order = np.argsort(acell, kind="stable")
    a_start = np.searchsorted(acell[a_order], np.arange(ncx * ncy + 1), side="left")

    for c in np.flatnonzero(np.diff(a_start)):
        ia = a_order[a_start[c]:a_start[c + 1]]
        cxi, cyi = divmod(int(c), ncy)
        nbrs = [
            order[start[n]:start[n + 1]]
            for n in ((cxi + ox) * ncy + cyi + oy
                      for ox in (0, 1) if cxi + ox < ncx
                      for oy in (0, 1) if cyi + oy < ncy)
        ]
        jb = np.concatenate(nbrs)
        if len(jb) == 0:
            continue
        dx = bx[jb][None, :] - ax[ia][:, None]
        dy = by[jb][None, :] - ay[ia][:, None]
        keep = (dx >= 0) & (dy >= 0) & (dx <= umax) & (dy <= vmax)
        if same:
            keep &= ia[:, None] != jb[None, :]
        ii, jj = np.nonzero(keep)
        if len(ii) == 0:
            continue
        dxk = dx[ii, jj]
        dyk = dy[ii, jj]
        k = np.maximum(np.searchsorted(ux, dxk, side="left"), np.searchsorted(uy, dyk, side="left"))
        w = aw[ia][ii] * bw[jb][jj] / ((width - dxk) * (height - dyk))
        hist += np.bincount(k, weights=w, minlength=nbin)
    return hist
