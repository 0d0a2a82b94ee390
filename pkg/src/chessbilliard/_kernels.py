"""Compiled inner loops.

Every map handled by the package is described to the kernels by the tuple
``(kind, cum, fa, fb)``:

* ``kind == 0``: smooth domain (circle or ellipse). ``cum = [0, L]`` and a
  foliation array holds a single constant ``c``; the involution is the
  reflection ``s -> c - s (mod L)``.
* ``kind == 1``: convex polygon. ``cum`` holds the cumulative edge lengths
  (``cum[0] = 0``, ``cum[k] = L``) and a foliation array is
  ``[top_lo, top_hi, bot_lo, bot_hi, h_0, ..., h_{k-1}]`` where ``h_i`` is the
  signed height of vertex ``i`` across the leaves.
* ``kind == 2``: piecewise affine circle map given by a table
  ``[m, start_0.., slope_0.., image_0..]`` in ``fa``; ``fb`` is unused.

For kinds 0 and 1 a step of the map is ``T_b o T_a``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _wrap(x, L):
    # arguments are almost always within one period; avoid fmod then
    if x < 0.0:
        x += L
    elif x >= L:
        x -= L
    if x < 0.0 or x >= L:
        x = x % L
        if x >= L:
            x -= L
    return x


@njit(cache=True)
def _smooth_inv(cum, fol, s):
    return _wrap(fol[0] - s, cum[cum.shape[0] - 1])


@njit(cache=True)
def _poly_inv(cum, fol, s, eps):
    k = cum.shape[0] - 1
    L = cum[k]
    # supporting components: isolated vertex (fixed) or parallel edge (mirror)
    for c in range(2):
        lo = fol[2 * c]
        hi = fol[2 * c + 1]
        d = s - lo
        if d < 0.0:
            d += L
        if d >= L - eps:
            d -= L
        if d <= hi - lo + eps:
            if hi - lo <= eps:
                return _wrap(lo, L)
            return _wrap(hi - d, L)

    e = 0
    while e < k - 1 and cum[e + 1] <= s:
        e += 1
    e1 = e + 1 if e + 1 < k else 0
    t = (s - cum[e]) / (cum[e + 1] - cum[e])
    he = fol[4 + e]
    he1 = fol[4 + e1]
    level = he + t * (he1 - he)
    up = he1 > he

    j = e
    for _ in range(k):
        j = j + 1 if j + 1 < k else 0
        j1 = j + 1 if j + 1 < k else 0
        hj = fol[4 + j]
        hj1 = fol[4 + j1]
        dh = hj1 - hj
        if up:
            hit = dh < -eps and hj1 <= level
        else:
            hit = dh > eps and hj1 >= level
        if hit:
            tt = (level - hj) / dh
            if tt < 0.0:
                tt = 0.0
            elif tt > 1.0:
                tt = 1.0
            ln = cum[j + 1] - cum[j]
            off = tt * ln
            if off < eps:
                return _wrap(cum[j], L)
            if ln - off < eps:
                return _wrap(cum[j + 1], L)
            return _wrap(cum[j] + off, L)
    # unreachable for a valid strictly convex polygon
    return s


@njit(cache=True)
def _table(cum, tab, s):
    L = cum[cum.shape[0] - 1]
    m = int(tab[0])
    i = 0
    while i < m - 1 and tab[2 + i] <= s:
        i += 1
    r = tab[1 + 2 * m + i] + tab[1 + m + i] * (s - tab[1 + i])
    return _wrap(r, L)


@njit(cache=True)
def involution(kind, cum, fol, s, eps):
    if kind == 0:
        return _smooth_inv(cum, fol, s)
    return _poly_inv(cum, fol, s, eps)


@njit(cache=True)
def step(kind, cum, fa, fb, s, eps):
    if kind == 0:
        return _smooth_inv(cum, fb, _smooth_inv(cum, fa, s))
    if kind == 1:
        return _poly_inv(cum, fb, _poly_inv(cum, fa, s, eps), eps)
    return _table(cum, fa, s)


@njit(cache=True)
def _normalize(d, L, prev, amb):
    # per-step displacement taken in [0, L); near 0 (mod L) the lift is
    # ambiguous and the representative closest to the previous step is kept
    if d < 0.0:
        d += L
    if d >= L:
        d -= L
    if d < amb or d > L - amb:
        alt = d - L if d > 0.5 * L else d + L
        if abs(alt - prev) < abs(d - prev):
            d = alt
    return d


@njit(cache=True)
def lift_sum(kind, cum, fa, fb, s0, n, eps, amb):
    """Total lifted displacement of ``n`` steps from ``s0`` and the end point."""
    L = cum[cum.shape[0] - 1]
    s = s0
    total = 0.0
    prev = 0.0
    for _ in range(n):
        s1 = step(kind, cum, fa, fb, s, eps)
        d = _normalize(s1 - s, L, prev, amb)
        total += d
        prev = d
        s = s1
    return total, s


@njit(cache=True)
def lift_many(kind, cum, fa, fb, seeds, q, eps, amb):
    out = np.empty(seeds.shape[0])
    for i in range(seeds.shape[0]):
        out[i] = lift_sum(kind, cum, fa, fb, seeds[i], q, eps, amb)[0]
    return out


@njit(cache=True)
def iterate_many(kind, cum, fa, fb, seeds, q, eps):
    out = np.empty(seeds.shape[0])
    for i in range(seeds.shape[0]):
        s = seeds[i]
        for _ in range(q):
            s = step(kind, cum, fa, fb, s, eps)
        out[i] = s
    return out


@njit(cache=True)
def orbit(kind, cum, fa, fb, s0, n, eps):
    out = np.empty(n + 1)
    out[0] = s0
    s = s0
    for i in range(n):
        s = step(kind, cum, fa, fb, s, eps)
        out[i + 1] = s
    return out


@njit(cache=True)
def involution_many(kind, cum, fol, seeds, eps):
    out = np.empty(seeds.shape[0])
    for i in range(seeds.shape[0]):
        out[i] = involution(kind, cum, fol, seeds[i], eps)
    return out


@njit(cache=True)
def connection_walk(kind, cum, f_first, f_second, s0, max_steps, pts_first, pts_second, tol, eps):
    """Alternate the two involutions from ``s0`` (``f_first`` applied first).

    Returns the number of chords after which the orbit sits on a designated
    fixed point of the involution due next, or -1 within ``max_steps``.
    """
    L = cum[cum.shape[0] - 1]
    s = s0
    for n in range(1, max_steps + 1):
        if n % 2 == 1:
            s = involution(kind, cum, f_first, s, eps)
            targets = pts_second
        else:
            s = involution(kind, cum, f_second, s, eps)
            targets = pts_first
        for t in targets:
            d = abs(s - t) % L
            if min(d, L - d) <= tol:
                return n
    return -1
