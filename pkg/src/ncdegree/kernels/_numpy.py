"""Pure-numpy fallback for the compiled kernels.

Same signatures and the same arithmetic as ``_numba.py``, vectorized over
points (and, for Nelder-Mead, over starts) instead of looping.
"""

import math

import numpy as np

OUTSIDE = 1e300
Q_FLOOR = 1e-300
_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)
_CHUNK = 2048


def bra_coeffs(re, im, nmax, logfact):
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    r2 = re * re + im * im
    origin = r2 == 0.0
    r = np.sqrt(np.where(origin, 1.0, r2))
    n = np.arange(nmax + 1)
    with np.errstate(divide="ignore"):
        lr = np.log(r)
    lmag = -0.5 * r2[:, None] + n[None, :] * lr[:, None] - 0.5 * logfact[None, : nmax + 1]
    ph = (re / r - 1j * im / r)[:, None]
    powers = np.empty((re.shape[0], nmax + 1), dtype=np.complex128)
    powers[:, 0] = 1.0
    if nmax > 0:
        powers[:, 1:] = np.cumprod(np.broadcast_to(ph, (re.shape[0], nmax)), axis=1)
    out = np.exp(lmag) * powers
    out[origin, :] = 0.0
    out[origin, 0] = 1.0
    return out


def q1_values(coeffs, re, im, logfact):
    u = bra_coeffs(re, im, coeffs.shape[0] - 1, logfact)
    s = u @ coeffs
    return s.real ** 2 + s.imag ** 2


def q2_values(mat, a_re, a_im, b_re, b_im, logfact):
    ua = bra_coeffs(a_re, a_im, mat.shape[0] - 1, logfact)
    ub = bra_coeffs(b_re, b_im, mat.shape[1] - 1, logfact)
    s = np.einsum("pn,nm,pm->p", ua, mat, ub)
    return s.real ** 2 + s.imag ** 2


def _lattice_rows(axis, nmax, logfact):
    k = axis.shape[0]
    re = np.repeat(axis, k)
    im = np.tile(axis, k)
    return bra_coeffs(re, im, nmax, logfact)


def lattice_max1(coeffs, axis, logfact):
    q = np.abs(_lattice_rows(axis, coeffs.shape[0] - 1, logfact) @ coeffs) ** 2
    p = int(np.argmax(q))
    k = axis.shape[0]
    return float(q[p]), p // k, p % k


def lattice_max2(mat, axis, logfact):
    k = axis.shape[0]
    left = _lattice_rows(axis, mat.shape[0] - 1, logfact) @ mat
    right = _lattice_rows(axis, mat.shape[1] - 1, logfact)
    best = -1.0
    ba = bb = 0
    for lo in range(0, k * k, _CHUNK):
        block = left[lo:lo + _CHUNK] @ right.T
        q = block.real ** 2 + block.imag ** 2
        p = int(np.argmax(q))
        if q.flat[p] > best:
            best = float(q.flat[p])
            ba, bb = lo + p // (k * k), p % (k * k)
    return best, ba // k, ba % k, bb // k, bb % k


def wigner_values(coeffs, re, im, logfact):
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    nmax = coeffs.shape[0] - 1
    r2 = re * re + im * im
    x = 4.0 * r2
    origin = r2 == 0.0
    r = np.sqrt(np.where(origin, 1.0, r2))
    with np.errstate(divide="ignore"):
        l2r = np.where(origin, -np.inf, np.log(2.0 * r))
    ph = np.where(origin, 1.0, re / r - 1j * im / r)
    total = np.zeros(re.shape[0])
    zk = np.ones(re.shape[0], dtype=np.complex128)
    for k in range(nmax + 1):
        lprev = np.zeros_like(x)
        lcur = np.ones_like(x)
        lscale = np.zeros_like(x)
        klog = np.zeros_like(x) if k == 0 else k * l2r
        for n in range(nmax + 1 - k):
            if n == 1:
                lprev = lcur
                lcur = 1.0 + k - x
            elif n > 1:
                j = n - 1
                lnext = ((2 * j + 1 + k - x) * lcur - (j + k) * lprev) / (j + 1)
                lprev = lcur
                lcur = lnext
            big = np.abs(lcur) > _RESCALE
            if big.any():
                lcur = np.where(big, lcur / _RESCALE, lcur)
                lprev = np.where(big, lprev / _RESCALE, lprev)
                lscale = lscale + np.where(big, _LOG_RESCALE, 0.0)
            m = n + k
            cc = coeffs[m] * np.conj(coeffs[n])
            with np.errstate(divide="ignore"):
                lmag = (-2.0 * r2 + klog + 0.5 * (logfact[n] - logfact[m])
                        + lscale + np.log(np.abs(lcur)))
            sgn = np.sign(lcur) * (-1.0 if n % 2 else 1.0)
            val = (cc * zk).real * sgn * np.exp(lmag)
            total += val if k == 0 else 2.0 * val
        zk = zk * ph
    # at the origin only the diagonal survives
    if origin.any():
        p = np.abs(coeffs) ** 2
        signs = np.where(np.arange(nmax + 1) % 2 == 0, 1.0, -1.0)
        total[origin] = float(np.sum(p * signs))
    return (2.0 / math.pi) * total


def _objective(xs, mat, arity, ra, rb, logfact):
    """Batched objective, xs has shape (..., d)."""
    shape = xs.shape[:-1]
    flat = xs.reshape(-1, xs.shape[-1])
    outside = flat[:, 0] ** 2 + flat[:, 1] ** 2 > ra * ra
    if arity == 1:
        q = q1_values(mat[:, 0], flat[:, 0], flat[:, 1], logfact)
    else:
        outside |= flat[:, 2] ** 2 + flat[:, 3] ** 2 > rb * rb
        q = q2_values(mat, flat[:, 0], flat[:, 1], flat[:, 2], flat[:, 3], logfact)
    f = -np.log(q + Q_FLOOR)
    f[outside] = OUTSIDE
    return f.reshape(shape)


def _sort(sim, fs):
    order = np.argsort(fs, axis=1, kind="stable")
    fs = np.take_along_axis(fs, order, axis=1)
    sim = np.take_along_axis(sim, order[:, :, None], axis=1)
    return sim, fs


def _diameter(sim):
    return np.sqrt(np.max(np.sum((sim[:, 1:, :] - sim[:, :1, :]) ** 2, axis=2), axis=1))


def multistart_nm(mat, arity, starts, ra, rb, step, basis, tol, max_iters, logfact):
    """Lockstep Nelder-Mead over all starts; converged simplices are frozen."""
    nstart, d = starts.shape
    sim = np.repeat(starts[:, None, :], d + 1, axis=1).astype(float)
    sim[:, 1:, :] += step * basis.T[None, :, :]
    fs = _objective(sim, mat, arity, ra, rb, logfact)
    sim, fs = _sort(sim, fs)
    iters = np.zeros(nstart, dtype=np.int64)
    conv = np.zeros(nstart, dtype=bool)
    for _ in range(max_iters):
        conv |= _diameter(sim) < tol
        act = np.flatnonzero(~conv)
        if act.size == 0:
            break
        iters[act] += 1
        s = sim[act]
        f = fs[act]
        worst = s[:, d, :]
        xbar = np.sum(s[:, :d, :], axis=1) / d
        xr = 2.0 * xbar - worst
        xe = 3.0 * xbar - 2.0 * worst
        xoc = 1.5 * xbar - 0.5 * worst
        xic = 0.5 * xbar + 0.5 * worst
        fr, fe, foc, fic = _objective(np.stack([xr, xe, xoc, xic]), mat, arity, ra, rb, logfact)
        f0, fsw, fw = f[:, 0], f[:, d - 1], f[:, d]

        expand = fr < f0
        reflect = ~expand & (fr < fsw)
        outer = ~expand & ~reflect & (fr < fw)
        inner = ~expand & ~reflect & ~outer

        new_x = np.where((expand & (fe < fr))[:, None], xe, xr)
        new_f = np.where(expand & (fe < fr), fe, fr)
        take_oc = outer & (foc <= fr)
        take_ic = inner & (fic < fw)
        new_x = np.where(take_oc[:, None], xoc, new_x)
        new_f = np.where(take_oc, foc, new_f)
        new_x = np.where(take_ic[:, None], xic, new_x)
        new_f = np.where(take_ic, fic, new_f)
        replace = expand | reflect | take_oc | take_ic
        shrink = ~replace

        s[replace, d, :] = new_x[replace]
        f[replace, d] = new_f[replace]
        if shrink.any():
            ss = s[shrink]
            ss[:, 1:, :] = ss[:, :1, :] + 0.5 * (ss[:, 1:, :] - ss[:, :1, :])
            fsh = f[shrink]
            fsh[:, 1:] = _objective(ss[:, 1:, :], mat, arity, ra, rb, logfact)
            s[shrink] = ss
            f[shrink] = fsh
        s, f = _sort(s, f)
        sim[act] = s
        fs[act] = f
    conv |= _diameter(sim) < tol
    return sim[:, 0, :].copy(), fs[:, 0].copy(), iters, conv
