"""Numba-compiled inner loops.

Every function here has a twin with the same signature in ``_numpy.py``.
Coherent-state bra coefficients are assembled in log space,
``exp(-|b|^2/2 + n ln|b| - ln(n!)/2)`` times the phase power, so nothing
overflows for photon numbers up to 256 and amplitudes up to 40.
"""

import math

import numpy as np
from numba import njit

OUTSIDE = 1e300
Q_FLOOR = 1e-300
_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def _bra_row(re, im, nmax, logfact, out):
    r2 = re * re + im * im
    if r2 == 0.0:
        for n in range(nmax + 1):
            out[n] = 0.0
        out[0] = 1.0
        return
    r = math.sqrt(r2)
    lr = math.log(r)
    ph = complex(re / r, -im / r)
    z = complex(1.0, 0.0)
    for n in range(nmax + 1):
        out[n] = math.exp(-0.5 * r2 + n * lr - 0.5 * logfact[n]) * z
        z = z * ph


@njit(**_opts)
def bra_coeffs(re, im, nmax, logfact):
    out = np.empty((re.shape[0], nmax + 1), dtype=np.complex128)
    row = np.empty(nmax + 1, dtype=np.complex128)
    for p in range(re.shape[0]):
        _bra_row(re[p], im[p], nmax, logfact, row)
        out[p, :] = row
    return out


@njit(**_opts)
def q1_values(coeffs, re, im, logfact):
    nmax = coeffs.shape[0] - 1
    row = np.empty(nmax + 1, dtype=np.complex128)
    out = np.empty(re.shape[0])
    for p in range(re.shape[0]):
        _bra_row(re[p], im[p], nmax, logfact, row)
        s = complex(0.0, 0.0)
        for n in range(nmax + 1):
            s += row[n] * coeffs[n]
        out[p] = s.real * s.real + s.imag * s.imag
    return out


@njit(**_opts)
def q2_values(mat, a_re, a_im, b_re, b_im, logfact):
    na = mat.shape[0] - 1
    nb = mat.shape[1] - 1
    ua = np.empty(na + 1, dtype=np.complex128)
    ub = np.empty(nb + 1, dtype=np.complex128)
    out = np.empty(a_re.shape[0])
    for p in range(a_re.shape[0]):
        _bra_row(a_re[p], a_im[p], na, logfact, ua)
        _bra_row(b_re[p], b_im[p], nb, logfact, ub)
        s = complex(0.0, 0.0)
        for n in range(na + 1):
            t = complex(0.0, 0.0)
            for m in range(nb + 1):
                t += mat[n, m] * ub[m]
            s += ua[n] * t
        out[p] = s.real * s.real + s.imag * s.imag
    return out


@njit(**_opts)
def lattice_max1(coeffs, axis, logfact):
    """Scan the square lattice axis x axis; first strict maximum wins."""
    nmax = coeffs.shape[0] - 1
    row = np.empty(nmax + 1, dtype=np.complex128)
    best = -1.0
    bi = 0
    bj = 0
    for i in range(axis.shape[0]):
        for j in range(axis.shape[0]):
            _bra_row(axis[i], axis[j], nmax, logfact, row)
            s = complex(0.0, 0.0)
            for n in range(nmax + 1):
                s += row[n] * coeffs[n]
            q = s.real * s.real + s.imag * s.imag
            if q > best:
                best = q
                bi = i
                bj = j
    return best, bi, bj


@njit(**_opts)
def lattice_max2(mat, axis, logfact):
    """Four-dimensional lattice scan, (Re a, Im a, Re b, Im b) row-major."""
    k = axis.shape[0]
    na = mat.shape[0] - 1
    nb = mat.shape[1] - 1
    # left[p] = sum_n u_n(a_p) mat[n, :]; right[p] = v(b_p)
    left = np.zeros((k * k, nb + 1), dtype=np.complex128)
    right = np.empty((k * k, nb + 1), dtype=np.complex128)
    ua = np.empty(na + 1, dtype=np.complex128)
    ub = np.empty(nb + 1, dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            p = i * k + j
            _bra_row(axis[i], axis[j], na, logfact, ua)
            for n in range(na + 1):
                for m in range(nb + 1):
                    left[p, m] += ua[n] * mat[n, m]
            _bra_row(axis[i], axis[j], nb, logfact, ub)
            right[p, :] = ub
    best = -1.0
    ba = 0
    bb = 0
    for pa in range(k * k):
        for pb in range(k * k):
            s = complex(0.0, 0.0)
            for m in range(nb + 1):
                s += left[pa, m] * right[pb, m]
            q = s.real * s.real + s.imag * s.imag
            if q > best:
                best = q
                ba = pa
                bb = pb
    return best, ba // k, ba % k, bb // k, bb % k


@njit(**_opts)
def wigner_values(coeffs, re, im, logfact):
    """Pure-state Wigner function via the displaced-number-state expansion.

    W = sum_{m>=n} w_mn c_m conj(c_n) W_mn (w_mn = 1 on the diagonal, 2 off it,
    real part taken) with
    W_mn = (2/pi) (-1)^n sqrt(n!/m!) (2 a*)^(m-n) exp(-2|a|^2) L_n^(m-n)(4|a|^2).
    The Laguerre recurrence is run upward in n and rescaled whenever it
    grows past 1e150, the accumulated scale carried as a logarithm.
    """
    nmax = coeffs.shape[0] - 1
    out = np.empty(re.shape[0])
    two_over_pi = 2.0 / math.pi
    for p in range(re.shape[0]):
        r2 = re[p] * re[p] + im[p] * im[p]
        x = 4.0 * r2
        total = 0.0
        if r2 == 0.0:
            for n in range(nmax + 1):
                w = coeffs[n].real ** 2 + coeffs[n].imag ** 2
                total += w if n % 2 == 0 else -w
            out[p] = two_over_pi * total
            continue
        r = math.sqrt(r2)
        l2r = math.log(2.0 * r)
        ph = complex(re[p] / r, -im[p] / r)
        zk = complex(1.0, 0.0)
        for k in range(nmax + 1):
            lprev = 0.0
            lcur = 1.0
            lscale = 0.0
            for n in range(nmax + 1 - k):
                if n == 1:
                    lprev = lcur
                    lcur = 1.0 + k - x
                elif n > 1:
                    j = n - 1
                    lnext = ((2 * j + 1 + k - x) * lcur - (j + k) * lprev) / (j + 1)
                    lprev = lcur
                    lcur = lnext
                if abs(lcur) > _RESCALE:
                    lcur /= _RESCALE
                    lprev /= _RESCALE
                    lscale += _LOG_RESCALE
                if lcur == 0.0:
                    continue
                m = n + k
                cc = coeffs[m] * (coeffs[n].real - 1j * coeffs[n].imag)
                lmag = (-2.0 * r2 + k * l2r + 0.5 * (logfact[n] - logfact[m])
                        + lscale + math.log(abs(lcur)))
                sgn = 1.0 if lcur > 0 else -1.0
                if n % 2 == 1:
                    sgn = -sgn
                val = (cc * zk).real * sgn * math.exp(lmag)
                total += val if k == 0 else 2.0 * val
            zk = zk * ph
        out[p] = two_over_pi * total
    return out


@njit(**_opts)
def _objective(x, mat, arity, ra, rb, logfact, ua, ub):
    if x[0] * x[0] + x[1] * x[1] > ra * ra:
        return OUTSIDE
    na = mat.shape[0] - 1
    _bra_row(x[0], x[1], na, logfact, ua)
    s = complex(0.0, 0.0)
    if arity == 1:
        for n in range(na + 1):
            s += ua[n] * mat[n, 0]
    else:
        if x[2] * x[2] + x[3] * x[3] > rb * rb:
            return OUTSIDE
        nb = mat.shape[1] - 1
        _bra_row(x[2], x[3], nb, logfact, ub)
        for n in range(na + 1):
            t = complex(0.0, 0.0)
            for m in range(nb + 1):
                t += mat[n, m] * ub[m]
            s += ua[n] * t
    q = s.real * s.real + s.imag * s.imag
    return -math.log(q + Q_FLOOR)


@njit(**_opts)
def _sort_simplex(sim, fs):
    # stable insertion sort, ascending f
    d1 = fs.shape[0]
    for i in range(1, d1):
        fk = fs[i]
        xk = sim[i].copy()
        j = i - 1
        while j >= 0 and fs[j] > fk:
            fs[j + 1] = fs[j]
            sim[j + 1] = sim[j]
            j -= 1
        fs[j + 1] = fk
        sim[j + 1] = xk


@njit(**_opts)
def _diameter(sim):
    dmax = 0.0
    for i in range(1, sim.shape[0]):
        acc = 0.0
        for c in range(sim.shape[1]):
            t = sim[i, c] - sim[0, c]
            acc += t * t
        if acc > dmax:
            dmax = acc
    return math.sqrt(dmax)


@njit(**_opts)
def multistart_nm(mat, arity, starts, ra, rb, step, basis, tol, max_iters, logfact):
    """Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2) from each start.

    Minimizes -log(|<a(,b)|psi>|^2 + 1e-300) with +1e300 outside the disks
    |a| <= ra, |b| <= rb. Returns best vertex, its objective, iterations
    used and a converged flag (simplex diameter below tol) per start.
    """
    nstart = starts.shape[0]
    d = starts.shape[1]
    ua = np.empty(mat.shape[0], dtype=np.complex128)
    ub = np.empty(mat.shape[1], dtype=np.complex128)
    xs = np.empty((nstart, d))
    fx = np.empty(nstart)
    iters = np.zeros(nstart, dtype=np.int64)
    conv = np.zeros(nstart, dtype=np.bool_)
    sim = np.empty((d + 1, d))
    fs = np.empty(d + 1)
    xbar = np.empty(d)
    xr = np.empty(d)
    xe = np.empty(d)
    xc = np.empty(d)
    for s in range(nstart):
        for c in range(d):
            sim[0, c] = starts[s, c]
        for i in range(d):
            for c in range(d):
                sim[i + 1, c] = starts[s, c] + step * basis[c, i]
        for i in range(d + 1):
            fs[i] = _objective(sim[i], mat, arity, ra, rb, logfact, ua, ub)
        _sort_simplex(sim, fs)
        it = 0
        while it < max_iters:
            if _diameter(sim) < tol:
                conv[s] = True
                break
            it += 1
            for c in range(d):
                acc = 0.0
                for i in range(d):
                    acc += sim[i, c]
                xbar[c] = acc / d
            for c in range(d):
                xr[c] = 2.0 * xbar[c] - sim[d, c]
            fr = _objective(xr, mat, arity, ra, rb, logfact, ua, ub)
            shrink = False
            if fr < fs[0]:
                for c in range(d):
                    xe[c] = 3.0 * xbar[c] - 2.0 * sim[d, c]
                fe = _objective(xe, mat, arity, ra, rb, logfact, ua, ub)
                if fe < fr:
                    sim[d, :] = xe
                    fs[d] = fe
                else:
                    sim[d, :] = xr
                    fs[d] = fr
            elif fr < fs[d - 1]:
                sim[d, :] = xr
                fs[d] = fr
            elif fr < fs[d]:
                for c in range(d):
                    xc[c] = 1.5 * xbar[c] - 0.5 * sim[d, c]
                fc = _objective(xc, mat, arity, ra, rb, logfact, ua, ub)
                if fc <= fr:
                    sim[d, :] = xc
                    fs[d] = fc
                else:
                    shrink = True
            else:
                for c in range(d):
                    xc[c] = 0.5 * xbar[c] + 0.5 * sim[d, c]
                fc = _objective(xc, mat, arity, ra, rb, logfact, ua, ub)
                if fc < fs[d]:
                    sim[d, :] = xc
                    fs[d] = fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, d + 1):
                    for c in range(d):
                        sim[i, c] = sim[0, c] + 0.5 * (sim[i, c] - sim[0, c])
                    fs[i] = _objective(sim[i], mat, arity, ra, rb, logfact, ua, ub)
            _sort_simplex(sim, fs)
        if not conv[s]:
            conv[s] = _diameter(sim) < tol
        xs[s, :] = sim[0]
        fx[s] = fs[0]
        iters[s] = it
    return xs, fx, iters, conv
