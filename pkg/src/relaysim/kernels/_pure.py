"""Pure Python reference implementation of the per-pair beamforming kernels.

This module is the semantic reference for relaysim.kernels._core (the Cython
extension).  The two are kept line-for-line parallel and must produce
bit-identical results: every operation is written as scalar arithmetic in a
fixed order, complex division uses an explicit formula instead of the
platform's library routine, and the extension is compiled with FP contraction
disabled.  Keep both files in sync when touching either.

Scheme codes shared with the selection module:
  0 ideal (MRC/MRT, interference ignored in the SINR)
  1 sinr  (MRC/MRT, actual interference in the SINR)
  2 zf    (transmit null-steering)
  3 mmse  (receive MMSE combining)
  4 ob    (pre-agreed random orthonormal receive/transmit basis)
  5 optimal (alternating receive/transmit optimization)
"""

import math

import numpy as np

IMPL = "python"

SCHEME_IDEAL = 0
SCHEME_SINR = 1
SCHEME_ZF = 2
SCHEME_MMSE = 3
SCHEME_OB = 4
SCHEME_OPTIMAL = 5

#: pivot-ratio threshold (squared magnitudes) treated as numerically singular
_COND2_LIMIT = 1e24


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def _cdiv(a, b):
    # explicit complex division (the compiled mirror uses the same formula,
    # not the C runtime's __divdc3, so quotients match bit for bit)
    d = b.real * b.real + b.imag * b.imag
    return complex(
        (a.real * b.real + a.imag * b.imag) / d,
        (a.imag * b.real - a.real * b.imag) / d,
    )


def _herm_dot(a, b, m):
    s = complex(0.0, 0.0)
    for k in range(m):
        s += a[k].conjugate() * b[k]
    return s


def _norm2(a, m):
    s = 0.0
    for k in range(m):
        s += _abs2(a[k])
    return s


def _matvec(h, x, m):
    out = [complex(0.0, 0.0)] * m
    for r in range(m):
        row = h[r]
        s = complex(0.0, 0.0)
        for c in range(m):
            s += row[c] * x[c]
        out[r] = s
    return out


def _matvec_herm(h, x, m):
    # (H^H x)[c] = sum_r conj(H[r][c]) x[r]
    out = [complex(0.0, 0.0)] * m
    for c in range(m):
        s = complex(0.0, 0.0)
        for r in range(m):
            s += h[r][c].conjugate() * x[r]
        out[c] = s
    return out


def _scale(x, s, m):
    return [x[k] * s for k in range(m)]


def _unit_perp(g, ng2, m):
    # deterministic unit vector orthogonal to g: orthogonalize the standard
    # basis vector with the smallest overlap
    k0 = 0
    best = _abs2(g[0])
    for k in range(1, m):
        v = _abs2(g[k])
        if v < best:
            best = v
            k0 = k
    coef = g[k0].conjugate() / ng2
    out = [-(g[k] * coef) for k in range(m)]
    out[k0] = out[k0] + 1.0
    n = math.sqrt(_norm2(out, m))
    return [out[k] / n for k in range(m)]


def _mmse_u(hs, h, w, rho_r, m):
    # receive direction (I + rho_r (Hw)(Hw)^H)^{-1} h_s, normalized
    gt = _matvec(h, w, m)
    ip = _herm_dot(gt, hs, m)
    den = 1.0 + rho_r * _norm2(gt, m)
    coef = ip * (rho_r / den)
    ut = [hs[k] - coef * gt[k] for k in range(m)]
    n = math.sqrt(_norm2(ut, m))
    return [ut[k] / n for k in range(m)], gt


def iri_free_pair(h_s, h_d, h, rho_s, rho_r, include_iri):
    """MRC/MRT gammas; include_iri selects whether the leak term is counted."""
    # scalar args are coerced to float here and below, mirroring the typed
    # double signatures of the compiled backend (a numpy scalar leaking into
    # the loops would switch complex/real division to numpy's
    # reciprocal-multiply form and break bitwise parity)
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    m = h_s.shape[0]
    hs = h_s.tolist()
    hd = h_d.tolist()
    hh = h.tolist()
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        raise ValueError("zero channel vector")
    gd = rho_r * nhd2
    if include_iri:
        cross = complex(0.0, 0.0)
        for r in range(m):
            row = hh[r]
            s = complex(0.0, 0.0)
            for c in range(m):
                s += row[c] * hd[c]
            cross += hs[r].conjugate() * s
        leak2 = _abs2(cross) / (nhs2 * nhd2)
        gs = rho_s * nhs2 / (1.0 + rho_r * leak2)
    else:
        gs = rho_s * nhs2
    return gs, gd


def zf_pair(h_s, h_d, h, rho_s, rho_r):
    """MRC receive, transmit projected out of the effective IRI direction."""
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    m = h_s.shape[0]
    if m < 2:
        raise ValueError("null-steering transmit needs M >= 2")
    hs = h_s.tolist()
    hd = h_d.tolist()
    hh = h.tolist()
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        raise ValueError("zero channel vector")
    nhs = math.sqrt(nhs2)
    u = [hs[k] / nhs for k in range(m)]
    g = _matvec_herm(hh, u, m)
    ng2 = _norm2(g, m)
    nhd = math.sqrt(nhd2)
    if ng2 == 0.0:
        w = [hd[k] / nhd for k in range(m)]
    else:
        coef = _herm_dot(g, hd, m) * (1.0 / ng2)
        wt = [hd[k] - coef * g[k] for k in range(m)]
        nw = math.sqrt(_norm2(wt, m))
        if nw <= 1e-12 * nhd:
            w = _unit_perp(g, ng2, m)
        else:
            w = [wt[k] / nw for k in range(m)]
    gs = rho_s * nhs2
    gd = rho_r * _abs2(_herm_dot(hd, w, m))
    return gs, gd, np.asarray(u, dtype=np.complex128), np.asarray(w, dtype=np.complex128)


def mmse_pair(h_s, h_d, h, rho_s, rho_r):
    """MRT transmit, MMSE receive against the rank-one leak covariance."""
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    m = h_s.shape[0]
    hs = h_s.tolist()
    hd = h_d.tolist()
    hh = h.tolist()
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        raise ValueError("zero channel vector")
    nhd = math.sqrt(nhd2)
    w = [hd[k] / nhd for k in range(m)]
    u, gt = _mmse_u(hs, hh, w, rho_r, m)
    sig = _abs2(_herm_dot(u, hs, m))
    leak2 = _abs2(_herm_dot(u, gt, m))
    gs = rho_s * sig / (1.0 + rho_r * leak2)
    gd = rho_r * nhd2
    return gs, gd, np.asarray(u, dtype=np.complex128), np.asarray(w, dtype=np.complex128)


def ob_pair(h_s, h_d, h, u_in, q_in, rho_s, rho_r):
    """Receive along u, transmit along H^{-1} q: the leak lands orthogonal to u.

    Returns (gamma_s, gamma_d, w, singular); singular=True flags a pivot
    ratio beyond the condition limit, in which case the caller may retry
    with a fresh q.
    """
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    m = h_s.shape[0]
    if m < 2:
        raise ValueError("orthonormal-basis scheme needs M >= 2")
    hs = h_s.tolist()
    hd = h_d.tolist()
    u = u_in.tolist()
    x = q_in.tolist()
    work = [row[:] for row in h.tolist()]
    # Gaussian elimination with partial pivoting on H x = q
    min_p2 = math.inf
    max_p2 = 0.0
    for col in range(m):
        piv = col
        best = _abs2(work[col][col])
        for r in range(col + 1, m):
            v = _abs2(work[r][col])
            if v > best:
                best = v
                piv = r
        if best == 0.0:
            return 0.0, 0.0, np.zeros(m, dtype=np.complex128), True
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            x[col], x[piv] = x[piv], x[col]
        if best < min_p2:
            min_p2 = best
        if best > max_p2:
            max_p2 = best
        prow = work[col]
        for r in range(col + 1, m):
            row = work[r]
            f = _cdiv(row[col], prow[col])
            row[col] = complex(0.0, 0.0)
            for c in range(col + 1, m):
                row[c] = row[c] - f * prow[c]
            x[r] = x[r] - f * x[col]
    if max_p2 / min_p2 > _COND2_LIMIT:
        return 0.0, 0.0, np.zeros(m, dtype=np.complex128), True
    for col in range(m - 1, -1, -1):
        s = x[col]
        row = work[col]
        for c in range(col + 1, m):
            s -= row[c] * x[c]
        x[col] = _cdiv(s, row[col])
    nw = math.sqrt(_norm2(x, m))
    if nw == 0.0:
        return 0.0, 0.0, np.zeros(m, dtype=np.complex128), True
    w = [x[k] / nw for k in range(m)]
    gs = rho_s * _abs2(_herm_dot(u, hs, m))
    gd = rho_r * _abs2(_herm_dot(hd, w, m))
    return gs, gd, np.asarray(w, dtype=np.complex128), False


def beta_objective(beta, a, p, dpar, dperp, wr, wt, rho_s, rho_r):
    """Weighted two-hop objective as a function of the transmit split beta.

    beta trades transmit beamforming gain (parallel to the receive-side
    interference direction) against leak suppression; a = |u^H h_S|^2,
    p = |g^H w_par|^2, dpar/dperp = real transmit gains of the two components,
    wr/wt = weights on the receive and transmit hop rates.
    """
    beta = float(beta)
    a = float(a)
    p = float(p)
    dpar = float(dpar)
    dperp = float(dperp)
    wr = float(wr)
    wt = float(wt)
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    s = 1.0 - beta * beta
    if s < 0.0:
        s = 0.0
    root = math.sqrt(s)
    gs = rho_s * a / (rho_r * (beta * beta) * p + 1.0)
    t = beta * dpar + root * dperp
    gd = rho_r * (t * t)
    return wr * math.log2(1.0 + gs) + wt * math.log2(1.0 + gd)


def optimize_beta(a, p, dpar, dperp, wr, wt, rho_s, rho_r, grid_n, newton_steps):
    """Maximize beta_objective on [0,1]: coarse grid then damped Newton."""
    a = float(a)
    p = float(p)
    dpar = float(dpar)
    dperp = float(dperp)
    wr = float(wr)
    wt = float(wt)
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    best_b = 0.0
    best_f = -math.inf
    span = grid_n - 1.0
    for k in range(grid_n):
        b = k / span
        f = beta_objective(b, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        if f > best_f:
            best_f = f
            best_b = b
    h = 1e-5
    b = best_b
    fb = best_f
    for _ in range(newton_steps):
        c = b
        if c < h:
            c = h
        elif c > 1.0 - h:
            c = 1.0 - h
        f0 = beta_objective(c - h, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        f1 = beta_objective(c, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        f2 = beta_objective(c + h, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        d1 = (f2 - f0) / (2.0 * h)
        d2 = (f2 - 2.0 * f1 + f0) / (h * h)
        if d2 >= 0.0:
            break
        step = -d1 / d2
        accepted = False
        for _ in range(20):
            cand = c + step
            if 0.0 <= cand <= 1.0:
                fc = beta_objective(cand, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
                if fc > fb:
                    b = cand
                    fb = fc
                    accepted = True
                    break
            step *= 0.5
            if abs(step) < 1e-14:
                break
        if not accepted:
            break
        if abs(step) < 1e-10:
            break
    return b, fb


def optimal_single(h_s, h_d, h, rho_s, rho_r, wr, wt, w_init, tol, max_iter,
                   grid_n, newton_steps, collect_trace):
    """One alternating-optimization run from a given transmit warm start.

    Each iteration solves both subproblems exactly (MMSE receive step, then
    the one-dimensional transmit split), so the weighted objective is
    non-decreasing across iterations.
    """
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    wr = float(wr)
    wt = float(wt)
    tol = float(tol)
    m = h_s.shape[0]
    hs = h_s.tolist()
    hd = h_d.tolist()
    hh = h.tolist()
    nhd2 = _norm2(hd, m)
    nhd = math.sqrt(nhd2)
    # native complex scalars, like every other input: numpy complex128
    # scalar arithmetic may round differently and break cross-backend parity
    w = [complex(x) for x in w_init]
    u_prev = None
    trace = [] if collect_trace else None
    gs = gd = obj = 0.0
    beta = 0.0
    u = None
    it = 0
    for it in range(1, max_iter + 1):
        u, _gt = _mmse_u(hs, hh, w, rho_r, m)
        g = _matvec_herm(hh, u, m)
        ng2 = _norm2(g, m)
        a = _abs2(_herm_dot(u, hs, m))
        if ng2 == 0.0:
            w_new = [hd[k] / nhd for k in range(m)]
            beta = 0.0
            leak2 = 0.0
        else:
            iph = _herm_dot(g, hd, m)
            if _abs2(iph) == 0.0:
                # transmit channel orthogonal to the leak direction: any
                # parallel component only adds interference
                w_new = [hd[k] / nhd for k in range(m)]
                beta = 0.0
                leak2 = 0.0
            else:
                coef = iph * (1.0 / ng2)
                wpar_t = [coef * g[k] for k in range(m)]
                dpar = math.sqrt(_norm2(wpar_t, m))
                wpar = [wpar_t[k] / dpar for k in range(m)]
                wperp_t = [hd[k] - wpar_t[k] for k in range(m)]
                dperp = math.sqrt(_norm2(wperp_t, m))
                if dperp <= 1e-12 * nhd:
                    wperp = _unit_perp(g, ng2, m)
                    dperp_v = 0.0
                else:
                    wperp = [wperp_t[k] / dperp for k in range(m)]
                    dperp_v = dperp
                p = _abs2(_herm_dot(g, wpar, m))
                beta, _ = optimize_beta(a, p, dpar, dperp_v, wr, wt, rho_s,
                                        rho_r, grid_n, newton_steps)
                s = 1.0 - beta * beta
                if s < 0.0:
                    s = 0.0
                root = math.sqrt(s)
                w_new = [beta * wpar[k] + root * wperp[k] for k in range(m)]
                leak2 = (beta * beta) * p
        gs = rho_s * a / (1.0 + rho_r * leak2)
        gd = rho_r * _abs2(_herm_dot(hd, w_new, m))
        obj = wr * math.log2(1.0 + gs) + wt * math.log2(1.0 + gd)
        if collect_trace:
            trace.append(obj)
        dw2 = 0.0
        for k in range(m):
            dw2 += _abs2(w_new[k] - w[k])
        dw = math.sqrt(dw2)
        if u_prev is None:
            conv = dw < tol
        else:
            du2 = 0.0
            for k in range(m):
                du2 += _abs2(u[k] - u_prev[k])
            conv = math.sqrt(du2) < tol and dw < tol
        u_prev = u
        w = w_new
        if conv:
            break
    return (gs, gd, np.asarray(u, dtype=np.complex128),
            np.asarray(w, dtype=np.complex128), it, beta, obj, trace)


def optimal_pair(h_s, h_d, h, rho_s, rho_r, wr, wt=None, tol=1e-4,
                 max_iter=1000, grid_n=256, newton_steps=10):
    """Alternating optimization run from both warm starts, better kept.

    Warm starts: the null-steering transmit beam (whose objective the result
    then never falls below) and plain MRT (which covers instances where
    sacrificing transmit gain for leak suppression is the wrong trade).
    """
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    wr = float(wr)
    wt = (1.0 - wr) if wt is None else float(wt)
    m = h_s.shape[0]
    nhs2 = _norm2(h_s.tolist(), m)
    nhd2 = _norm2(h_d.tolist(), m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        raise ValueError("zero channel vector")
    if m == 1:
        hs0 = complex(h_s[0])
        hd0 = complex(h_d[0])
        h00 = complex(h[0][0])
        u0 = hs0 / math.sqrt(nhs2)
        w0 = hd0 / math.sqrt(nhd2)
        leak2 = _abs2(u0.conjugate() * (h00 * w0))
        gs = rho_s * _abs2(u0.conjugate() * hs0) / (1.0 + rho_r * leak2)
        gd = rho_r * _abs2(hd0.conjugate() * w0)
        obj = wr * math.log2(1.0 + gs) + wt * math.log2(1.0 + gd)
        return (gs, gd, np.asarray([u0], dtype=np.complex128),
                np.asarray([w0], dtype=np.complex128), 1, 1.0, obj)
    _zs, _zd, _zu, zw = zf_pair(h_s, h_d, h, rho_s, rho_r)
    run_a = optimal_single(h_s, h_d, h, rho_s, rho_r, wr, wt, zw.tolist(),
                           tol, max_iter, grid_n, newton_steps, False)
    nhd = math.sqrt(nhd2)
    mrt = [complex(h_d[k]) / nhd for k in range(m)]
    run_b = optimal_single(h_s, h_d, h, rho_s, rho_r, wr, wt, mrt,
                           tol, max_iter, grid_n, newton_steps, False)
    best = run_b if run_b[6] > run_a[6] else run_a
    return best[:7]


def mrc_mrt_gains(h_sr, h_rd, rho_s, rho_r):
    """Per-relay matched-filter link SNRs rho_s ||h_S||^2 and rho_r ||h_D||^2."""
    k, m = h_sr.shape
    hs = h_sr.tolist()
    hd = h_rd.tolist()
    gs = np.empty(k, dtype=np.float64)
    gd = np.empty(k, dtype=np.float64)
    for r in range(k):
        gs[r] = rho_s * _norm2(hs[r], m)
        gd[r] = rho_r * _norm2(hd[r], m)
    return gs, gd


def best_pair(scheme, h_sr, h_rd, h_rr, rho_s, rho_r, alpha, levels, b_max,
              ob_u=None, ob_q=None):
    """Enumerate ordered relay pairs (i receives, j transmits) and return the
    maximizer of alpha[i] * C_S + (1 - alpha[j]) * C_D.

    Ties keep the first pair in (i, j) lexicographic order.  Returns
    (i, j, gamma_s, gamma_d, c_s, c_d, objective, u, w, iterations, beta).
    """
    rho_s = float(rho_s)
    rho_r = float(rho_r)
    b_max = float(b_max)
    k = h_sr.shape[0]
    best = None
    best_obj = -math.inf
    for i in range(k):
        head = b_max - levels[i]
        if head < 0.0:
            head = 0.0
        for j in range(k):
            if j == i:
                continue
            hs = h_sr[i]
            hd = h_rd[j]
            hji = h_rr[j, i]
            iters = 0
            beta = -1.0
            if scheme == SCHEME_IDEAL or scheme == SCHEME_SINR:
                gs, gd = iri_free_pair(hs, hd, hji, rho_s, rho_r,
                                       scheme == SCHEME_SINR)
                u = w = None
            elif scheme == SCHEME_ZF:
                gs, gd, u, w = zf_pair(hs, hd, hji, rho_s, rho_r)
            elif scheme == SCHEME_MMSE:
                gs, gd, u, w = mmse_pair(hs, hd, hji, rho_s, rho_r)
            elif scheme == SCHEME_OB:
                gs, gd, w, singular = ob_pair(hs, hd, hji, ob_u, ob_q,
                                              rho_s, rho_r)
                if singular:
                    raise ValueError("singular inter-relay channel")
                u = ob_u
            elif scheme == SCHEME_OPTIMAL:
                gs, gd, u, w, iters, beta, _obj = optimal_pair(
                    hs, hd, hji, rho_s, rho_r, alpha[i], 1.0 - alpha[j])
            else:
                raise ValueError(f"unknown scheme code {scheme}")
            rate_s = math.log2(1.0 + gs)
            c_s = rate_s if rate_s < head else head
            rate_d = math.log2(1.0 + gd)
            lev = levels[j]
            c_d = rate_d if rate_d < lev else lev
            obj = alpha[i] * c_s + (1.0 - alpha[j]) * c_d
            if obj > best_obj:
                best_obj = obj
                best = (i, j, gs, gd, c_s, c_d, obj, u, w, iters, beta)
    i, j, gs, gd, c_s, c_d, obj, u, w, iters, beta = best
    if u is None:
        m = h_sr.shape[1]
        u = np.empty(m, dtype=np.complex128)
        w = np.empty(m, dtype=np.complex128)
        hsl = h_sr[i].tolist()
        hdl = h_rd[j].tolist()
        nu = math.sqrt(_norm2(hsl, m))
        nw = math.sqrt(_norm2(hdl, m))
        for t in range(m):
            u[t] = hsl[t] / nu
            w[t] = hdl[t] / nw
    return (i, j, gs, gd, c_s, c_d, obj,
            np.ascontiguousarray(u, dtype=np.complex128),
            np.ascontiguousarray(w, dtype=np.complex128), iters, beta)
