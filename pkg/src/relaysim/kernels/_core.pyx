# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pair beamforming kernels.

Line-for-line mirror of relaysim.kernels._pure (the semantic reference):
identical formulas, evaluation order, and tie-breaking, with complex division
spelled out explicitly so no libm/runtime quotient routine is involved.
Together with -ffp-contract=off this keeps results bit-identical to the pure
Python backend.  Keep both files in sync when touching either.
"""

import numpy as np

from libc.math cimport INFINITY, fabs, log2, sqrt

IMPL = "cython"

SCHEME_IDEAL = 0
SCHEME_SINR = 1
SCHEME_ZF = 2
SCHEME_MMSE = 3
SCHEME_OB = 4
SCHEME_OPTIMAL = 5

cdef enum:
    MAXM = 64  # stack-buffer bound on antennas per node

cdef double _COND2_LIMIT = 1e24

cdef int _IDEAL = 0
cdef int _SINR = 1
cdef int _ZF = 2
cdef int _MMSE = 3
cdef int _OB = 4
cdef int _OPTIMAL = 5


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex _cdiv(double complex a, double complex b) noexcept nogil:
    # explicit complex division (same formula as the pure backend, not the
    # C runtime's __divdc3, so quotients match bit for bit)
    cdef double d = b.real * b.real + b.imag * b.imag
    cdef double complex out
    out.real = (a.real * b.real + a.imag * b.imag) / d
    out.imag = (a.imag * b.real - a.real * b.imag) / d
    return out


cdef inline double complex _herm_dot(double complex *a, double complex *b, int m) noexcept nogil:
    cdef double complex s = 0
    cdef int k
    for k in range(m):
        s += a[k].conjugate() * b[k]
    return s


cdef inline double _norm2(double complex *a, int m) noexcept nogil:
    cdef double s = 0.0
    cdef int k
    for k in range(m):
        s += _abs2(a[k])
    return s


cdef void _matvec(double complex *h, double complex *x, double complex *out, int m) noexcept nogil:
    cdef int r, c
    cdef double complex s
    for r in range(m):
        s = 0
        for c in range(m):
            s += h[r * m + c] * x[c]
        out[r] = s


cdef void _matvec_herm(double complex *h, double complex *x, double complex *out, int m) noexcept nogil:
    # (H^H x)[c] = sum_r conj(H[r][c]) x[r]
    cdef int r, c
    cdef double complex s
    for c in range(m):
        s = 0
        for r in range(m):
            s += h[r * m + c].conjugate() * x[r]
        out[c] = s


cdef void _unit_perp(double complex *g, double ng2, int m, double complex *out) noexcept nogil:
    # deterministic unit vector orthogonal to g: orthogonalize the standard
    # basis vector with the smallest overlap
    cdef int k0 = 0
    cdef double best = _abs2(g[0])
    cdef double v, n
    cdef int k
    cdef double complex coef
    for k in range(1, m):
        v = _abs2(g[k])
        if v < best:
            best = v
            k0 = k
    coef = g[k0].conjugate() / ng2
    for k in range(m):
        out[k] = -(g[k] * coef)
    out[k0] = out[k0] + 1.0
    n = sqrt(_norm2(out, m))
    for k in range(m):
        out[k] = out[k] / n


cdef void _mmse_u(double complex *hs, double complex *h, double complex *w,
                  double rho_r, int m, double complex *u_out,
                  double complex *gt_out) noexcept nogil:
    # receive direction (I + rho_r (Hw)(Hw)^H)^{-1} h_s, normalized
    cdef double complex ip, coef
    cdef double den, n
    cdef int k
    _matvec(h, w, gt_out, m)
    ip = _herm_dot(gt_out, hs, m)
    den = 1.0 + rho_r * _norm2(gt_out, m)
    coef = ip * (rho_r / den)
    for k in range(m):
        u_out[k] = hs[k] - coef * gt_out[k]
    n = sqrt(_norm2(u_out, m))
    for k in range(m):
        u_out[k] = u_out[k] / n


cdef int _iri_free(double complex *hs, double complex *hd, double complex *h,
                   double rho_s, double rho_r, bint include_iri, int m,
                   double *gs, double *gd) noexcept nogil:
    cdef double nhs2 = _norm2(hs, m)
    cdef double nhd2 = _norm2(hd, m)
    cdef double complex cross, s
    cdef double leak2
    cdef int r, c
    if nhs2 == 0.0 or nhd2 == 0.0:
        return 1
    gd[0] = rho_r * nhd2
    if include_iri:
        cross = 0
        for r in range(m):
            s = 0
            for c in range(m):
                s += h[r * m + c] * hd[c]
            cross += hs[r].conjugate() * s
        leak2 = _abs2(cross) / (nhs2 * nhd2)
        gs[0] = rho_s * nhs2 / (1.0 + rho_r * leak2)
    else:
        gs[0] = rho_s * nhs2
    return 0


cdef int _zf(double complex *hs, double complex *hd, double complex *h,
             double rho_s, double rho_r, int m,
             double *gs, double *gd, double complex *u_out,
             double complex *w_out) noexcept nogil:
    cdef double nhs2, nhd2, nhs, nhd, ng2, nw
    cdef double complex g[MAXM]
    cdef double complex wt[MAXM]
    cdef double complex coef
    cdef int k
    if m < 2:
        return 4
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        return 1
    nhs = sqrt(nhs2)
    for k in range(m):
        u_out[k] = hs[k] / nhs
    _matvec_herm(h, u_out, g, m)
    ng2 = _norm2(g, m)
    nhd = sqrt(nhd2)
    if ng2 == 0.0:
        for k in range(m):
            w_out[k] = hd[k] / nhd
    else:
        coef = _herm_dot(g, hd, m) * (1.0 / ng2)
        for k in range(m):
            wt[k] = hd[k] - coef * g[k]
        nw = sqrt(_norm2(wt, m))
        if nw <= 1e-12 * nhd:
            _unit_perp(g, ng2, m, w_out)
        else:
            for k in range(m):
                w_out[k] = wt[k] / nw
    gs[0] = rho_s * nhs2
    gd[0] = rho_r * _abs2(_herm_dot(hd, w_out, m))
    return 0


cdef int _mmse(double complex *hs, double complex *hd, double complex *h,
               double rho_s, double rho_r, int m,
               double *gs, double *gd, double complex *u_out,
               double complex *w_out) noexcept nogil:
    cdef double nhs2, nhd2, nhd, sig, leak2
    cdef double complex gt[MAXM]
    cdef int k
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        return 1
    nhd = sqrt(nhd2)
    for k in range(m):
        w_out[k] = hd[k] / nhd
    _mmse_u(hs, h, w_out, rho_r, m, u_out, gt)
    sig = _abs2(_herm_dot(u_out, hs, m))
    leak2 = _abs2(_herm_dot(u_out, gt, m))
    gs[0] = rho_s * sig / (1.0 + rho_r * leak2)
    gd[0] = rho_r * nhd2
    return 0


cdef int _ob(double complex *hs, double complex *hd, double complex *h,
             double complex *u_in, double complex *q_in,
             double rho_s, double rho_r, int m,
             double *gs, double *gd, double complex *w_out) noexcept nogil:
    # Gaussian elimination with partial pivoting on H x = q; returns 2 when
    # the pivot ratio marks the matrix numerically singular
    cdef double complex work[MAXM * MAXM]
    cdef double complex x[MAXM]
    cdef double complex f, s, tmp
    cdef double min_p2 = INFINITY
    cdef double max_p2 = 0.0
    cdef double best, v, nw
    cdef int col, r, c, piv, k
    if m < 2:
        return 4
    for k in range(m * m):
        work[k] = h[k]
    for k in range(m):
        x[k] = q_in[k]
    for col in range(m):
        piv = col
        best = _abs2(work[col * m + col])
        for r in range(col + 1, m):
            v = _abs2(work[r * m + col])
            if v > best:
                best = v
                piv = r
        if best == 0.0:
            return 2
        if piv != col:
            for c in range(m):
                tmp = work[col * m + c]
                work[col * m + c] = work[piv * m + c]
                work[piv * m + c] = tmp
            tmp = x[col]
            x[col] = x[piv]
            x[piv] = tmp
        if best < min_p2:
            min_p2 = best
        if best > max_p2:
            max_p2 = best
        for r in range(col + 1, m):
            f = _cdiv(work[r * m + col], work[col * m + col])
            work[r * m + col] = 0
            for c in range(col + 1, m):
                work[r * m + c] = work[r * m + c] - f * work[col * m + c]
            x[r] = x[r] - f * x[col]
    if max_p2 / min_p2 > _COND2_LIMIT:
        return 2
    for col in range(m - 1, -1, -1):
        s = x[col]
        for c in range(col + 1, m):
            s -= work[col * m + c] * x[c]
        x[col] = _cdiv(s, work[col * m + col])
    nw = sqrt(_norm2(x, m))
    if nw == 0.0:
        return 2
    for k in range(m):
        w_out[k] = x[k] / nw
    gs[0] = rho_s * _abs2(_herm_dot(u_in, hs, m))
    gd[0] = rho_r * _abs2(_herm_dot(hd, w_out, m))
    return 0


cdef double _beta_objective(double beta, double a, double p, double dpar,
                            double dperp, double wr, double wt,
                            double rho_s, double rho_r) noexcept nogil:
    cdef double s = 1.0 - beta * beta
    cdef double root, gs, t, gd
    if s < 0.0:
        s = 0.0
    root = sqrt(s)
    gs = rho_s * a / (rho_r * (beta * beta) * p + 1.0)
    t = beta * dpar + root * dperp
    gd = rho_r * (t * t)
    return wr * log2(1.0 + gs) + wt * log2(1.0 + gd)


cdef double _optimize_beta(double a, double p, double dpar, double dperp,
                           double wr, double wt, double rho_s, double rho_r,
                           int grid_n, int newton_steps,
                           double *f_out) noexcept nogil:
    cdef double best_b = 0.0
    cdef double best_f = -INFINITY
    cdef double span = grid_n - 1.0
    cdef double b, f, fb, h, c, f0, f1, f2, d1, d2, step, cand, fc
    cdef int k, it, halved
    cdef bint accepted
    for k in range(grid_n):
        b = k / span
        f = _beta_objective(b, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        if f > best_f:
            best_f = f
            best_b = b
    h = 1e-5
    b = best_b
    fb = best_f
    for it in range(newton_steps):
        c = b
        if c < h:
            c = h
        elif c > 1.0 - h:
            c = 1.0 - h
        f0 = _beta_objective(c - h, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        f1 = _beta_objective(c, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        f2 = _beta_objective(c + h, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
        d1 = (f2 - f0) / (2.0 * h)
        d2 = (f2 - 2.0 * f1 + f0) / (h * h)
        if d2 >= 0.0:
            break
        step = -d1 / d2
        accepted = False
        for halved in range(20):
            cand = c + step
            if 0.0 <= cand <= 1.0:
                fc = _beta_objective(cand, a, p, dpar, dperp, wr, wt, rho_s, rho_r)
                if fc > fb:
                    b = cand
                    fb = fc
                    accepted = True
                    break
            step *= 0.5
            if fabs(step) < 1e-14:
                break
        if not accepted:
            break
        if fabs(step) < 1e-10:
            break
    f_out[0] = fb
    return b


cdef int _optimal_single(double complex *hs, double complex *hd, double complex *h,
                         double rho_s, double rho_r, double wr, double wt,
                         double complex *w_init, double tol, int max_iter,
                         int grid_n, int newton_steps, int m,
                         double *gs_out, double *gd_out,
                         double complex *u_out, double complex *w_out,
                         int *iters_out, double *beta_out, double *obj_out,
                         double *trace) noexcept nogil:
    cdef double complex w[MAXM]
    cdef double complex u[MAXM]
    cdef double complex u_prev[MAXM]
    cdef double complex gt[MAXM]
    cdef double complex g[MAXM]
    cdef double complex wpar_t[MAXM]
    cdef double complex wpar[MAXM]
    cdef double complex wperp_t[MAXM]
    cdef double complex wperp[MAXM]
    cdef double complex w_new[MAXM]
    cdef double complex iph, coef
    cdef double nhd2, nhd, ng2, a, dpar, dperp, dperp_v, p, s, root, leak2
    cdef double gs = 0.0
    cdef double gd = 0.0
    cdef double obj = 0.0
    cdef double beta = 0.0
    cdef double dw2, du2, fb
    cdef bint u_prev_valid = False
    cdef bint conv
    cdef int k, it
    nhd2 = _norm2(hd, m)
    nhd = sqrt(nhd2)
    for k in range(m):
        w[k] = w_init[k]
    it = 0
    for it in range(1, max_iter + 1):
        _mmse_u(hs, h, w, rho_r, m, u, gt)
        _matvec_herm(h, u, g, m)
        ng2 = _norm2(g, m)
        a = _abs2(_herm_dot(u, hs, m))
        if ng2 == 0.0:
            for k in range(m):
                w_new[k] = hd[k] / nhd
            beta = 0.0
            leak2 = 0.0
        else:
            iph = _herm_dot(g, hd, m)
            if _abs2(iph) == 0.0:
                # transmit channel orthogonal to the leak direction: any
                # parallel component only adds interference
                for k in range(m):
                    w_new[k] = hd[k] / nhd
                beta = 0.0
                leak2 = 0.0
            else:
                coef = iph * (1.0 / ng2)
                for k in range(m):
                    wpar_t[k] = coef * g[k]
                dpar = sqrt(_norm2(wpar_t, m))
                for k in range(m):
                    wpar[k] = wpar_t[k] / dpar
                for k in range(m):
                    wperp_t[k] = hd[k] - wpar_t[k]
                dperp = sqrt(_norm2(wperp_t, m))
                if dperp <= 1e-12 * nhd:
                    _unit_perp(g, ng2, m, wperp)
                    dperp_v = 0.0
                else:
                    for k in range(m):
                        wperp[k] = wperp_t[k] / dperp
                    dperp_v = dperp
                p = _abs2(_herm_dot(g, wpar, m))
                beta = _optimize_beta(a, p, dpar, dperp_v, wr, wt, rho_s,
                                      rho_r, grid_n, newton_steps, &fb)
                s = 1.0 - beta * beta
                if s < 0.0:
                    s = 0.0
                root = sqrt(s)
                for k in range(m):
                    w_new[k] = beta * wpar[k] + root * wperp[k]
                leak2 = (beta * beta) * p
        gs = rho_s * a / (1.0 + rho_r * leak2)
        gd = rho_r * _abs2(_herm_dot(hd, w_new, m))
        obj = wr * log2(1.0 + gs) + wt * log2(1.0 + gd)
        if trace != NULL:
            trace[it - 1] = obj
        dw2 = 0.0
        for k in range(m):
            dw2 += _abs2(w_new[k] - w[k])
        if not u_prev_valid:
            conv = sqrt(dw2) < tol
        else:
            du2 = 0.0
            for k in range(m):
                du2 += _abs2(u[k] - u_prev[k])
            conv = sqrt(du2) < tol and sqrt(dw2) < tol
        for k in range(m):
            u_prev[k] = u[k]
            w[k] = w_new[k]
        u_prev_valid = True
        if conv:
            break
    gs_out[0] = gs
    gd_out[0] = gd
    for k in range(m):
        u_out[k] = u[k]
        w_out[k] = w[k]
    iters_out[0] = it
    beta_out[0] = beta
    obj_out[0] = obj
    return 0


cdef int _optimal(double complex *hs, double complex *hd, double complex *h,
                  double rho_s, double rho_r, double wr, double wt,
                  double tol, int max_iter, int grid_n, int newton_steps, int m,
                  double *gs_out, double *gd_out,
                  double complex *u_out, double complex *w_out,
                  int *iters_out, double *beta_out, double *obj_out) noexcept nogil:
    cdef double complex u0, w0c, hs0, hd0, h00
    cdef double complex w0a[MAXM]
    cdef double complex w0b[MAXM]
    cdef double complex u_a[MAXM]
    cdef double complex w_a[MAXM]
    cdef double complex u_b[MAXM]
    cdef double complex w_b[MAXM]
    cdef double nhs2, nhd2, nhd, leak2
    cdef double gs_a, gd_a, beta_a, obj_a
    cdef double gs_b, gd_b, beta_b, obj_b
    cdef double zgs, zgd
    cdef int it_a, it_b, k, code
    nhs2 = _norm2(hs, m)
    nhd2 = _norm2(hd, m)
    if nhs2 == 0.0 or nhd2 == 0.0:
        return 1
    if m == 1:
        hs0 = hs[0]
        hd0 = hd[0]
        h00 = h[0]
        u0 = hs0 / sqrt(nhs2)
        w0c = hd0 / sqrt(nhd2)
        leak2 = _abs2(u0.conjugate() * (h00 * w0c))
        gs_out[0] = rho_s * _abs2(u0.conjugate() * hs0) / (1.0 + rho_r * leak2)
        gd_out[0] = rho_r * _abs2(hd0.conjugate() * w0c)
        obj_out[0] = wr * log2(1.0 + gs_out[0]) + wt * log2(1.0 + gd_out[0])
        u_out[0] = u0
        w_out[0] = w0c
        iters_out[0] = 1
        beta_out[0] = 1.0
        return 0
    code = _zf(hs, hd, h, rho_s, rho_r, m, &zgs, &zgd, u_a, w0a)
    if code != 0:
        return code
    _optimal_single(hs, hd, h, rho_s, rho_r, wr, wt, w0a, tol, max_iter,
                    grid_n, newton_steps, m, &gs_a, &gd_a, u_a, w_a,
                    &it_a, &beta_a, &obj_a, NULL)
    nhd = sqrt(nhd2)
    for k in range(m):
        w0b[k] = hd[k] / nhd
    _optimal_single(hs, hd, h, rho_s, rho_r, wr, wt, w0b, tol, max_iter,
                    grid_n, newton_steps, m, &gs_b, &gd_b, u_b, w_b,
                    &it_b, &beta_b, &obj_b, NULL)
    if obj_b > obj_a:
        gs_out[0] = gs_b
        gd_out[0] = gd_b
        for k in range(m):
            u_out[k] = u_b[k]
            w_out[k] = w_b[k]
        iters_out[0] = it_b
        beta_out[0] = beta_b
        obj_out[0] = obj_b
    else:
        gs_out[0] = gs_a
        gd_out[0] = gd_a
        for k in range(m):
            u_out[k] = u_a[k]
            w_out[k] = w_a[k]
        iters_out[0] = it_a
        beta_out[0] = beta_a
        obj_out[0] = obj_a
    return 0


cdef _raise_code(int code):
    if code == 1:
        raise ValueError("zero channel vector")
    if code == 2:
        raise ValueError("singular inter-relay channel")
    if code == 4:
        raise ValueError("null-steering transmit needs M >= 2")


def iri_free_pair(h_s, h_d, h, double rho_s, double rho_r, include_iri):
    """MRC/MRT gammas; include_iri selects whether the leak term is counted."""
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double gs, gd
    _check_m(m)
    cdef int code = _iri_free(&hs[0], &hd[0], &hh[0, 0], rho_s, rho_r,
                              bool(include_iri), m, &gs, &gd)
    if code != 0:
        _raise_code(code)
    return gs, gd


def zf_pair(h_s, h_d, h, double rho_s, double rho_r):
    """MRC receive, transmit projected out of the effective IRI direction."""
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double gs, gd
    _check_m(m)
    u = np.empty(m, dtype=np.complex128)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] uv = u
    cdef double complex[::1] wv = w
    cdef int code = _zf(&hs[0], &hd[0], &hh[0, 0], rho_s, rho_r, m,
                        &gs, &gd, &uv[0], &wv[0])
    if code != 0:
        _raise_code(code)
    return gs, gd, u, w


def mmse_pair(h_s, h_d, h, double rho_s, double rho_r):
    """MRT transmit, MMSE receive against the rank-one leak covariance."""
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double gs, gd
    _check_m(m)
    u = np.empty(m, dtype=np.complex128)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] uv = u
    cdef double complex[::1] wv = w
    cdef int code = _mmse(&hs[0], &hd[0], &hh[0, 0], rho_s, rho_r, m,
                          &gs, &gd, &uv[0], &wv[0])
    if code != 0:
        _raise_code(code)
    return gs, gd, u, w


def ob_pair(h_s, h_d, h, u_in, q_in, double rho_s, double rho_r):
    """Receive along u, transmit along H^{-1} q: the leak lands orthogonal to u.

    Returns (gamma_s, gamma_d, w, singular); singular=True flags a pivot
    ratio beyond the condition limit, in which case the caller may retry
    with a fresh q.
    """
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef double complex[::1] uu = np.ascontiguousarray(u_in, dtype=np.complex128)
    cdef double complex[::1] qq = np.ascontiguousarray(q_in, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double gs, gd
    _check_m(m)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] wv = w
    cdef int code = _ob(&hs[0], &hd[0], &hh[0, 0], &uu[0], &qq[0],
                        rho_s, rho_r, m, &gs, &gd, &wv[0])
    if code == 2:
        return 0.0, 0.0, np.zeros(m, dtype=np.complex128), True
    if code != 0:
        if code == 4:
            raise ValueError("orthonormal-basis scheme needs M >= 2")
        _raise_code(code)
    return gs, gd, w, False


def beta_objective(double beta, double a, double p, double dpar, double dperp,
                   double wr, double wt, double rho_s, double rho_r):
    """Weighted two-hop objective as a function of the transmit split beta.

    beta trades transmit beamforming gain (parallel to the receive-side
    interference direction) against leak suppression; a = |u^H h_S|^2,
    p = |g^H w_par|^2, dpar/dperp = real transmit gains of the two components,
    wr/wt = weights on the receive and transmit hop rates.
    """
    return _beta_objective(beta, a, p, dpar, dperp, wr, wt, rho_s, rho_r)


def optimize_beta(double a, double p, double dpar, double dperp, double wr,
                  double wt, double rho_s, double rho_r, int grid_n,
                  int newton_steps):
    """Maximize beta_objective on [0,1]: coarse grid then damped Newton."""
    cdef double fb
    cdef double b = _optimize_beta(a, p, dpar, dperp, wr, wt, rho_s, rho_r,
                                   grid_n, newton_steps, &fb)
    return b, fb


def optimal_single(h_s, h_d, h, double rho_s, double rho_r, double wr,
                   double wt, w_init, double tol, int max_iter, int grid_n,
                   int newton_steps, collect_trace):
    """One alternating-optimization run from a given transmit warm start.

    Each iteration solves both subproblems exactly (MMSE receive step, then
    the one-dimensional transmit split), so the weighted objective is
    non-decreasing across iterations.
    """
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef double complex[::1] w0 = np.ascontiguousarray(w_init, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double gs, gd, beta, obj
    cdef int iters
    _check_m(m)
    u = np.empty(m, dtype=np.complex128)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] uv = u
    cdef double complex[::1] wv = w
    cdef double[::1] tr
    cdef double *tr_ptr = NULL
    trace_arr = None
    if collect_trace:
        trace_arr = np.empty(max_iter, dtype=np.float64)
        tr = trace_arr
        tr_ptr = &tr[0]
    _optimal_single(&hs[0], &hd[0], &hh[0, 0], rho_s, rho_r, wr, wt, &w0[0],
                    tol, max_iter, grid_n, newton_steps, m, &gs, &gd,
                    &uv[0], &wv[0], &iters, &beta, &obj, tr_ptr)
    trace = trace_arr[:iters].tolist() if collect_trace else None
    return gs, gd, u, w, iters, beta, obj, trace


def optimal_pair(h_s, h_d, h, double rho_s, double rho_r, double wr, wt=None,
                 double tol=1e-4, int max_iter=1000, int grid_n=256,
                 int newton_steps=10):
    """Alternating optimization run from both warm starts, better kept.

    Warm starts: the null-steering transmit beam (whose objective the result
    then never falls below) and plain MRT (which covers instances where
    sacrificing transmit gain for leak suppression is the wrong trade).
    """
    cdef double complex[::1] hs = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef double complex[::1] hd = np.ascontiguousarray(h_d, dtype=np.complex128)
    cdef double complex[:, ::1] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef int m = hs.shape[0]
    cdef double wt_c = (1.0 - wr) if wt is None else <double>wt
    cdef double gs, gd, beta, obj
    cdef int iters
    _check_m(m)
    u = np.empty(m, dtype=np.complex128)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] uv = u
    cdef double complex[::1] wv = w
    cdef int code = _optimal(&hs[0], &hd[0], &hh[0, 0], rho_s, rho_r, wr, wt_c,
                             tol, max_iter, grid_n, newton_steps, m,
                             &gs, &gd, &uv[0], &wv[0], &iters, &beta, &obj)
    if code != 0:
        _raise_code(code)
    return gs, gd, u, w, iters, beta, obj


def mrc_mrt_gains(h_sr, h_rd, double rho_s, double rho_r):
    """Per-relay matched-filter link SNRs rho_s ||h_S||^2 and rho_r ||h_D||^2."""
    cdef double complex[:, ::1] hs = np.ascontiguousarray(h_sr, dtype=np.complex128)
    cdef double complex[:, ::1] hd = np.ascontiguousarray(h_rd, dtype=np.complex128)
    cdef int k = hs.shape[0]
    cdef int m = hs.shape[1]
    gs = np.empty(k, dtype=np.float64)
    gd = np.empty(k, dtype=np.float64)
    cdef double[::1] gsv = gs
    cdef double[::1] gdv = gd
    cdef int r
    for r in range(k):
        gsv[r] = rho_s * _norm2(&hs[r, 0], m)
        gdv[r] = rho_r * _norm2(&hd[r, 0], m)
    return gs, gd


def best_pair(int scheme, h_sr, h_rd, h_rr, double rho_s, double rho_r,
              alpha, levels, double b_max, ob_u=None, ob_q=None):
    """Enumerate ordered relay pairs (i receives, j transmits) and return the
    maximizer of alpha[i] * C_S + (1 - alpha[j]) * C_D.

    Ties keep the first pair in (i, j) lexicographic order.  Returns
    (i, j, gamma_s, gamma_d, c_s, c_d, objective, u, w, iterations, beta).
    """
    cdef double complex[:, ::1] hs_all = np.ascontiguousarray(h_sr, dtype=np.complex128)
    cdef double complex[:, ::1] hd_all = np.ascontiguousarray(h_rd, dtype=np.complex128)
    cdef double complex[:, :, :, ::1] hrr = np.ascontiguousarray(h_rr, dtype=np.complex128)
    cdef double[::1] al = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef double[::1] lev = np.ascontiguousarray(levels, dtype=np.float64)
    cdef int k = hs_all.shape[0]
    cdef int m = hs_all.shape[1]
    cdef double complex[::1] obu
    cdef double complex[::1] obq
    cdef double complex *obu_ptr = NULL
    cdef double complex *obq_ptr = NULL
    _check_m(m)
    if scheme == _OB:
        if ob_u is None or ob_q is None:
            raise ValueError("orthonormal-basis scheme needs ob_u and ob_q")
        obu = np.ascontiguousarray(ob_u, dtype=np.complex128)
        obq = np.ascontiguousarray(ob_q, dtype=np.complex128)
        obu_ptr = &obu[0]
        obq_ptr = &obq[0]
    cdef double complex u_buf[MAXM]
    cdef double complex w_buf[MAXM]
    cdef double complex best_u[MAXM]
    cdef double complex best_w[MAXM]
    cdef bint have_uw
    cdef bint best_have_uw = False
    cdef double best_obj = -INFINITY
    cdef int best_i = -1, best_j = -1, best_iters = 0
    cdef double best_gs = 0.0, best_gd = 0.0, best_cs = 0.0, best_cd = 0.0
    cdef double best_beta = -1.0
    cdef double head, gs, gd, rate_s, rate_d, c_s, c_d, obj, beta, nu, nw
    cdef int i, j, t, iters, code
    for i in range(k):
        head = b_max - lev[i]
        if head < 0.0:
            head = 0.0
        for j in range(k):
            if j == i:
                continue
            iters = 0
            beta = -1.0
            have_uw = True
            if scheme == _IDEAL or scheme == _SINR:
                code = _iri_free(&hs_all[i, 0], &hd_all[j, 0], &hrr[j, i, 0, 0],
                                 rho_s, rho_r, scheme == _SINR, m, &gs, &gd)
                have_uw = False
            elif scheme == _ZF:
                code = _zf(&hs_all[i, 0], &hd_all[j, 0], &hrr[j, i, 0, 0],
                           rho_s, rho_r, m, &gs, &gd, u_buf, w_buf)
            elif scheme == _MMSE:
                code = _mmse(&hs_all[i, 0], &hd_all[j, 0], &hrr[j, i, 0, 0],
                             rho_s, rho_r, m, &gs, &gd, u_buf, w_buf)
            elif scheme == _OB:
                code = _ob(&hs_all[i, 0], &hd_all[j, 0], &hrr[j, i, 0, 0],
                           obu_ptr, obq_ptr, rho_s, rho_r, m, &gs, &gd, w_buf)
                for t in range(m):
                    u_buf[t] = obu_ptr[t]
            elif scheme == _OPTIMAL:
                code = _optimal(&hs_all[i, 0], &hd_all[j, 0], &hrr[j, i, 0, 0],
                                rho_s, rho_r, al[i], 1.0 - al[j], 1e-4, 1000,
                                256, 10, m, &gs, &gd, u_buf, w_buf,
                                &iters, &beta, &obj)
            else:
                raise ValueError(f"unknown scheme code {scheme}")
            if code != 0:
                if code == 4 and scheme == _OB:
                    raise ValueError("orthonormal-basis scheme needs M >= 2")
                _raise_code(code)
            rate_s = log2(1.0 + gs)
            c_s = rate_s if rate_s < head else head
            rate_d = log2(1.0 + gd)
            c_d = rate_d if rate_d < lev[j] else lev[j]
            obj = al[i] * c_s + (1.0 - al[j]) * c_d
            if obj > best_obj:
                best_obj = obj
                best_i = i
                best_j = j
                best_gs = gs
                best_gd = gd
                best_cs = c_s
                best_cd = c_d
                best_iters = iters
                best_beta = beta
                best_have_uw = have_uw
                if have_uw:
                    for t in range(m):
                        best_u[t] = u_buf[t]
                        best_w[t] = w_buf[t]
    u = np.empty(m, dtype=np.complex128)
    w = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] uv = u
    cdef double complex[::1] wv = w
    if best_have_uw:
        for t in range(m):
            uv[t] = best_u[t]
            wv[t] = best_w[t]
    else:
        nu = sqrt(_norm2(&hs_all[best_i, 0], m))
        nw = sqrt(_norm2(&hd_all[best_j, 0], m))
        for t in range(m):
            uv[t] = hs_all[best_i, t] / nu
            wv[t] = hd_all[best_j, t] / nw
    return (best_i, best_j, best_gs, best_gd, best_cs, best_cd, best_obj,
            u, w, best_iters, best_beta)


def _check_m(int m):
    if m < 1:
        raise ValueError("need at least one antenna")
    if m > MAXM:
        raise ValueError(f"kernels support at most {MAXM} antennas, got {m}")
