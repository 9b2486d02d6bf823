"""Reference implementations of the hot numeric kernels.

These functions are written in the numba-compatible subset of numpy: the
numba backend jit-compiles them unchanged, the numpy backend runs them as-is.
Keep them free of python objects, fancy indexing and keyword-only numpy
features.
"""

import numpy as np


def arma_kalman_pieces(z, phi, rvec):
    """Innovation pieces of the exact Gaussian ARMA likelihood.

    z is the demeaned (differenced) series, phi the AR coefficients padded to
    the state dimension m, rvec the MA loading vector (1, theta_1, ...,
    theta_{m-1}).  The filter runs at unit innovation variance; returns
    (sum log F_t, sum v_t^2 / F_t, ok).
    """
    n = z.shape[0]
    m = phi.shape[0]
    if m == 1:
        # pure AR(1)/white noise: scalar filter in closed form
        f0 = phi[0]
        denom = 1.0 - f0 * f0
        if denom <= 0.0:
            return 0.0, 0.0, False
        P1 = rvec[0] * rvec[0] / denom
        a1 = 0.0
        sumlogF = 0.0
        ssq = 0.0
        for t in range(n):
            if not np.isfinite(P1) or P1 <= 0.0:
                return 0.0, 0.0, False
            v = z[t] - a1
            sumlogF += np.log(P1)
            ssq += v * v / P1
            a1 = f0 * (a1 + v)
            P1 = f0 * f0 * P1 + rvec[0] * rvec[0] - f0 * f0 * P1
        return sumlogF, ssq, True
    Tm = np.zeros((m, m))
    for i in range(m):
        Tm[i, 0] = phi[i]
    for i in range(m - 1):
        Tm[i, i + 1] = 1.0
    TmT = Tm.T.copy()

    RR = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            RR[i, j] = rvec[i] * rvec[j]

    # stationary initial covariance: (I - T (x) T) vec(P) = vec(RR'),
    # solved by inline Gaussian elimination (the system is at most 16 x 16,
    # LAPACK dispatch would dominate)
    mm = m * m
    A = np.zeros((mm, mm))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    A[i * m + k, j * m + l] = -Tm[i, j] * Tm[k, l]
    for i in range(mm):
        A[i, i] += 1.0
    p_flat = np.empty(mm)
    for i in range(m):
        for j in range(m):
            p_flat[i * m + j] = RR[i, j]
    for col in range(mm):
        piv = col
        big = abs(A[col, col])
        for row in range(col + 1, mm):
            mag = abs(A[row, col])
            if mag > big:
                big = mag
                piv = row
        if big == 0.0 or not np.isfinite(big):
            return 0.0, 0.0, False
        if piv != col:
            for j in range(col, mm):
                tmp = A[col, j]
                A[col, j] = A[piv, j]
                A[piv, j] = tmp
            tmp = p_flat[col]
            p_flat[col] = p_flat[piv]
            p_flat[piv] = tmp
        inv_piv = 1.0 / A[col, col]
        for row in range(col + 1, mm):
            f = A[row, col] * inv_piv
            if f != 0.0:
                for j in range(col, mm):
                    A[row, j] -= f * A[col, j]
                p_flat[row] -= f * p_flat[col]
    for col in range(mm - 1, -1, -1):
        acc = p_flat[col]
        for j in range(col + 1, mm):
            acc -= A[col, j] * p_flat[j]
        p_flat[col] = acc / A[col, col]
    P = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            P[i, j] = p_flat[i * m + j]

    a = np.zeros(m)
    K = np.empty(m)
    anew = np.empty(m)
    TP = np.empty((m, m))
    Pn = np.empty((m, m))
    sumlogF = 0.0
    ssq = 0.0
    for t in range(n):
        F = P[0, 0]
        if not np.isfinite(F) or F <= 0.0:
            return 0.0, 0.0, False
        v = z[t] - a[0]
        sumlogF += np.log(F)
        ssq += v * v / F
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += Tm[i, j] * P[j, 0]
            K[i] = acc / F
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += Tm[i, j] * a[j]
            anew[i] = acc + K[i] * v
        for i in range(m):
            a[i] = anew[i]
        # P <- Tm P Tm' + RR' - K K' F, kept symmetric (m is tiny: loops
        # beat BLAS dispatch here)
        for i in range(m):
            for j in range(m):
                acc = 0.0
                for l in range(m):
                    acc += Tm[i, l] * P[l, j]
                TP[i, j] = acc
        for i in range(m):
            for j in range(m):
                acc = 0.0
                for l in range(m):
                    acc += TP[i, l] * TmT[l, j]
                Pn[i, j] = acc + RR[i, j] - K[i] * K[j] * F
        for i in range(m):
            P[i, i] = Pn[i, i]
            for j in range(i + 1, m):
                s = 0.5 * (Pn[i, j] + Pn[j, i])
                P[i, j] = s
                P[j, i] = s
    return sumlogF, ssq, True


def arma_css_residuals(z, phi, theta):
    """Conditional ARMA residuals with pre-sample values set to zero."""
    n = z.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    e = np.zeros(n)
    for t in range(n):
        acc = z[t]
        for i in range(p):
            if t - 1 - i >= 0:
                acc -= phi[i] * z[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= 0:
                acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
    return e


def unpack_arma_u(u, p, q):
    """Map unconstrained parameters to stationary AR / invertible MA
    coefficients through partial autocorrelations (Levinson recursion)."""

    def fill(offset, k, out):
        # in-place recursion; pairs updated from both ends to avoid a temp
        for i in range(k):
            ui = u[offset + i]
            ri = ui / np.sqrt(1.0 + ui * ui)
            half = (i - 1) // 2
            for j in range(half + 1):
                jj = i - 1 - j
                a = out[j]
                b = out[jj]
                out[j] = a - ri * b
                if jj != j:
                    out[jj] = b - ri * a
            out[i] = ri

    ar = np.zeros(p)
    fill(0, p, ar)
    ma = np.zeros(q)
    fill(p, q, ma)
    for i in range(q):
        ma[i] = -ma[i]
    return ar, ma


def make_arma_objectives(kalman_pieces, css_residuals, unpack_u):
    """Build optimizer objectives over the unconstrained parameter vector
    u = (u_ar, u_ma, mu?).  The factory lets each backend wire in its own
    compiled primitives."""
    LOG2PI = 1.8378770664093453
    BIG = 1e30

    def arma_nll_u(u, w, p, q, drift):
        """Concentrated negative Gaussian loglikelihood."""
        ar, ma = unpack_u(u, p, q)
        mu = u[p + q] if drift else 0.0
        m = max(p, q + 1)
        phi = np.zeros(m)
        for i in range(p):
            phi[i] = ar[i]
        rvec = np.zeros(m)
        rvec[0] = 1.0
        for j in range(q):
            rvec[1 + j] = ma[j]
        z = w - mu
        sumlogF, ssq, ok = kalman_pieces(z, phi, rvec)
        n = w.shape[0]
        if not ok or ssq <= 0.0:
            return BIG
        sigma2 = ssq / n
        nll = 0.5 * (n * (LOG2PI + 1.0 + np.log(sigma2)) + sumlogF)
        if not np.isfinite(nll):
            return BIG
        return nll

    def arma_css_u(u, w, p, q, drift):
        """Conditional sum of squared residuals (warm-start objective)."""
        ar, ma = unpack_u(u, p, q)
        mu = u[p + q] if drift else 0.0
        e = css_residuals(w - mu, ar, ma)
        sse = 0.0
        for t in range(p, e.shape[0]):
            sse += e[t] * e[t]
        if not np.isfinite(sse):
            return BIG
        return sse

    return arma_nll_u, arma_css_u


def localized_pca_rows(X, S, sqrtw, lo, hi, R):
    """Kernel-weighted principal components localized at selected periods.

    X is the (T, N) centered data, S = X X' its (T, T) Gram matrix.  Row r of
    sqrtw holds the square roots of the localization weights whose strictly
    positive support is [lo[r], hi[r]).  Weights vanish outside the support,
    so the (T, T) weighted Gram eigenproblem restricts exactly to the support
    block; eigenvectors are re-embedded with zeros elsewhere.

    Returns raw (unaligned, unnormalized) stage-1 estimates:
    loadings (nr, N, R), weighted factors (nr, T, R) and the full descending
    eigenvalue spectrum padded with zeros (nr, T).
    """
    T, N = X.shape
    nr = sqrtw.shape[0]
    B = np.zeros((nr, N, R))
    Kw = np.zeros((nr, T, R))
    eig = np.zeros((nr, T))
    sqrtT = np.sqrt(T)
    for r in range(nr):
        l = lo[r]
        u = hi[r]
        m = u - l
        w = sqrtw[r, l:u].copy()
        G = np.empty((m, m))
        for i in range(m):
            for j in range(m):
                G[i, j] = w[i] * w[j] * S[l + i, l + j]
        vals, vecs = np.linalg.eigh(G)
        for i in range(m):
            v = vals[m - 1 - i]
            eig[r, i] = v if v > 0.0 else 0.0
        for c in range(R):
            col = m - 1 - c
            for i in range(m):
                Kw[r, l + i, c] = sqrtT * vecs[i, col]
            for x in range(N):
                acc = 0.0
                for i in range(m):
                    acc += X[l + i, x] * w[i] * vecs[i, col]
                B[r, x, c] = acc * sqrtT / T
    return B, Kw, eig
