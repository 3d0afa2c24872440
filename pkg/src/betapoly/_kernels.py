"""Numeric inner loops shared by the public modules.

Everything here is plain array arithmetic so that the functions run compiled
under numba or interpreted under the numpy fallback (see :mod:`betapoly._accel`).
No randomness lives here: callers draw all samples with numpy generators and
pass arrays in. The counting kernels use only comparisons, rational arithmetic,
and linear solves, so simulation output is bit-identical on both paths; the
integrand kernels go through exp/log and may differ in the last ulp.

Conventions:
  * status codes instead of exceptions (numba cannot raise rich errors):
    nonnegative return values are counts/results, negative values are error
    codes that the Python wrappers turn into package exceptions.
  * tolerances are passed explicitly by the wrappers.
"""

import math

import numpy as np

from ._accel import maybe_njit

# ---------------------------------------------------------------------------
# regularized incomplete beta (continued fraction)
# ---------------------------------------------------------------------------

_CF_MAXIT = 2000
_CF_EPS = 3.0e-16
_CF_FPMIN = 1.0e-300


@maybe_njit(cache=True)
def betacf(a, b, x):
    """Continued fraction for the incomplete beta, modified Lentz scheme.

    Converges for x < (a+1)/(a+b+2); callers apply the symmetry switch.
    Returns nan if the fraction fails to converge within the iteration cap.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return math.nan


@maybe_njit(cache=True)
def betainc_xc(a, b, x, xc):
    """I_x(a, b) given both x and its complement xc = 1 - x.

    The caller computes xc directly from its own parametrization (for example
    xc = sin^2(pi/4 - phi/2) with x = cos^2), which keeps the b*log(1-x)
    factor accurate when x is within rounding distance of 1.
    """
    if x <= 0.0:
        return 0.0
    if xc <= 0.0:
        return 1.0
    lbt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(xc)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lbt) * betacf(a, b, x) / a
    return 1.0 - math.exp(lbt) * betacf(b, a, xc) / b


@maybe_njit(cache=True)
def log_betainc_xc(a, b, x, xc):
    """ln I_x(a, b), stable down to values far below double underflow."""
    if x <= 0.0:
        return -math.inf
    if xc <= 0.0:
        return 0.0
    lbt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(xc)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        cf = betacf(a, b, x)
        if not (cf > 0.0):
            return math.nan
        return lbt + math.log(cf / a)
    comp = math.exp(lbt) * betacf(b, a, xc) / b
    if comp >= 1.0:
        return -math.inf
    return math.log1p(-comp)


# ---------------------------------------------------------------------------
# one-dimensional CDFs of the two density families, in log space
# ---------------------------------------------------------------------------


@maybe_njit(cache=True)
def ln_cdf_interval(alpha, x, xc):
    """ln F(t) for the (1 - s^2)^((alpha-1)/2) law via x = (1+t)/2.

    Shape parameters of the incomplete beta are a = b = (alpha+1)/2.
    """
    h = 0.5 * (alpha + 1.0)
    return log_betainc_xc(h, h, x, xc)


@maybe_njit(cache=True)
def ln_cdf_heavy(alpha, t, w, wc):
    """ln F(t) for the (1 + s^2)^(-(alpha+1)/2) law.

    w = t^2/(1+t^2) and wc = 1/(1+t^2) are supplied by the caller in whatever
    form its substitution makes exact. Uses the square-law reduction of the
    radial part: P[S^2 <= u] = I_{u/(1+u)}(1/2, alpha/2).
    """
    if t < 0.0:
        # lower tail: F = 0.5 * I_{wc}(alpha/2, 1/2)
        return math.log(0.5) + log_betainc_xc(0.5 * alpha, 0.5, wc, w)
    # upper region: F = 1 - 0.5 * I_{wc}(alpha/2, 1/2)
    tail = betainc_xc(0.5 * alpha, 0.5, wc, w)
    return math.log1p(-0.5 * tail)


# ---------------------------------------------------------------------------
# quadrature integrands (log-space assembly, one call per panel batch)
# ---------------------------------------------------------------------------

FAMILY_BETA = 0
FAMILY_BETA_PRIME = 1
REP_ALGEBRAIC = 0
REP_TRIG = 1
REP_HYPERBOLIC = 2


@maybe_njit(cache=True)
def eval_outer_integrand(family, rep, nodes, n, k, alpha, lc_outer):
    """Integrand of the external-angle integral at the given nodes.

    family/rep select among the six equivalent forms; `nodes` is in the
    coordinate of the chosen representation. The F(t)^(n-k) factor is
    exponentiated from (n-k) * ln F so the evaluation stays finite for n up
    to 1e6; regions where F underflows contribute exact zeros.
    """
    ak = alpha * k
    m = nodes.shape[0]
    out = np.empty(m, dtype=np.float64)
    for i in range(m):
        z = nodes[i]
        if family == FAMILY_BETA:
            if rep == REP_ALGEBRAIC:
                t = z
                x = 0.5 * (1.0 + t)
                xc = 0.5 * (1.0 - t)
                one_minus_t2 = (1.0 - t) * (1.0 + t)
                if one_minus_t2 <= 0.0:
                    out[i] = 0.0
                    continue
                louter = 0.5 * (ak - 1.0) * math.log(one_minus_t2)
            elif rep == REP_TRIG:
                u = 0.25 * math.pi - 0.5 * z
                su = math.sin(u)
                cu = math.cos(u)
                x = cu * cu
                xc = su * su
                cz = math.cos(z)
                if cz <= 0.0:
                    out[i] = 0.0
                    continue
                louter = ak * math.log(cz) if ak != 0.0 else 0.0
            else:
                e2 = math.exp(2.0 * z)
                xc = 1.0 / (1.0 + e2)
                x = 1.0 - xc if z > 0.0 else e2 / (1.0 + e2)
                # ln cosh in overflow-safe form
                az = abs(z)
                lcosh = az + math.log1p(math.exp(-2.0 * az)) - math.log(2.0)
                louter = -(ak + 1.0) * lcosh
            lf = ln_cdf_interval(alpha, x, xc)
        else:
            if rep == REP_ALGEBRAIC:
                t = z
                tsq = t * t
                if tsq > 1.0e300:
                    w = 1.0
                    wc = 0.0
                else:
                    w = tsq / (1.0 + tsq)
                    wc = 1.0 / (1.0 + tsq)
                if wc <= 0.0 and t < 0.0:
                    out[i] = 0.0
                    continue
                louter = -0.5 * (ak + 1.0) * math.log1p(tsq) if tsq <= 1.0e300 else -(ak + 1.0) * math.log(abs(t))
            elif rep == REP_TRIG:
                t = math.tan(z)
                s = math.sin(z)
                c = math.cos(z)
                w = s * s
                wc = c * c
                if c <= 0.0:
                    out[i] = 0.0
                    continue
                louter = (ak - 1.0) * math.log(c)
            else:
                t = math.sinh(z)
                th = math.tanh(z)
                w = th * th
                az = abs(z)
                lcosh = az + math.log1p(math.exp(-2.0 * az)) - math.log(2.0)
                wc = math.exp(-2.0 * lcosh)
                louter = -ak * lcosh
            lf = ln_cdf_heavy(alpha, t, w, wc)
        if math.isnan(lf):
            out[i] = math.nan
            continue
        lnv = lc_outer + louter + (n - k) * lf
        out[i] = math.exp(lnv)
    return out


# ---------------------------------------------------------------------------
# convex hull: general position + exhaustive facet enumeration
# ---------------------------------------------------------------------------


@maybe_njit(cache=True, nogil=True)
def general_position_ok(pts, rel_tol):
    """1 if no (d+1)-subset is affinely dependent within tolerance, else 0.

    Degeneracy is measured scale-free: the affine volume factor |det| of the
    d difference vectors is compared against rel_tol times the product of
    their norms (Hadamard bound), so configurations spanning several orders
    of magnitude are judged fairly.
    """
    n, d = pts.shape
    if n < d + 1:
        return 1
    idx = np.empty(d + 1, dtype=np.int64)
    for i in range(d + 1):
        idx[i] = i
    M = np.empty((d, d), dtype=np.float64)
    while True:
        base = idx[0]
        had = 1.0
        for r in range(d):
            rn = 0.0
            for c in range(d):
                v = pts[idx[r + 1], c] - pts[base, c]
                M[r, c] = v
                rn += v * v
            had *= math.sqrt(rn)
        det = np.linalg.det(M)
        if abs(det) <= rel_tol * had:
            return 0
        # advance the (d+1)-subset odometer
        pos = d
        while pos >= 0 and idx[pos] == n - (d + 1) + pos:
            pos -= 1
        if pos < 0:
            return 1
        idx[pos] += 1
        for j in range(pos + 1, d + 1):
            idx[j] = idx[j - 1] + 1


@maybe_njit(cache=True, nogil=True)
def enumerate_facets_impl(pts, rel_tol, buf):
    """Exhaustive facet scan. Writes facet index d-tuples into buf.

    Returns (count, status); status 0 means clean, -1 means a degeneracy was
    hit (affinely dependent candidate or a point within tolerance of a
    candidate hyperplane).
    """
    n, d = pts.shape
    # configuration scale: bounding-box diagonal
    diag2 = 0.0
    for c in range(d):
        lo = pts[0, c]
        hi = pts[0, c]
        for i in range(1, n):
            v = pts[i, c]
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        diag2 += (hi - lo) * (hi - lo)
    tol_dist = rel_tol * math.sqrt(diag2)

    idx = np.empty(d, dtype=np.int64)
    for i in range(d):
        idx[i] = i
    M = np.empty((d - 1, d), dtype=np.float64)
    minor = np.empty((d - 1, d - 1), dtype=np.float64)
    u = np.empty(d, dtype=np.float64)
    count = 0
    while True:
        base = idx[0]
        had = 1.0
        for r in range(d - 1):
            rn = 0.0
            for c in range(d):
                v = pts[idx[r + 1], c] - pts[base, c]
                M[r, c] = v
                rn += v * v
            had *= math.sqrt(rn)
        # generalized cross product: u[j] = (-1)^j det(M without column j)
        for j in range(d):
            cc = 0
            for c in range(d):
                if c == j:
                    continue
                for r in range(d - 1):
                    minor[r, cc] = M[r, c]
                cc += 1
            dm = np.linalg.det(minor)
            u[j] = dm if j % 2 == 0 else -dm
        nu = 0.0
        for j in range(d):
            nu += u[j] * u[j]
        nu = math.sqrt(nu)
        if nu <= 1.0e-10 * had or nu <= 0.0:
            return count, -1
        # side tests: all other points strictly on one side
        pos_side = False
        neg_side = False
        ok = True
        for q in range(n):
            skip = False
            for j in range(d):
                if idx[j] == q:
                    skip = True
                    break
            if skip:
                continue
            h = 0.0
            for c in range(d):
                h += u[c] * (pts[q, c] - pts[base, c])
            h /= nu
            if abs(h) <= tol_dist:
                return count, -1
            if h > 0.0:
                pos_side = True
            else:
                neg_side = True
            if pos_side and neg_side:
                ok = False
                break
        if ok:
            for j in range(d):
                buf[count, j] = idx[j]
            count += 1
        # advance the d-subset odometer
        p = d - 1
        while p >= 0 and idx[p] == n - d + p:
            p -= 1
        if p < 0:
            return count, 0
        idx[p] += 1
        for j in range(p + 1, d):
            idx[j] = idx[j - 1] + 1


# ---------------------------------------------------------------------------
# LP feasibility: phase-1 simplex with Bland's rule
# ---------------------------------------------------------------------------


@maybe_njit(cache=True, nogil=True)
def phase1_feasible(A, b, tol):
    """Feasibility of {A x = b, x >= 0} by a phase-1 simplex.

    Returns 1 (feasible), 0 (infeasible), -1 (pivot breakdown / iteration
    cap). Bland's anti-cycling rule: smallest eligible column enters,
    smallest basic row index breaks ratio ties. Termination is then
    guaranteed, so the cap only guards against floating-point pathology.
    """
    m, nv = A.shape
    ncols = nv + m
    T = np.zeros((m + 1, ncols + 1), dtype=np.float64)
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        s = 1.0 if b[i] >= 0.0 else -1.0
        for j in range(nv):
            T[i, j] = s * A[i, j]
        T[i, nv + i] = 1.0
        T[i, ncols] = s * b[i]
        basis[i] = nv + i
    # objective row: reduced costs of min(sum of artificials)
    for j in range(ncols + 1):
        acc = 0.0
        for i in range(m):
            acc += T[i, j]
        T[m, j] = acc
    for i in range(m):
        T[m, nv + i] = 0.0

    max_iter = 200 * (ncols + 1)
    it = 0
    while True:
        it += 1
        if it > max_iter:
            return -1
        # entering: smallest column index with positive reduced cost
        enter = -1
        for j in range(ncols):
            if T[m, j] > tol:
                enter = j
                break
        if enter == -1:
            break
        # ratio test with Bland tie-break on the basic variable index
        leave = -1
        best = math.inf
        for i in range(m):
            piv = T[i, enter]
            if piv > tol:
                ratio = T[i, ncols] / piv
                if ratio < best - 1e-15 or (
                    abs(ratio - best) <= 1e-15
                    and (leave == -1 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave == -1:
            # unbounded phase-1 objective cannot happen; numerical trouble
            return -1
        # pivot
        piv = T[leave, enter]
        inv = 1.0 / piv
        for j in range(ncols + 1):
            T[leave, j] *= inv
        for i in range(m + 1):
            if i == leave:
                continue
            f = T[i, enter]
            if f != 0.0:
                for j in range(ncols + 1):
                    T[i, j] -= f * T[leave, j]
        basis[leave] = enter
    return 1 if T[m, ncols] <= tol else 0


@maybe_njit(cache=True, nogil=True)
def membership_count_lp(G, X, tol):
    """Count rows x of X with x in pos(columns of G), via phase-1 LP.

    G has shape (q, g): one column per generator expressed in the
    orthonormal coordinates of the generator span. Returns -1 on LP
    breakdown.
    """
    cnt = 0
    for s in range(X.shape[0]):
        st = phase1_feasible(G, X[s], tol)
        if st < 0:
            return -1
        cnt += st
    return cnt


@maybe_njit(cache=True, nogil=True)
def membership_count_solve(Ginv, X, tol):
    """Simplicial fast path: count rows with Ginv @ x componentwise >= -tol."""
    q = Ginv.shape[0]
    cnt = 0
    for s in range(X.shape[0]):
        ok = True
        for i in range(q):
            acc = 0.0
            for j in range(q):
                acc += Ginv[i, j] * X[s, j]
            if acc < -tol:
                ok = False
                break
        if ok:
            cnt += 1
    return cnt


@maybe_njit(cache=True, nogil=True)
def grassmann_hit_count(G, W, bperp, tol):
    """Count sampled subspaces meeting the cone nontrivially.

    G: (g, d) generator rows with pos(G) pointed and orthogonal to the
    lineality span; W: (w, d) orthonormal lineality rows (may be empty);
    bperp: (S, d, qp) orthonormal bases of the sampled subspaces'
    orthocomplements. The witness system is
        project(G^T lam + W^T mu) = 0,  sum lam = 1,  lam >= 0, mu free,
    which has a solution iff the cone meets the subspace outside the origin
    (lineality-only intersections are a null event under the sampling and are
    handled exactly by the caller when they are certain). Returns -1 on LP
    breakdown.
    """
    S = bperp.shape[0]
    d = bperp.shape[1]
    qp = bperp.shape[2]
    g = G.shape[0]
    w = W.shape[0]
    nv = g + 2 * w
    A = np.zeros((qp + 1, nv), dtype=np.float64)
    b = np.zeros(qp + 1, dtype=np.float64)
    b[qp] = 1.0
    for j in range(g):
        A[qp, j] = 1.0
    cnt = 0
    for s in range(S):
        for i in range(qp):
            for j in range(g):
                acc = 0.0
                for r in range(d):
                    acc += bperp[s, r, i] * G[j, r]
                A[i, j] = acc
            for j in range(w):
                acc = 0.0
                for r in range(d):
                    acc += bperp[s, r, i] * W[j, r]
                A[i, g + j] = acc
                A[i, g + w + j] = -acc
        st = phase1_feasible(A, b, tol)
        if st < 0:
            return -1
        cnt += st
    return cnt


@maybe_njit(cache=True, nogil=True)
def halfspace_event_count(Y, N):
    """Count Gaussian rows N[s] with <y_i, N[s]> <= 0 for every row y_i of Y."""
    S = N.shape[0]
    g = Y.shape[0]
    q = Y.shape[1]
    cnt = 0
    for s in range(S):
        ok = True
        for i in range(g):
            acc = 0.0
            for j in range(q):
                acc += Y[i, j] * N[s, j]
            if acc > 0.0:
                ok = False
                break
        if ok:
            cnt += 1
    return cnt
