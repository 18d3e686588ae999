"""Compiled inner loops: local SNF valuations, membership, uniform sampling.

All matrices are int64 arrays holding residues in [0, p**f).  Callers must
guarantee p**f < 2**31 so every product of two residues fits in int64.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def valuation(x, p, f):
    if x == 0:
        return f
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True, nogil=True)
def inverse_mod(a, q):
    # a must be a unit mod q
    r0, r1 = q, a % q
    s0, s1 = 0, 1
    while r1 != 0:
        t = r0 // r1
        r0, r1 = r1, r0 - t * r1
        s0, s1 = s1, s0 - t * s1
    return s0 % q


@njit(cache=True, nogil=True)
def snf_valuations(a, p, f):
    """Sorted p-adic valuations of the Smith form of a square matrix mod p**f."""
    q = p ** f
    d = a.shape[0]
    w = a.copy()
    vals = np.full(d, f, dtype=np.int64)
    for k in range(d):
        best, bi, bj = f, -1, -1
        for i in range(k, d):
            for j in range(k, d):
                x = w[i, j]
                if x != 0:
                    v = valuation(x, p, f)
                    if v < best:
                        best, bi, bj = v, i, j
            if best == 0:
                break
        if bi < 0:
            break
        vals[k] = best
        if bi != k:
            for j in range(d):
                w[k, j], w[bi, j] = w[bi, j], w[k, j]
        if bj != k:
            for i in range(d):
                w[i, k], w[i, bj] = w[i, bj], w[i, k]
        pb = p ** best
        inv = inverse_mod(w[k, k] // pb, q)
        # Column ops that clear row k never touch the trailing block, so only
        # the rows below the pivot need eliminating.
        for i in range(k + 1, d):
            x = w[i, k]
            if x != 0:
                c = ((x // pb) * inv) % q
                for j in range(k, d):
                    w[i, j] = (w[i, j] - c * w[k, j]) % q
    vals.sort()
    return vals


@njit(cache=True, nogil=True)
def rank_mod_p(a, p):
    d0, d1 = a.shape
    w = a % p
    rank = 0
    for col in range(d1):
        piv = -1
        for i in range(rank, d0):
            if w[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        for j in range(d1):
            w[rank, j], w[piv, j] = w[piv, j], w[rank, j]
        inv = inverse_mod(w[rank, col], p)
        for i in range(d0):
            if i != rank and w[i, col] != 0:
                c = (w[i, col] * inv) % p
                for j in range(d1):
                    w[i, j] = (w[i, j] - c * w[rank, j]) % p
        rank += 1
    return rank


@njit(cache=True, nogil=True)
def form_defect(h, n, modulus):
    """(h^T J h - J) mod modulus for the standard alternating form J_n."""
    d = 2 * n
    # Jh: rows 0..n-1 are h[n:], rows n.. are -h[:n]
    jh = np.empty((d, d), dtype=np.int64)
    for i in range(n):
        for j in range(d):
            jh[i, j] = h[n + i, j] % modulus
            jh[n + i, j] = (-h[i, j]) % modulus
    out = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            s = 0
            for k in range(d):
                s = (s + (h[k, i] % modulus) * jh[k, j]) % modulus
            out[i, j] = s
    for i in range(n):
        out[i, n + i] = (out[i, n + i] - 1) % modulus
        out[n + i, i] = (out[n + i, i] + 1) % modulus
    return out


@njit(cache=True, nogil=True)
def is_member(h, p, f, m, n):
    if rank_mod_p(h, p) != 2 * n:
        return False
    if m == 0:
        return True
    e = form_defect(h, n, p ** m)
    for i in range(2 * n):
        for j in range(2 * n):
            if e[i, j] != 0:
                return False
    return True


@njit(cache=True, nogil=True)
def members_mask(batch, p, f, m, n):
    out = np.zeros(batch.shape[0], dtype=np.bool_)
    for b in range(batch.shape[0]):
        out[b] = is_member(batch[b], p, f, m, n)
    return out


@njit(cache=True, nogil=True)
def _pair(x, y, n, p):
    # <x, y> = x^T J y over F_p
    s = 0
    for i in range(n):
        s += x[i] * y[n + i] - x[n + i] * y[i]
    return s % p


@njit(cache=True, nogil=True)
def _project(x, a, b, n, p):
    # remove the span of a hyperbolic pair (a, b), <a, b> = 1
    cb = _pair(b, x, n, p)
    ca = _pair(a, x, n, p)
    for i in range(2 * n):
        x[i] = (x[i] + cb * a[i] - ca * b[i]) % p


@njit(cache=True, nogil=True)
def sample_sp_fp(rng, p, n):
    """Uniform element of Sp_{2n}(F_p) via symplectic Gram-Schmidt."""
    d = 2 * n
    h = np.eye(d, dtype=np.int64)
    for j in range(n):
        # active coordinates: j..n-1 and n+j..2n-1
        e = np.zeros(d, dtype=np.int64)
        while True:
            nz = False
            for i in range(j, n):
                e[i] = rng.integers(0, p)
                e[n + i] = rng.integers(0, p)
                if e[i] != 0 or e[n + i] != 0:
                    nz = True
            if nz:
                break
        v = np.zeros(d, dtype=np.int64)
        while True:
            for i in range(j, n):
                v[i] = rng.integers(0, p)
                v[n + i] = rng.integers(0, p)
            if _pair(e, v, n, p) == 1:
                break
        s = np.eye(d, dtype=np.int64)
        for i in range(d):
            s[i, j] = e[i]
            s[i, n + j] = v[i]
        # complete (e, v) to a symplectic basis of the active block
        k = n - j
        pool = np.zeros((2 * k - 2 + 2, d), dtype=np.int64)
        cnt = 0
        for i in range(j, n):
            pool[cnt, i] = 1
            pool[cnt + 1, n + i] = 1
            cnt += 2
        for r in range(cnt):
            _project(pool[r], e, v, n, p)
        slot = j + 1
        used = np.zeros(cnt, dtype=np.bool_)
        while slot < n:
            ia = -1
            for r in range(cnt):
                if not used[r]:
                    for i in range(d):
                        if pool[r, i] != 0:
                            ia = r
                            break
                    if ia >= 0:
                        break
            ib = -1
            for r in range(cnt):
                if not used[r] and r != ia and _pair(pool[ia], pool[r], n, p) != 0:
                    ib = r
                    break
            a = pool[ia].copy()
            b = pool[ib].copy()
            inv = inverse_mod(_pair(a, b, n, p), p)
            for i in range(d):
                b[i] = (b[i] * inv) % p
            used[ia] = True
            used[ib] = True
            for r in range(cnt):
                if not used[r]:
                    _project(pool[r], a, b, n, p)
            for i in range(d):
                s[i, slot] = a[i]
                s[i, n + slot] = b[i]
            slot += 1
        h = _mul_mod(h, s, p)
    return h


@njit(cache=True, nogil=True)
def sample_gl_fp(rng, p, d):
    h = np.empty((d, d), dtype=np.int64)
    while True:
        for i in range(d):
            for j in range(d):
                h[i, j] = rng.integers(0, p)
        if rank_mod_p(h, p) == d:
            return h


@njit(cache=True, nogil=True)
def _mul_mod(a, b, q):
    d = a.shape[0]
    out = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for k in range(d):
            x = a[i, k]
            if x != 0:
                for j in range(d):
                    out[i, j] = (out[i, j] + x * b[k, j]) % q
    return out


@njit(cache=True, nogil=True)
def lift_symplectic(rng, h, p, k, n):
    """Uniform lift of h in Sp_{2n}(Z/p^k) to Sp_{2n}(Z/p^{k+1}).

    A fixed Hensel correction h(1 + p^k Y) is followed by a uniform kernel
    element 1 + p^k X with J X symmetric mod p.
    """
    d = 2 * n
    pk = p ** k
    q = pk * p
    e = form_defect(h, n, q)
    # e = p^k E' with E' alternating mod p; pick M strictly lower with
    # M - M^T = -E', then Y = -J M.
    mlow = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i):
            mlow[i, j] = (-(e[i, j] // pk)) % p
    sym = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i, d):
            r = rng.integers(0, p)
            sym[i, j] = r
            sym[j, i] = r
    corr = np.eye(d, dtype=np.int64)
    kern = np.eye(d, dtype=np.int64)
    for i in range(n):
        for j in range(d):
            # -J M: row i <- -M[n+i], row n+i <- M[i]
            corr[i, j] = (corr[i, j] + pk * ((-mlow[n + i, j]) % p)) % q
            corr[n + i, j] = (corr[n + i, j] + pk * mlow[i, j]) % q
            # X = -J S
            kern[i, j] = (kern[i, j] + pk * ((-sym[n + i, j]) % p)) % q
            kern[n + i, j] = (kern[n + i, j] + pk * sym[i, j]) % q
    return _mul_mod(_mul_mod(h, corr, q), kern, q)


@njit(cache=True, nogil=True)
def sample_member(rng, p, f, m, n):
    d = 2 * n
    if m == 0:
        h = sample_gl_fp(rng, p, d)
        level = 1
    else:
        h = sample_sp_fp(rng, p, n)
        level = 1
        while level < m:
            h = lift_symplectic(rng, h, p, level, n)
            level += 1
    pl = p ** level
    span = p ** (f - level)
    for i in range(d):
        for j in range(d):
            h[i, j] = h[i, j] + pl * rng.integers(0, span)
    return h


@njit(cache=True, nogil=True)
def sample_batch(rng, p, f, m, n, count):
    d = 2 * n
    out = np.empty((count, d, d), dtype=np.int64)
    for b in range(count):
        out[b] = sample_member(rng, p, f, m, n)
    return out


@njit(cache=True, nogil=True)
def fixed_space_batch(rng, p, f, m, n, count):
    """Sample `count` members and return SNF valuations of g - 1 for each."""
    d = 2 * n
    q = p ** f
    out = np.empty((count, d), dtype=np.int64)
    for b in range(count):
        g = sample_member(rng, p, f, m, n)
        for i in range(d):
            g[i, i] = (g[i, i] - 1) % q
        out[b] = snf_valuations(g, p, f)
    return out
