#!/usr/bin/env python3
r"""Generate classical modular polynomial data files phi_m.txt for prime m.

Method: exact integer q-expansions. With u = q^(1/m) and zeta a primitive
m-th root of unity, the m+1 functions j(q^m), j(zeta^a u) (a = 0..m-1) are
the roots of Phi_m(X, j(q)). The product over the u-roots,

    Psi(X) = prod_a (X - j(zeta^a u)) = sum_r (-1)^r e_r X^(m-r),

has integer q-coefficients, and its power sums need no cyclotomic arithmetic:

    p_k = sum_a j(zeta^a u)^k = m * (decimation of j(u)^k at exponents = 0 mod m).

Newton's identities give the e_r, then Phi_m(X, j) = (X - j(q^m)) * Psi(X).
Each X^s coefficient is a Laurent series in q with pole order <= m+1, hence
an integer polynomial in j(q), recovered by greedy reduction against powers
of j.  Every series carries the largest exponent at which it is still exact
and is truncated there, so the zero-remainder assertions are sound.  The
final identity check Phi_m(j(q), j(q^m)) = 0, with monicity and the X-degree,
proves the output is the modular polynomial; symmetry and the Kronecker
congruence are checked on top.

Output format, one line per monomial orbit with i >= j:
    [i j] c
meaning c*(X^i Y^j + X^j Y^i) for i > j and c*X^i Y^i on the diagonal.

Usage: python scripts/gen_modpoly.py [--levels 2,3,5,7,11,13,19] [--out DIR]
"""

import argparse
import os
import time

from gmpy2 import mpz

ZERO = mpz(0)


# ---------------------------------------------------------------- series ----
# A Laurent series is (off, coeffs, bound): coeffs[i] is the coefficient of
# q^(off+i), exact for all exponents <= bound, and coeffs never extend past
# bound.  Leading zeros are trimmed so off is the true pole order when the
# series is nonzero.


def make(off, coeffs, bound):
    coeffs = coeffs[: max(0, bound - off + 1)]
    lo = 0
    while lo < len(coeffs) and not coeffs[lo]:
        lo += 1
    hi = len(coeffs)
    while hi > lo and not coeffs[hi - 1]:
        hi -= 1
    return (off + lo, coeffs[lo:hi], bound)


def ser_add(f, g):
    bound = min(f[2], g[2])
    off = min(f[0], g[0])
    end = max(f[0] + len(f[1]), g[0] + len(g[1]))
    out = [ZERO] * (end - off)
    for i, a in enumerate(f[1]):
        out[f[0] + i - off] += a
    for i, b in enumerate(g[1]):
        out[g[0] + i - off] += b
    return make(off, out, bound)


def ser_scale(f, c):
    return make(f[0], [a * c for a in f[1]], f[2])


def ser_sub(f, g):
    return ser_add(f, ser_scale(g, mpz(-1)))


def ser_mul(f, g, want=None):
    if not f[1] or not g[1]:
        return (0, [], min(f[2] + g[0], g[2] + f[0]) if f[1] or g[1] else 10**9)
    bound = min(f[2] + g[0], g[2] + f[0])
    if want is not None:
        bound = min(bound, want)
    off = f[0] + g[0]
    n = bound - off + 1
    if n <= 0:
        return (off, [], bound)
    out = [ZERO] * n
    goff = g[0]
    gc = g[1]
    for i, a in enumerate(f[1]):
        if not a:
            continue
        base = f[0] + i + goff
        if base > bound:
            break
        lim = bound - base
        for k, b in enumerate(gc[: lim + 1]):
            if b:
                out[base + k - off] += a * b
    return make(off, out, bound)


def ser_zero(bound=10**9):
    return (0, [], bound)


def decimate(f, m):
    """Coefficients at exponents divisible by m, reindexed to q = u^m."""
    foff, fc, fb = f
    start = -(-foff // m)
    out = []
    e = start * m
    while e < foff + len(fc):
        out.append(fc[e - foff] if e >= foff else ZERO)
        e += m
    return make(start, out, fb // m)


def inflate(f, m, want):
    """f(q^m), exact to min(m*bound + m - 1, want)."""
    bound = min(f[2] * m + m - 1, want)
    ent = {}
    for i, a in enumerate(f[1]):
        e = (f[0] + i) * m
        if e > bound:
            break
        if a:
            ent[e] = a
    if not ent:
        return (0, [], bound)
    lo = min(ent)
    c = [ZERO] * (max(ent) - lo + 1)
    for e, a in ent.items():
        c[e - lo] = a
    return make(lo, c, bound)


# ------------------------------------------------------------ j-function ----


def eta_pow24(n_terms):
    """prod_{k>=1} (1 - q^k)^24 to exponent n_terms - 1."""
    e = [ZERO] * n_terms
    k = 0
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n_terms and g2 >= n_terms and k > 0:
            break
        s = mpz(1) if k % 2 == 0 else mpz(-1)
        if g1 < n_terms:
            e[g1] += s
        if k > 0 and g2 < n_terms:
            e[g2] += s
        k += 1
    f = (0, e, n_terms - 1)
    sq = ser_mul(f, f)
    p4 = ser_mul(sq, sq)
    p8 = ser_mul(p4, p4)
    p16 = ser_mul(p8, p8)
    return ser_mul(p16, p8)


def eisenstein4(n_terms):
    sig = [ZERO] * n_terms
    for d in range(1, n_terms):
        cube = mpz(d) ** 3
        for n in range(d, n_terms, d):
            sig[n] += cube
    return (0, [mpz(1)] + [240 * sig[n] for n in range(1, n_terms)], n_terms - 1)


def series_inverse(f, n_terms):
    """Inverse of a series with constant term 1, exact to n_terms - 1."""
    fc = f[1]
    assert f[0] == 0 and fc[0] == 1
    inv = [mpz(1)] + [ZERO] * (n_terms - 1)
    for n in range(1, n_terms):
        acc = ZERO
        for k in range(1, min(n, len(fc) - 1) + 1):
            if fc[k]:
                acc += fc[k] * inv[n - k]
        inv[n] = -acc
    return (0, inv, n_terms - 1)


def j_series(hi):
    """q-expansion of j, exact on [-1, hi]."""
    n_terms = hi + 2
    e4 = eisenstein4(n_terms)
    num = ser_mul(ser_mul(e4, e4), e4)
    den_inv = series_inverse(eta_pow24(n_terms), n_terms)
    jq = ser_mul(num, den_inv)  # j*q, exponents 0..hi+1
    assert jq[0] == 0 and jq[1][0] == 1 and jq[1][1] == 744
    return make(-1, jq[1], hi)


# ----------------------------------------------------------------- per-m ----


def modular_polynomial(m, progress=print):
    hi_q = 2 * m + 4
    deep = m * (m + 2) + 2  # exactness needed for the identity check
    hi_u = max(m * hi_q, deep + m + 1)
    t0 = time.time()

    j_u = j_series(hi_u)  # doubles as j(q) to high precision
    progress(f"  j to u^{hi_u}: {time.time() - t0:.1f}s")

    # power sums of the m conjugate u-roots, as q-series
    psums = [None]
    jk = j_u
    for k in range(1, m + 1):
        psums.append(ser_scale(decimate(jk, m), mpz(m)))
        if k < m:
            jk = ser_mul(jk, j_u, m * hi_q)
    progress(f"  power sums: {time.time() - t0:.1f}s")

    # Newton's identities: r*e_r = sum_{i=1..r} (-1)^(i-1) e_{r-i} p_i
    es = [(0, [mpz(1)], hi_q)]
    for r in range(1, m + 1):
        acc = ser_zero()
        for i in range(1, r + 1):
            term = ser_mul(es[r - i], psums[i])
            acc = ser_add(acc, term if i % 2 == 1 else ser_scale(term, mpz(-1)))
        off, coeffs, bound = acc
        div = []
        for a in coeffs:
            quo, rem = divmod(a, r)
            assert rem == 0, f"Newton step not integral at r={r}"
            div.append(quo)
        es.append(make(off, div, bound))

    # Phi coefficients as series: c_s(q) for X^s, s = 0..m+1
    psi = [None] * (m + 1)
    for r in range(m + 1):
        psi[m - r] = es[r] if r % 2 == 0 else ser_scale(es[r], mpz(-1))
    j_m = inflate(j_u, m, hi_q)
    c_series = []
    for s in range(m + 2):
        below = psi[s - 1] if 1 <= s <= m + 1 else ser_zero()
        here = ser_mul(j_m, psi[s]) if s <= m else ser_zero()
        c_series.append(ser_sub(below, here))
    progress(f"  Newton + assembly: {time.time() - t0:.1f}s")

    # powers of j, exact deep enough for both reduction and identity check
    jpow = [(0, [mpz(1)], 10**9), j_u]
    for d in range(2, m + 2):
        jpow.append(ser_mul(jpow[-1], j_u, deep))

    coeffs = {}
    for s, cs in enumerate(c_series):
        cur = cs
        assert cur[2] >= 1, f"exactness window too small for X^{s}"
        while cur[1]:
            e = cur[0]
            if e > 0:
                break
            coeffs[(s, -e)] = cur[1][0]
            cur = ser_sub(cur, ser_scale(jpow[-e], cur[1][0]))
        assert not cur[1], f"nonzero remainder for X^{s}: {cur[:2]}"
    progress(f"  reduction: {time.time() - t0:.1f}s")

    validate(m, coeffs, jpow, hi_q)
    progress(f"  validation: {time.time() - t0:.1f}s")
    return coeffs


def validate(m, coeffs, jpow, hi_q):
    # leading terms and symmetry
    assert coeffs[(m + 1, 0)] == 1
    assert all(coeffs.get((m + 1, d), ZERO) == 0 for d in range(1, m + 2))
    for (s, d), c in coeffs.items():
        assert coeffs.get((d, s), ZERO) == c, f"asymmetric at {(s, d)}"

    # Kronecker congruence: Phi_m = (X^m - Y)(X - Y^m) mod m
    expect = {(m + 1, 0): 1, (0, m + 1): 1, (m, m): -1, (1, 1): -1}
    for s in range(m + 2):
        for d in range(m + 2):
            c = coeffs.get((s, d), ZERO)
            assert c % m == expect.get((s, d), 0) % m, f"Kronecker fails at {(s, d)}"

    if m == 2:
        known = {
            (3, 0): 1, (2, 2): -1, (2, 1): 1488, (2, 0): -162000,
            (1, 1): 40773375, (1, 0): 8748000000, (0, 0): -157464000000000,
        }
        for key, val in known.items():
            assert coeffs[key] == val, f"Phi_2 mismatch at {key}"

    # full identity: Phi_m(j(q), j(q^m)) = 0
    total = ser_zero()
    for s in range(m + 2):
        col = ser_zero()
        for d in range(m + 2):
            c = coeffs.get((s, d), ZERO)
            if c:
                col = ser_add(col, ser_scale(inflate(jpow[d], m, hi_q), c))
        if col[1]:
            total = ser_add(total, ser_mul(jpow[s], col))
    assert total[2] >= 1, "identity check window collapsed"
    assert not total[1], f"Phi_{m}(j(q), j(q^m)) != 0"


def write_file(m, coeffs, out_dir):
    path = os.path.join(out_dir, f"phi_{m}.txt")
    entries = sorted(
        ((i, j), c) for (i, j), c in coeffs.items() if i >= j and c != 0
    )
    entries.reverse()
    with open(path, "w") as fh:
        for (i, j), c in entries:
            fh.write(f"[{i} {j}] {c}\n")
    return path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", default="2,3,5,7,11,13,19")
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "src", "osidh", "data"))
    args = ap.parse_args()

    levels = [int(x) for x in args.levels.split(",")]
    os.makedirs(args.out, exist_ok=True)
    for m in levels:
        t0 = time.time()
        print(f"phi_{m}:")
        coeffs = modular_polynomial(m)
        path = write_file(m, coeffs, args.out)
        n = sum(1 for (i, j) in coeffs if i >= j and coeffs[(i, j)])
        print(f"  wrote {path} ({n} entries, {time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
