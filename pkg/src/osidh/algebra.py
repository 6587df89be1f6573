"""Exact arithmetic in F_{p^2} and univariate polynomial algebra on top of it.

Elements of F_{p^2} = F_p(u), u^2 = d (least positive nonresidue), are plain
tuples (a, b) for a + b*u with both parts reduced mod p. Polynomials are
lists of such tuples, low degree first, trailing zeros trimmed; the empty
list is the zero polynomial. Everything is exact; no floats anywhere.
"""

import json
import random

from .errors import DivisionByZero, NotPrime, TooLarge, TooSmall

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid for every n < 3.3e24."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """FieldParams: p plus the least positive quadratic nonresidue d."""

    __slots__ = ("p", "d", "zero", "one")

    def __init__(self, p, d):
        self.p = p
        self.d = d
        self.zero = (0, 0)
        self.one = (1, 0)

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field(p={self.p}, d={self.d})"

    # -- element arithmetic ------------------------------------------------

    def el(self, a, b=0):
        return (a % self.p, b % self.p)

    def add(self, x, y):
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x, y):
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x):
        p = self.p
        return (-x[0] % p, -x[1] % p)

    def mul(self, x, y):
        a1, b1 = x
        a2, b2 = y
        p = self.p
        t1 = a1 * a2
        t2 = b1 * b2
        t3 = (a1 + b1) * (a2 + b2) - t1 - t2
        return ((t1 + t2 * self.d) % p, t3 % p)

    def sqr(self, x):
        return self.mul(x, x)

    def inv(self, x):
        a, b = x
        if a == 0 and b == 0:
            raise DivisionByZero("inverse of zero")
        p = self.p
        norm = (a * a - self.d * b * b) % p
        ninv = pow(norm, p - 2, p)
        return (a * ninv % p, -b * ninv % p)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, e):
        if e < 0:
            return self.pow(self.inv(x), -e)
        acc = (1, 0)
        base = x
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def frobenius(self, x):
        """x^p = a - b*u, since u^p = -u (d is a nonresidue)."""
        return (x[0], -x[1] % self.p)

    def smul(self, c, x):
        """Multiply by an integer scalar."""
        p = self.p
        return (c * x[0] % p, c * x[1] % p)

    def is_square(self, x):
        if x == (0, 0):
            return True
        q1 = (self.p * self.p - 1) // 2
        return self.pow(x, q1) == self.one

    def sqrt(self, x):
        """A square root of x, or None; Tonelli-Shanks in F_{p^2}."""
        if x == (0, 0):
            return (0, 0)
        if not self.is_square(x):
            return None
        q = self.p * self.p
        s, m = q - 1, 0
        while s % 2 == 0:
            s //= 2
            m += 1
        # deterministic scan for a nonresidue to seed the 2-Sylow walk
        z = None
        for a in range(self.p):
            cand = (a, 1)
            if not self.is_square(cand):
                z = cand
                break
        assert z is not None, "no nonresidue of the form a + u (impossible)"
        c = self.pow(z, s)
        t = self.pow(x, s)
        r = self.pow(x, (s + 1) // 2)
        while t != self.one:
            t2 = t
            i = 0
            while t2 != self.one:
                t2 = self.sqr(t2)
                i += 1
            b = self.pow(c, 1 << (m - i - 1))
            m = i
            c = self.sqr(b)
            t = self.mul(t, c)
            r = self.mul(r, b)
        assert self.sqr(r) == x
        return r

    # -- element encoding ---------------------------------------------------

    def enc(self, x):
        return f"{x[0]}+{x[1]}*u"

    def dec(self, s):
        left, _, right = s.partition("+")
        if not right.endswith("*u"):
            raise ValueError(f"bad element encoding {s!r}")
        a = int(left)
        b = int(right[:-2])
        if not (0 <= a < self.p and 0 <= b < self.p):
            raise ValueError(f"element {s!r} not reduced mod {self.p}")
        return (a, b)


def create_field(p):
    if p >= 1 << 62:
        raise TooLarge(f"p = {p} does not fit the 62-bit cap")
    if p < 5:
        raise TooSmall(f"p = {p} is below the minimum of 5")
    if not is_prime(p):
        raise NotPrime(f"p = {p} is not prime")
    d = 2
    while pow(d, (p - 1) // 2, p) == 1:
        d += 1
    return Field(p, d)


def arith(field, x, y, op):
    """Dispatch form of the element operations; op in {add,sub,mul,div,inv,pow}."""
    if op == "add":
        return field.add(x, y)
    if op == "sub":
        return field.sub(x, y)
    if op == "mul":
        return field.mul(x, y)
    if op == "div":
        return field.div(x, y)
    if op == "inv":
        return field.inv(x)
    if op == "pow":
        return field.pow(x, y)
    raise ValueError(f"unknown op {op!r}")


def frobenius(field, x):
    return field.frobenius(x)


# -- polynomials -------------------------------------------------------------


def ptrim(f):
    n = len(f)
    while n and f[n - 1] == (0, 0):
        n -= 1
    return f[:n]


def pdeg(f):
    return len(f) - 1


def padd(field, f, g):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = field.add(out[i], c)
    return ptrim(out)


def psub(field, f, g):
    out = list(f) + [(0, 0)] * (len(g) - len(f))
    for i, c in enumerate(g):
        out[i] = field.sub(out[i], c)
    return ptrim(out)


def pscale(field, f, c):
    if c == (0, 0):
        return []
    return ptrim([field.mul(a, c) for a in f])


def pmul(field, f, g):
    if not f or not g:
        return []
    out = [(0, 0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == (0, 0):
            continue
        for k, b in enumerate(g):
            if b != (0, 0):
                out[i + k] = field.add(out[i + k], field.mul(a, b))
    return ptrim(out)


def pmonic(field, f):
    if not f:
        return []
    lead = f[-1]
    if lead == (1, 0):
        return list(f)
    return pscale(field, f, field.inv(lead))


def poly_divrem(field, f, g):
    g = ptrim(list(g))
    if not g:
        raise DivisionByZero("polynomial division by zero")
    f = list(ptrim(list(f)))
    dg = len(g) - 1
    if len(f) - 1 < dg:
        return [], ptrim(f)
    ginv = field.inv(g[-1])
    quo = [(0, 0)] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i]
        if c == (0, 0):
            continue
        c = field.mul(c, ginv)
        quo[i - dg] = c
        for k in range(dg + 1):
            f[i - dg + k] = field.sub(f[i - dg + k], field.mul(c, g[k]))
    return ptrim(quo), ptrim(f)


def pmod(field, f, g):
    return poly_divrem(field, f, g)[1]


def poly_gcd_monic(field, f, g):
    f = ptrim(list(f))
    g = ptrim(list(g))
    if not f and not g:
        raise DivisionByZero("gcd of two zero polynomials")
    while g:
        f, g = g, pmod(field, f, g)
    return pmonic(field, f)


def peval(field, f, x):
    acc = (0, 0)
    for c in reversed(f):
        acc = field.add(field.mul(acc, x), c)
    return acc


def ppowmod(field, base, e, mod):
    """base^e mod `mod`, square and multiply on polynomials."""
    acc = [(1, 0)]
    base = pmod(field, base, mod)
    while e:
        if e & 1:
            acc = pmod(field, pmul(field, acc, base), mod)
        base = pmod(field, pmul(field, base, base), mod)
        e >>= 1
    return acc


def pderiv(field, f):
    return ptrim([field.smul(i, c) for i, c in enumerate(f)][1:])


def roots_in_fp2(field, f, seed=0):
    r"""All roots of f in F_{p^2}, with multiplicity, sorted by (a, b).

    The rational part is split off as gcd(Y^(p^2) - Y, f) via modular
    exponentiation, then factored into linear pieces by seeded random
    splitting: gcd(h, (Y + c)^((p^2-1)/2) - 1) separates roots whenever
    the shifts r + c fall on both sides of the square/nonsquare line.
    Multiplicities are recovered afterwards by trial division, so the
    output is a seed-independent multiset in a deterministic order.
    """
    f = ptrim(list(f))
    if not f:
        raise DivisionByZero("root finding on the zero polynomial")
    if len(f) == 1:
        return []
    p2 = field.p * field.p
    fm = pmonic(field, f)
    xp2 = ppowmod(field, [(0, 0), (1, 0)], p2, fm)
    rat = poly_gcd_monic(field, psub(field, xp2, [(0, 0), (1, 0)]), fm)
    rng = random.Random(seed)
    roots = []
    stack = [rat]
    half = (p2 - 1) // 2
    while stack:
        h = stack.pop()
        dh = len(h) - 1
        if dh <= 0:
            continue
        if dh == 1:
            roots.append(field.neg(h[0]))
            continue
        c = (rng.randrange(field.p), rng.randrange(field.p))
        probe = ppowmod(field, [c, (1, 0)], half, h)
        g = poly_gcd_monic(field, psub(field, probe, [(1, 0)]), h)
        if 0 < len(g) - 1 < dh:
            stack.append(g)
            stack.append(poly_divrem(field, h, g)[0])
        else:
            stack.append(h)  # unlucky split, retry with a fresh shift
    out = []
    for r in sorted(roots):
        lin = [field.neg(r), (1, 0)]
        rem = fm
        while True:
            quo, res = poly_divrem(field, rem, lin)
            if res:
                break
            out.append(r)
            rem = quo
    return out


def resultant(field, f, g):
    r"""Res_x(f, g).

    Univariate inputs give a constant. For the bivariate form, g is a list
    of Polys (the coefficient of x^i is a polynomial in Y); the result is
    then the polynomial Res_x(f, g)(Y), computed by evaluating Y at
    deg(f)*max_degY(g) + 1 points and interpolating, using the identity
    Res_x(f, g) = lc(f)^deg_x(g) * prod over roots of f of g(root, Y).
    """
    if g and isinstance(g[0], list):
        return _resultant_bivar(field, f, g)
    return _res_scalar(field, ptrim(list(f)), ptrim(list(g)))


def _res_scalar(field, f, g):
    if not f or not g:
        raise DivisionByZero("resultant with a zero input")
    df, dg = len(f) - 1, len(g) - 1
    if df == 0:
        return field.pow(f[0], dg)
    if dg == 0:
        return field.pow(g[0], df)
    r = pmod(field, f, g)
    if not r:
        return (0, 0)
    sign = (1, 0) if (df * dg) % 2 == 0 else field.neg((1, 0))
    lead = field.pow(g[-1], df - (len(r) - 1))
    return field.mul(sign, field.mul(lead, _res_scalar(field, g, r)))


def _resultant_bivar(field, f, g):
    f = ptrim(list(f))
    degx_g = len(g) - 1
    max_dy = max((len(c) - 1 for c in g if c), default=0)
    n_pts = (len(f) - 1) * max_dy + 1
    pts = []
    vals = []
    a, b = 0, 0
    for _ in range(n_pts):
        y = (a, b)
        gy = ptrim([peval(field, c, y) for c in g])
        if not gy:
            ry = (0, 0)
        else:
            # evaluation can drop deg_x; restore the lost power of lc(f)
            ry = _res_scalar(field, f, gy)
            drop = degx_g - (len(gy) - 1)
            if drop:
                ry = field.mul(ry, field.pow(f[-1], drop))
        pts.append(y)
        vals.append(ry)
        a += 1
        if a == field.p:
            a = 0
            b += 1
    return _lagrange(field, pts, vals)


def _lagrange(field, pts, vals):
    n = len(pts)
    acc = []
    for i in range(n):
        num = [(1, 0)]
        den = (1, 0)
        for k in range(n):
            if k == i:
                continue
            num = pmul(field, num, [field.neg(pts[k]), (1, 0)])
            den = field.mul(den, field.sub(pts[i], pts[k]))
        acc = padd(field, acc, pscale(field, num, field.mul(vals[i], field.inv(den))))
    return acc


# -- text encodings -----------------------------------------------------------


def poly_encode(field, f):
    return json.dumps([field.enc(c) for c in f])


def poly_decode(field, text):
    return ptrim([field.dec(s) for s in json.loads(text)])
