r"""Class groups of the orders O_n = Z + ell^n O_K inside an imaginary
quadratic field of class number one.

Classes are realized through the isomorphism with
(O_K / ell^n O_K)^x / (O_K^x * (Z/ell^n Z)^x): an element a + b*omega is a
pair (a, b) mod ell^n, where omega^2 + t*omega + s = 0. This gives an exact,
cheap oracle for the isogeny-level group action and the lifting machinery
the attack needs. All arithmetic is plain integer arithmetic mod ell^n.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthMismatch, InvariantViol, NotFound, NotSplit, TooLarge

_H1_DISCS = (-3, -4, -7, -8, -11, -19, -43, -67, -163)


def unit_index(disc):
    """[O_K^x : O^x] for suborders: 3 under -3, 2 under -4, else 1."""
    if disc == -3:
        return 3
    if disc == -4:
        return 2
    return 1


def kronecker(delta, m):
    """Kronecker symbol (delta/m) for positive m."""
    assert m > 0
    if m == 1:
        return 1
    result = 1
    while m % 2 == 0:
        m //= 2
        if delta % 2 == 0:
            return 0
        if delta % 8 in (3, 5):
            result = -result
    a = delta % m
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def _omega_poly(disc):
    """(t, s) with omega^2 + t*omega + s = 0 for the maximal order."""
    t = disc & 1
    return t, (t * t - disc) // 4


@dataclass(frozen=True)
class OrderParams:
    disc: int
    ell: int
    n: int = 0

    def __post_init__(self):
        if self.disc not in _H1_DISCS:
            raise InvariantViol(
                f"disc {self.disc} is not a class-number-one discriminant",
                invariant="h(O_K) = 1",
            )
        if kronecker(self.disc, self.ell) != -1:
            raise InvariantViol(
                f"ell = {self.ell} is not inert under disc {self.disc}",
                invariant="Kronecker(disc, ell) = -1",
            )
        if self.n < 0:
            raise InvariantViol("depth must be >= 0", invariant="n >= 0")

    @property
    def ts(self):
        return _omega_poly(self.disc)


def _units(disc):
    if disc == -3:
        return ((1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1))
    if disc == -4:
        return ((1, 0), (0, 1), (-1, 0), (0, -1))
    return ((1, 0), (-1, 0))


def _ring_mul(x, y, t, s, mod):
    a1, b1 = x
    a2, b2 = y
    bb = b1 * b2
    return ((a1 * a2 - s * bb) % mod, (a1 * b2 + a2 * b1 - t * bb) % mod)


def _norm(a, b, t, s):
    return a * a - t * a * b + s * b * b


def _canon(a, b, disc, ell, n):
    """Lex-least representative of the coset of a + b*omega."""
    mod = ell**n
    if mod == 1:
        return (0, 0)
    t, s = _omega_poly(disc)
    a %= mod
    b %= mod

    def normalize(x, y):
        if y % ell:
            inv = pow(y, -1, mod)
            return (x * inv % mod, 1)
        inv = pow(x, -1, mod)
        return (1, y * inv % mod)

    best = None
    for u in _units(disc):
        cand = normalize(*_ring_mul((a, b), u, t, s, mod))
        if best is None or cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class OrderClass:
    a: int
    b: int
    ell: int
    n: int
    disc: int

    def to_json(self):
        return {
            "a": str(self.a),
            "b": str(self.b),
            "ell": self.ell,
            "n": self.n,
            "disc": self.disc,
        }


def make_class(params, a, b, n=None):
    """Canonicalize (a, b) into an OrderClass at the given depth."""
    if n is None:
        n = params.n
    t, s = params.ts
    if n > 0 and _norm(a, b, t, s) % params.ell == 0:
        raise InvariantViol(
            f"({a}, {b}) is not a unit mod {params.ell}^{n}",
            invariant="gcd(N(alpha), ell) = 1",
        )
    ca, cb = _canon(a, b, params.disc, params.ell, n)
    return OrderClass(a=ca, b=cb, ell=params.ell, n=n, disc=params.disc)


def class_from_json(obj):
    params = OrderParams(disc=obj["disc"], ell=obj["ell"], n=obj["n"])
    return make_class(params, int(obj["a"]), int(obj["b"]), n=obj["n"])


def _params_of(x):
    return OrderParams(disc=x.disc, ell=x.ell, n=x.n)


def _check_same(x, y):
    if (x.ell, x.n, x.disc) != (y.ell, y.n, y.disc):
        raise DepthMismatch(
            f"classes live in different groups: "
            f"(ell={x.ell}, n={x.n}) vs (ell={y.ell}, n={y.n})"
        )


def _identity(params, n):
    return make_class(params, 1, 0, n=n)


def class_op(x, y, op):
    """Group operations; op in {mul, inv, eq, is_identity, order}."""
    if op == "mul":
        _check_same(x, y)
        t, s = _omega_poly(x.disc)
        a, b = _ring_mul((x.a, x.b), (y.a, y.b), t, s, max(x.ell**x.n, 1))
        params = _params_of(x)
        return make_class(params, a, b, n=x.n)
    if op == "inv":
        # the conjugate: alpha * conj(alpha) = N(alpha), a rational scalar
        t, _ = _omega_poly(x.disc)
        return make_class(_params_of(x), x.a - t * x.b, -x.b, n=x.n)
    if op == "eq":
        _check_same(x, y)
        return (x.a, x.b) == (y.a, y.b)
    if op == "is_identity":
        return (x.a, x.b) == (
            _identity(_params_of(x), x.n).a,
            _identity(_params_of(x), x.n).b,
        )
    if op == "order":
        ident = _identity(_params_of(x), x.n)
        acc = x
        k = 1
        while not class_op(acc, ident, "eq"):
            acc = class_op(acc, x, "mul")
            k += 1
            assert k <= 1 << 22, "order loop runaway"
        return k
    raise ValueError(f"unknown op {op!r}")


def class_number(params, depth):
    """h(Z + ell^depth O_K), by the conductor formula for h(O_K) = 1."""
    if depth == 0:
        return 1
    h = (
        Fraction(params.ell**depth, unit_index(params.disc))
        * (1 - Fraction(kronecker(params.disc, params.ell), params.ell))
    )
    assert h.denominator == 1
    return int(h)


def class_enumerate(params, n):
    h = class_number(params, n)
    if h > 1 << 20:
        raise TooLarge(f"class number {h} exceeds the enumeration bound")
    if n == 0:
        return [_identity(params, 0)]
    mod = params.ell**n
    t, s = params.ts
    seen = {}
    for a in range(mod):
        if _norm(a, 1, t, s) % params.ell:
            cand = _canon(a, 1, params.disc, params.ell, n)
            seen.setdefault(cand, None)
    for b in range(0, mod, params.ell):
        cand = _canon(1, b, params.disc, params.ell, n)
        seen.setdefault(cand, None)
    out = [
        OrderClass(a=a, b=b, ell=params.ell, n=n, disc=params.disc)
        for (a, b) in sorted(seen)
    ]
    assert len(out) == h, f"enumeration found {len(out)}, formula says {h}"
    return out


def kernel_generator(params, n):
    """A class generating the kernel of Cl(O_n) -> Cl(O_n-1), order ell."""
    assert n >= 2, "surface kernels are a special case handled by callers"
    ell = params.ell
    step = ell ** (n - 1)
    ident = _identity(params, n)
    for y in range(1, ell):
        cand = make_class(params, 1, y * step, n=n)
        if class_op(cand, ident, "eq"):
            continue
        if class_op(cand, None, "order") == ell:
            down = make_class(params, cand.a, cand.b, n=n - 1)
            if class_op(down, None, "is_identity"):
                return cand
    raise NotFound(f"no kernel generator at depth {n} (implementation bug)")


def split_prime(params, q):
    """The ideal over a split prime q with the smaller eigenvalue."""
    if kronecker(params.disc, q) != 1:
        raise NotSplit(f"q = {q} does not split under disc {params.disc}")
    t, s = params.ts
    lams = sorted(x for x in range(q) if (x * x + t * x + s) % q == 0)
    lam = lams[0]
    lam_conj = lams[1] if len(lams) > 1 else lams[0]
    gen = _find_generator(q, lam, t, s)
    return SplitPrimeIdeal(q=q, lam=lam, lam_conj=lam_conj, generator=gen)


def _find_generator(q, lam, t, s):
    # enumerate norm-q elements by b ascending, then a; keep the first
    # whose quotient identifies omega with lam
    for b in range(1, q + 1):
        # a^2 - t*a*b + (s*b^2 - q) = 0
        disc_a = t * t * b * b - 4 * (s * b * b - q)
        if disc_a < 0:
            break
        root = _isqrt(disc_a)
        if root * root != disc_a:
            continue
        for a in sorted({(t * b - root) // 2, (t * b + root) // 2}):
            if a * a - t * a * b + s * b * b != q:
                continue
            if (-a * pow(b, -1, q)) % q == lam:
                return (a, b)
    raise NotFound(f"no norm-{q} generator found (implementation bug)")


def _isqrt(x):
    r = int(x**0.5)
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@dataclass(frozen=True)
class SplitPrimeIdeal:
    q: int
    lam: int
    lam_conj: int
    generator: tuple


def class_embed(ideal, params, n, sign=1):
    """Class of the ideal (sign=+1) or its conjugate (sign=-1) in Cl(O_n)."""
    a, b = ideal.generator
    if sign < 0:
        t, _ = params.ts
        a, b = a - t * b, -b
    return make_class(params, a, b, n=n)


def smooth_representative(target, primes, r):
    r"""Exponent vector (e_1..e_t), |e_i| <= r, with prod q_i^{e_i} = target.

    Meet in the middle: the right half of the exponent box is tabulated,
    the left half scanned in ascending lexicographic order, so the returned
    vector is the lex-least solution. Returns None when no vector works.
    """
    t = len(primes)
    assert t <= 8 and (2 * r + 1) ** t <= 1 << 24
    params = _params_of(target)
    n = target.n
    if t == 0:
        return () if class_op(target, None, "is_identity") else None
    embeds = [class_embed(ideal, params, n) for ideal in primes]
    powers = []
    for cls in embeds:
        row = {0: _identity(params, n)}
        for e in range(1, r + 1):
            row[e] = class_op(row[e - 1], cls, "mul")
        inv = class_op(cls, None, "inv")
        for e in range(1, r + 1):
            row[-e] = class_op(row[-(e - 1)], inv, "mul")
        powers.append(row)

    ka = (t + 1) // 2
    right = {}
    for vec in itertools.product(range(-r, r + 1), repeat=t - ka):
        acc = _identity(params, n)
        for i, e in enumerate(vec):
            acc = class_op(acc, powers[ka + i][e], "mul")
        key = (acc.a, acc.b)
        if key not in right:
            right[key] = vec
    for vec in itertools.product(range(-r, r + 1), repeat=ka):
        acc = _identity(params, n)
        for i, e in enumerate(vec):
            acc = class_op(acc, powers[i][e], "mul")
        need = class_op(class_op(acc, None, "inv"), target, "mul")
        hit = right.get((need.a, need.b))
        if hit is not None:
            return vec + hit
    return None


def exponent_map_injective(primes, bounds, params, n):
    """Exhaustive injectivity check of the boxed exponent map into Cl(O_n)."""
    total = 1
    for r in bounds:
        total *= 2 * r + 1
    assert total <= 1 << 24
    embeds = [class_embed(ideal, params, n) for ideal in primes]
    seen = {}
    for vec in itertools.product(*[range(-r, r + 1) for r in bounds]):
        acc = _identity(params, n)
        for cls, e in zip(embeds, vec):
            step = cls if e >= 0 else class_op(cls, None, "inv")
            for _ in range(abs(e)):
                acc = class_op(acc, step, "mul")
        key = (acc.a, acc.b)
        if key in seen:
            return {"injective": False, "witness": (seen[key], vec)}
        seen[key] = vec
    return {"injective": True, "witness": None}


def min_separation_depth(params, ideal):
    """Smallest depth i at which [q]^2 is not the identity in Cl(O_i)."""
    for i in range(1, 64):
        cls = class_embed(ideal, params, i)
        sq = class_op(cls, cls, "mul")
        if not class_op(sq, None, "is_identity"):
            return i
    raise NotFound("separation depth beyond any sensible bound")
