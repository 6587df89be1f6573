"""Explicit elliptic-curve machinery over F_{p^2}.

Short-Weierstrass models, split division polynomials, Vélu quotients driven
by kernel-polynomial coefficients (no root extraction), kernels of CM
eigenspaces on the oriented base curves, and pushforwards of kernels through
explicit isogenies. Only shallow, small-degree work happens here; everything
deep runs on modular polynomials instead.
"""

import math
from dataclasses import dataclass

from .algebra import (
    pdeg,
    pderiv,
    pmod,
    pmonic,
    pmul,
    pscale,
    psub,
    ptrim,
    peval,
    poly_gcd_monic,
    resultant,
    roots_in_fp2,
)
from .errors import (
    BadKernel,
    BadOrientation,
    DegreesNotCoprime,
    EigenvalueAmbiguous,
    NoMatchingKernel,
)
from .quadorder import kronecker


@dataclass(frozen=True)
class Curve:
    """y^2 = x^3 + Ax + B over field; A, B are F_{p^2} element tuples."""

    field: object
    A: tuple
    B: tuple

    def __post_init__(self):
        F = self.field
        disc = F.add(
            F.smul(4, F.mul(self.A, F.sqr(self.A))), F.smul(27, F.sqr(self.B))
        )
        assert disc != F.zero, "singular curve"


@dataclass(frozen=True)
class KernelPoly:
    """Monic polynomial cutting out the x-coordinates of a subgroup."""

    poly: tuple  # coefficients, low degree first, as element tuples
    order: int


@dataclass(frozen=True)
class ExplicitIsogeny:
    domain: Curve
    codomain: Curve
    kernel: KernelPoly
    x_num: tuple
    x_den: tuple


def j_invariant(E):
    F = E.field
    a3 = F.mul(E.A, F.sqr(E.A))
    num = F.smul(4, a3)
    den = F.add(num, F.smul(27, F.sqr(E.B)))
    return F.mul(F.smul(1728, num), F.inv(den))


def base_curve(disc, field):
    """The oriented starting curve: j=0 under disc -3, j=1728 under -4."""
    assert disc in (-3, -4)
    if kronecker(disc, field.p) == 1:
        raise BadOrientation(
            f"p = {field.p} splits under disc {disc}; curve is ordinary"
        )
    if disc == -3:
        return Curve(field, field.zero, field.one)
    return Curve(field, field.one, field.zero)


def curve_from_j(field, j):
    """Some curve with the given j-invariant (twist choice unspecified)."""
    if j == field.zero:
        return Curve(field, field.zero, field.one)
    j1728 = field.el(1728)
    if j == j1728:
        return Curve(field, field.one, field.zero)
    w = field.div(j, field.sub(j, j1728))
    return Curve(field, field.smul(-27, w), field.smul(54, w))


# -- division polynomials ------------------------------------------------------

_PSI_CACHE = {}


def _psi_tables(E, upto):
    """Split division polynomials: psit[m] for odd m, bigpsi[m] for even m.

    psi_m = psit_m(x) for odd m and y * bigpsi_m(x) for even m, on
    y^2 = x^3 + Ax + B.
    """
    F = E.field
    key = (F.p, E.A, E.B)
    cached = _PSI_CACHE.get(key)
    if cached is not None and cached[0] >= upto:
        return cached[1], cached[2]

    A, B = E.A, E.B
    f = ptrim([B, A, F.zero, F.one])
    f2 = pmul(F, f, f)
    el = F.el
    psit = {
        1: [F.one],
        3: ptrim(
            [
                F.neg(F.sqr(A)),
                F.smul(12, B),
                F.smul(6, A),
                F.zero,
                el(3),
            ]
        ),
    }
    bigpsi = {
        2: [el(2)],
        4: pscale(
            F,
            ptrim(
                [
                    F.sub(
                        F.smul(-8, F.sqr(B)), F.mul(A, F.mul(A, A))
                    ),
                    F.smul(-4, F.mul(A, B)),
                    F.smul(-5, F.sqr(A)),
                    F.smul(20, B),
                    F.smul(5, A),
                    F.zero,
                    F.one,
                ]
            ),
            el(4),
        ),
    }
    inv2 = F.inv(el(2))

    def cube(g):
        return pmul(F, g, pmul(F, g, g))

    for m in range(5, upto + 1):
        if m % 2:
            k = (m - 1) // 2
            if k % 2 == 0:
                left = pmul(F, f2, pmul(F, bigpsi[k + 2], cube(bigpsi[k])))
                right = pmul(F, psit[k - 1], cube(psit[k + 1]))
            else:
                left = pmul(F, psit[k + 2], cube(psit[k]))
                right = pmul(F, f2, pmul(F, bigpsi[k - 1], cube(bigpsi[k + 1])))
            psit[m] = psub(F, left, right)
            # leading coefficient is m, so the degree drops when p | m
            assert m % F.p == 0 or pdeg(psit[m]) == (m * m - 1) // 2
        else:
            k = m // 2
            if k % 2 == 0:
                inner = psub(
                    F,
                    pmul(F, bigpsi[k + 2], pmul(F, psit[k - 1], psit[k - 1])),
                    pmul(F, bigpsi[k - 2], pmul(F, psit[k + 1], psit[k + 1])),
                )
                psi_k = bigpsi[k]
            else:
                inner = psub(
                    F,
                    pmul(F, psit[k + 2], pmul(F, bigpsi[k - 1], bigpsi[k - 1])),
                    pmul(F, psit[k - 2], pmul(F, bigpsi[k + 1], bigpsi[k + 1])),
                )
                psi_k = psit[k]
            bigpsi[m] = pscale(F, pmul(F, psi_k, inner), inv2)
            assert m % F.p == 0 or pdeg(bigpsi[m]) == (m * m - 4) // 2
    _PSI_CACHE[key] = (max(upto, 4), psit, bigpsi)
    if len(_PSI_CACHE) > 64:
        _PSI_CACHE.clear()
        _PSI_CACHE[key] = (max(upto, 4), psit, bigpsi)
    return psit, bigpsi


def division_poly(E, m):
    """x-polynomial vanishing on the x-coordinates of E[m] - O."""
    assert m >= 2
    F = E.field
    f = ptrim([E.B, E.A, F.zero, F.one])
    if m == 2:
        return f
    psit, bigpsi = _psi_tables(E, m)
    if m % 2:
        return list(psit[m])
    return pmul(F, f, bigpsi[m])


def mult_x_map(E, m):
    """(num, den) with x([m]P) = num(x(P)) / den(x(P))."""
    assert m >= 1
    F = E.field
    if m == 1:
        return [F.zero, F.one], [F.one]
    f = ptrim([E.B, E.A, F.zero, F.one])
    psit, bigpsi = _psi_tables(E, m + 1)
    if m % 2:
        den = pmul(F, psit[m], psit[m])
        cross = pmul(F, f, pmul(F, bigpsi[m + 1], bigpsi[m - 1]))
    else:
        den = pmul(F, f, pmul(F, bigpsi[m], bigpsi[m]))
        cross = pmul(F, psit[m + 1], psit[m - 1])
    num = psub(F, pmul(F, [F.zero, F.one], den), cross)
    return num, den


# -- kernels and quotients -----------------------------------------------------


def ell_kernels(E, ell):
    """Kernel polynomials of the F_{p^2}-rational order-ell subgroups."""
    assert ell in (2, 3)
    F = E.field
    poly = division_poly(E, ell)
    roots = set(roots_in_fp2(F, poly))
    return sorted(
        (KernelPoly(poly=(F.neg(r), F.one), order=ell) for r in roots),
        key=lambda k: k.poly,
    )


def velu(E, K):
    """Quotient isogeny E -> E/<K> from kernel-polynomial coefficients."""
    F = E.field
    h = ptrim(list(K.poly))
    m = K.order
    want_deg = 1 if m == 2 else (m - 1) // 2
    if pdeg(h) != want_deg or h[-1] != F.one:
        raise BadKernel(
            f"kernel polynomial has degree {pdeg(h)}, subgroup order {m}"
        )
    if pmod(F, division_poly(E, m), h):
        raise BadKernel(
            f"polynomial does not divide the {m}-division polynomial"
        )
    A, B = E.A, E.B
    if m == 2:
        x0 = F.neg(h[0])
        t = F.add(F.smul(3, F.sqr(x0)), A)
        w = F.mul(x0, t)
        a2 = F.sub(A, F.smul(5, t))
        b2 = F.sub(B, F.smul(7, w))
        num = ptrim([t, F.neg(x0), F.one])
        den = h
    else:
        k = want_deg
        e1 = F.neg(h[k - 1])
        e2 = h[k - 2] if k >= 2 else F.zero
        e3 = F.neg(h[k - 3]) if k >= 3 else F.zero
        p1 = e1
        p2 = F.sub(F.sqr(e1), F.smul(2, e2))
        p3 = F.add(
            F.sub(F.mul(e1, F.sqr(e1)), F.smul(3, F.mul(e1, e2))),
            F.smul(3, e3),
        )
        t = F.add(F.smul(6, p2), F.smul(2 * k, A))
        w = F.add(
            F.add(F.smul(10, p3), F.smul(6, F.mul(A, p1))), F.smul(4 * k, B)
        )
        a2 = F.sub(A, F.smul(5, t))
        b2 = F.sub(B, F.smul(7, w))
        f = ptrim([B, A, F.zero, F.one])
        hh = pmul(F, h, h)
        hp = pderiv(F, h)
        hpp = pderiv(F, hp)
        quad = ptrim([A, F.zero, F.el(3)])
        num = psub(
            F,
            psub(
                F,
                pmul(F, ptrim([F.smul(-2, p1), F.el(m)]), hh),
                pscale(F, pmul(F, quad, pmul(F, hp, h)), F.el(2)),
            ),
            pscale(
                F,
                pmul(F, f, psub(F, pmul(F, hp, hp), pmul(F, hpp, h))),
                F.el(-4),
            ),
        )
        den = hh
    cod = Curve(F, a2, b2)
    return ExplicitIsogeny(
        domain=E,
        codomain=cod,
        kernel=KernelPoly(poly=tuple(h), order=m),
        x_num=tuple(num),
        x_den=tuple(den),
    )


def cm_eigenspace_kernel(E0, ideal):
    """Kernel polynomial of the eigenspace E0[(q, omega - lam)].

    On the base curves the extra automorphism rho acts on x by a constant
    multiplier; a point of E0[q] lies in the lam-eigenspace exactly when
    x([lam]P) = x(rho(P)), which the x-only test detects unambiguously as
    long as -lam is not the other eigenvalue.
    """
    F = E0.field
    q = ideal.q
    if (ideal.lam + ideal.lam_conj) % q == 0:
        raise EigenvalueAmbiguous(
            f"eigenvalues {ideal.lam} and {ideal.lam_conj} differ by sign; "
            "the x-coordinate test cannot separate them"
        )
    if (E0.A, E0.B) == (F.zero, F.one):
        zroots = roots_in_fp2(F, [F.one, F.one, F.one])  # z^2 + z + 1
        mult = sorted(set(zroots))[0]
    elif (E0.A, E0.B) == (F.one, F.zero):
        zroots = roots_in_fp2(F, [F.one, F.zero, F.one])  # z^2 + 1
        mult = sorted(set(zroots))[0]
    else:
        raise BadOrientation("eigenspace kernels exist on base curves only")
    num, den = mult_x_map(E0, ideal.lam % q)
    cond = psub(F, num, pmul(F, [F.zero, mult], den))
    psi_q = division_poly(E0, q)
    K = poly_gcd_monic(F, psi_q, cond)
    assert pdeg(K) == (q - 1) // 2, (
        f"eigenspace of q={q} has degree {pdeg(K)}, wanted {(q - 1) // 2}"
    )
    return KernelPoly(poly=tuple(K), order=q)


def push_kernel(phi, K):
    """Kernel polynomial of phi(ker K) on the codomain of phi."""
    if math.gcd(phi.kernel.order, K.order) != 1:
        raise DegreesNotCoprime(
            f"isogeny degree {phi.kernel.order} shares a factor with "
            f"subgroup order {K.order}"
        )
    F = phi.domain.field
    num = list(phi.x_num)
    den = list(phi.x_den)
    width = max(len(num), len(den))
    cols = []
    for i in range(width):
        ni = num[i] if i < len(num) else F.zero
        di = den[i] if i < len(den) else F.zero
        cols.append(ptrim([F.neg(ni), di]))
    image = resultant(F, list(K.poly), cols)
    image = pmonic(F, image)
    assert pdeg(image) == pdeg(list(K.poly))
    return KernelPoly(poly=tuple(image), order=K.order)


def dual_kernel(phi):
    """Kernel polynomial of the dual of a 2- or 3-isogeny.

    The dual's kernel is the image of the full ell-torsion, so the image of
    any complementary order-ell subgroup generates it; with ell in {2, 3}
    the result is a rational linear polynomial.
    """
    E = phi.domain
    F = E.field
    ell = phi.kernel.order
    assert ell in (2, 3)
    others = [K for K in ell_kernels(E, ell) if K != phi.kernel]
    x1 = F.neg(others[0].poly[0])
    den = peval(F, list(phi.x_den), x1)
    assert den != F.zero
    img = F.div(peval(F, list(phi.x_num), x1), den)
    return KernelPoly(poly=(F.neg(img), F.one), order=ell)


def explicit_step(E, ell, target_j, exclude=None):
    """The Vélu step from E whose codomain has the requested j-invariant."""
    matches = []
    for K in ell_kernels(E, ell):
        if exclude is not None and K == exclude:
            continue
        phi = velu(E, K)
        if j_invariant(phi.codomain) == target_j:
            matches.append((K.poly, phi))
    if not matches:
        raise NoMatchingKernel(
            f"no order-{ell} kernel on j={j_invariant(E)} reaches "
            f"j={target_j}"
        )
    matches.sort(key=lambda pair: pair[0])
    return matches[0][1]


# -- affine points (test and demo support) ------------------------------------


def on_curve(E, P):
    if P is None:
        return True
    F = E.field
    x, y = P
    rhs = F.add(F.add(F.mul(x, F.sqr(x)), F.mul(E.A, x)), E.B)
    return F.sqr(y) == rhs


def point_neg(E, P):
    if P is None:
        return None
    return (P[0], E.field.neg(P[1]))


def point_add(E, P, Q):
    F = E.field
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if F.add(y1, y2) == F.zero:
            return None
        lam = F.div(
            F.add(F.smul(3, F.sqr(x1)), E.A), F.smul(2, y1)
        )
    else:
        lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
    x3 = F.sub(F.sub(F.sqr(lam), x1), x2)
    y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
    return (x3, y3)


def point_mul(E, k, P):
    if k < 0:
        return point_mul(E, -k, point_neg(E, P))
    acc = None
    add = P
    while k:
        if k & 1:
            acc = point_add(E, acc, add)
        add = point_add(E, add, add)
        k >>= 1
    return acc


def random_point(E, rng):
    """A uniform-ish affine point, by repeated x sampling."""
    F = E.field
    while True:
        x = (rng.randrange(F.p), rng.randrange(F.p))
        rhs = F.add(F.add(F.mul(x, F.sqr(x)), F.mul(E.A, x)), E.B)
        y = F.sqrt(rhs)
        if y is None:
            continue
        if y != F.zero and rng.randrange(2):
            y = F.neg(y)
        return (x, y)
