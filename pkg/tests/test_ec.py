"""Tests for the explicit elliptic-curve layer."""

import dataclasses
import random

import pytest

from osidh.algebra import (
    create_field,
    pdeg,
    peval,
    pmod,
    poly_gcd_monic,
)
from osidh.ec import (
    Curve,
    ExplicitIsogeny,
    KernelPoly,
    base_curve,
    cm_eigenspace_kernel,
    curve_from_j,
    division_poly,
    ell_kernels,
    explicit_step,
    j_invariant,
    mult_x_map,
    on_curve,
    point_add,
    point_mul,
    point_neg,
    push_kernel,
    random_point,
    velu,
)
from osidh.errors import (
    BadKernel,
    BadOrientation,
    DegreesNotCoprime,
    EigenvalueAmbiguous,
    NoMatchingKernel,
)
from osidh.modpoly import eval_pair, load_db
from osidh.quadorder import OrderParams, split_prime

F71 = create_field(71)
F353 = create_field(353)
F1013 = create_field(1013)
DB = load_db()
EIS = OrderParams(disc=-3, ell=2)


def conjugate_ideal(ideal, t):
    a, b = ideal.generator
    return dataclasses.replace(
        ideal, lam=ideal.lam_conj, lam_conj=ideal.lam, generator=(a - t * b, -b)
    )


def xmap(F, phi, x):
    den = peval(F, list(phi.x_den), x)
    if den == F.zero:
        return None
    return F.div(peval(F, list(phi.x_num), x), den)


def dual_of_small_step(phi):
    """Dual kernel of a 2- or 3-isogeny: image of a complementary kernel."""
    E = phi.domain
    F = E.field
    ell = phi.kernel.order
    others = [K for K in ell_kernels(E, ell) if K != phi.kernel]
    x1 = F.neg(others[0].poly[0])
    img = xmap(F, phi, x1)
    return KernelPoly(poly=(F.neg(img), F.one), order=ell)


def test_j_invariant_of_special_models():
    assert j_invariant(Curve(F71, F71.zero, F71.one)) == F71.zero
    assert j_invariant(Curve(F71, F71.one, F71.zero)) == F71.el(1728)


def test_base_curve_models():
    E = base_curve(-3, F71)
    assert (E.A, E.B) == (F71.zero, F71.one)
    assert j_invariant(E) == F71.zero
    E4 = base_curve(-4, F71)  # 71 = 3 mod 4
    assert j_invariant(E4) == F71.el(1728)


def test_base_curve_rejects_split_characteristic():
    with pytest.raises(BadOrientation):
        base_curve(-3, create_field(1009))  # 1009 = 1 mod 3
    with pytest.raises(BadOrientation):
        base_curve(-4, create_field(13))  # 13 = 1 mod 4


def test_curve_from_j_round_trip_bulk():
    rng = random.Random(20)
    for field in (F71, F1013):
        for _ in range(500):
            j = (rng.randrange(field.p), rng.randrange(field.p))
            E = curve_from_j(field, j)
            assert j_invariant(E) == j


def test_division_poly_two_is_the_cubic():
    E = base_curve(-3, F71)
    assert division_poly(E, 2) == [F71.one, F71.zero, F71.zero, F71.one]


def test_division_poly_degrees():
    E = base_curve(-3, F71)
    for m in (3, 5, 7, 9, 11, 13, 15, 17, 19):
        assert pdeg(division_poly(E, m)) == (m * m - 1) // 2
    for m in (4, 6, 8, 10):
        assert pdeg(division_poly(E, m)) == (m * m + 2) // 2


def test_division_poly_three_explicit():
    E = base_curve(-3, F71)
    # 3x^4 + 6Ax^2 + 12Bx - A^2 with A=0, B=1
    assert division_poly(E, 3) == [
        F71.zero,
        F71.el(12),
        F71.zero,
        F71.zero,
        F71.el(3),
    ]


def test_multiplication_maps_match_point_arithmetic():
    rng = random.Random(31)
    for field in (F71, F353):
        E = base_curve(-3, field)
        for m in (2, 3, 4, 5, 7, 8):
            num, den = mult_x_map(E, m)
            for _ in range(10):
                P = random_point(E, rng)
                mP = point_mul(E, m, P)
                dval = peval(field, den, P[0])
                if mP is None:
                    assert dval == field.zero
                    continue
                assert dval != field.zero
                got = field.div(peval(field, num, P[0]), dval)
                assert got == mP[0]


def test_torsion_annihilation_matches_division_poly():
    field = F71
    E = base_curve(-3, field)
    rng = random.Random(47)
    for _ in range(40):
        P = random_point(E, rng)
        for m in (2, 3, 5, 7):
            poly = division_poly(E, m)
            vanishes = peval(field, poly, P[0]) == field.zero
            assert vanishes == (point_mul(E, m, P) is None)


def test_ell_kernels_on_base_curve():
    E = base_curve(-3, F71)
    twos = ell_kernels(E, 2)
    assert len(twos) == 3
    assert all(k.order == 2 and pdeg(list(k.poly)) == 1 for k in twos)
    assert ((F71.one, F71.one) in {k.poly for k in twos})  # root x = -1
    threes = ell_kernels(E, 3)
    assert len(threes) == 4
    polys = [k.poly for k in twos]
    assert polys == sorted(polys)
    for k in twos + threes:
        assert not pmod(F71, division_poly(E, k.order), list(k.poly))


def test_velu_known_two_step():
    E = base_curve(-3, F71)
    phi = velu(E, KernelPoly(poly=(F71.one, F71.one), order=2))
    assert j_invariant(phi.codomain) == F71.el(40)


def test_velu_all_steps_satisfy_modular_relation():
    E = base_curve(-3, F71)
    for ell in (2, 3):
        for K in ell_kernels(E, ell):
            phi = velu(E, K)
            jj = eval_pair(DB, F71, ell, j_invariant(E), j_invariant(phi.codomain))
            assert jj == F71.zero


def test_velu_rejects_bad_kernels():
    E = base_curve(-3, F71)
    with pytest.raises(BadKernel):
        velu(E, KernelPoly(poly=(F71.el(5), F71.one), order=2))  # f(5) != 0
    with pytest.raises(BadKernel):
        velu(E, KernelPoly(poly=(F71.one, F71.zero, F71.one), order=2))
    with pytest.raises(BadKernel):
        velu(E, KernelPoly(poly=(F71.el(3), F71.el(2)), order=2))  # not monic


def compose_equals_scaled_multiplication(E, phi, dual, m, rng, samples=20):
    """phi-hat after phi is [m] up to the x-scaling of one isomorphism."""
    F = E.field
    num, den = mult_x_map(E, m)
    constants = set()
    checked = 0
    while checked < samples:
        P = random_point(E, rng)
        x = P[0]
        mid = xmap(F, phi, x)
        if mid is None:
            continue
        out = xmap(F, dual, mid)
        if out is None:
            continue
        dval = peval(F, den, x)
        if dval == F.zero:
            continue
        ref = F.div(peval(F, num, x), dval)
        if ref == F.zero or out == F.zero:
            assert out == ref
        else:
            constants.add(F.div(out, ref))
        checked += 1
    assert len(constants) == 1
    c = constants.pop()
    cod = dual.codomain
    if E.B != F.zero:
        assert F.mul(c, F.sqr(c)) == F.div(cod.B, E.B)
    if E.A != F.zero:
        assert F.sqr(c) == F.div(cod.A, E.A)
    return c


def test_dual_composition_is_multiplication_by_two():
    E = base_curve(-3, F71)
    rng = random.Random(5)
    K = KernelPoly(poly=(F71.one, F71.one), order=2)
    phi = velu(E, K)
    dual = velu(phi.codomain, dual_of_small_step(phi))
    assert j_invariant(dual.codomain) == j_invariant(E)
    compose_equals_scaled_multiplication(E, phi, dual, 2, rng)


def test_dual_composition_is_multiplication_by_three():
    E = base_curve(-3, F71)
    rng = random.Random(6)
    for K in ell_kernels(E, 3)[:2]:
        phi = velu(E, K)
        dual = velu(phi.codomain, dual_of_small_step(phi))
        assert j_invariant(dual.codomain) == j_invariant(E)
        compose_equals_scaled_multiplication(E, phi, dual, 3, rng)


def test_eigenspace_kernel_for_seven():
    E = base_curve(-3, F71)
    ideal = split_prime(EIS, 7)
    K = cm_eigenspace_kernel(E, ideal)
    assert K.order == 7
    assert pdeg(list(K.poly)) == 3
    assert not pmod(F71, division_poly(E, 7), list(K.poly))
    phi = velu(E, K)
    assert j_invariant(phi.codomain) == j_invariant(E)  # horizontal


def test_eigenspace_kernels_are_complementary():
    E = base_curve(-3, F71)
    ideal = split_prime(EIS, 7)
    K = cm_eigenspace_kernel(E, ideal)
    Kc = cm_eigenspace_kernel(E, conjugate_ideal(ideal, t=1))
    assert K.poly != Kc.poly
    assert pdeg(poly_gcd_monic(F71, list(K.poly), list(Kc.poly))) == 0
    phic = velu(E, Kc)
    assert j_invariant(phic.codomain) == j_invariant(E)


def test_eigenspace_kernel_degrees_for_larger_primes():
    E = base_curve(-3, F71)
    for q in (13, 19):
        ideal = split_prime(EIS, q)
        K = cm_eigenspace_kernel(E, ideal)
        assert pdeg(list(K.poly)) == (q - 1) // 2
        assert not pmod(F71, division_poly(E, q), list(K.poly))


def test_eigenspace_dual_composition_is_multiplication_by_seven():
    E = base_curve(-3, F71)
    rng = random.Random(8)
    ideal = split_prime(EIS, 7)
    K = cm_eigenspace_kernel(E, ideal)
    Kc = cm_eigenspace_kernel(E, conjugate_ideal(ideal, t=1))
    phi = velu(E, K)
    # image of the complementary eigenspace is the dual kernel; its roots
    # are rational here, so push it pointwise
    F = E.field
    from osidh.algebra import roots_in_fp2

    imgs = sorted({xmap(F, phi, r) for r in roots_in_fp2(F, list(Kc.poly))})
    dual_poly = [F.one]
    from osidh.algebra import pmul

    for r in imgs:
        dual_poly = pmul(F, dual_poly, [F.neg(r), F.one])
    dual = velu(phi.codomain, KernelPoly(poly=tuple(dual_poly), order=7))
    compose_equals_scaled_multiplication(E, phi, dual, 7, rng, samples=12)


def test_eigenspace_ambiguous_under_gaussian_orientation():
    E4 = base_curve(-4, F71)
    gauss = OrderParams(disc=-4, ell=3)
    ideal = split_prime(gauss, 5)  # eigenvalues 2, 3 = -2 mod 5
    with pytest.raises(EigenvalueAmbiguous):
        cm_eigenspace_kernel(E4, ideal)


def test_eigenspace_requires_base_curve():
    ideal = split_prime(EIS, 7)
    E = curve_from_j(F71, (3, 0))
    with pytest.raises(BadOrientation):
        cm_eigenspace_kernel(E, ideal)


def test_push_through_identity_map():
    E = base_curve(-3, F71)
    ident = ExplicitIsogeny(
        domain=E,
        codomain=E,
        kernel=KernelPoly(poly=(F71.one,), order=1),
        x_num=(F71.zero, F71.one),
        x_den=(F71.one,),
    )
    K = cm_eigenspace_kernel(E, split_prime(EIS, 7))
    assert push_kernel(ident, K) == K
    K2 = ell_kernels(E, 2)[0]
    assert push_kernel(ident, K2) == K2


def test_push_kernel_rejects_common_factor():
    E = base_curve(-3, F71)
    K7 = cm_eigenspace_kernel(E, split_prime(EIS, 7))
    phi = velu(E, K7)
    with pytest.raises(DegreesNotCoprime):
        push_kernel(phi, K7)


def test_push_kernel_preserves_order_and_commutes():
    E = base_curve(-3, F71)
    K7 = cm_eigenspace_kernel(E, split_prime(EIS, 7))
    phi7 = velu(E, K7)
    for ell in (2, 3):
        for K in ell_kernels(E, ell):
            pushed = push_kernel(phi7, K)
            assert pushed.order == ell
            assert pdeg(list(pushed.poly)) == pdeg(list(K.poly))
            one_way = velu(phi7.codomain, pushed)
            other = velu(E, K)
            k7_pushed = push_kernel(other, K7)
            other_way = velu(other.codomain, k7_pushed)
            assert j_invariant(one_way.codomain) == j_invariant(
                other_way.codomain
            )


def test_explicit_step_reaches_known_child():
    E = base_curve(-3, F71)
    phi = explicit_step(E, 2, F71.el(40))
    assert j_invariant(phi.codomain) == F71.el(40)


def test_explicit_step_rejects_non_child():
    E = base_curve(-3, F71)
    with pytest.raises(NoMatchingKernel):
        explicit_step(E, 2, F71.el(17))


def test_explicit_step_exclusion_blocks_backtracking():
    E = base_curve(-3, F71)
    step1 = explicit_step(E, 2, F71.el(40))
    back = dual_of_small_step(step1)
    # without exclusion the walk may return to j = 0
    again = explicit_step(step1.codomain, 2, F71.zero)
    assert j_invariant(again.codomain) == F71.zero
    with pytest.raises(NoMatchingKernel):
        explicit_step(step1.codomain, 2, F71.zero, exclude=back)
    # and the chain 0 -> 40 -> 17 remains constructible
    step2 = explicit_step(step1.codomain, 2, F71.el(17), exclude=back)
    assert j_invariant(step2.codomain) == F71.el(17)


def test_cm_automorphism_relation_eisenstein():
    E = base_curve(-3, F71)
    from osidh.algebra import roots_in_fp2

    zeta = sorted(set(roots_in_fp2(F71, [F71.one, F71.one, F71.one])))[0]
    zeta2 = F71.sqr(zeta)
    rng = random.Random(13)
    for _ in range(20):
        P = random_point(E, rng)
        x, y = P
        rho = (F71.mul(zeta, x), y)
        rho2 = (F71.mul(zeta2, x), y)
        assert on_curve(E, rho) and on_curve(E, rho2)
        total = point_add(E, point_add(E, rho2, rho), P)
        assert total is None


def test_cm_automorphism_relation_gaussian():
    E = base_curve(-4, F71)
    from osidh.algebra import roots_in_fp2

    i_unit = sorted(set(roots_in_fp2(F71, [F71.one, F71.zero, F71.one])))[0]
    rng = random.Random(14)
    for _ in range(20):
        P = random_point(E, rng)
        x, y = P
        rho = (F71.neg(x), F71.mul(i_unit, y))
        assert on_curve(E, rho)
        rho_rho = (F71.neg(rho[0]), F71.mul(i_unit, rho[1]))
        assert rho_rho == point_neg(E, P)


def test_velu_modular_consistency_two_hundred_walks():
    rng = random.Random(99)
    checks = 0
    for field, disc in ((F71, -3), (F353, -3), (F1013, -3), (F71, -4)):
        E = base_curve(disc, field)
        for _ in range(50):
            ell = rng.choice((2, 3))
            kernels = ell_kernels(E, ell)
            K = kernels[rng.randrange(len(kernels))]
            phi = velu(E, K)
            assert (
                eval_pair(
                    DB,
                    field,
                    ell,
                    j_invariant(E),
                    j_invariant(phi.codomain),
                )
                == field.zero
            )
            checks += 1
            E = phi.codomain  # continue from the actual codomain model
    assert checks == 200


def test_point_arithmetic_sanity():
    E = base_curve(-3, F71)
    rng = random.Random(17)
    order = (71 + 1) ** 2
    for _ in range(10):
        P = random_point(E, rng)
        Q = random_point(E, rng)
        assert on_curve(E, P) and on_curve(E, Q)
        assert point_add(E, P, Q) == point_add(E, Q, P)
        assert point_add(E, P, point_neg(E, P)) is None
        assert point_mul(E, order, P) is None
