"""Tests for the quadratic-order class group layer."""

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osidh.errors import DepthMismatch, InvariantViol, NotSplit, TooLarge
from osidh.quadorder import (
    OrderParams,
    class_embed,
    class_enumerate,
    class_from_json,
    class_number,
    class_op,
    exponent_map_injective,
    kernel_generator,
    kronecker,
    make_class,
    min_separation_depth,
    smooth_representative,
    split_prime,
    unit_index,
)
from osidh.quadorder import _find_generator

EISENSTEIN = OrderParams(disc=-3, ell=2)
GAUSSIAN = OrderParams(disc=-4, ell=3)


def legendre(a, p):
    """Euler-criterion oracle for odd prime p."""
    r = pow(a % p, (p - 1) // 2, p)
    return r - p if r > 1 else r


def test_unit_index_values():
    assert unit_index(-3) == 3
    assert unit_index(-4) == 2
    assert unit_index(-7) == 1
    assert unit_index(-163) == 1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 19, 71, 353, 1009])
def test_kronecker_matches_legendre_at_odd_primes(p):
    for delta in (-3, -4, -7, -8, -11, -19, -163):
        assert kronecker(delta, p) == legendre(delta, p)


def test_kronecker_at_two():
    assert kronecker(-3, 2) == -1  # -3 = 5 mod 8
    assert kronecker(-7, 2) == 1  # -7 = 1 mod 8
    assert kronecker(-4, 2) == 0
    assert kronecker(-8, 2) == 0


def test_kronecker_multiplicative_in_m():
    for delta in (-3, -4, -11):
        for m1 in range(1, 30):
            for m2 in range(1, 30):
                assert kronecker(delta, m1 * m2) == kronecker(
                    delta, m1
                ) * kronecker(delta, m2)


def test_params_reject_non_unit_disc():
    with pytest.raises(InvariantViol):
        OrderParams(disc=-5, ell=2)
    with pytest.raises(InvariantViol):
        OrderParams(disc=-15, ell=2)


def test_params_reject_non_inert_ell():
    with pytest.raises(InvariantViol):
        OrderParams(disc=-3, ell=3)  # ramified
    with pytest.raises(InvariantViol):
        OrderParams(disc=-3, ell=7)  # split
    with pytest.raises(InvariantViol):
        OrderParams(disc=-4, ell=2)  # ramified


def test_omega_polynomial_coefficients():
    assert EISENSTEIN.ts == (1, 1)
    assert GAUSSIAN.ts == (0, 1)
    assert OrderParams(disc=-11, ell=2).ts == (1, 3)
    assert OrderParams(disc=-8, ell=5).ts == (0, 2)


def test_class_number_small_depths():
    assert [class_number(EISENSTEIN, i) for i in range(4)] == [1, 1, 2, 4]
    assert class_number(EISENSTEIN, 1) == 1  # surface is trivial here


def test_class_number_doubles_with_depth():
    for n in range(1, 12):
        assert class_number(EISENSTEIN, n) == 2 ** (n - 1)


def test_class_number_gaussian_ladder():
    assert [class_number(GAUSSIAN, i) for i in range(5)] == [1, 2, 6, 18, 54]


def test_enumerate_agrees_with_formula():
    for n in range(0, 11):
        assert len(class_enumerate(EISENSTEIN, n)) == class_number(
            EISENSTEIN, n
        )
    for n in range(0, 8):
        assert len(class_enumerate(GAUSSIAN, n)) == class_number(GAUSSIAN, n)


def test_enumerate_is_sorted_and_canonical():
    classes = class_enumerate(EISENSTEIN, 5)
    reps = [(c.a, c.b) for c in classes]
    assert reps == sorted(reps)
    for c in classes:
        again = make_class(EISENSTEIN, c.a, c.b, n=5)
        assert (again.a, again.b) == (c.a, c.b)


def test_enumerate_rejects_huge_groups():
    with pytest.raises(TooLarge):
        class_enumerate(EISENSTEIN, 22)


def test_identity_and_scalars_collapse():
    for n in (1, 2, 3, 5):
        ident = make_class(EISENSTEIN, 1, 0, n=n)
        assert class_op(ident, None, "is_identity")
        scalar = make_class(EISENSTEIN, 5, 0, n=n)
        assert class_op(scalar, ident, "eq")
        # omega is a unit here, so it lands in the identity class too
        omega = make_class(EISENSTEIN, 0, 1, n=n)
        assert class_op(omega, None, "is_identity")


def test_make_class_rejects_non_units():
    with pytest.raises(InvariantViol):
        make_class(EISENSTEIN, 2, 0, n=3)
    with pytest.raises(InvariantViol):
        make_class(GAUSSIAN, 3, 3, n=2)


def test_eq_across_depths_raises():
    x = make_class(EISENSTEIN, 1, 0, n=2)
    y = make_class(EISENSTEIN, 1, 0, n=3)
    with pytest.raises(DepthMismatch):
        class_op(x, y, "eq")
    with pytest.raises(DepthMismatch):
        class_op(x, y, "mul")


def test_group_axioms_exhaustive_small_depths():
    for params, depths in ((EISENSTEIN, (1, 2, 3, 4)), (GAUSSIAN, (1, 2))):
        for n in depths:
            classes = class_enumerate(params, n)
            ident = make_class(params, 1, 0, n=n)
            for x in classes:
                inv = class_op(x, None, "inv")
                assert class_op(class_op(x, inv, "mul"), None, "is_identity")
                assert class_op(class_op(x, ident, "mul"), x, "eq")
            for x, y, z in itertools.product(classes, repeat=3):
                left = class_op(class_op(x, y, "mul"), z, "mul")
                right = class_op(x, class_op(y, z, "mul"), "mul")
                assert class_op(left, right, "eq")


def test_group_axioms_sampled_deeper():
    rng = random.Random(7)
    for n in (5, 6):
        classes = class_enumerate(EISENSTEIN, n)
        for _ in range(200):
            x, y, z = (rng.choice(classes) for _ in range(3))
            left = class_op(class_op(x, y, "mul"), z, "mul")
            right = class_op(x, class_op(y, z, "mul"), "mul")
            assert class_op(left, right, "eq")
            assert class_op(
                class_op(x, y, "mul"), class_op(y, x, "mul"), "eq"
            )


def test_closure_and_inverse_on_enumeration():
    for n in (3, 4):
        classes = class_enumerate(EISENSTEIN, n)
        table = {(c.a, c.b) for c in classes}
        for x, y in itertools.product(classes, repeat=2):
            prod = class_op(x, y, "mul")
            assert (prod.a, prod.b) in table


def test_order_divides_group_order():
    for n in (2, 3, 4, 5):
        h = class_number(EISENSTEIN, n)
        for c in class_enumerate(EISENSTEIN, n):
            assert h % class_op(c, None, "order") == 0


def test_split_prime_seven():
    ideal = split_prime(EISENSTEIN, 7)
    assert ideal.q == 7
    assert ideal.lam == 2
    assert ideal.lam_conj == 4
    assert ideal.generator == (-2, 1)


def test_generator_search_matches_worked_value():
    # norm-7 element identifying omega with 4: first hit is 3 + omega
    assert _find_generator(7, 4, 1, 1) == (3, 1)


def test_split_prime_thirteen_and_nineteen():
    q13 = split_prime(EISENSTEIN, 13)
    assert (q13.lam, q13.lam_conj, q13.generator) == (3, 9, (-3, 1))
    q19 = split_prime(EISENSTEIN, 19)
    assert (q19.lam, q19.lam_conj, q19.generator) == (7, 11, (5, 2))
    a, b = q19.generator
    assert a * a - a * b + b * b == 19


def test_split_prime_rejects_inert_prime():
    with pytest.raises(NotSplit):
        split_prime(EISENSTEIN, 5)
    with pytest.raises(NotSplit):
        split_prime(GAUSSIAN, 7)


def test_split_prime_gaussian():
    q5 = split_prime(GAUSSIAN, 5)
    assert (q5.lam, q5.lam_conj, q5.generator) == (2, 3, (-2, 1))


def test_eigenvalues_satisfy_omega_polynomial():
    for params, qs in ((EISENSTEIN, (7, 13, 19, 31)), (GAUSSIAN, (5, 13))):
        t, s = params.ts
        for q in qs:
            ideal = split_prime(params, q)
            for lam in (ideal.lam, ideal.lam_conj):
                assert (lam * lam + t * lam + s) % q == 0
            assert (ideal.lam + ideal.lam_conj) % q == (-t) % q


def test_embed_depth_zero_is_identity():
    ideal = split_prime(EISENSTEIN, 7)
    cls = class_embed(ideal, EISENSTEIN, 0)
    assert class_op(cls, None, "is_identity")


def test_embed_orders_along_the_tower():
    ideal = split_prime(EISENSTEIN, 7)
    by_depth = {
        n: class_op(class_embed(ideal, EISENSTEIN, n), None, "order")
        for n in (2, 3, 4, 5)
    }
    assert by_depth == {2: 2, 3: 2, 4: 4, 5: 8}


def test_embed_conjugate_is_inverse():
    for params, qs in ((EISENSTEIN, (7, 13, 19)), (GAUSSIAN, (5, 13))):
        for q in qs:
            ideal = split_prime(params, q)
            for n in range(0, 11):
                fwd = class_embed(ideal, params, n)
                bwd = class_embed(ideal, params, n, sign=-1)
                prod = class_op(fwd, bwd, "mul")
                assert class_op(prod, None, "is_identity")
                assert class_op(bwd, class_op(fwd, None, "inv"), "eq")


def test_kernel_generator_properties():
    for n in range(2, 9):
        g = kernel_generator(EISENSTEIN, n)
        assert class_op(g, None, "order") == EISENSTEIN.ell
        down = make_class(EISENSTEIN, g.a, g.b, n=n - 1)
        assert class_op(down, None, "is_identity")
    for n in range(2, 5):
        g = kernel_generator(GAUSSIAN, n)
        assert class_op(g, None, "order") == GAUSSIAN.ell


def test_kernel_generator_value():
    g = kernel_generator(EISENSTEIN, 4)
    assert (g.a, g.b) == (1, 8)


def test_kernel_cosets_partition_the_fiber():
    # every class one level down lifts to exactly ell classes, reached by
    # multiplying any one lift by powers of the kernel generator
    n = 4
    g = kernel_generator(EISENSTEIN, n)
    ups = set()
    for c in class_enumerate(EISENSTEIN, n - 1):
        lift = make_class(EISENSTEIN, c.a, c.b, n=n)
        fiber = set()
        acc = lift
        for _ in range(EISENSTEIN.ell):
            fiber.add((acc.a, acc.b))
            acc = class_op(acc, g, "mul")
        assert len(fiber) == EISENSTEIN.ell
        ups |= fiber
    assert len(ups) == class_number(EISENSTEIN, n)


def test_reduction_is_a_homomorphism():
    rng = random.Random(11)
    classes = class_enumerate(EISENSTEIN, 6)
    for _ in range(100):
        x, y = rng.choice(classes), rng.choice(classes)
        prod = class_op(x, y, "mul")
        down = make_class(EISENSTEIN, prod.a, prod.b, n=4)
        dx = make_class(EISENSTEIN, x.a, x.b, n=4)
        dy = make_class(EISENSTEIN, y.a, y.b, n=4)
        assert class_op(down, class_op(dx, dy, "mul"), "eq")


def test_smooth_representative_round_trip():
    primes = [split_prime(EISENSTEIN, q) for q in (7, 13, 19)]
    n, r = 6, 2
    rng = random.Random(3)
    for _ in range(20):
        exponents = [rng.randint(-r, r) for _ in primes]
        target = make_class(EISENSTEIN, 1, 0, n=n)
        for ideal, e in zip(primes, exponents):
            step = class_embed(ideal, EISENSTEIN, n, sign=1 if e >= 0 else -1)
            for _ in range(abs(e)):
                target = class_op(target, step, "mul")
        vec = smooth_representative(target, primes, r)
        assert vec is not None
        assert vec <= tuple(exponents)
        check = make_class(EISENSTEIN, 1, 0, n=n)
        for ideal, e in zip(primes, vec):
            step = class_embed(ideal, EISENSTEIN, n, sign=1 if e >= 0 else -1)
            for _ in range(abs(e)):
                check = class_op(check, step, "mul")
        assert class_op(check, target, "eq")


def test_smooth_representative_known_value():
    primes = [split_prime(EISENSTEIN, q) for q in (7, 13, 19)]
    n = 6
    target = make_class(EISENSTEIN, 1, 0, n=n)
    for ideal, e in zip(primes, (2, -1, 1)):
        step = class_embed(ideal, EISENSTEIN, n, sign=1 if e >= 0 else -1)
        for _ in range(abs(e)):
            target = class_op(target, step, "mul")
    assert smooth_representative(target, primes, 2) == (-1, -2, 0)


def test_smooth_representative_miss_is_none():
    # at depth 4 the class [q]^2 has order 2 and the single-prime box
    # {-1, 0, 1} only reaches [q]^-1, 1, [q], none of which equal it
    ideal = split_prime(EISENSTEIN, 7)
    e4 = class_embed(ideal, EISENSTEIN, 4)
    sq = class_op(e4, e4, "mul")
    assert not class_op(sq, None, "is_identity")
    assert smooth_representative(sq, [ideal], 1) is None


def test_injectivity_witness_single_prime():
    ideal = split_prime(EISENSTEIN, 7)
    out = exponent_map_injective([ideal], [1], EISENSTEIN, 2)
    assert out["injective"] is False
    assert out["witness"] == ((-1,), (1,))


def test_injectivity_two_primes_by_depth():
    primes = [split_prime(EISENSTEIN, q) for q in (7, 13)]
    for n, expect in ((4, False), (5, False), (6, False), (7, True)):
        out = exponent_map_injective(primes, [2, 2], EISENSTEIN, n)
        assert out["injective"] is expect
        if not expect:
            v1, v2 = out["witness"]
            assert v1 != v2


def test_injectivity_witness_really_collides():
    primes = [split_prime(EISENSTEIN, q) for q in (7, 13)]
    n = 5
    out = exponent_map_injective(primes, [2, 2], EISENSTEIN, n)
    v1, v2 = out["witness"]

    def apply(vec):
        acc = make_class(EISENSTEIN, 1, 0, n=n)
        for ideal, e in zip(primes, vec):
            step = class_embed(ideal, EISENSTEIN, n, sign=1 if e >= 0 else -1)
            for _ in range(abs(e)):
                acc = class_op(acc, step, "mul")
        return acc

    assert class_op(apply(v1), apply(v2), "eq")


def test_min_separation_depths():
    for q, expect in ((7, 4), (13, 4), (19, 5)):
        ideal = split_prime(EISENSTEIN, q)
        assert min_separation_depth(EISENSTEIN, ideal) == expect


def test_min_separation_within_logarithmic_bound():
    import math

    for params, qs in ((EISENSTEIN, (7, 13, 19, 31, 37)), (GAUSSIAN, (5, 13))):
        for q in qs:
            ideal = split_prime(params, q)
            depth = min_separation_depth(params, ideal)
            assert depth <= math.ceil(math.log(q, params.ell)) + 2


def test_min_separation_means_separated():
    ideal = split_prime(EISENSTEIN, 7)
    d = min_separation_depth(EISENSTEIN, ideal)
    for i in range(1, d):
        cls = class_embed(ideal, EISENSTEIN, i)
        assert class_op(class_op(cls, cls, "mul"), None, "is_identity")
    cls = class_embed(ideal, EISENSTEIN, d)
    assert not class_op(class_op(cls, cls, "mul"), None, "is_identity")


def test_serialization_round_trip():
    for n in (0, 1, 3, 5):
        for c in class_enumerate(EISENSTEIN, n):
            blob = json.dumps(c.to_json(), sort_keys=True)
            back = class_from_json(json.loads(blob))
            assert back == c


@given(
    a1=st.integers(0, 255),
    b1=st.integers(0, 255),
    a2=st.integers(0, 255),
    b2=st.integers(0, 255),
)
@settings(max_examples=150, deadline=None)
def test_product_of_units_is_canonical_class(a1, b1, a2, b2):
    n = 8

    def unit_or_none(a, b):
        if (a * a - a * b + b * b) % 2 == 0:
            return None
        return make_class(EISENSTEIN, a, b, n=n)

    x = unit_or_none(a1, b1)
    y = unit_or_none(a2, b2)
    if x is None or y is None:
        return
    prod = class_op(x, y, "mul")
    again = make_class(EISENSTEIN, prod.a, prod.b, n=n)
    assert class_op(prod, again, "eq")
    # commutativity and inverse laws
    assert class_op(prod, class_op(y, x, "mul"), "eq")
    inv = class_op(x, None, "inv")
    assert class_op(class_op(inv, prod, "mul"), y, "eq")


@given(a=st.integers(0, 1023), b=st.integers(0, 1023))
@settings(max_examples=150, deadline=None)
def test_canonicalization_is_idempotent(a, b):
    if (a * a - a * b + b * b) % 2 == 0:
        return
    c = make_class(EISENSTEIN, a, b, n=10)
    again = make_class(EISENSTEIN, c.a, c.b, n=10)
    assert (again.a, again.b) == (c.a, c.b)
