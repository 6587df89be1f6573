"""Key recovery against the full-disclosure exchange.

Publishing the whole image chain lets an observer rebuild the secret class
level by level down the order tower. The survivor at depth i has exactly
ell lifts at depth i+1 (a coset of the reduction kernel); each lift is
rewritten as a short product of the public split primes and replayed on
the chain prefix, and only the true lift reproduces the published prefix.
Work is linear in the chain depth, against the exponential keyspace.
"""

from dataclasses import dataclass

from .chains import ModularChain, act_vector, validate_chain
from .errors import InvariantViol, NoCandidateSurvives, SmoothSearchExhausted
from .quadorder import (
    OrderParams,
    class_embed,
    class_enumerate,
    class_number,
    class_op,
    kernel_generator,
    make_class,
    smooth_representative,
)


@dataclass(frozen=True)
class LevelRecord:
    depth: int
    candidates: tuple  # classes actually replayed on the prefix
    survivors: tuple  # candidates whose image prefix matched


@dataclass(frozen=True)
class AttackTranscript:
    levels: tuple
    final_class: object
    exponents: object  # exponent vector when a smooth representative exists
    act_calls: int


def _smooth_bounds(r):
    return tuple(dict.fromkeys((r, 2 * r, 4 * r)))


def _smooth(target, primes, r):
    for bound in _smooth_bounds(r):
        vec = smooth_representative(target, primes, bound)
        if vec is not None:
            return vec
    return None


def recover_naive(db, params, e_chain, f_chain):
    """Reconstruct the secret class linking two published chains.

    Keeps every candidate class whose action matches the published prefix,
    deferring rejection of shallow-depth ties to the first level where the
    images differ; at injective parameters the survivor set stays a
    singleton and exactly ell lifts are tested per level.
    """
    if e_chain.field != f_chain.field or e_chain.ell != f_chain.ell:
        raise InvariantViol(
            "chains live in different graphs", invariant="same field and ell"
        )
    if e_chain.depth != f_chain.depth:
        raise InvariantViol(
            f"chain depths {e_chain.depth} and {f_chain.depth} differ",
            invariant="equal depths",
        )
    if e_chain.js[0] != f_chain.js[0]:
        raise InvariantViol(
            "chains start at different base curves", invariant="shared j_0"
        )
    validate_chain(db, e_chain, disc=params.disc)
    validate_chain(db, f_chain, disc=params.disc)

    order = OrderParams(disc=params.disc, ell=params.ell)
    n = e_chain.depth
    field = e_chain.field
    records = []
    act_calls = 0
    survivors = (make_class(order, 1, 0, 0),)
    for depth in range(1, n + 1):
        prefix = ModularChain(field=field, ell=e_chain.ell, js=e_chain.js[: depth + 1])
        want = f_chain.js[: depth + 1]
        if class_number(order, depth) == 1:
            # the whole level acts trivially, so the published prefixes
            # must already agree and the survivor is forced
            if want != prefix.js:
                raise NoCandidateSurvives(
                    f"prefixes differ at depth {depth} where the class group "
                    "is trivial; not a valid transcript"
                )
            survivors = (make_class(order, 1, 0, depth),)
            records.append(
                LevelRecord(depth=depth, candidates=(), survivors=survivors)
            )
            continue
        if depth == 1:
            pool = list(class_enumerate(order, 1))
        else:
            gen = kernel_generator(order, depth)
            pool = []
            for prev in survivors:
                cand = make_class(order, prev.a, prev.b, depth)
                for _ in range(params.ell):
                    if cand not in pool:
                        pool.append(cand)
                    cand = class_op(cand, gen, "mul")
        matched = []
        untestable = []
        for cand in pool:
            vec = _smooth(cand, params.primes, params.r)
            if vec is None:
                untestable.append(cand)
                continue
            image = act_vector(db, prefix, params.primes, vec, params.table)
            act_calls += 1
            if image.js == want:
                matched.append(cand)
        if not matched:
            if untestable:
                raise SmoothSearchExhausted(
                    f"stuck at depth {depth}: {len(untestable)} lift(s) had no "
                    f"smooth representative within bound {4 * params.r}"
                )
            raise NoCandidateSurvives(
                f"no lift reproduces the published prefix at depth {depth}"
            )
        survivors = tuple(matched)
        records.append(
            LevelRecord(depth=depth, candidates=tuple(pool), survivors=survivors)
        )

    final = survivors[0]
    exponents = _smooth(final, params.primes, params.r)
    if exponents is not None:
        replay = act_vector(db, e_chain, params.primes, exponents, params.table)
        act_calls += 1
        assert replay.js == f_chain.js
    return AttackTranscript(
        levels=tuple(records),
        final_class=final,
        exponents=exponents,
        act_calls=act_calls,
    )


def planted_class(params, exponents, depth=None):
    """The class of a secret exponent vector, for judging a recovery."""
    order = OrderParams(disc=params.disc, ell=params.ell)
    n = params.n if depth is None else depth
    acc = make_class(order, 1, 0, n)
    for ideal, e in zip(params.primes, exponents):
        step = class_embed(ideal, order, n, 1 if e >= 0 else -1)
        for _ in range(abs(e)):
            acc = class_op(acc, step, "mul")
    return acc
