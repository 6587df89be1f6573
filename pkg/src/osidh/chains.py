"""Descending modular isogeny chains and the class-group action on them.

A chain is the j-invariant shadow of a descending ell-isogeny walk from the
oriented base curve. The action of a split prime ideal is computed rung by
rung with modular polynomials alone; a precomputed direction table built
from a handful of explicit Vélu ladders disambiguates the two conjugate
directions at shallow depth, where the class groups are too small to
separate them.
"""

import random
from dataclasses import dataclass

from .algebra import (
    create_field,
    pdeg,
    pmod,
    poly_divrem,
    poly_gcd_monic,
    roots_in_fp2,
)
from .ec import (
    base_curve,
    cm_eigenspace_kernel,
    dual_kernel,
    explicit_step,
    j_invariant,
    push_kernel,
    velu,
)
from .errors import (
    Ambiguous,
    Inconsistent,
    InvariantViol,
    Malformed,
    NoRoots,
    ParentNotAdjacent,
    PrefixCollision,
    PrefixMissing,
)
from .modpoly import instantiate_list
from .quadorder import OrderParams, SplitPrimeIdeal, kronecker, min_separation_depth

BASE_J = {-3: 0, -4: 1728}


@dataclass(frozen=True)
class ModularChain:
    field: object
    ell: int
    js: tuple

    @property
    def depth(self):
        return len(self.js) - 1

    @property
    def end(self):
        return self.js[-1]


@dataclass(frozen=True)
class DirectionTable:
    ell: int
    disc: int
    depths: dict  # q -> separation depth i0(q)
    entries: dict  # (q, sign, source prefix tuple) -> image prefix tuple
    primes: tuple  # SplitPrimeIdeal values, for serialization and lookups


def children(db, field, ell, j_cur, j_prev=None):
    """Multiset of next rungs: roots of Phi_ell(j_cur, Y), parent removed once."""
    poly = instantiate_list(db, field, ell, j_cur)
    if j_prev is not None:
        quot, rem = poly_divrem(field, poly, [field.neg(j_prev), field.one])
        if rem:
            raise ParentNotAdjacent(
                f"{field.enc(j_prev)} is not ell-adjacent to {field.enc(j_cur)}"
            )
        poly = quot
    return sorted(roots_in_fp2(field, poly))


def generate_chain(db, field, ell, disc, n, seed):
    """A uniformly seeded descending chain of length n from the base curve."""
    if kronecker(disc, ell) != -1:
        raise InvariantViol(
            f"ell = {ell} is not inert under disc {disc}",
            invariant="Kronecker(disc, ell) = -1",
        )
    base = base_curve(disc, field)  # raises BadOrientation when p splits
    js = [j_invariant(base)]
    rng = random.Random(seed)
    prev = None
    for _ in range(n):
        options = children(db, field, ell, js[-1], prev)
        if not options:
            raise NoRoots(
                f"no continuation below {field.enc(js[-1])}; "
                "parameters are misconfigured"
            )
        prev = js[-1]
        js.append(options[rng.randrange(len(options))])
    return ModularChain(field=field, ell=ell, js=tuple(js))


def validate_chain(db, chain, disc=None):
    """Check the chain invariants; raises InvariantViol on any failure."""
    field = chain.field
    js = chain.js
    if not js:
        raise InvariantViol("empty chain", invariant="starts at the base")
    if disc is not None and js[0] != field.el(BASE_J[disc]):
        raise InvariantViol(
            f"chain starts at {field.enc(js[0])}, not the base j-invariant",
            invariant="j_0 = j(base curve)",
        )
    for i in range(len(js) - 1):
        prev = js[i - 1] if i >= 1 else None
        try:
            opts = children(db, field, chain.ell, js[i], prev)
        except ParentNotAdjacent:
            raise InvariantViol(
                f"rungs {i - 1}..{i} are not adjacent",
                invariant="Phi_ell(j_i, j_i+1) = 0",
            )
        if js[i + 1] not in opts:
            raise InvariantViol(
                f"rung {i + 1} is not a non-backtracking continuation",
                invariant="j_i+1 roots Phi_ell(j_i, Y) / (Y - j_i-1)",
            )


def _conjugate(ideal, disc):
    t = disc & 1
    a, b = ideal.generator
    return SplitPrimeIdeal(
        q=ideal.q,
        lam=ideal.lam_conj,
        lam_conj=ideal.lam,
        generator=(a - t * b, -b),
    )


def build_direction_table(db, field, ell, disc, primes):
    """Tabulate the +/-q images of every shallow non-backtracking prefix.

    For each prime, every oriented prefix of length up to the separation
    depth is walked with explicit isogenies while the q-eigenspace kernel
    is pushed along; the j-shadow of the parallel ladder is stored. Distinct
    oriented walks sharing a j-prefix must agree on the image j-prefix, or
    the parameters are outside the injectivity regime.
    """
    params = OrderParams(disc=disc, ell=ell)
    base = base_curve(disc, field)
    j0 = j_invariant(base)
    depths = {}
    entries = {}
    for ideal in primes:
        i0 = min_separation_depth(params, ideal)
        depths[ideal.q] = i0
        psis = {
            1: velu(base, cm_eigenspace_kernel(base, ideal)),
            -1: velu(base, cm_eigenspace_kernel(base, _conjugate(ideal, disc))),
        }
        for sign in (1, -1):
            entries[(ideal.q, sign, (j0,))] = (j0,)

        def record(q, sign, prefix, image):
            key = (q, sign, prefix)
            stored = entries.get(key)
            if stored is None:
                entries[key] = image
            elif stored != image:
                raise PrefixCollision(
                    f"prefix {[field.enc(j) for j in prefix]} has two distinct "
                    f"q={q} images; enlarge p"
                )

        def walk(E, psi_by_sign, prefix, img_by_sign, exclude, depth):
            if depth == i0:
                return
            prev = prefix[-2] if len(prefix) >= 2 else None
            for j_next in set(children(db, field, ell, prefix[-1], prev)):
                phi = explicit_step(E, ell, j_next, exclude=exclude)
                new_imgs = {}
                new_psis = {}
                for sign in (1, -1):
                    psi = psi_by_sign[sign]
                    step_img = velu(
                        psi.codomain, push_kernel(psi, phi.kernel)
                    )
                    new_imgs[sign] = img_by_sign[sign] + (
                        j_invariant(step_img.codomain),
                    )
                    new_psis[sign] = velu(
                        phi.codomain, push_kernel(phi, psi.kernel)
                    )
                new_prefix = prefix + (j_next,)
                for sign in (1, -1):
                    record(ideal.q, sign, new_prefix, new_imgs[sign])
                walk(
                    phi.codomain,
                    new_psis,
                    new_prefix,
                    new_imgs,
                    dual_kernel(phi),
                    depth + 1,
                )

        walk(base, psis, (j0,), {1: (j0,), -1: (j0,)}, None, 0)
    return DirectionTable(
        ell=ell,
        disc=disc,
        depths=depths,
        entries=entries,
        primes=tuple(primes),
    )


def ladder_step(db, field, ell, q, j_child_prev, j_parent_next):
    """The next image rung: common root of Phi_ell(j'_i, Y) and Phi_q(j_i+1, Y)."""
    f = instantiate_list(db, field, ell, j_child_prev)
    g = instantiate_list(db, field, q, j_parent_next)
    gcd = poly_gcd_monic(field, f, g)
    deg = pdeg(gcd)
    if deg == 1:
        return field.neg(gcd[0])
    if deg <= 0:
        raise Inconsistent(
            f"no common continuation below {field.enc(j_child_prev)} / "
            f"{field.enc(j_parent_next)}"
        )
    raise Ambiguous(
        f"{deg} common continuations below {field.enc(j_child_prev)}; "
        "j-collision at this depth"
    )


def act_prime(db, chain, ideal, sign, table):
    """Image of the chain under the ideal (sign=+1) or its conjugate (-1)."""
    field = chain.field
    q = ideal.q
    if q not in table.depths:
        raise PrefixMissing(f"direction table does not cover q = {q}")
    i0 = min(table.depths[q], chain.depth)
    key = (q, sign, chain.js[: i0 + 1])
    image = table.entries.get(key)
    if image is None:
        raise PrefixMissing(
            f"prefix of length {i0} absent from the q = {q} table"
        )
    image = list(image)
    for i in range(i0, chain.depth):
        image.append(
            ladder_step(db, field, chain.ell, q, image[-1], chain.js[i + 1])
        )
    return ModularChain(field=field, ell=chain.ell, js=tuple(image))


def act_vector(db, chain, primes, exponents, table):
    """Iterated prime action: |e_i| steps in direction sign(e_i), in order."""
    assert len(primes) == len(exponents)
    cur = chain
    for ideal, e in zip(primes, exponents):
        sign = 1 if e >= 0 else -1
        for _ in range(abs(e)):
            cur = act_prime(db, cur, ideal, sign, table)
    return cur


# -- serialization -------------------------------------------------------------


def chain_to_json(chain):
    return {
        "p": str(chain.field.p),
        "ell": chain.ell,
        "j": [chain.field.enc(j) for j in chain.js],
    }


def chain_from_json(db, obj, disc=None):
    try:
        field = create_field(int(obj["p"]))
        ell = int(obj["ell"])
        js = tuple(field.dec(s) for s in obj["j"])
    except (KeyError, TypeError, ValueError) as exc:
        raise Malformed(f"bad chain encoding: {exc}") from None
    chain = ModularChain(field=field, ell=ell, js=js)
    validate_chain(db, chain, disc=disc)
    return chain


def table_to_json(table):
    primes = []
    for ideal in table.primes:
        rows = []
        for (q, sign, prefix), image in sorted(
            table.entries.items(),
            key=lambda kv: (kv[0][0], -kv[0][1], kv[0][2]),
        ):
            if q != ideal.q:
                continue
            rows.append(
                {
                    "sign": sign,
                    "source": [f"{a}+{b}*u" for (a, b) in prefix],
                    "image": [f"{a}+{b}*u" for (a, b) in image],
                }
            )
        primes.append(
            {
                "q": ideal.q,
                "lam": ideal.lam,
                "lam_conj": ideal.lam_conj,
                "generator": list(ideal.generator),
                "depth": table.depths[ideal.q],
                "rows": rows,
            }
        )
    return {"v": 1, "ell": table.ell, "disc": table.disc, "primes": primes}


def table_from_json(db, field, obj):
    try:
        if obj["v"] != 1:
            raise Malformed(f"unknown direction-table version {obj['v']}")
        ell = int(obj["ell"])
        disc = int(obj["disc"])
        depths = {}
        entries = {}
        primes = []
        for block in obj["primes"]:
            q = int(block["q"])
            ideal = SplitPrimeIdeal(
                q=q,
                lam=int(block["lam"]),
                lam_conj=int(block["lam_conj"]),
                generator=tuple(int(x) for x in block["generator"]),
            )
            primes.append(ideal)
            depths[q] = int(block["depth"])
            for row in block["rows"]:
                source = tuple(field.dec(s) for s in row["source"])
                image = tuple(field.dec(s) for s in row["image"])
                entries[(q, int(row["sign"]), source)] = image
    except (KeyError, TypeError, ValueError) as exc:
        raise Malformed(f"bad direction-table encoding: {exc}") from None
    table = DirectionTable(
        ell=ell, disc=disc, depths=depths, entries=entries, primes=tuple(primes)
    )
    _validate_table(db, field, table)
    return table


def _validate_table(db, field, table):
    j0 = field.el(BASE_J[table.disc])
    for (q, sign, source), image in table.entries.items():
        if len(source) != len(image):
            raise InvariantViol(
                "source and image prefixes differ in length",
                invariant="equal ladder lengths",
            )
        if source[0] != j0 or image[0] != j0:
            raise InvariantViol(
                "prefix does not start at the base j-invariant",
                invariant="j_0 = j(base curve)",
            )
        chain = ModularChain(field=field, ell=table.ell, js=source)
        try:
            validate_chain(db, chain, disc=table.disc)
        except InvariantViol:
            raise InvariantViol(
                "stored source prefix is not a valid chain prefix",
                invariant="prefixes are chain prefixes",
            )
        for a, b in zip(source, image):
            col = instantiate_list(db, field, q, a)
            if pmod(field, col, [field.neg(b), field.one]):
                raise InvariantViol(
                    f"rung pair fails the degree-{q} modular relation",
                    invariant="Phi_q(j_i, j'_i) = 0",
                )
