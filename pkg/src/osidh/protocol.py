"""Key exchange over descending isogeny chains.

Two variants share one class-group engine. The full-disclosure variant
publishes the entire image chain and is deliberately breakable (see the
attack module). The end-curve variant publishes only the final j-invariant
plus short directional q-isogeny chains; the partner consumes its own
exponent's worth of rungs and transports everyone else's chains rung by
rung with modular common-root solving. Everything on the wire is a
j-invariant; no party ever evaluates an explicit isogeny after setup.
"""

import json
import random
import warnings
from dataclasses import dataclass

from .algebra import create_field
from .chains import (
    ModularChain,
    act_prime,
    act_vector,
    build_direction_table,
    chain_from_json,
    chain_to_json,
    generate_chain,
    ladder_step,
    table_from_json,
    table_to_json,
    validate_chain,
)
from .errors import ChainExhausted, InvariantViol, Malformed
from .modpoly import eval_pair
from .quadorder import OrderParams, min_separation_depth, split_prime

WIRE_VERSION = 1


@dataclass(frozen=True)
class PublicParams:
    field: object
    disc: int
    ell: int
    n: int
    chain: ModularChain
    primes: tuple  # SplitPrimeIdeal, ascending q
    r: int
    table: object  # DirectionTable
    seed: int


@dataclass(frozen=True)
class SecretKey:
    exponents: tuple


@dataclass(frozen=True)
class PublicData:
    field: object
    f_n: tuple
    forward: tuple  # per prime: r end j-invariants walking the +1 direction
    backward: tuple  # same for the conjugate direction


@dataclass(frozen=True)
class SharedSecret:
    field: object
    j: tuple


def param_gen(db, p, disc, ell, n, qs, r, seed):
    """Deterministic public parameters: chain, split primes, direction table.

    Warns (never errors) when the exponent box outgrows the chain depth,
    (2r+1)^t > ell^n, since then distinct keys must collide on chains.
    """
    field = create_field(p)
    order = OrderParams(disc=disc, ell=ell)  # validates disc and inert ell
    if n < 1:
        raise InvariantViol(f"chain length n = {n} must be positive")
    if r < 0:
        raise InvariantViol(f"exponent bound r = {r} must be nonnegative")
    qs = tuple(sorted(qs))
    if len(set(qs)) != len(qs):
        raise InvariantViol(f"split primes {qs} must be distinct")
    primes = []
    for q in qs:
        if q in (p, ell):
            raise InvariantViol(f"split prime q = {q} collides with p or ell")
        primes.append(split_prime(order, q))
    primes = tuple(primes)
    if (2 * r + 1) ** len(primes) > ell**n:
        warnings.warn(
            f"(2r+1)^t = {(2 * r + 1) ** len(primes)} exceeds ell^n = {ell**n}; "
            "distinct exponent vectors will collide on chains",
            stacklevel=2,
        )
    chain = generate_chain(db, field, ell, disc, n, seed)
    table = build_direction_table(db, field, ell, disc, primes)
    return PublicParams(
        field=field,
        disc=disc,
        ell=ell,
        n=n,
        chain=chain,
        primes=primes,
        r=r,
        table=table,
        seed=seed,
    )


def keygen(params, seed):
    """Uniform independent exponents in [-r, r], one per split prime."""
    rng = random.Random(seed)
    exps = tuple(rng.randint(-params.r, params.r) for _ in params.primes)
    return SecretKey(exponents=exps)


def _check_key(params, sk):
    if len(sk.exponents) != len(params.primes):
        raise ChainExhausted(
            f"key has {len(sk.exponents)} exponents for {len(params.primes)} primes"
        )
    for e in sk.exponents:
        if abs(e) > params.r:
            raise ChainExhausted(f"exponent {e} exceeds the bound r = {params.r}")


def naive_public(db, params, sk):
    """Full-disclosure public message: the entire image chain."""
    _check_key(params, sk)
    return act_vector(db, params.chain, params.primes, sk.exponents, params.table)


def _check_peer_chain(db, params, other):
    if other.field != params.field or other.ell != params.ell:
        raise InvariantViol(
            "peer chain was built over different public parameters",
            invariant="matching field and ell",
        )
    if other.depth != params.n:
        raise InvariantViol(
            f"peer chain has depth {other.depth}, expected {params.n}",
            invariant="depth n",
        )
    validate_chain(db, other, disc=params.disc)


def naive_shared(db, params, sk, other):
    """Shared secret from a full-disclosure peer message."""
    _check_key(params, sk)
    _check_peer_chain(db, params, other)
    image = act_vector(db, other, params.primes, sk.exponents, params.table)
    return SharedSecret(field=params.field, j=image.end)


def public_data(db, params, sk):
    """End-curve public message: F_n plus r rungs in each q-direction.

    The image chain itself stays private; only end j-invariants of its
    repeated prime actions are emitted.
    """
    _check_key(params, sk)
    image = act_vector(db, params.chain, params.primes, sk.exponents, params.table)
    forward = []
    backward = []
    for ideal in params.primes:
        rows = {1: [], -1: []}
        for sign in (1, -1):
            cur = image
            for _ in range(params.r):
                cur = act_prime(db, cur, ideal, sign, params.table)
                rows[sign].append(cur.end)
        forward.append(tuple(rows[1]))
        backward.append(tuple(rows[-1]))
    return PublicData(
        field=params.field,
        f_n=image.end,
        forward=tuple(forward),
        backward=tuple(backward),
    )


def validate_public_data(db, params, data):
    """Shape plus rung-to-rung modular adjacency in every direction chain."""
    t = len(params.primes)
    if data.field != params.field:
        raise InvariantViol(
            "public data was built over a different field",
            invariant="matching field",
        )
    if len(data.forward) != t or len(data.backward) != t:
        raise InvariantViol(
            f"expected {t} direction chains each way",
            invariant="one chain per split prime",
        )
    for ideal, fwd, bwd in zip(params.primes, data.forward, data.backward):
        for row in (fwd, bwd):
            if len(row) != params.r:
                raise InvariantViol(
                    f"direction chain for q = {ideal.q} has {len(row)} rungs, "
                    f"expected {params.r}",
                    invariant="chains of length r",
                )
            prev = data.f_n
            for rung in row:
                if eval_pair(db, params.field, ideal.q, prev, rung) != params.field.zero:
                    raise InvariantViol(
                        f"consecutive rungs are not {ideal.q}-isogenous",
                        invariant="Phi_q adjacency along direction chains",
                    )
                prev = rung


def derive(db, params, sk, other):
    """Shared secret from an end-curve peer message.

    Walks |e_i| rungs of prime i's chain in the sign(e_i) direction; after
    every single step the still-unconsumed chains of later primes are
    re-based rung by rung through common-root solving, so each remains a
    q_j-chain hanging off the current base curve.
    """
    _check_key(params, sk)
    validate_public_data(db, params, other)
    field = params.field
    base = other.f_n
    fwd = [list(row) for row in other.forward]
    bwd = [list(row) for row in other.backward]
    t = len(params.primes)
    for i, (ideal, e) in enumerate(zip(params.primes, sk.exponents)):
        row = fwd[i] if e > 0 else bwd[i]
        for step in range(abs(e)):
            base = row[step]
            for j in range(i + 1, t):
                qj = params.primes[j].q
                for chains in (fwd, bwd):
                    prev = base
                    moved = []
                    for rung in chains[j]:
                        prev = ladder_step(db, field, qj, ideal.q, prev, rung)
                        moved.append(prev)
                    chains[j] = moved
    return SharedSecret(field=field, j=base)


# -- wire format -----------------------------------------------------------


def _require(obj, key, pointer):
    try:
        return obj[key]
    except (KeyError, TypeError, IndexError):
        raise Malformed(f"missing field at {pointer}/{key}", pointer=f"{pointer}/{key}") from None


def _dec_j(field, s, pointer):
    try:
        return field.dec(s)
    except Exception:
        raise Malformed(f"bad field element at {pointer}", pointer=pointer) from None


def _params_to_obj(params):
    return {
        "osidh_v": WIRE_VERSION,
        "kind": "params",
        "p": str(params.field.p),
        "disc": params.disc,
        "ell": params.ell,
        "n": params.n,
        "r": params.r,
        "seed": params.seed,
        "chain": chain_to_json(params.chain),
        "table": table_to_json(params.table),
    }


def _params_from_obj(db, obj):
    try:
        p = int(_require(obj, "p", ""))
        disc = int(_require(obj, "disc", ""))
        ell = int(_require(obj, "ell", ""))
        n = int(_require(obj, "n", ""))
        r = int(_require(obj, "r", ""))
        seed = int(_require(obj, "seed", ""))
    except ValueError as exc:
        raise Malformed(f"non-integer scalar field: {exc}") from None
    field = create_field(p)
    if n < 1 or r < 0:
        raise InvariantViol("n must be positive and r nonnegative")
    order = OrderParams(disc=disc, ell=ell)
    chain = chain_from_json(db, _require(obj, "chain", ""), disc=disc)
    if chain.field != field or chain.ell != ell or chain.depth != n:
        raise InvariantViol(
            "embedded chain disagrees with the scalar parameters",
            invariant="chain matches (p, ell, n)",
        )
    table = table_from_json(db, field, _require(obj, "table", ""))
    if table.ell != ell or table.disc != disc:
        raise InvariantViol(
            "embedded table disagrees with the scalar parameters",
            invariant="table matches (ell, disc)",
        )
    for ideal in table.primes:
        if ideal.q in (p, ell):
            raise InvariantViol(f"split prime q = {ideal.q} collides with p or ell")
        if ideal != split_prime(order, ideal.q):
            raise InvariantViol(
                f"stored ideal for q = {ideal.q} is not the canonical one",
                invariant="primes regenerate from (disc, q)",
            )
        if table.depths[ideal.q] != min_separation_depth(order, ideal):
            raise InvariantViol(
                f"stored depth for q = {ideal.q} is not the separation depth",
                invariant="table depth equals separation depth",
            )
    qs = tuple(ideal.q for ideal in table.primes)
    if qs != tuple(sorted(set(qs))):
        raise InvariantViol("split primes must be distinct and ascending")
    return PublicParams(
        field=field,
        disc=disc,
        ell=ell,
        n=n,
        chain=chain,
        primes=table.primes,
        r=r,
        table=table,
        seed=seed,
    )


def _public_data_to_obj(data):
    field = data.field
    return {
        "osidh_v": WIRE_VERSION,
        "kind": "public_data",
        "p": str(field.p),
        "f_n": field.enc(data.f_n),
        "fwd": [[field.enc(j) for j in row] for row in data.forward],
        "bwd": [[field.enc(j) for j in row] for row in data.backward],
    }


def _public_data_from_obj(db, params, obj):
    if int(_require(obj, "p", "")) != params.field.p:
        raise InvariantViol(
            "message field does not match the public parameters",
            invariant="matching p",
        )
    field = params.field
    f_n = _dec_j(field, _require(obj, "f_n", ""), "/f_n")
    rows = {}
    for name in ("fwd", "bwd"):
        block = _require(obj, name, "")
        if not isinstance(block, list):
            raise Malformed(f"/{name} must be a list", pointer=f"/{name}")
        decoded = []
        for i, row in enumerate(block):
            if not isinstance(row, list):
                raise Malformed(f"/{name}/{i} must be a list", pointer=f"/{name}/{i}")
            decoded.append(
                tuple(
                    _dec_j(field, s, f"/{name}/{i}/{k}") for k, s in enumerate(row)
                )
            )
        rows[name] = tuple(decoded)
    data = PublicData(field=field, f_n=f_n, forward=rows["fwd"], backward=rows["bwd"])
    validate_public_data(db, params, data)
    return data


def _chain_to_obj(chain):
    return {"osidh_v": WIRE_VERSION, "kind": "chain", **chain_to_json(chain)}


def _chain_from_obj(db, params, obj):
    chain = chain_from_json(db, obj, disc=params.disc)
    _check_peer_chain(db, params, chain)
    return chain


def _shared_to_obj(secret):
    return {
        "osidh_v": WIRE_VERSION,
        "kind": "shared",
        "p": str(secret.field.p),
        "j": secret.field.enc(secret.j),
    }


def _shared_from_obj(params, obj):
    if int(_require(obj, "p", "")) != params.field.p:
        raise InvariantViol(
            "message field does not match the public parameters",
            invariant="matching p",
        )
    return SharedSecret(
        field=params.field, j=_dec_j(params.field, _require(obj, "j", ""), "/j")
    )


def wire_codec(db, payload, direction, params=None):
    """Canonical JSON bytes for the four wire objects.

    Encoding sorts keys and uses decimal strings, so equal objects give
    byte-identical messages. Decoding dispatches on the "kind" tag, runs
    every structural validator, and needs public parameters for everything
    except the parameters themselves.
    """
    if direction == "encode":
        if isinstance(payload, PublicParams):
            obj = _params_to_obj(payload)
        elif isinstance(payload, PublicData):
            obj = _public_data_to_obj(payload)
        elif isinstance(payload, ModularChain):
            obj = _chain_to_obj(payload)
        elif isinstance(payload, SharedSecret):
            obj = _shared_to_obj(payload)
        else:
            raise Malformed(f"cannot encode {type(payload).__name__}")
        return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    if direction != "decode":
        raise Malformed(f"unknown codec direction {direction!r}")
    if isinstance(payload, (bytes, bytearray)):
        payload = payload.decode()
    if isinstance(payload, str):
        try:
            obj = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise Malformed(f"not JSON: {exc}") from None
    else:
        obj = payload
    if not isinstance(obj, dict):
        raise Malformed("top-level JSON value must be an object", pointer="")
    if obj.get("osidh_v") != WIRE_VERSION:
        raise Malformed(
            f"unsupported wire version {obj.get('osidh_v')!r}", pointer="/osidh_v"
        )
    kind = obj.get("kind")
    if kind == "params":
        return _params_from_obj(db, obj)
    if params is None:
        raise Malformed(f"decoding kind {kind!r} requires public parameters")
    try:
        if kind == "public_data":
            return _public_data_from_obj(db, params, obj)
        if kind == "chain":
            return _chain_from_obj(db, params, obj)
        if kind == "shared":
            return _shared_from_obj(params, obj)
    except (TypeError, ValueError) as exc:
        raise Malformed(f"bad wire object: {exc}") from None
    raise Malformed(f"unknown wire kind {kind!r}", pointer="/kind")
