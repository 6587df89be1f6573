"""Break a naive-mode exchange end to end and print the transcript.

Two parties publish their full image chains (the naive protocol), an
eavesdropper lifts the secret class level by level from the public chains
alone, converts it to a short exponent vector, and recomputes the shared
secret. Exits nonzero if the recovered secret disagrees.
"""

import argparse
import json
import sys
import time

sys.path.insert(0, "src")

from osidh.attack import recover_naive
from osidh.chains import act_vector
from osidh.modpoly import load_db
from osidh.protocol import keygen, naive_public, naive_shared, param_gen


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=4194329)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--primes", default="7,13,19")
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    db = load_db()
    primes = tuple(int(s) for s in args.primes.split(","))
    params = param_gen(db, args.p, -3, 2, args.n, primes, args.r, args.seed)
    sk_a = keygen(params, args.seed + 1)
    sk_b = keygen(params, args.seed + 2)
    pub_a = naive_public(db, params, sk_a)
    pub_b = naive_public(db, params, sk_b)
    honest = naive_shared(db, params, sk_a, pub_b)

    t0 = time.time()
    transcript = recover_naive(db, params, params.chain, pub_a)
    recovered = transcript.exponents
    assert recovered is not None, "no smooth representative at these bounds"
    stolen = act_vector(db, pub_b, params.primes, recovered, params.table)
    elapsed = time.time() - t0

    report = {
        "p": str(args.p),
        "n": args.n,
        "primes": list(primes),
        "alice_secret": list(sk_a.exponents),
        "recovered": list(recovered),
        "act_calls": transcript.act_calls,
        "seconds": round(elapsed, 3),
        "broken": stolen.end == honest.j,
    }
    print(json.dumps(report, indent=2))
    return 0 if report["broken"] else 1


if __name__ == "__main__":
    sys.exit(main())
