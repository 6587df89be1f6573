"""Classical modular polynomials: load shipped coefficient files, validate,
and instantiate them over a concrete field.

A database maps each level m to the symmetric coefficient table
{(i, j) -> c} with i >= j, entry c standing for c*(X^i Y^j + X^j Y^i) off
the diagonal and c*X^i Y^i on it. Files are validated at load time against
the Kronecker congruence Phi_m = (X^m - Y)(X - Y^m) mod m, which any true
modular polynomial of prime level satisfies coefficient by coefficient.
"""

import os
import re
from typing import NamedTuple

from .errors import MissingLevel, ParseError, ValidationFailed

_LINE_RE = re.compile(r"^\[(\d+)\s+(\d+)\]\s+(-?\d+)\s*$")
_FILE_RE = re.compile(r"^phi_(\d+)\.txt$")

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class InstantiatedModPoly(NamedTuple):
    m: int
    pivot: tuple
    poly: list


class ModPolyDB:
    """Immutable after load; per-field coefficient reductions are cached."""

    def __init__(self, levels):
        self.levels = levels
        self._bound = {}
        self._inst_cache = {}

    def __contains__(self, m):
        return m in self.levels

    def table(self, m):
        try:
            return self.levels[m]
        except KeyError:
            raise MissingLevel(f"modular polynomial level {m} not loaded") from None


def _parse_file(path, m):
    table = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _LINE_RE.match(line)
            if not match:
                col = 1 + len(raw) - len(raw.lstrip())
                raise ParseError(
                    f"{path}:{lineno}: expected '[i j] c'", line=lineno, col=col
                )
            i, j, c = int(match.group(1)), int(match.group(2)), int(match.group(3))
            if i < j:
                raise ParseError(
                    f"{path}:{lineno}: exponents must satisfy i >= j",
                    line=lineno,
                    col=1 + raw.index(match.group(2), raw.index(" ")),
                )
            if (i, j) in table:
                raise ParseError(
                    f"{path}:{lineno}: duplicate entry for ({i}, {j})",
                    line=lineno,
                    col=1,
                )
            if c:
                table[(i, j)] = c
    if not table:
        raise MissingLevel(f"{path}: no entries for level {m}")
    return table


def _is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _validate_level(m, table):
    if table.get((m + 1, 0)) != 1:
        raise ValidationFailed(
            f"level {m}: leading coefficient at ({m + 1}, 0) must be 1"
        )
    top = max(i for i, _ in table)
    if top != m + 1:
        raise ValidationFailed(f"level {m}: degree is {top}, expected {m + 1}")
    if not _is_prime(m):
        return
    # Kronecker congruence, checked as an exact coefficient identity mod m
    expected = {(m + 1, 0): 1, (m, m): -1, (1, 1): -1}
    for key, want in expected.items():
        if table.get(key, 0) % m != want % m:
            raise ValidationFailed(
                f"level {m}: Kronecker congruence fails at {key}"
            )
    for key, c in table.items():
        if c % m != expected.get(key, 0) % m:
            raise ValidationFailed(
                f"level {m}: Kronecker congruence fails at {key}"
            )


def load_db(path=None):
    """Load one phi_m.txt file or every phi_*.txt in a directory.

    The level is taken from the file name. Validation failures name the
    congruence that broke; an empty file raises MissingLevel.
    """
    if path is None:
        path = DATA_DIR
    levels = {}
    if os.path.isdir(path):
        names = sorted(os.listdir(path))
        files = [(n, os.path.join(path, n)) for n in names if _FILE_RE.match(n)]
        if not files:
            raise MissingLevel(f"{path}: no phi_*.txt files found")
    else:
        name = os.path.basename(path)
        if not _FILE_RE.match(name):
            raise ParseError(f"{path}: file name must look like phi_m.txt")
        files = [(name, path)]
    for name, full in files:
        m = int(_FILE_RE.match(name).group(1))
        table = _parse_file(full, m)
        _validate_level(m, table)
        levels[m] = table
    return ModPolyDB(levels)


def _bind(db, field, m):
    key = (field.p, m)
    cols = db._bound.get(key)
    if cols is None:
        table = db.table(m)
        p = field.p
        cols = [[] for _ in range(m + 2)]
        for (i, j), c in table.items():
            cp = c % p
            if not cp:
                continue
            cols[j].append((i, cp))
            if i != j:
                cols[i].append((j, cp))
        cols = [sorted(col) for col in cols]
        db._bound[key] = cols
    return cols


def instantiate_list(db, field, m, x):
    """Phi_m(x, Y) as a bare coefficient list (degree m+1, monic)."""
    key = (field.p, m, x)
    hit = db._inst_cache.get(key)
    if hit is not None:
        return hit
    cols = _bind(db, field, m)
    p, d = field.p, field.d
    xa, xb = x
    pows = [(1, 0)] * (m + 2)
    pa, pb = 1, 0
    for i in range(1, m + 2):
        t1 = pa * xa
        t2 = pb * xb
        pb = ((pa + pb) * (xa + xb) - t1 - t2) % p
        pa = (t1 + t2 * d) % p
        pows[i] = (pa, pb)
    out = []
    for col in cols:
        sa = 0
        sb = 0
        for i, c in col:
            wa, wb = pows[i]
            sa += c * wa
            sb += c * wb
        out.append((sa % p, sb % p))
    if len(db._inst_cache) >= 30000:
        db._inst_cache.clear()
    db._inst_cache[key] = out
    return out


def instantiate(db, field, m, j):
    return InstantiatedModPoly(m=m, pivot=j, poly=instantiate_list(db, field, m, j))


def eval_pair(db, field, m, j1, j2):
    """Phi_m(j1, j2); zero exactly on m-isogenous pairs."""
    poly = instantiate_list(db, field, m, j1)
    acc = (0, 0)
    for c in reversed(poly):
        acc = field.add(field.mul(acc, j2), c)
    return acc
