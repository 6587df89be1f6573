"""Graph-level experiments over the isogeny graphs the protocol lives in.

Supersingular vertex enumeration by breadth-first search, depth statistics
for the chain-to-curve forgetful map, volcano decomposition of restricted
subgraphs, and the two worked small-prime scenarios used everywhere else
in the package as ground truth.
"""

import math
from dataclasses import dataclass

from .algebra import create_field, roots_in_fp2
from .chains import act_prime, build_direction_table, children, generate_chain, validate_chain
from .ec import base_curve, j_invariant
from .errors import TooDeep
from .modpoly import instantiate_list
from .quadorder import OrderParams, class_number, kronecker, split_prime

# j-invariants of curves with class-number-one CM, reduced mod p these are
# supersingular whenever the discriminant is inert or ramified at p
_H1_CM_J = (
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884736),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
)


@dataclass(frozen=True)
class GraphReport:
    ell: int
    vertices: tuple
    edges: tuple  # (a, b, multiplicity) with a <= b, multiplicity from a's side
    components: tuple  # tuples of vertices, discovery order
    annotations: tuple  # (vertex, label) pairs, only where unambiguous


@dataclass(frozen=True)
class ForgetfulRow:
    depth: int
    y: int  # distinct end j-invariants at exactly this depth
    x: int  # cumulative distinct j-invariants through this depth
    lam: float  # log_p of the suborder discriminant magnitude
    h: int  # class number at this depth


def ss_count_formula(p):
    """Closed-form count of supersingular j-invariants in characteristic p."""
    extra = {1: 0, 5: 1, 7: 1, 11: 2}[p % 12]
    return p // 12 + extra


def ss_seed_j(field, disc):
    """A supersingular j-invariant: the oriented base curve when the named
    discriminant is inert or ramified at p, else the first class-number-one
    CM discriminant that is."""
    if kronecker(disc, field.p) != 1:
        return j_invariant(base_curve(disc, field))
    for d, j in _H1_CM_J:
        if kronecker(d, field.p) != 1:
            return field.el(j)
    raise AssertionError("unreachable: some tiny discriminant is never split")


def _edge_key(a, b):
    return (a, b) if a <= b else (b, a)


def _bfs(db, field, ell, seeds, allowed=None):
    """Breadth-first closure over modular edges, one restart per seed.

    Returns (vertices in discovery order, canonical edge multiset,
    components in restart order). A vertex set restriction drops any root
    outside it before visiting.
    """
    seen = set()
    order = []
    components = []
    edges = {}
    for seed in seeds:
        if seed in seen or (allowed is not None and seed not in allowed):
            continue
        frontier = [seed]
        seen.add(seed)
        comp = []
        while frontier:
            nxt = []
            for v in frontier:
                comp.append(v)
                order.append(v)
                counts = {}
                for w in roots_in_fp2(field, instantiate_list(db, field, ell, v)):
                    counts[w] = counts.get(w, 0) + 1
                for w, m in sorted(counts.items()):
                    if allowed is not None and w not in allowed:
                        continue
                    a, b = _edge_key(v, w)
                    if (a, b) not in edges or v == a:
                        edges[(a, b)] = m
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        components.append(tuple(sorted(comp)))
    vertices = tuple(sorted(order))
    edge_list = tuple((a, b, m) for (a, b), m in sorted(edges.items()))
    return vertices, edge_list, tuple(components)


def enumerate_ss(db, field, ell, disc):
    """Every supersingular j-invariant, by search from one known vertex.

    The supersingular ell-isogeny graph is connected, so a single
    breadth-first pass reaches the whole set; ss_count_formula gives the
    independent count to compare against.
    """
    seed = ss_seed_j(field, disc)
    vertices, edges, components = _bfs(db, field, ell, (seed,))
    return GraphReport(
        ell=ell,
        vertices=vertices,
        edges=edges,
        components=components,
        annotations=(),
    )


def volcano_components(db, field, ell, j_list, start):
    """Component decomposition of a (possibly restricted) modular graph.

    With a vertex list the walk is confined to it and restarts at the
    smallest unvisited vertex until the list is exhausted, so disconnected
    volcanoes are all reported; without a list this is a single-source
    closure. Vertices with exactly one distinct neighbour are annotated as
    volcano floor; other depths are left unlabeled.
    """
    if j_list is None:
        vertices, edges, components = _bfs(db, field, ell, (start,))
    else:
        allowed = set(j_list)
        assert start in allowed
        seeds = [start] + sorted(allowed)
        vertices, edges, components = _bfs(db, field, ell, seeds, allowed=allowed)
    degree = {}
    for a, b, _m in edges:
        if a != b:
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        else:
            degree[a] = degree.get(a, 0)
    annotations = tuple(
        (v, "floor") for v in vertices if degree.get(v, 0) == 1
    )
    return GraphReport(
        ell=ell,
        vertices=vertices,
        edges=edges,
        components=components,
        annotations=annotations,
    )


def forgetful_table(db, field, ell, disc, max_depth):
    """Depth statistics of the chain-to-end-curve map.

    Walk states are (previous j, current j) pairs, so the level sets are
    exact while the work stays polynomial in the graph size; the stated
    walk-count precondition still caps requested depths.
    """
    if max_depth >= 1 and (ell + 1) * ell ** (max_depth - 1) > 1 << 20:
        raise TooDeep(
            f"depth {max_depth} implies {(ell + 1) * ell ** (max_depth - 1)} walks"
        )
    order = OrderParams(disc=disc, ell=ell)
    base = base_curve(disc, field)
    j0 = j_invariant(base)
    rows = []
    cumulative = {j0}
    frontier = {(None, j0)}
    for depth in range(max_depth + 1):
        ys = {cur for (_prev, cur) in frontier}
        cumulative |= ys
        lam = math.log(abs(disc) * ell ** (2 * depth)) / math.log(field.p)
        rows.append(
            ForgetfulRow(
                depth=depth,
                y=len(ys),
                x=len(cumulative),
                lam=lam,
                h=class_number(order, depth),
            )
        )
        if depth == max_depth:
            break
        nxt = set()
        for prev, cur in frontier:
            for child in children(db, field, ell, cur, prev):
                nxt.add((cur, child))
        frontier = nxt
    return rows


def forgetful_csv(rows):
    lines = ["depth,y,x,lambda,h"]
    for row in rows:
        lines.append(f"{row.depth},{row.y},{row.x},{row.lam:.6f},{row.h}")
    return "\n".join(lines) + "\n"


def to_dot(field, report):
    """GraphViz text for a report; edges carry the modular level."""
    lines = ["graph isogenies {"]
    for v in report.vertices:
        label = field.enc(v)
        notes = [lbl for (w, lbl) in report.annotations if w == v]
        if notes:
            label += " (" + ",".join(notes) + ")"
        lines.append(f'  "{field.enc(v)}" [label="{label}"];')
    for a, b, m in report.edges:
        lines.append(f'  "{field.enc(a)}" -- "{field.enc(b)}" [label="{report.ell}^{m}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def reproduce_71(db, q=7):
    """The four ground-truth facts of the p=71 walkthrough, as a report.

    A depth-4 chain from j=0, its two q-direction images, and the checks:
    the chain is (0,40,17,41,66); images start (0,40); images agree through
    depth 3 ending (48,48); images separate at depth 4 into {40,66}.
    Failures are reported, not raised; setup errors (a non-split q) raise.
    """
    field = create_field(71)
    order = OrderParams(disc=-3, ell=2)
    ideal = split_prime(order, q)
    chain = generate_chain(db, field, 2, -3, 4, 1)
    table = build_direction_table(db, field, 2, -3, (ideal,))
    plus = act_prime(db, chain, ideal, 1, table)
    minus = act_prime(db, chain, ideal, -1, table)
    validate_chain(db, chain, disc=-3)
    expected = tuple(field.el(v) for v in (0, 40, 17, 41, 66))
    facts = {
        "chain_is_expected_walk": chain.js == expected,
        "images_begin_like_source": plus.js[:2] == chain.js[:2]
        and minus.js[:2] == chain.js[:2],
        "images_coincide_through_depth_3": plus.js[:4] == minus.js[:4]
        and plus.js[2:4] == (field.el(48), field.el(48)),
        "images_separate_at_depth_4": {plus.end, minus.end}
        == {field.el(40), field.el(66)},
    }
    return {
        "p": 71,
        "q": q,
        "chain": [field.enc(j) for j in chain.js],
        "image_plus": [field.enc(j) for j in plus.js],
        "image_minus": [field.enc(j) for j in minus.js],
        "facts": facts,
        "all_pass": all(facts.values()),
    }


# the j-invariants of the worked 353 example: a 12-vertex rational slice
# that splits into two 6-vertex volcanoes with craters {160,270}, {230,298}
REPRO_353_JS = (160, 230, 270, 298, 66, 182, 197, 236, 253, 264, 304, 330)


def reproduce_353(db):
    """The F_353 ordinary two-volcano slice, rebuilt from its vertex list."""
    field = create_field(353)
    j_list = [field.el(v) for v in REPRO_353_JS]
    report = volcano_components(db, field, 2, j_list, field.el(160))
    return {
        "p": 353,
        "vertices": [field.enc(v) for v in report.vertices],
        "components": [
            [field.enc(v) for v in comp] for comp in report.components
        ],
        "component_count": len(report.components),
        "floor": [field.enc(v) for (v, lbl) in report.annotations],
        "report": report,
    }
