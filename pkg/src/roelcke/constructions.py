"""Certificate-producing witness constructions.

Every existence statement the library relies on is realized here by a
deterministic algorithm: a prefix map with a prescribed trace, a pair whose
composition has the composed trace, stabilizer elements putting two maps
with equal traces in the same double coset, finite nets, cluster-point
certificates for relation products, and the transitivity witnesses used to
move clopen sets around.  Free choices are always resolved the same way:
iterate index pairs in lexicographic order and subdivide clopen sets with
split_clopen, so equal inputs give byte-equal outputs.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from . import finrel, homeo, towers
from .cantor import (
    ClopenSet,
    Partition,
    complement_clopen,
    level_partition,
    split_clopen,
)
from .errors import BudgetError, PreconditionError, ValidationError
from .finrel import IndexRelation
from .homeo import PrefixMap, Rule, map_clopen
from .towers import RelationTower


def _check_realizable(gamma: Partition, r: IndexRelation) -> None:
    if r.size != gamma.size:
        raise ValidationError(
            f"relation on {r.size} indices does not match a "
            f"{gamma.size}-block partition"
        )
    if not finrel.is_e0(r):
        raise ValidationError(
            "relation lacks full domain or range; no homeomorphism has this trace"
        )


def _disjoint_union(pieces: List[ClopenSet]) -> ClopenSet:
    words: List[str] = []
    for p in pieces:
        words.extend(p.cylinders)
    return ClopenSet(words)


def realize(gamma: Partition, r: IndexRelation) -> PrefixMap:
    """A prefix map whose trace at gamma is exactly r.

    Each block U_a splits into one piece per pair (a, b) of r, each U_b
    into one piece per pair (a, b), and the map carries the (a, b) domain
    piece onto the (a, b) range piece.
    """
    _check_realizable(gamma, r)
    rows: Dict[int, List[int]] = {}
    cols: Dict[int, List[int]] = {}
    for a, b in r.pairs:
        rows.setdefault(a, []).append(b)
        cols.setdefault(b, []).append(a)
    W: Dict[Tuple[int, int], ClopenSet] = {}
    for a, bs in rows.items():
        for b, piece in zip(bs, split_clopen(gamma.blocks[a], len(bs))):
            W[(a, b)] = piece
    Wp: Dict[Tuple[int, int], ClopenSet] = {}
    for b, as_ in cols.items():
        for a, piece in zip(as_, split_clopen(gamma.blocks[b], len(as_))):
            Wp[(a, b)] = piece
    rules: List[Rule] = []
    for key in r.pairs:
        rules.extend(map_clopen(W[key], Wp[key]))
    return PrefixMap(rules)


def joint_realize(
    lam: Partition, r: IndexRelation, s: IndexRelation
) -> Tuple[PrefixMap, PrefixMap]:
    """Maps (f, g) with trace(f) = r, trace(g) = s and trace(fg) = rs at lam.

    Each block U_c splits into pieces V[a, c, b] over the pairs (a, c) of s
    and (c, b) of r.  Row unions of the V pieces are the targets of g, column
    unions are the sources of f; the sources of g subdivide each U_a along
    s, the targets of f subdivide each U_b along r.  Composing then threads
    U_a through U_c into U_b exactly when the composed relation allows it.
    """
    _check_realizable(lam, r)
    _check_realizable(lam, s)
    s_cols: Dict[int, List[int]] = {}
    s_rows: Dict[int, List[int]] = {}
    for a, c in s.pairs:
        s_cols.setdefault(c, []).append(a)
        s_rows.setdefault(a, []).append(c)
    r_rows: Dict[int, List[int]] = {}
    r_cols: Dict[int, List[int]] = {}
    for c, b in r.pairs:
        r_rows.setdefault(c, []).append(b)
        r_cols.setdefault(b, []).append(c)

    V: Dict[Tuple[int, int, int], ClopenSet] = {}
    for c in range(lam.size):
        trips = [(a, b) for a in s_cols[c] for b in r_rows[c]]
        for (a, b), piece in zip(trips, split_clopen(lam.blocks[c], len(trips))):
            V[(a, c, b)] = piece

    W = {
        (c, b): _disjoint_union([V[(a, c, b)] for a in s_cols[c]])
        for c, b in r.pairs
    }
    Yp = {
        (a, c): _disjoint_union([V[(a, c, b)] for b in r_rows[c]])
        for a, c in s.pairs
    }
    Wp: Dict[Tuple[int, int], ClopenSet] = {}
    for b, cs in r_cols.items():
        for c, piece in zip(cs, split_clopen(lam.blocks[b], len(cs))):
            Wp[(c, b)] = piece
    Y: Dict[Tuple[int, int], ClopenSet] = {}
    for a, cs in s_rows.items():
        for c, piece in zip(cs, split_clopen(lam.blocks[a], len(cs))):
            Y[(a, c)] = piece

    f_rules: List[Rule] = []
    for key in r.pairs:
        f_rules.extend(map_clopen(W[key], Wp[key]))
    g_rules: List[Rule] = []
    for key in s.pairs:
        g_rules.extend(map_clopen(Y[key], Yp[key]))
    return PrefixMap(f_rules), PrefixMap(g_rules)


@dataclass(frozen=True)
class DoubleCosetCertificate:
    """Witness that f lies in the double coset V_gamma g V_gamma."""

    u: PrefixMap
    v: PrefixMap
    gamma: Partition
    f: PrefixMap
    g: PrefixMap

    def check(self) -> bool:
        return (
            homeo.in_stabilizer(self.u, self.gamma)
            and homeo.in_stabilizer(self.v, self.gamma)
            and self.f
            == homeo.compose(homeo.invert(self.u), homeo.compose(self.g, self.v))
        )


def double_coset_witness(
    gamma: Partition, f: PrefixMap, g: PrefixMap
) -> DoubleCosetCertificate:
    """Stabilizer elements u, v with f = u^-1 g v, given equal traces.

    u is assembled from the pieces f(U_a) n U_b -> g(U_a) n U_b over the
    common trace, so u f and g agree block-by-block; v = g^-1 u f then fixes
    every block.
    """
    t = homeo.trace(f, gamma)
    if t != homeo.trace(g, gamma):
        raise PreconditionError(
            "traces at gamma differ; the maps lie in distinct double cosets"
        )
    f_imgs = [homeo.image_clopen(f, U) for U in gamma.blocks]
    g_imgs = [homeo.image_clopen(g, U) for U in gamma.blocks]
    u_rules: List[Rule] = []
    for a, b in t.pairs:
        P = f_imgs[a].intersect(gamma.blocks[b])
        Q = g_imgs[a].intersect(gamma.blocks[b])
        u_rules.extend(map_clopen(P, Q))
    u = PrefixMap(u_rules)
    v = homeo.compose(homeo.invert(g), homeo.compose(u, f))
    cert = DoubleCosetCertificate(u=u, v=v, gamma=gamma, f=f, g=g)
    if not cert.check():
        raise RuntimeError("internal error: double coset certificate failed")
    return cert


def roelcke_net(gamma: Partition) -> Tuple[PrefixMap, ...]:
    """One realization per trace value: a finite net meeting every coset.

    Every prefix map f satisfies f in V_gamma h V_gamma for the member h
    realizing trace(f, gamma), certifiable via double_coset_witness.
    """
    return tuple(realize(gamma, r) for r in finrel.enumerate_e0(gamma.size))


@dataclass(frozen=True)
class ClusterCertificate:
    """Witness that the product tower clusters at its level-n neighbourhood.

    The pair (f, g) realizes the operands' level-m traces jointly, and the
    composition's level-n trace equals the product's.
    """

    f: PrefixMap
    g: PrefixMap
    level: int
    refinement_level: int


def cluster_witness(
    R: RelationTower, S: RelationTower, n: int, cap: int = towers.LEVEL_CAP
) -> ClusterCertificate:
    """Group elements near R and S whose product is level-n-close to RS.

    Finds the least refinement level m >= n at which the composed traces
    project onto the product's level-n trace, then jointly realizes the
    level-m traces.
    """
    if not (R.exact and S.exact):
        raise ValidationError(
            "cluster_witness needs certified-exact towers on both sides"
        )
    RS = towers.product(R, S, 0)
    target = RS.trace_level(n)
    m = n
    while True:
        if m > cap:
            raise BudgetError(
                f"cluster search passed level {cap} without stabilizing"
            )
        comp = finrel.compose(R.trace_level(m), S.trace_level(m))
        if towers.project_relation(comp, m, n) == target:
            break
        m += 1
    f, g = joint_realize(level_partition(m), R.trace_level(m), S.trace_level(m))
    return ClusterCertificate(f=f, g=g, level=n, refinement_level=m)


def _shrunk_target(V: ClopenSet) -> ClopenSet:
    # The first cylinder extended by 0: a proper non-empty subset, leaving
    # its sibling free so the range complement below stays non-empty.
    return ClopenSet([V.cylinders[0] + "0"])


def dense_orbit_witness(
    U1: ClopenSet, U2: ClopenSet, V1: ClopenSet, V2: ClopenSet
) -> PrefixMap:
    """A map sending U1 into V1 and U2 into V2 simultaneously.

    The targets shrink to single small cylinders so the complement of the
    range pieces is non-empty even when V1 and V2 jointly cover the space.
    """
    if U1.is_empty() or U2.is_empty():
        raise PreconditionError("U1 and U2 must be non-empty")
    if U1.meets(U2):
        raise PreconditionError("U1 and U2 must be disjoint")
    dom_rest = complement_clopen(U1.union(U2))
    if dom_rest.is_empty():
        raise PreconditionError("U1 and U2 must not cover the space")
    if V1.is_empty() or V2.is_empty():
        raise PreconditionError("V1 and V2 must be non-empty")
    if V1.meets(V2):
        raise PreconditionError("V1 and V2 must be disjoint")
    T1 = _shrunk_target(V1)
    T2 = _shrunk_target(V2)
    ran_rest = complement_clopen(T1.union(T2))
    rules: List[Rule] = []
    rules.extend(map_clopen(U1, T1))
    rules.extend(map_clopen(U2, T2))
    rules.extend(map_clopen(dom_rest, ran_rest))
    f = PrefixMap(rules)
    if homeo.image_clopen(f, U1) != T1 or homeo.image_clopen(f, U2) != T2:
        raise RuntimeError("internal error: dense orbit witness failed")
    return f


def conjugation_witness(
    f: PrefixMap, U: ClopenSet, V: ClopenSet
) -> Tuple[PrefixMap, PrefixMap]:
    """A conjugate g = h f h^-1 with g(U) = V, via h fixing U.

    h is the identity on U, carries f(U) onto V, and matches up the two
    remainders; conjugating then replaces the target of U while keeping
    its source."""
    if U.is_empty():
        raise PreconditionError("U must be non-empty")
    fU = homeo.image_clopen(f, U)
    if fU.meets(U):
        raise PreconditionError("f(U) must be disjoint from U")
    dom_rest = complement_clopen(U.union(fU))
    if dom_rest.is_empty():
        raise PreconditionError("U and f(U) must not cover the space")
    if V.is_empty():
        raise PreconditionError("V must be non-empty")
    if V.meets(U):
        raise PreconditionError("V must lie in the complement of U")
    ran_rest = complement_clopen(U.union(V))
    if ran_rest.is_empty():
        raise PreconditionError("U and V must not cover the space")
    rules: List[Rule] = [(w, w) for w in U.cylinders]
    rules.extend(map_clopen(fU, V))
    rules.extend(map_clopen(dom_rest, ran_rest))
    h = PrefixMap(rules)
    g = homeo.compose(h, homeo.compose(f, homeo.invert(h)))
    if homeo.image_clopen(g, U) != V:
        raise RuntimeError("internal error: conjugation witness failed")
    return h, g
