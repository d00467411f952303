"""Closed relations on the Cantor square as coherent towers of finite traces.

A tower serves, for every level n, the trace of its relation at the
canonical level-n partition: the set of index pairs (a, b) whose rectangle
meets the relation.  Certified-exact towers are normalized to one of two
stored shapes:

  graph(f)          the graph of a prefix-exchange homeomorphism;
  clopen(n, seed)   a union of level-n rectangles, seed in E_0(2^n).

Products of exact towers are always exact here (graph x graph composes the
maps, clopen x clopen composes refined seeds at the common level, and a
graph against a clopen is a homeomorphic image, again a clopen at a deeper
level).  The superset-approximation kind therefore only arises through
`approximate_product`, which freezes the composition of the operands'
budget-level traces and serves projections of it; above the budget it
raises a budget error.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from . import finrel, homeo
from .cantor import ClopenSet, Partition, index_of_word, word_of_index
from .errors import BudgetError, ValidationError
from .finrel import IndexRelation
from .homeo import PrefixMap

# Level-indexed traces allocate 2^n x 2^n structures; this cap turns
# over-deep requests into budget errors long before the word-depth cap.
LEVEL_CAP = 10

Side = str  # "left" | "right"


def _check_level(n: int) -> int:
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"level must be a non-negative integer, got {n!r}")
    if n > LEVEL_CAP:
        raise BudgetError(f"level {n} exceeds the trace level cap {LEVEL_CAP}")
    return n


def project_relation(r: IndexRelation, m: int, n: int) -> IndexRelation:
    """Project a level-m trace to level n <= m by truncating indices."""
    if n > m:
        raise ValidationError(f"cannot project level {m} up to level {n}")
    if r.size != 1 << m:
        raise ValidationError(f"relation size {r.size} is not 2^{m}")
    s = m - n
    return IndexRelation(1 << n, {(a >> s, b >> s) for a, b in r.pairs})


def refine_relation(r: IndexRelation, n: int, m: int) -> IndexRelation:
    """Refine a level-n rectangle seed to the full level-m rectangle trace."""
    if m < n:
        raise ValidationError(f"cannot refine level {n} down to level {m}")
    if r.size != 1 << n:
        raise ValidationError(f"relation size {r.size} is not 2^{n}")
    _check_level(m)
    s = m - n
    if s == 0:
        return r
    k = 1 << m
    block = (1 << (1 << s)) - 1
    rows_by_a = {}
    for a, b in r.pairs:
        rows_by_a[a] = rows_by_a.get(a, 0) | (block << (b << s))
    bits = 0
    for a, row in rows_by_a.items():
        chunk = 0
        for _ in range(1 << s):
            chunk = (chunk << k) | row
        bits |= chunk << ((a << s) * k)
    return IndexRelation._from_bits(k, bits)


class RelationTower:
    """A closed relation on the Cantor square, queried by level traces."""

    def __init__(
        self,
        kind: str,
        *,
        f: Optional[PrefixMap] = None,
        level: int = 0,
        seed: Optional[IndexRelation] = None,
    ):
        if kind not in ("graph", "clopen", "approx"):
            raise ValidationError(f"unknown tower kind {kind!r}")
        if kind == "graph":
            if not isinstance(f, PrefixMap):
                raise ValidationError("graph towers need a PrefixMap")
        else:
            _check_level(level)
            if not isinstance(seed, IndexRelation):
                raise ValidationError("clopen towers need an IndexRelation seed")
            if seed.size != 1 << level:
                raise ValidationError(
                    f"seed size {seed.size} does not match level {level}"
                )
            if not finrel.is_e0(seed):
                raise ValidationError(
                    "clopen tower seed must have full domain and range"
                )
        self.kind = kind
        self.f = f
        self.level = level
        self.seed = seed
        self._memo = {}

    @property
    def exact(self) -> bool:
        return self.kind != "approx"

    def trace_level(self, n: int) -> IndexRelation:
        """The trace at the canonical level-n partition."""
        _check_level(n)
        got = self._memo.get(n)
        if got is not None:
            return got
        if self.kind == "graph":
            out = homeo.level_trace(self.f, n)
        elif self.kind == "clopen":
            if n >= self.level:
                out = refine_relation(self.seed, self.level, n)
            else:
                out = project_relation(self.seed, self.level, n)
        else:
            if n > self.level:
                raise BudgetError(
                    f"approximate tower only certified up to level {self.level}"
                )
            out = project_relation(self.seed, self.level, n)
        self._memo[n] = out
        return out

    def __repr__(self) -> str:
        if self.kind == "graph":
            return f"RelationTower(graph {self.f!r})"
        return f"RelationTower({self.kind} level={self.level} seed={self.seed!r})"


def graph_tower(f: PrefixMap) -> RelationTower:
    return RelationTower("graph", f=f)


def clopen_tower(level: int, seed: IndexRelation) -> RelationTower:
    return RelationTower("clopen", level=level, seed=seed)


def identity_tower() -> RelationTower:
    return graph_tower(homeo.identity())


def full_tower() -> RelationTower:
    return clopen_tower(0, finrel.full(1))


def trace_at(T: RelationTower, gamma: Union[Partition, int]) -> IndexRelation:
    """Trace at a canonical level (int) or an arbitrary partition."""
    if isinstance(gamma, int):
        return T.trace_level(gamma)
    if not isinstance(gamma, Partition):
        raise ValidationError("trace_at expects a level or a Partition")
    if gamma.is_canonical_level():
        return T.trace_level(len(gamma.blocks).bit_length() - 1)
    m = _check_level(gamma.max_word_length())
    fine = T.trace_level(m)
    block_of = [gamma.block_of_word(word_of_index(i, m)) for i in range(1 << m)]
    return IndexRelation(
        gamma.size, {(block_of[a], block_of[b]) for a, b in fine.pairs}
    )


def involute(T: RelationTower) -> RelationTower:
    """The transposed relation; exact iff T is."""
    if T.kind == "graph":
        return graph_tower(homeo.invert(T.f))
    return RelationTower(T.kind, level=T.level, seed=finrel.transpose(T.seed))


def _cyl_col_mask(img: ClopenSet, L: int) -> int:
    """Bitmask of the level-L indices covered by a clopen set."""
    mask = 0
    for w in img.cylinders:
        sh = L - len(w)
        if sh < 0:
            raise BudgetError(f"image cylinder deeper than level {L}")
        mask |= ((1 << (1 << sh)) - 1) << (index_of_word(w) << sh)
    return mask


def _graph_times_clopen(
    f: PrefixMap, T: RelationTower, graph_on_left: bool
) -> RelationTower:
    # Left: {(x, f(y)) : (x, y) in R}, rectangles cyl(a) x f(cyl(b)).
    # Right: {(x, y) : (f(x), y) in R}, rectangles f^-1(cyl(a)) x cyl(b).
    n = T.level
    seed = T.seed
    L = n + f.depth()
    _check_level(L)
    k = 1 << L
    s = L - n
    block = (1 << (1 << s)) - 1
    g = f if graph_on_left else homeo.invert(f)
    cache = {}
    bits = 0
    for a, b in seed.pairs:
        if graph_on_left:
            col = cache.get(b)
            if col is None:
                img = homeo.image_clopen(g, ClopenSet([word_of_index(b, n)]))
                col = cache[b] = _cyl_col_mask(img, L)
            for aa in range(a << s, (a + 1) << s):
                bits |= col << (aa * k)
        else:
            rows = cache.get(a)
            if rows is None:
                img = homeo.image_clopen(g, ClopenSet([word_of_index(a, n)]))
                rows = []
                for w in img.cylinders:
                    sh = L - len(w)
                    start = index_of_word(w) << sh
                    rows.extend(range(start, start + (1 << sh)))
                cache[a] = rows
            col = block << (b << s)
            for aa in rows:
                bits |= col << (aa * k)
    return clopen_tower(L, IndexRelation._from_bits(k, bits))


def product(T1: RelationTower, T2: RelationTower, budget: int) -> RelationTower:
    """The composition T1 T2 (T2 acts first), exact whenever both are.

    With an approximate operand the result is the budget-frozen
    approximation of the operands' level-budget traces.
    """
    if T1.exact and T2.exact:
        if T1.kind == "graph" and T2.kind == "graph":
            return graph_tower(homeo.compose(T1.f, T2.f))
        if T1.kind == "clopen" and T2.kind == "clopen":
            m = max(T1.level, T2.level)
            r = refine_relation(T1.seed, T1.level, m)
            s = refine_relation(T2.seed, T2.level, m)
            return clopen_tower(m, finrel.compose(r, s))
        if T1.kind == "graph":
            return _graph_times_clopen(T1.f, T2, graph_on_left=True)
        return _graph_times_clopen(T2.f, T1, graph_on_left=False)
    return approximate_product(T1, T2, budget)


def approximate_product(
    T1: RelationTower, T2: RelationTower, budget: int
) -> RelationTower:
    """The superset-approximation at the given budget level.

    Its level-n trace, n <= budget, is the projection of the composition of
    the operands' level-budget traces; above the budget it refuses.
    """
    _check_level(budget)
    seed = finrel.compose(T1.trace_level(budget), T2.trace_level(budget))
    return RelationTower("approx", level=budget, seed=seed)


def translate(g: PrefixMap, T: RelationTower, side: Side) -> RelationTower:
    """Left: the relation g R; right: R g.  Exact when T is."""
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    G = graph_tower(g)
    budget = T.level if T.kind == "approx" else 0
    if side == "left":
        return product(G, T, budget)
    return product(T, G, budget)


def same_neighborhood(
    T1: RelationTower, T2: RelationTower, gamma: Union[Partition, int]
) -> bool:
    """Equality of traces: membership in the same basic neighbourhood."""
    return trace_at(T1, gamma) == trace_at(T2, gamma)


def _min_col_dist_scaled(b: int, row: int, n: int) -> Optional[int]:
    """min over set bits b' of row of the scaled distance 2^bitlen(b^b')."""
    if not row:
        return None
    if (row >> b) & 1:
        return 0
    for L in range(1, n + 1):
        start = (b >> L) << L
        mask = ((1 << (1 << L)) - 1) << start
        if row & mask:
            return 1 << L
    return None


def _directed_hausdorff_scaled(
    P: Sequence[Tuple[int, int]], Q_rows: List[int], n: int
) -> int:
    """max over p in P of min over q in Q of scaled rho, rho = d_a + d_b.

    Candidates are scanned outward from p's row: the level-L band holds the
    rows at row-distance exactly 2^L, so the scan stops as soon as the band
    distance alone reaches the best total found.
    """
    worst = 0
    for a, b in P:
        best = None
        for L in range(0, n + 1):
            da = 0 if L == 0 else 1 << L
            if best is not None and da >= best:
                break
            if L == 0:
                cands = (a,)
            else:
                start = (a >> L) << L
                inner = (a >> (L - 1)) << (L - 1)
                half = 1 << (L - 1)
                cands = [
                    aa
                    for aa in range(start, start + (1 << L))
                    if not inner <= aa < inner + half
                ]
            for aa in cands:
                db = _min_col_dist_scaled(b, Q_rows[aa], n)
                if db is None:
                    continue
                total = da + db
                if best is None or total < best:
                    best = total
                    if best == da:
                        break
        if best is None:
            raise ValidationError("empty trace in Hausdorff computation")
        if best > worst:
            worst = best
    return worst


def hausdorff_bounds(
    T1: RelationTower, T2: RelationTower, n: int
) -> Tuple[Fraction, Fraction]:
    """Exact two-sided bracket of the Hausdorff distance from level-n data.

    The lower bound is the symmetric directed Hausdorff distance between
    the trace sets under the sum of per-coordinate minimal cylinder
    distances; the true distance lies within 2^(-n+1) above it.
    """
    if not (T1.exact and T2.exact):
        raise ValidationError("hausdorff_bounds needs certified-exact towers")
    _check_level(n)
    p = T1.trace_level(n)
    q = T2.trace_level(n)
    k = 1 << n
    p_rows = [0] * k
    for a, b in p.pairs:
        p_rows[a] |= 1 << b
    q_rows = [0] * k
    for a, b in q.pairs:
        q_rows[a] |= 1 << b
    scaled = max(
        _directed_hausdorff_scaled(p.pairs, q_rows, n),
        _directed_hausdorff_scaled(q.pairs, p_rows, n),
    )
    lower = Fraction(scaled, 1 << n)
    return lower, lower + Fraction(2, 1 << n)


@dataclass(frozen=True)
class CoherenceReport:
    ok: bool
    checked_levels: int
    failures: Tuple[Tuple[int, str], ...]


def check_coherence(T: RelationTower, N: int) -> CoherenceReport:
    """Verify projection coherence and E_0 membership up to level N."""
    _check_level(N)
    failures = []
    prev = None
    for n in range(N + 1):
        t = T.trace_level(n)
        if not finrel.is_e0(t):
            failures.append((n, "trace is not in E_0"))
        if prev is not None and project_relation(t, n, n - 1) != prev:
            failures.append(
                (n - 1, "trace differs from projection of the next level")
            )
        prev = t
    return CoherenceReport(
        ok=not failures, checked_levels=N, failures=tuple(failures)
    )
