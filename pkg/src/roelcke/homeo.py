"""Prefix-exchange self-homeomorphisms of the Cantor space.

A PrefixMap is a bijection between two complete prefix codes acting by
prefix substitution: x = d t maps to r t where d -> r is a rule.  These
maps form a group dense in the full homeomorphism group, and every
construction in this package produces maps of exactly this form.

Composition is written compose(f, g) = f after g, so traces satisfy
trace(compose(f, g), n) = finrel.compose(trace(f, n), trace(g, n)).
"""

from bisect import bisect_left
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .cantor import (
    DEPTH_CAP,
    ClopenSet,
    Partition,
    Word,
    _split_words,
    check_word,
    index_of_word,
    lcp_len,
    word_of_index,
)
from .errors import BudgetError, ValidationError
from . import finrel
from .finrel import IndexRelation

Rule = Tuple[Word, Word]


def _check_complete_code(words: Sequence[Word], side: str) -> None:
    if len(set(words)) != len(words):
        raise ValidationError(f"duplicate {side} words in prefix map")
    ws = sorted(words)
    if not ws:
        raise ValidationError("a prefix map needs at least one rule")
    for prev, cur in zip(ws, ws[1:]):
        if cur.startswith(prev):
            raise ValidationError(
                f"{side} code is not an antichain: {prev!r} is a prefix of {cur!r}"
            )
    top = max(len(w) for w in ws)
    kraft = sum(1 << (top - len(w)) for w in ws)
    if kraft != 1 << top:
        raise ValidationError(f"{side} code is not complete (Kraft sum off)")


def _reduce_rules(rules: Iterable[Rule]) -> Tuple[Rule, ...]:
    # Sibling rules d0 -> r0, d1 -> r1 fold to d -> r, cascading.  Sorted by
    # domain, the two halves of a foldable pair are always adjacent.
    stack: List[Rule] = []
    for d, r in sorted(rules):
        stack.append((d, r))
        while len(stack) >= 2:
            d1, r1 = stack[-1]
            d0, r0 = stack[-2]
            if (
                d1.endswith("1")
                and r1.endswith("1")
                and d0 == d1[:-1] + "0"
                and r0 == r1[:-1] + "0"
            ):
                stack.pop()
                stack.pop()
                stack.append((d1[:-1], r1[:-1]))
            else:
                break
    return tuple(stack)


class PrefixMap:
    """A prefix-exchange homeomorphism in canonical (reduced, sorted) form."""

    __slots__ = ("rules", "_domain", "_range", "_hash")

    def __init__(self, rules: Iterable[Rule]):
        raw = [(check_word(d), check_word(r)) for d, r in rules]
        _check_complete_code([d for d, _ in raw], "domain")
        _check_complete_code([r for _, r in raw], "range")
        self.rules = _reduce_rules(raw)
        self._domain = tuple(d for d, _ in self.rules)
        self._range = tuple(r for _, r in self.rules)
        self._hash = None

    @property
    def domain_code(self) -> Tuple[Word, ...]:
        return self._domain

    @property
    def range_code(self) -> Tuple[Word, ...]:
        return self._range

    def depth(self) -> int:
        return max(max(len(d), len(r)) for d, r in self.rules)

    def is_identity(self) -> bool:
        return self.rules == (("", ""),)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrefixMap) and self.rules == other.rules

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rules)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{d or 'e'}->{r or 'e'}" for d, r in self.rules)
        return f"PrefixMap({{{body}}})"


def canonicalize(rules: Iterable[Rule]) -> PrefixMap:
    return PrefixMap(rules)


def identity() -> PrefixMap:
    return PrefixMap([("", "")])


def _locate(domains: Sequence[Word], w: Word) -> Tuple[int, bool]:
    """Find w's place in a complete code.

    Returns (index, True) when domains[index] is a prefix of w, else
    (start, False) where domains[start:] begins the run of extensions of w.
    """
    i = bisect_left(domains, w)
    if i < len(domains) and domains[i] == w:
        return i, True
    if i > 0 and w.startswith(domains[i - 1]):
        return i - 1, True
    return i, False


def apply_word(f: PrefixMap, w: Word) -> Word:
    """Image of the cylinder word w; w must reach f's domain code."""
    i, covered = _locate(f.domain_code, w)
    if not covered:
        raise ValidationError(
            f"word {w!r} is shallower than the map's domain code"
        )
    d, r = f.rules[i]
    return r + w[len(d):]


def compose(f: PrefixMap, g: PrefixMap) -> PrefixMap:
    """The map x -> f(g(x))."""
    fdom = f.domain_code
    out: List[Rule] = []
    for d, r in g.rules:
        i, covered = _locate(fdom, r)
        if covered:
            df, rf = f.rules[i]
            out.append((d, rf + r[len(df):]))
            continue
        j = i
        while j < len(fdom) and fdom[j].startswith(r):
            df, rf = f.rules[j]
            nd = d + df[len(r):]
            if len(nd) > DEPTH_CAP:
                raise BudgetError(
                    f"composition needs words past depth cap {DEPTH_CAP}"
                )
            out.append((nd, rf))
            j += 1
    return PrefixMap(out)


def invert(f: PrefixMap) -> PrefixMap:
    return PrefixMap((r, d) for d, r in f.rules)


def image_clopen(f: PrefixMap, C: ClopenSet) -> ClopenSet:
    """Exact image f(C) as a canonical clopen set."""
    fdom = f.domain_code
    out: List[Word] = []
    for w in C.cylinders:
        i, covered = _locate(fdom, w)
        if covered:
            d, r = f.rules[i]
            img = r + w[len(d):]
            if len(img) > DEPTH_CAP:
                raise BudgetError(f"image words exceed depth cap {DEPTH_CAP}")
            out.append(img)
            continue
        j = i
        while j < len(fdom) and fdom[j].startswith(w):
            out.append(f.rules[j][1])
            j += 1
    return ClopenSet(out)


def level_trace(f: PrefixMap, n: int) -> IndexRelation:
    """Trace at the canonical level-n partition, as a 2^n relation."""
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"level must be a non-negative integer, got {n!r}")
    pairs = set()
    for d, r in f.rules:
        if len(d) >= n:
            a = index_of_word(d[:n])
            if len(r) >= n:
                pairs.add((a, index_of_word(r[:n])))
            else:
                base = index_of_word(r) << (n - len(r))
                for b in range(base, base + (1 << (n - len(r)))):
                    pairs.add((a, b))
            continue
        for t in range(1 << (n - len(d))):
            tail = word_of_index(t, n - len(d))
            a = index_of_word(d + tail)
            img = r + tail
            if len(img) >= n:
                pairs.add((a, index_of_word(img[:n])))
            else:
                base = index_of_word(img) << (n - len(img))
                for b in range(base, base + (1 << (n - len(img)))):
                    pairs.add((a, b))
    return IndexRelation(1 << n, pairs)


def trace(f: PrefixMap, gamma: Partition) -> IndexRelation:
    """Index pairs (a, b) with f(U_a) meeting U_b; always in E_0."""
    if gamma.is_canonical_level():
        return level_trace(f, len(gamma.blocks).bit_length() - 1)
    images = [image_clopen(f, U) for U in gamma.blocks]
    pairs = [
        (a, b)
        for a, img in enumerate(images)
        for b, U in enumerate(gamma.blocks)
        if img.meets(U)
    ]
    return IndexRelation(gamma.size, pairs)


def in_stabilizer(f: PrefixMap, gamma: Partition) -> bool:
    """Membership in V_gamma: f maps every block onto itself."""
    return all(image_clopen(f, U) == U for U in gamma.blocks)


def _common_domain(f: PrefixMap, g: PrefixMap) -> List[Tuple[Word, Word, Word]]:
    """Triples (w, u, v): common domain cylinder w, f and g targets u, v."""
    gdom = g.domain_code
    out = []
    for d, r in f.rules:
        i, covered = _locate(gdom, d)
        if covered:
            dg, rg = g.rules[i]
            out.append((d, r, rg + d[len(dg):]))
            continue
        j = i
        while j < len(gdom) and gdom[j].startswith(d):
            dg, rg = g.rules[j]
            out.append((dg, r + dg[len(d):], rg))
            j += 1
    return out


def sup_distance(f: PrefixMap, g: PrefixMap) -> Fraction:
    """sup over x of 2^(-lcp(f(x), g(x))); exact dyadic value.

    On a common domain cylinder with substitution targets u and v the
    supremum is 0 when u = v, 2^(-lcp) when they are incomparable, and
    2^(-len(shorter)) when one extends the other (tails diverge at will).
    """
    best = Fraction(0)
    for _, u, v in _common_domain(f, g):
        if u == v:
            continue
        # Both the incomparable and the nested case give 2^(-lcp): when one
        # target extends the other the lcp is the shorter length.
        val = Fraction(1, 1 << lcp_len(u, v))
        if val > best:
            best = val
            if best == 1:
                break
    return best


def map_clopen(P: ClopenSet, Q: ClopenSet) -> Tuple[Rule, ...]:
    """Deterministic cylinder-to-cylinder rules carrying P onto Q.

    The shorter cylinder list grows by splitting its lexicographically last
    word until the counts match; rules pair the lists in order.  The result
    is a partial prefix map, the assembly piece for the witness builders.
    """
    if P.is_empty() or Q.is_empty():
        raise ValidationError("map_clopen needs non-empty clopen sets")
    ps = list(P.cylinders)
    qs = list(Q.cylinders)
    if len(ps) < len(qs):
        ps = [w for (w,) in _split_words(ps, len(qs))]
    elif len(qs) < len(ps):
        qs = [w for (w,) in _split_words(qs, len(ps))]
    return tuple(zip(ps, qs))
