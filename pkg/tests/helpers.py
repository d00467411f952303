"""Shared generators and independent brute-force oracles for the tests.

The oracles never call the code paths they are checking: composition is
re-derived by witness search, traces and distances by pointwise
application to all words of a sufficient depth, counts by subset brute
force and by inclusion-exclusion.
"""

from fractions import Fraction
from itertools import permutations
from math import comb
from typing import Dict, Iterable, Iterator, List, Sequence, Set, Tuple

from roelcke.cantor import ClopenSet, Partition, index_of_word, word_of_index
from roelcke.finrel import IndexRelation
from roelcke.homeo import PrefixMap

Word = str


# -- exhaustive enumeration ---------------------------------------------------

def complete_codes(max_depth: int) -> Iterator[Tuple[Word, ...]]:
    """All complete prefix codes using words of length <= max_depth."""

    def rec(prefix: Word, depth: int) -> Iterator[Tuple[Word, ...]]:
        yield (prefix,)
        if depth > 0:
            for left in rec(prefix + "0", depth - 1):
                for right in rec(prefix + "1", depth - 1):
                    yield left + right

    return rec("", max_depth)


def all_prefix_maps(max_depth: int, max_size: int) -> List[PrefixMap]:
    """Every canonical prefix map with codes of size <= max_size at the depth."""
    codes: Dict[int, List[Tuple[Word, ...]]] = {}
    for code in complete_codes(max_depth):
        if len(code) <= max_size:
            codes.setdefault(len(code), []).append(code)
    seen = set()
    out = []
    for size, group in sorted(codes.items()):
        for dom in group:
            for ran in group:
                for perm in permutations(range(size)):
                    f = PrefixMap((dom[i], ran[perm[i]]) for i in range(size))
                    if f.rules not in seen:
                        seen.add(f.rules)
                        out.append(f)
    return out


def all_words(n: int) -> List[Word]:
    return [word_of_index(i, n) for i in range(1 << n)]


# -- random generators --------------------------------------------------------

def rnd_code(rng, splits: int, depth_cap: int = 16) -> List[Word]:
    """A random complete prefix code grown by `splits` random subdivisions."""
    words = [""]
    for _ in range(splits):
        choices = [i for i, w in enumerate(words) if len(w) < depth_cap]
        i = rng.choice(choices)
        w = words.pop(i)
        words.extend((w + "0", w + "1"))
    return sorted(words)


def rnd_map(rng, splits: int, depth_cap: int = 16) -> PrefixMap:
    dom = rnd_code(rng, splits, depth_cap)
    ran = rnd_code(rng, splits, depth_cap)
    rng.shuffle(ran)
    return PrefixMap(zip(dom, ran))


def rnd_stab(rng, n: int, max_inner_splits: int = 2) -> PrefixMap:
    """A random member of the level-n stabilizer (block-preserving map)."""
    rules = []
    for w in all_words(n):
        inner = rnd_map(rng, rng.randint(0, max_inner_splits))
        rules.extend((w + d, w + r) for d, r in inner.rules)
    return PrefixMap(rules)


def rnd_e0(rng, k: int) -> IndexRelation:
    """Uniform-ish random member of E_0(k) by rejection sampling."""
    while True:
        pairs = [
            (a, b) for a in range(k) for b in range(k) if rng.random() < 0.4
        ]
        if not pairs:
            continue
        dom = {a for a, _ in pairs}
        ran = {b for _, b in pairs}
        if len(dom) == k and len(ran) == k:
            return IndexRelation(k, pairs)


def rnd_partition(rng, n_blocks: int, extra_splits: int = 3) -> Partition:
    """A random clopen partition with the given number of blocks."""
    words = rnd_code(rng, n_blocks - 1 + rng.randint(0, extra_splits))
    while len(words) < n_blocks:
        words = rnd_code(rng, n_blocks - 1 + rng.randint(0, extra_splits))
    rng.shuffle(words)
    groups = [[] for _ in range(n_blocks)]
    for i, w in enumerate(words[:n_blocks]):
        groups[i].append(w)
    for w in words[n_blocks:]:
        groups[rng.randrange(n_blocks)].append(w)
    return Partition(ClopenSet(g) for g in groups)


# -- pointwise oracles --------------------------------------------------------

def oracle_apply(f: PrefixMap, w: Word) -> Word:
    for d, r in f.rules:
        if w.startswith(d):
            return r + w[len(d):]
    raise AssertionError(f"word {w!r} shallower than the domain code")


def oracle_level_trace(f: PrefixMap, n: int) -> IndexRelation:
    depth = max(f.depth(), 1)
    pairs = set()
    for w in all_words(depth + n):
        img = oracle_apply(f, w)
        pairs.add((index_of_word(w[:n]), index_of_word(img[:n])))
    return IndexRelation(1 << n, pairs)


def oracle_trace(f: PrefixMap, gamma: Partition) -> IndexRelation:
    depth = f.depth() + gamma.max_word_length()
    pairs = set()
    for w in all_words(depth):
        img = oracle_apply(f, w)
        pairs.add((gamma.block_of_word(w), gamma.block_of_word(img)))
    return IndexRelation(gamma.size, pairs)


def _lcp(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    for i in range(n):
        if u[i] != v[i]:
            return i
    return n


def oracle_supdist(f: PrefixMap, g: PrefixMap) -> Fraction:
    """Pointwise max over deep-enough words with all-zero tails."""
    depth = max(f.depth(), g.depth()) + 1
    best = Fraction(0)
    for w in all_words(depth):
        u = oracle_apply(f, w)
        v = oracle_apply(g, w)
        pad = max(len(u), len(v))
        up = u.ljust(pad, "0")
        vp = v.ljust(pad, "0")
        if up != vp:
            best = max(best, Fraction(1, 1 << _lcp(up, vp)))
    return best


def oracle_image_words(f: PrefixMap, C: ClopenSet, depth: int) -> Set[Word]:
    """All length-`depth` words whose cylinders lie inside f(C)."""
    out = set()
    for w in all_words(depth):
        if C.contains_word(w):
            img = oracle_apply(f, w)
            for t in all_words(depth - len(img) + depth):
                pass
            out.add(img)
    # Normalize to a fixed word length for set comparison.
    target = max((len(w) for w in out), default=0)
    full = set()
    for w in out:
        for t in all_words(target - len(w)):
            full.add(w + t)
    return full


def clopen_words(C: ClopenSet, depth: int) -> Set[Word]:
    """All length-`depth` words whose cylinders lie inside C."""
    return {w for w in all_words(depth) if C.contains_word(w)}


# -- relation oracles ---------------------------------------------------------

def oracle_compose(r: IndexRelation, s: IndexRelation) -> IndexRelation:
    k = r.size
    rp = set(r.pairs)
    sp = set(s.pairs)
    pairs = {
        (x, y)
        for x in range(k)
        for y in range(k)
        if any((x, z) in sp and (z, y) in rp for z in range(k))
    }
    return IndexRelation(k, pairs)


def brute_e0_count(k: int) -> int:
    count = 0
    cells = [(a, b) for a in range(k) for b in range(k)]
    for mask in range(1, 1 << (k * k)):
        pairs = [cells[i] for i in range(k * k) if (mask >> i) & 1]
        dom = {a for a, _ in pairs}
        ran = {b for _, b in pairs}
        if len(dom) == k and len(ran) == k:
            count += 1
    return count


def inclusion_exclusion_e0_count(k: int) -> int:
    total = 0
    for i in range(k + 1):
        for j in range(k + 1):
            total += (-1) ** (i + j) * comb(k, i) * comb(k, j) * (
                1 << ((k - i) * (k - j))
            )
    return total


# -- hausdorff oracle ---------------------------------------------------------

def _dmin(a: int, b: int, n: int) -> Fraction:
    if a == b:
        return Fraction(0)
    return Fraction(1, 1 << _lcp(word_of_index(a, n), word_of_index(b, n)))


def oracle_hausdorff_lower(
    p: Sequence[Tuple[int, int]], q: Sequence[Tuple[int, int]], n: int
) -> Fraction:
    def directed(src, dst):
        worst = Fraction(0)
        for a, b in src:
            best = min(_dmin(a, c, n) + _dmin(b, d, n) for c, d in dst)
            worst = max(worst, best)
        return worst

    return max(directed(p, q), directed(q, p))


def oracle_rect_product_trace(
    seed_r: IndexRelation,
    level_r: int,
    seed_s: IndexRelation,
    level_s: int,
    out_level: int,
) -> IndexRelation:
    """Trace of the rectangle-union composition at out_level, by brute force."""
    L = max(level_r, level_s, out_level)
    sr = set(seed_r.pairs)
    ss = set(seed_s.pairs)

    def in_r(x: Word, y: Word) -> bool:
        return (index_of_word(x[:level_r]), index_of_word(y[:level_r])) in sr

    def in_s(x: Word, y: Word) -> bool:
        return (index_of_word(x[:level_s]), index_of_word(y[:level_s])) in ss

    ws = all_words(L)
    pairs = set()
    for x in ws:
        for y in ws:
            if any(in_s(x, z) and in_r(z, y) for z in ws):
                pairs.add((index_of_word(x[:out_level]), index_of_word(y[:out_level])))
    return IndexRelation(1 << out_level, pairs)
