"""Exact combinatorics of the Cantor space 2^omega.

Binary words are plain strings over {"0", "1"}; the empty string denotes
the whole space.  A clopen set is a finite antichain of words (no word a
prefix of another), kept in canonical form: sibling pairs w0/w1 merged to
w, words sorted lexicographically.  A partition is an ordered sequence of
disjoint non-empty clopen sets covering the space; the block index is the
position in the sequence.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .errors import BudgetError, ValidationError

Word = str

DEPTH_CAP = 64


def check_word(w: Word, depth_cap: int = DEPTH_CAP) -> Word:
    if not isinstance(w, str):
        raise ValidationError(f"binary word must be a string, got {type(w).__name__}")
    if len(w) > depth_cap:
        raise BudgetError(f"word of length {len(w)} exceeds depth cap {depth_cap}")
    for ch in w:
        if ch not in "01":
            raise ValidationError(f"binary word {w!r} contains {ch!r}")
    return w


def is_prefix(p: Word, w: Word) -> bool:
    return w.startswith(p)


def lcp_len(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    for i in range(n):
        if u[i] != v[i]:
            return i
    return n


def word_of_index(i: int, n: int) -> Word:
    """The i-th length-n word in lexicographic order."""
    if n < 0 or not (0 <= i < (1 << n)):
        raise ValidationError(f"index {i} invalid for level {n}")
    return format(i, "b").zfill(n) if n else ""


def index_of_word(w: Word) -> int:
    return int(w, 2) if w else 0


def _antichain_violations(words: Sequence[Word]) -> List[Tuple[Word, Word]]:
    out = []
    ws = sorted(set(words))
    for i, p in enumerate(ws):
        for w in ws[i + 1 :]:
            if not w.startswith(p):
                break
            out.append((p, w))
    return out


def _merge_siblings(words: Iterable[Word]) -> Tuple[Word, ...]:
    # Fold sibling pairs w0/w1 to w, cascading; input must be an antichain.
    stack: List[Word] = []
    for w in sorted(set(words)):
        stack.append(w)
        while (
            len(stack) >= 2
            and stack[-1].endswith("1")
            and stack[-2] == stack[-1][:-1] + "0"
        ):
            w0 = stack.pop()
            stack.pop()
            stack.append(w0[:-1])
    return tuple(stack)


class ClopenSet:
    """A clopen subset of 2^omega as a canonical antichain of cylinders."""

    __slots__ = ("cylinders",)

    def __init__(self, words: Iterable[Word] = ()):
        ws = sorted(set(check_word(w) for w in words))
        # In lexicographic order a prefix violation always shows up between
        # neighbours, so the antichain check is linear.
        for prev, cur in zip(ws, ws[1:]):
            if cur.startswith(prev):
                raise ValidationError(
                    f"not an antichain: {prev!r} is a prefix of {cur!r}"
                )
        self.cylinders = _merge_siblings(ws)

    @classmethod
    def _trusted(cls, canonical: Tuple[Word, ...]) -> "ClopenSet":
        self = cls.__new__(cls)
        self.cylinders = canonical
        return self

    def is_empty(self) -> bool:
        return not self.cylinders

    def is_whole_space(self) -> bool:
        return self.cylinders == ("",)

    def contains_word(self, w: Word) -> bool:
        """True iff the cylinder of w lies inside this set."""
        return any(w.startswith(c) for c in self.cylinders)

    def meets(self, other: "ClopenSet") -> bool:
        for u in self.cylinders:
            for v in other.cylinders:
                if u.startswith(v) or v.startswith(u):
                    return True
        return False

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        out = set()
        for u in self.cylinders:
            for v in other.cylinders:
                if u.startswith(v):
                    out.add(u)
                elif v.startswith(u):
                    out.add(v)
        return ClopenSet(out)

    def union(self, other: "ClopenSet") -> "ClopenSet":
        # Disjoint clopen sets have jointly incomparable cylinders, but a
        # general union must subtract overlaps first.
        extra = subtract_clopen(other, self)
        return ClopenSet(self.cylinders + extra.cylinders)

    def measure(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(w)) for w in self.cylinders), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, ClopenSet) and self.cylinders == other.cylinders

    def __hash__(self) -> int:
        return hash(self.cylinders)

    def __repr__(self) -> str:
        return f"ClopenSet({list(self.cylinders)})"


def complement_clopen(C: ClopenSet) -> ClopenSet:
    return subtract_clopen(whole_space(), C)


def whole_space() -> ClopenSet:
    return ClopenSet([""])


def subtract_clopen(A: ClopenSet, B: ClopenSet) -> ClopenSet:
    """The clopen difference A minus B."""
    out: List[Word] = []

    def peel(a: Word, holes: List[Word]) -> None:
        # holes all extend a; carve them out of cyl(a).  A hole strictly
        # between a and a child cannot exist: every hole either equals the
        # current node or extends one of its children.
        if not holes:
            out.append(a)
            return
        if a in holes:
            return
        for bit in "01":
            child = a + bit
            check_word(child)
            peel(child, [h for h in holes if h.startswith(child)])

    for a in A.cylinders:
        if any(a.startswith(b) for b in B.cylinders):
            continue
        inner = [b for b in B.cylinders if b.startswith(a) and b != a]
        peel(a, inner)
    return ClopenSet(out)


@dataclass(frozen=True)
class CodeReport:
    """Validation report for a set of words viewed as a prefix code."""

    is_antichain: bool
    kraft_sum: Fraction
    is_complete: bool
    prefix_violations: Tuple[Tuple[Word, Word], ...]


def validate_code(words: Iterable[Word]) -> CodeReport:
    ws = sorted(set(check_word(w) for w in words))
    bad = tuple(_antichain_violations(ws))
    kraft = sum((Fraction(1, 2 ** len(w)) for w in ws), Fraction(0))
    return CodeReport(
        is_antichain=not bad,
        kraft_sum=kraft,
        is_complete=(not bad) and kraft == 1,
        prefix_violations=bad,
    )


def canonicalize_clopen(words: Iterable[Word]) -> ClopenSet:
    return ClopenSet(words)


def _split_words(words: Sequence[Word], k: int) -> List[Tuple[Word, ...]]:
    """Core splitting rule on a sorted cylinder list; pieces as word tuples.

    While the count exceeds k, the tail merges into the k-th piece; while it
    falls short, the lexicographically last cylinder splits in two.
    """
    ws = sorted(words)
    if k > len(ws):
        ws = list(ws)
        while len(ws) < k:
            last = ws.pop()
            if len(last) + 1 > DEPTH_CAP:
                raise BudgetError(
                    f"splitting past depth cap {DEPTH_CAP} while making {k} pieces"
                )
            ws.extend((last + "0", last + "1"))
        return [(w,) for w in ws]
    if k < len(ws):
        head = [(w,) for w in ws[: k - 1]]
        head.append(tuple(ws[k - 1 :]))
        return head
    return [(w,) for w in ws]


def split_clopen(C: ClopenSet, k: int) -> List[ClopenSet]:
    """k disjoint non-empty clopen pieces with union C, deterministically."""
    if C.is_empty():
        raise ValidationError("cannot split the empty clopen set")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"piece count must be a positive integer, got {k!r}")
    return [ClopenSet(piece) for piece in _split_words(C.cylinders, k)]


class Partition:
    """An ordered finite clopen partition of 2^omega."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable[ClopenSet]):
        bl = tuple(blocks)
        if not bl:
            raise ValidationError("a partition needs at least one block")
        all_words: List[Word] = []
        for i, b in enumerate(bl):
            if not isinstance(b, ClopenSet):
                raise ValidationError(f"block {i} is not a ClopenSet")
            if b.is_empty():
                raise ValidationError(f"block {i} is empty")
            all_words.extend(b.cylinders)
        report = validate_code(all_words)
        if len(set(all_words)) != len(all_words) or not report.is_antichain:
            raise ValidationError("partition blocks overlap")
        if report.kraft_sum != 1:
            raise ValidationError(
                f"partition does not cover the space (Kraft sum {report.kraft_sum})"
            )
        self.blocks = bl

    @property
    def size(self) -> int:
        return len(self.blocks)

    def max_word_length(self) -> int:
        return max(len(w) for b in self.blocks for w in b.cylinders)

    def block_of_word(self, w: Word) -> int:
        """Index of the block containing cyl(w); w at least as deep as blocks."""
        for i, b in enumerate(self.blocks):
            if b.contains_word(w):
                return i
        raise ValidationError(f"word {w!r} is shorter than the partition's blocks")

    def is_canonical_level(self) -> bool:
        n_blocks = len(self.blocks)
        if n_blocks & (n_blocks - 1):
            return False
        n = n_blocks.bit_length() - 1
        return all(
            b.cylinders == (word_of_index(i, n),) for i, b in enumerate(self.blocks)
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return f"Partition({list(self.blocks)})"


def level_partition(n: int) -> Partition:
    """The canonical partition into the 2^n length-n cylinders."""
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"level must be a non-negative integer, got {n!r}")
    if n > DEPTH_CAP:
        raise BudgetError(f"level {n} exceeds depth cap {DEPTH_CAP}")
    return Partition(
        ClopenSet._trusted((word_of_index(i, n),)) for i in range(1 << n)
    )


def common_refinement(gamma: Partition, lam: Partition) -> Partition:
    """Blocks are the non-empty U i V, ordered by (gamma index, lambda index)."""
    blocks = []
    for U in gamma.blocks:
        for V in lam.blocks:
            inter = U.intersect(V)
            if not inter.is_empty():
                blocks.append(inter)
    return Partition(blocks)


def project_pair(
    m: int, n: int, pair: Tuple[Word, Word]
) -> Tuple[Word, Word]:
    """Truncate a pair of level-m coordinate words to level n."""
    if not isinstance(m, int) or not isinstance(n, int) or m < 0 or n < 0:
        raise ValidationError("levels must be non-negative integers")
    if n > m:
        raise ValidationError(f"cannot project level {m} up to level {n}")
    if m > DEPTH_CAP:
        raise BudgetError(f"level {m} exceeds depth cap {DEPTH_CAP}")
    u, v = pair
    for w in (u, v):
        check_word(w)
        if len(w) != m:
            raise ValidationError(f"word {w!r} is not a level-{m} index")
    return u[:n], v[:n]
