"""Exact algebra of binary relations on finite index sets.

A relation on A = {0, ..., k-1} is a set of ordered pairs, with boolean
k x k matrix semantics.  Composition follows the convention used throughout
this package: in `compose(r, s)` the second argument acts first, so

    compose(r, s) = {(x, y) : exists z with (x, z) in s and (z, y) in r}.

With this order the trace of a composite homeomorphism graph is the
composition of the traces, with no transposition anywhere.

E_0(A) is the set of relations with full domain and full range (no empty
row or column).  It is closed under composition and transposition and is
the index set of the basic neighbourhoods used by the tower and
construction modules.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from .errors import BudgetError, ValidationError

Pair = Tuple[int, int]

E0_ENUM_CAP = 4
CLOSURE_CAP = 10 ** 5

# Composition switches from packed-bitmask rows to a sparse dict walk above
# this size; both paths produce identical canonical results.
_BITS_MAX_SIZE = 256


class IndexRelation:
    """A binary relation on {0, ..., size-1} in canonical (sorted) form."""

    __slots__ = ("size", "pairs", "_bits", "_hash")

    def __init__(self, size: int, pairs: Iterable[Pair]):
        if not isinstance(size, int) or size < 1:
            raise ValidationError(f"relation size must be a positive integer, got {size!r}")
        canon = sorted(set((int(a), int(b)) for a, b in pairs))
        for a, b in canon:
            if not (0 <= a < size and 0 <= b < size):
                raise ValidationError(
                    f"pair ({a}, {b}) out of range for size {size}"
                )
        self.size = size
        self.pairs = tuple(canon)
        self._bits: Optional[int] = None
        self._hash: Optional[int] = None

    @classmethod
    def _from_bits(cls, size: int, bits: int) -> "IndexRelation":
        # Trusted constructor: bit a*size+b set <=> (a, b) in the relation.
        self = cls.__new__(cls)
        self.size = size
        pairs = []
        rest = bits
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            pairs.append((i // size, i % size))
            rest ^= low
        self.pairs = tuple(pairs)  # bit order is already lexicographic
        self._bits = bits
        self._hash = None
        return self

    @property
    def bits(self) -> int:
        b = self._bits
        if b is None:
            k = self.size
            b = 0
            for a, c in self.pairs:
                b |= 1 << (a * k + c)
            self._bits = b
        return b

    def rows(self) -> list:
        """Row bitmasks: rows()[a] has bit b set iff (a, b) is present."""
        k = self.size
        mask = (1 << k) - 1
        bits = self.bits
        return [(bits >> (a * k)) & mask for a in range(k)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IndexRelation)
            and self.size == other.size
            and self.pairs == other.pairs
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = self._hash = hash((self.size, self.pairs))
        return h

    def __le__(self, other: "IndexRelation") -> bool:
        if self.size != other.size:
            raise ValidationError("cannot compare relations of different sizes")
        return set(self.pairs) <= set(other.pairs)

    def __contains__(self, pair: Pair) -> bool:
        a, b = pair
        if not (0 <= a < self.size and 0 <= b < self.size):
            return False
        return (self.bits >> (a * self.size + b)) & 1 == 1

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __repr__(self) -> str:
        return f"IndexRelation({self.size}, {list(self.pairs)})"


def diagonal(k: int) -> IndexRelation:
    return IndexRelation(k, [(a, a) for a in range(k)])


def full(k: int) -> IndexRelation:
    return IndexRelation(k, [(a, b) for a in range(k) for b in range(k)])


def compose(r: IndexRelation, s: IndexRelation) -> IndexRelation:
    """compose(r, s) = {(x, y) : exists z, (x, z) in s and (z, y) in r}."""
    if r.size != s.size:
        raise ValidationError(
            f"size mismatch in compose: {r.size} vs {s.size}"
        )
    k = r.size
    if k <= _BITS_MAX_SIZE:
        r_rows = r.rows()
        mask = (1 << k) - 1
        s_bits = s.bits
        out = 0
        for x in range(k):
            zrow = (s_bits >> (x * k)) & mask
            if not zrow:
                continue
            acc = 0
            rest = zrow
            while rest:
                low = rest & -rest
                acc |= r_rows[low.bit_length() - 1]
                rest ^= low
            out |= acc << (x * k)
        return IndexRelation._from_bits(k, out)
    by_first: dict = {}
    for z, y in r.pairs:
        by_first.setdefault(z, []).append(y)
    out_pairs = set()
    for x, z in s.pairs:
        for y in by_first.get(z, ()):
            out_pairs.add((x, y))
    return IndexRelation(k, out_pairs)


def transpose(r: IndexRelation) -> IndexRelation:
    return IndexRelation(r.size, [(b, a) for a, b in r.pairs])


@dataclass(frozen=True)
class RelationClassification:
    is_e0: bool
    is_symmetric: bool
    contains_diagonal: bool
    is_idempotent: bool
    is_equivalence: bool


def _is_e0_bits(k: int, bits: int) -> bool:
    mask = (1 << k) - 1
    cols = 0
    for a in range(k):
        row = (bits >> (a * k)) & mask
        if not row:
            return False
        cols |= row
    return cols == mask


def is_e0(r: IndexRelation) -> bool:
    """Full domain and full range: no empty row or column."""
    dom = set()
    ran = set()
    for a, b in r.pairs:
        dom.add(a)
        ran.add(b)
    return len(dom) == r.size and len(ran) == r.size


def classify(r: IndexRelation) -> RelationClassification:
    """All five flags computed by definition.

    is_equivalence is computed from scratch (reflexive, symmetric,
    transitive by the element-wise definition) so that its equality with
    symmetric + contains-diagonal + idempotent is a genuine law.
    """
    k = r.size
    pairs = set(r.pairs)
    is_symmetric = all((b, a) in pairs for a, b in pairs)
    contains_diagonal = all((a, a) in pairs for a in range(k))
    is_idempotent = compose(r, r) == r
    reflexive = contains_diagonal
    transitive = True
    for a, b in pairs:
        for c, d in pairs:
            if b == c and (a, d) not in pairs:
                transitive = False
                break
        if not transitive:
            break
    is_equivalence = reflexive and is_symmetric and transitive
    return RelationClassification(
        is_e0=is_e0(r),
        is_symmetric=is_symmetric,
        contains_diagonal=contains_diagonal,
        is_idempotent=is_idempotent,
        is_equivalence=is_equivalence,
    )


def enumerate_e0(k: int, cap: int = E0_ENUM_CAP) -> Tuple[IndexRelation, ...]:
    """All relations with full domain and range, sorted by their pair lists."""
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"index set size must be a positive integer, got {k!r}")
    if k > cap:
        raise BudgetError(
            f"enumerate_e0 size {k} exceeds cap {cap} "
            f"(2^{k * k} candidates)"
        )
    out = []
    for bits in range(1, 1 << (k * k)):
        if _is_e0_bits(k, bits):
            out.append(IndexRelation._from_bits(k, bits))
    out.sort(key=lambda rel: rel.pairs)
    return tuple(out)


def closure(
    generators: Iterable[IndexRelation], cap: int = CLOSURE_CAP
) -> Tuple[IndexRelation, ...]:
    """Smallest composition-closed superset, in deterministic insertion order.

    Generators are taken in canonical order; new products are appended in
    the order (new x old, old x new) over the discovery queue.
    """
    gens = sorted(set(generators), key=lambda rel: rel.pairs)
    if not gens:
        return ()
    k = gens[0].size
    for g in gens:
        if g.size != k:
            raise ValidationError("closure generators must share one size")
    if cap < 1:
        raise ValidationError("closure cap must be positive")
    elems = list(gens)
    seen = {g.bits for g in gens}
    if len(elems) > cap:
        raise BudgetError(f"closure exceeded cap {cap}")
    queue = 0
    while queue < len(elems):
        new = elems[queue]
        queue += 1
        for old in list(elems):
            for prod in (compose(new, old), compose(old, new)):
                if prod.bits not in seen:
                    seen.add(prod.bits)
                    elems.append(prod)
                    if len(elems) > cap:
                        raise BudgetError(f"closure exceeded cap {cap}")
    return tuple(elems)


def greatest_delta_element(
    S: Iterable[IndexRelation],
) -> Optional[IndexRelation]:
    """Greatest element of T = {p in S : p contains the diagonal}, or None.

    S must be closed under composition (verified).  The returned element is
    asserted to be idempotent and an upper bound of T; a violation would be
    an internal-consistency error, not a caller error.
    """
    elems = sorted(set(S), key=lambda rel: rel.pairs)
    if not elems:
        raise ValidationError("greatest_delta_element needs a non-empty set")
    k = elems[0].size
    for p in elems:
        if p.size != k:
            raise ValidationError("relations must share one size")
    members = {p.bits for p in elems}
    for p in elems:
        for q in elems:
            if compose(p, q).bits not in members:
                raise ValidationError(
                    "set is not closed under composition "
                    f"(product of {p!r} and {q!r} is missing)"
                )
    diag_bits = diagonal(k).bits
    T = [p for p in elems if p.bits & diag_bits == diag_bits]
    if not T:
        return None
    top = T[0]
    for p in T[1:]:
        top = compose(top, p)
    if compose(top, top) != top:
        raise RuntimeError("internal consistency: greatest element not idempotent")
    for p in T:
        if top.bits & p.bits != p.bits:
            raise RuntimeError("internal consistency: greatest element not an upper bound")
    return top


def _conjugate(r: IndexRelation, perm: Sequence[int]) -> IndexRelation:
    return IndexRelation(r.size, [(perm[a], perm[b]) for a, b in r.pairs])


def invariant_under_symmetric_group(
    k: int, cap: int = E0_ENUM_CAP
) -> Tuple[IndexRelation, ...]:
    """Members of E_0 fixed by conjugation with (0 1) and the k-cycle."""
    swap_perm = list(range(k))
    if k >= 2:
        swap_perm[0], swap_perm[1] = 1, 0
    cycle_perm = [(i + 1) % k for i in range(k)]
    out = []
    for r in enumerate_e0(k, cap=cap):
        if _conjugate(r, swap_perm) == r and _conjugate(r, cycle_perm) == r:
            out.append(r)
    return tuple(out)
