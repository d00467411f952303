"""Line-oriented text formats with byte-stable canonical serialization.

Six document kinds: relation (`rel <k>` + index pair lines), prefix map
(`pm` + rule lines), partition (`part` + block lines), clopen set
(`clopen` + word lines), tower (`tower graph|clopen <level>` + an embedded
document), and relation-set (relation documents separated by blank lines).
The literal `e` stands for the empty word.  parse(format(x)) == x for every
canonical value, and all parse errors carry input line numbers.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .cantor import ClopenSet, Partition, Word
from .errors import ValidationError
from .finrel import IndexRelation
from .homeo import PrefixMap
from .towers import RelationTower, clopen_tower, graph_tower

Numbered = Tuple[int, str]


def _word_out(w: Word) -> str:
    return w if w else "e"


def _word_in(tok: str, ln: int) -> Word:
    if tok == "e":
        return ""
    if tok and all(c in "01" for c in tok):
        return tok
    raise ValidationError(f"line {ln}: {tok!r} is not a binary word or 'e'")


def _numbered(text: str, offset: int = 0) -> List[Numbered]:
    return [(i + 1 + offset, ln.strip()) for i, ln in enumerate(text.splitlines())]


def _content(lines: Sequence[Numbered]) -> List[Numbered]:
    return [(n, s) for n, s in lines if s]


def _int(tok: str, ln: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ValidationError(f"line {ln}: {what} {tok!r} is not an integer")


# -- relation ---------------------------------------------------------------

def parse_relation(text: str, offset: int = 0) -> IndexRelation:
    lines = _content(_numbered(text, offset))
    if not lines:
        raise ValidationError(f"line {offset + 1}: empty relation document")
    n0, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "rel":
        raise ValidationError(f"line {n0}: expected 'rel <k>', got {head!r}")
    k = _int(parts[1], n0, "size")
    pairs = set()
    for n, s in lines[1:]:
        ps = s.split()
        if len(ps) != 2:
            raise ValidationError(f"line {n}: expected '<a> <b>', got {s!r}")
        pairs.add((_int(ps[0], n, "index"), _int(ps[1], n, "index")))
    return IndexRelation(k, pairs)


def format_relation(r: IndexRelation) -> str:
    out = [f"rel {r.size}\n"]
    out.extend(f"{a} {b}\n" for a, b in r.pairs)
    return "".join(out)


# -- relation-set -----------------------------------------------------------

def parse_relation_set(text: str) -> Tuple[IndexRelation, ...]:
    groups: List[List[str]] = []
    starts: List[int] = []
    current: List[str] = None
    for i, raw in enumerate(text.splitlines()):
        if raw.strip():
            if current is None:
                current = []
                starts.append(i)
                groups.append(current)
            current.append(raw)
        else:
            current = None
    if not groups:
        raise ValidationError("line 1: empty relation-set document")
    return tuple(
        parse_relation("\n".join(g), offset=start)
        for g, start in zip(groups, starts)
    )


def format_relation_set(rels: Sequence[IndexRelation]) -> str:
    return "\n".join(format_relation(r) for r in rels)


# -- prefix map -------------------------------------------------------------

def parse_prefix_map(text: str, offset: int = 0) -> PrefixMap:
    lines = _content(_numbered(text, offset))
    if not lines:
        raise ValidationError(f"line {offset + 1}: empty prefix map document")
    n0, head = lines[0]
    if head != "pm":
        raise ValidationError(f"line {n0}: expected 'pm', got {head!r}")
    rules = [_parse_rule(s, n) for n, s in lines[1:]]
    if not rules:
        raise ValidationError(f"line {n0}: prefix map document has no rules")
    return PrefixMap(rules)


def _parse_rule(s: str, ln: int) -> Tuple[Word, Word]:
    ps = s.split()
    if len(ps) != 3 or ps[1] != "->":
        raise ValidationError(f"line {ln}: expected '<word> -> <word>', got {s!r}")
    return _word_in(ps[0], ln), _word_in(ps[2], ln)


def format_prefix_map(f: PrefixMap) -> str:
    out = ["pm\n"]
    out.extend(f"{_word_out(d)} -> {_word_out(r)}\n" for d, r in f.rules)
    return "".join(out)


def format_rules(rules: Sequence[Tuple[Word, Word]]) -> str:
    """Bare rule lines for partial maps that are not complete prefix maps."""
    return "".join(f"{_word_out(d)} -> {_word_out(r)}\n" for d, r in rules)


# -- partition --------------------------------------------------------------

def parse_partition(text: str, offset: int = 0) -> Partition:
    lines = _content(_numbered(text, offset))
    if not lines:
        raise ValidationError(f"line {offset + 1}: empty partition document")
    n0, head = lines[0]
    if head != "part":
        raise ValidationError(f"line {n0}: expected 'part', got {head!r}")
    blocks = []
    for n, s in lines[1:]:
        ps = s.split()
        if not ps or ps[0] != "block:":
            raise ValidationError(
                f"line {n}: expected 'block: <word> [<word>...]', got {s!r}"
            )
        if len(ps) == 1:
            raise ValidationError(f"line {n}: block has no words")
        blocks.append(ClopenSet(_word_in(tok, n) for tok in ps[1:]))
    return Partition(blocks)


def format_partition(gamma: Partition) -> str:
    out = ["part\n"]
    out.extend(
        "block: " + " ".join(_word_out(w) for w in b.cylinders) + "\n"
        for b in gamma.blocks
    )
    return "".join(out)


# -- clopen set -------------------------------------------------------------

def parse_clopen(text: str, offset: int = 0) -> ClopenSet:
    lines = _content(_numbered(text, offset))
    if not lines:
        raise ValidationError(f"line {offset + 1}: empty clopen document")
    n0, head = lines[0]
    if head != "clopen":
        raise ValidationError(f"line {n0}: expected 'clopen', got {head!r}")
    words = []
    for n, s in lines[1:]:
        ps = s.split()
        if len(ps) != 1:
            raise ValidationError(f"line {n}: expected one word per line, got {s!r}")
        words.append(_word_in(ps[0], n))
    return ClopenSet(words)


def format_clopen(C: ClopenSet) -> str:
    out = ["clopen\n"]
    out.extend(_word_out(w) + "\n" for w in C.cylinders)
    return "".join(out)


# -- tower ------------------------------------------------------------------

def parse_tower(text: str, offset: int = 0) -> RelationTower:
    raw = text.splitlines()
    head_idx = None
    for i, ln in enumerate(raw):
        if ln.strip():
            head_idx = i
            break
    if head_idx is None:
        raise ValidationError(f"line {offset + 1}: empty tower document")
    n0 = offset + head_idx + 1
    parts = raw[head_idx].strip().split()
    body = "\n".join(raw[head_idx + 1 :])
    body_offset = offset + head_idx + 1
    if parts[0] != "tower":
        raise ValidationError(
            f"line {n0}: expected 'tower graph' or 'tower clopen <level>'"
        )
    if parts[1:] == ["graph"]:
        return graph_tower(parse_prefix_map(body, offset=body_offset))
    if len(parts) == 3 and parts[1] == "clopen":
        level = _int(parts[2], n0, "level")
        return clopen_tower(level, parse_relation(body, offset=body_offset))
    raise ValidationError(
        f"line {n0}: expected 'tower graph' or 'tower clopen <level>', "
        f"got {raw[head_idx].strip()!r}"
    )


def format_tower(T: RelationTower) -> str:
    if T.kind == "graph":
        return "tower graph\n" + format_prefix_map(T.f)
    if T.kind == "clopen":
        return f"tower clopen {T.level}\n" + format_relation(T.seed)
    raise ValidationError("approximate towers have no text form")


# -- dyadic values ----------------------------------------------------------

def format_dyadic(v: Union[Fraction, int]) -> str:
    f = Fraction(v)
    if f == 0:
        return "0"
    if f == 1:
        return "1"
    num, den = f.numerator, f.denominator
    if num == 1 and den & (den - 1) == 0:
        return f"2^-{den.bit_length() - 1}"
    if den == 1:
        return str(num)
    return f"{num}/{den}"


# -- generic documents ------------------------------------------------------

Value = Union[
    IndexRelation,
    Tuple[IndexRelation, ...],
    PrefixMap,
    Partition,
    ClopenSet,
    RelationTower,
]


@dataclass(frozen=True)
class Document:
    kind: str
    value: Value


_FORMATTERS = {
    "relation": format_relation,
    "relation-set": format_relation_set,
    "prefixmap": format_prefix_map,
    "partition": format_partition,
    "clopen": format_clopen,
    "tower": format_tower,
}


def parse(text: str) -> Document:
    """Parse any document, dispatching on the header keyword."""
    lines = _content(_numbered(text))
    if not lines:
        raise ValidationError("line 1: empty document")
    keyword = lines[0][1].split()[0]
    if keyword == "rel":
        rels = parse_relation_set(text)
        if len(rels) == 1:
            return Document("relation", rels[0])
        return Document("relation-set", rels)
    if keyword == "pm":
        return Document("prefixmap", parse_prefix_map(text))
    if keyword == "part":
        return Document("partition", parse_partition(text))
    if keyword == "clopen":
        return Document("clopen", parse_clopen(text))
    if keyword == "tower":
        return Document("tower", parse_tower(text))
    raise ValidationError(
        f"line {lines[0][0]}: unknown document header {keyword!r}"
    )


def format(doc: Document) -> str:
    fmt = _FORMATTERS.get(doc.kind)
    if fmt is None:
        raise ValidationError(f"unknown document kind {doc.kind!r}")
    return fmt(doc.value)
