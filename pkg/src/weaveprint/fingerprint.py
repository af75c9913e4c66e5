"""Neighbourhood walks over crossing graphs and the fingerprints built from them.

Starting from each of a crossing's four nodes, the thread is followed for up
to ``k`` links, recording one label per link: ``a`` when the link changes
layer (one end on top, one below), ``n`` when it stays on the same layer,
``t`` when the thread ends.  Walks that end early are padded.  The two walks
of the top lane and the two of the bottom lane are unordered, so each pair is
sorted; the top pair always comes first, which keeps the description stable
under rotations and mirrorings of the fabric.

A fingerprint is the multiset of these per-crossing descriptions.
"""

from __future__ import annotations

from collections import Counter
from enum import IntEnum
from typing import Iterator, Mapping, NamedTuple

from .graph import TERMINAL, TextileGraph

Sequence4 = tuple[int, ...]
Pair = tuple[Sequence4, Sequence4]


class EdgeLabel(IntEnum):
    """Link labels, ordered as they sort inside a neighbourhood."""

    ALTERNATING = 0
    STRAIGHT = 1
    TERMINATED = 2
    PADDING = 3

    @property
    def char(self) -> str:
        return "ant-"[self.value]


_LABEL_CHARS = "ant-"
_CHAR_TO_LABEL = {c: i for i, c in enumerate(_LABEL_CHARS)}


class Neighbourhood(NamedTuple):
    """Canonical description of one crossing's surroundings at depth k."""

    top: Pair
    bottom: Pair

    @property
    def k(self) -> int:
        return len(self.top[0])

    def code(self) -> str:
        return neighbourhood_code(self)


def neighbourhood_code(nb: "Neighbourhood | tuple[Pair, Pair]") -> str:
    """Stable string form, e.g. ``[at|at][an|na]``."""
    top, bottom = nb
    join = lambda seq: "".join(_LABEL_CHARS[v] for v in seq)  # noqa: E731
    return f"[{join(top[0])}|{join(top[1])}][{join(bottom[0])}|{join(bottom[1])}]"


def parse_neighbourhood_code(code: str) -> Neighbourhood:
    """Inverse of :func:`neighbourhood_code`; canonicalizes pair order."""
    if not (code.startswith("[") and code.endswith("]")) or "][" not in code:
        raise ValueError(f"malformed neighbourhood code {code!r}")
    left, right = code[1:-1].split("][", 1)
    seqs = []
    for half in (left, right):
        if half.count("|") != 1:
            raise ValueError(f"malformed neighbourhood code {code!r}")
        for part in half.split("|"):
            try:
                seqs.append(tuple(_CHAR_TO_LABEL[c] for c in part))
            except KeyError:
                raise ValueError(f"bad label character in {code!r}") from None
    if len({len(s) for s in seqs}) != 1:
        raise ValueError(f"unequal walk lengths in {code!r}")
    top = (seqs[0], seqs[1]) if seqs[0] <= seqs[1] else (seqs[1], seqs[0])
    bottom = (seqs[2], seqs[3]) if seqs[2] <= seqs[3] else (seqs[3], seqs[2])
    return Neighbourhood(top, bottom)


def edge_label(g: TextileGraph, node: int) -> EdgeLabel:
    """Label of the link leaving one node."""
    p = g.peer(node)
    if p == TERMINAL:
        return EdgeLabel.TERMINATED
    return EdgeLabel.STRAIGHT if g.on_top(node) == g.on_top(p) else EdgeLabel.ALTERNATING


def _walk(g: TextileGraph, start: int, k: int) -> Sequence4:
    peers = g._peers
    on_top = g._on_top
    opposite = g._opposite
    seq: list[int] = []
    cur = start
    for _ in range(k):
        nxt = peers[cur]
        if nxt < 0:
            seq.append(2)
            break
        seq.append(1 if on_top[cur] == on_top[nxt] else 0)
        cur = opposite[nxt]
    if len(seq) < k:
        seq.extend([3] * (k - len(seq)))
    return tuple(seq)


def neighbourhood(g: TextileGraph, crossing: int, k: int) -> Neighbourhood:
    """Depth-k description of one crossing."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if not 0 <= crossing < g.crossing_count:
        raise ValueError(f"crossing {crossing} out of range")
    base = 4 * crossing
    w0, w1, w2, w3 = (_walk(g, base + s, k) for s in range(4))
    top = (w0, w1) if w0 <= w1 else (w1, w0)
    bottom = (w2, w3) if w2 <= w3 else (w3, w2)
    return Neighbourhood(top, bottom)


class Fingerprint:
    """Sparse multiset of neighbourhood descriptions at a fixed depth.

    ``counts`` maps canonical neighbourhood keys to positive counts and must
    not be mutated by callers.  ``total`` equals the crossing count of the
    source graph.
    """

    __slots__ = ("_counts", "k", "total")

    def __init__(self, counts: Mapping[tuple[Pair, Pair], int], k: int):
        self._counts = dict(counts)
        self.k = k
        self.total = sum(self._counts.values())

    @property
    def counts(self) -> dict[tuple[Pair, Pair], int]:
        return self._counts

    def get(self, key, default: int = 0) -> int:
        return self._counts.get(key, default)

    def items(self):
        return self._counts.items()

    def neighbourhoods(self) -> Iterator[tuple[Neighbourhood, int]]:
        for key, count in self._counts.items():
            yield Neighbourhood(*key), count

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, key) -> bool:
        return key in self._counts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self.k == other.k and self._counts == other._counts

    def __hash__(self) -> None:  # type: ignore[override]
        raise TypeError("fingerprints are not hashable")

    def __repr__(self) -> str:
        return f"<Fingerprint k={self.k} distinct={len(self._counts)} total={self.total}>"


def fingerprint(g: TextileGraph, k: int) -> Fingerprint:
    """Fingerprint of a whole graph: one walk set per crossing, counted.

    Runs in O(crossings * k).  Each walk is packed into an int, two bits per
    label with the first step in the high bits, so lexicographic order of the
    label sequences is numeric order of the codes and the whole crossing
    reduces to one int key; codes are expanded to tuple keys only once per
    distinct neighbourhood at the end.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    peers = g._peers
    on_top = g._on_top
    opposite = g._opposite
    # pads[p] is a terminal label followed by p PADDING labels (0b11 each)
    pads = [(3 << (2 * p)) - 1 for p in range(k)]
    width = 2 * k
    steps = range(k)
    codes: list[int] = []
    emit = codes.append
    # the four walks are unrolled: loop plumbing here costs as much as a step
    for base in range(0, len(peers), 4):
        w0 = 0
        cur = base
        for i in steps:
            nxt = peers[cur]
            if nxt < 0:
                w0 = (w0 << (2 * (k - i))) | pads[k - 1 - i]
                break
            w0 = (w0 << 2) | (1 if on_top[cur] == on_top[nxt] else 0)
            cur = opposite[nxt]
        w1 = 0
        cur = base + 1
        for i in steps:
            nxt = peers[cur]
            if nxt < 0:
                w1 = (w1 << (2 * (k - i))) | pads[k - 1 - i]
                break
            w1 = (w1 << 2) | (1 if on_top[cur] == on_top[nxt] else 0)
            cur = opposite[nxt]
        w2 = 0
        cur = base + 2
        for i in steps:
            nxt = peers[cur]
            if nxt < 0:
                w2 = (w2 << (2 * (k - i))) | pads[k - 1 - i]
                break
            w2 = (w2 << 2) | (1 if on_top[cur] == on_top[nxt] else 0)
            cur = opposite[nxt]
        w3 = 0
        cur = base + 3
        for i in steps:
            nxt = peers[cur]
            if nxt < 0:
                w3 = (w3 << (2 * (k - i))) | pads[k - 1 - i]
                break
            w3 = (w3 << 2) | (1 if on_top[cur] == on_top[nxt] else 0)
            cur = opposite[nxt]
        if w0 > w1:
            w0, w1 = w1, w0
        if w2 > w3:
            w2, w3 = w3, w2
        emit((((w0 << width | w1) << width | w2) << width) | w3)
    code_counts = Counter(codes)
    shifts = tuple(2 * (k - 1 - i) for i in range(k))
    mask = (1 << width) - 1

    def unpack(code: int) -> Sequence4:
        return tuple((code >> s) & 3 for s in shifts)

    counts = {
        (
            (unpack(c >> 3 * width & mask), unpack(c >> 2 * width & mask)),
            (unpack(c >> width & mask), unpack(c & mask)),
        ): count
        for c, count in code_counts.items()
    }
    return Fingerprint(counts, k)
