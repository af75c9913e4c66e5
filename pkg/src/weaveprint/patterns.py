"""Synthetic textile families.

Every family builder lays threads over a fixed set of crossings through a
small path DSL: a thread is a sequence of (crossing, on_top) visits, and
consecutive visits are joined into links.  The first and last visit of each
thread keep terminal ends.  ``rows * cols`` acts as a crossing budget; grid
weaves hit it exactly, the other families approximate it with their own
geometry.

Layer conventions (which strand passes over which) are fixed constants per
family, chosen so that the families produce distinct local label textures.
"""

from __future__ import annotations

import math
import random
from typing import Callable, Sequence

from .graph import TERMINAL, TextileGraph


class ThreadPathError(ValueError):
    """A thread path that cannot be realized over the crossing set."""


class GraphBuilder:
    """Accumulates thread paths, then emits a canonical graph."""

    def __init__(self, crossings: int):
        self._peers = [TERMINAL] * (4 * crossings)
        self._used = [False] * (2 * crossings)

    def thread(self, visits: Sequence[tuple[int, bool]]) -> None:
        prev_out: int | None = None
        prev_crossing = -1
        for crossing, on_top in visits:
            if crossing == prev_crossing:
                raise ThreadPathError(
                    f"consecutive visits to crossing {crossing}; links must join "
                    "different crossings"
                )
            lane = 2 * crossing + (0 if on_top else 1)
            if self._used[lane]:
                raise ThreadPathError(
                    f"{'top' if on_top else 'bottom'} lane of crossing {crossing} "
                    "is already occupied"
                )
            self._used[lane] = True
            entry = 4 * crossing + (0 if on_top else 2)
            if prev_out is not None:
                self._peers[prev_out] = entry
                self._peers[entry] = prev_out
            prev_out = entry + 1
            prev_crossing = crossing

    def build(self, label: str | None = None) -> TextileGraph:
        missing = [i // 2 for i, used in enumerate(self._used) if not used]
        if missing:
            raise ThreadPathError(f"lanes left unvisited at crossings {missing[:8]}")
        return TextileGraph(self._peers, label)


def weave_from_layers(layers: Sequence[Sequence[bool]], label: str | None = None) -> TextileGraph:
    """Biaxial weave from a layer matrix: entry True puts the weft on top."""
    rows = len(layers)
    cols = len(layers[0]) if rows else 0
    if any(len(r) != cols for r in layers):
        raise ValueError("layer matrix must be rectangular")
    b = GraphBuilder(rows * cols)
    for i in range(rows):
        b.thread([(i * cols + j, bool(layers[i][j])) for j in range(cols)])
    for j in range(cols):
        b.thread([(i * cols + j, not layers[i][j]) for i in range(rows)])
    return b.build(label)


def concat_graphs(parts: Sequence[TextileGraph], label: str | None = None) -> TextileGraph:
    """Disjoint union; crossing ids of later parts are shifted."""
    peers: list[int] = []
    offset = 0
    for g in parts:
        peers.extend(p if p == TERMINAL else p + offset for p in g.peers())
        offset += g.node_count
    return TextileGraph(peers, label)


# -- layer matrices for grid weaves -----------------------------------


def _plain(i: int, j: int) -> bool:
    return (i + j) % 2 == 0

def _twill(over: int, under: int) -> Callable[[int, int], bool]:
    period = over + under
    return lambda i, j: (j - i) % period < over

def _twill_left(over: int, under: int) -> Callable[[int, int], bool]:
    period = over + under
    return lambda i, j: (j + i) % period < over

def _satin(float_len: int, step: int) -> Callable[[int, int], bool]:
    period = float_len + 1
    return lambda i, j: (j - i * step) % period != 0

def _basket(size: int) -> Callable[[int, int], bool]:
    return lambda i, j: (i // size + j // size) % 2 == 0

def _herringbone(width: int) -> Callable[[int, int], bool]:
    right = _twill(2, 1)
    left = _twill_left(2, 1)
    return lambda i, j: right(i, j) if (j // width) % 2 == 0 else left(i, j)


def _layer_matrix(rows: int, cols: int, fn: Callable[[int, int], bool]) -> list[list[bool]]:
    return [[fn(i, j) for j in range(cols)] for i in range(rows)]


def _grid_family(fn: Callable[[int, int], bool]):
    def build(rows: int, cols: int, rng: random.Random) -> TextileGraph:
        return weave_from_layers(_layer_matrix(rows, cols, fn))

    return build


def _satin_family(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Fixed float length keeps the category coherent; the two coprime
    # interruption steps are mirror images of each other.
    step = rng.choice((2, 3))
    return weave_from_layers(_layer_matrix(rows, cols, _satin(4, step)))


def _warp_above(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    return weave_from_layers([[False] * cols for _ in range(rows)])


# -- patchwork weaves --------------------------------------------------


def _patch_layers(
    rows: int,
    cols: int,
    rng: random.Random,
    palette: Sequence[Callable[[int, int], bool]],
    lo: int,
    hi: int,
    plain_share: float,
) -> list[list[bool]]:
    # Plain ground with motif patches; the ground share is drawn per sample
    # so specimens range from motif-dense to almost-plain.
    layers = [[False] * cols for _ in range(rows)]

    def fill(r0: int, r1: int, c0: int, c1: int) -> None:
        h, w = r1 - r0, c1 - c0
        if max(h, w) > hi:
            if h >= w:
                cut = r0 + (rng.randint(lo, h - lo) if h >= 2 * lo else h // 2)
                fill(r0, cut, c0, c1)
                fill(cut, r1, c0, c1)
            else:
                cut = c0 + (rng.randint(lo, w - lo) if w >= 2 * lo else w // 2)
                fill(r0, r1, c0, cut)
                fill(r0, r1, cut, c1)
            return
        pat = _plain if rng.random() < plain_share else rng.choice(palette)
        oi, oj = rng.randrange(12), rng.randrange(12)
        for i in range(r0, r1):
            for j in range(c0, c1):
                layers[i][j] = pat(i - r0 + oi, j - c0 + oj)

    fill(0, rows, 0, cols)
    return layers


_ANDEAN_PALETTE = (_twill(2, 1), _twill_left(2, 1), _herringbone(4), _basket(2))
_VIET_WEAVE_PALETTE = (_satin(4, 2), _basket(2), _twill(2, 2))


def _andean(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    share = rng.uniform(0.48, 0.58)
    return weave_from_layers(_patch_layers(rows, cols, rng, _ANDEAN_PALETTE, 3, 8, share))


def _viet_weave(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    share = rng.uniform(0.48, 0.58)
    return weave_from_layers(_patch_layers(rows, cols, rng, _VIET_WEAVE_PALETTE, 4, 9, share))


# -- triaxial ----------------------------------------------------------


def _triaxial(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Horizontal wefts plus two diagonal systems; right-leaning diagonals
    # occupy even-parity cells, left-leaning the odd ones.  The weft passes
    # over right-leaning strands and under left-leaning ones.
    b = GraphBuilder(rows * cols)
    cid = lambda i, j: i * cols + j  # noqa: E731
    weft_top = lambda i, j: (i + j) % 2 == 0  # noqa: E731
    for i in range(rows):
        b.thread([(cid(i, j), weft_top(i, j)) for j in range(cols)])
    for i0, j0 in [(0, j) for j in range(0, cols, 2)] + [
        (i, 0) for i in range(2, rows, 2)
    ]:
        path = []
        i, j = i0, j0
        while i < rows and j < cols:
            path.append((cid(i, j), not weft_top(i, j)))
            i += 1
            j += 1
        b.thread(path)
    for i0, j0 in [(0, j) for j in range(1, cols, 2)] + [
        (i, cols - 1) for i in range(1, rows) if (i + cols - 1) % 2
    ]:
        path = []
        i, j = i0, j0
        while i < rows and j >= 0:
            path.append((cid(i, j), not weft_top(i, j)))
            i += 1
            j -= 1
        b.thread(path)
    return b.build()


# -- knits -------------------------------------------------------------


def _weft_knit(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Courses of loops: each loop pierces the arc below it (one crossing per
    # leg) and the splayed legs of adjacent loops cross each other once.
    loops = max(2, cols // 3)
    courses = max(3, rows)
    L, R = loops, courses
    per_row = 3 * L - 1
    X = lambda i, j, s: i * per_row + 2 * j + s  # noqa: E731
    Y = lambda i, j: i * per_row + 2 * L + j  # noqa: E731
    b = GraphBuilder((R - 1) * per_row)
    b.thread([(X(0, j, s), s == 1) for j in range(L) for s in (0, 1)])
    for t in range(1, R):
        path: list[tuple[int, bool]] = []
        for j in range(L):
            if j > 0:
                path.append((Y(t - 1, j - 1), True))
            path.append((X(t - 1, j, 0), True))
            if t <= R - 2:
                path.append((X(t, j, 0), False))
                path.append((X(t, j, 1), True))
            if j < L - 1:
                path.append((Y(t - 1, j), False))
            path.append((X(t - 1, j, 1), False))
        b.thread(path)
    return b.build()


def _warp_knit(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Pillar chains, one yarn per wale, with underlaps to the next wale on
    # every other course.  Chains self-interlock, so a yarn meets itself.
    wales = max(2, cols // 2)
    courses = max(3, rows)
    W, R = wales, courses
    nid = 0
    ids: dict[tuple, int] = {}
    for i in range(R - 1):
        for q in range(W):
            for s in (0, 1):
                ids[("p", i, q, s)] = nid
                nid += 1
        if i % 2 == 0:
            for q in range(W - 1):
                ids[("l", i, q)] = nid
                nid += 1
    b = GraphBuilder(nid)
    P = lambda i, q, s: ids[("p", i, q, s)]  # noqa: E731
    for q in range(W):
        path: list[tuple[int, bool]] = []
        for i in range(R):
            if i > 0:
                path.append((P(i - 1, q, 0), True))
            if i <= R - 2:
                path.append((P(i, q, 0), False))
                path.append((P(i, q, 1), True))
            if i > 0:
                path.append((P(i - 1, q, 1), False))
            if i % 2 == 0 and i <= R - 2:
                if q > 0:
                    path.append((ids[("l", i, q - 1)], False))
                if q < W - 1:
                    path.append((ids[("l", i, q)], True))
        b.thread(path)
    return b.build()


# -- chain mail --------------------------------------------------------


def _chain_mail(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Open rings in a grid; every neighbouring pair of rings crosses twice
    # with alternating over/under, like riveted mail with the rings cut.
    ring_rows = max(2, rows // 2)
    ring_cols = max(2, cols // 2)
    nid = 0
    ids: dict[tuple, int] = {}
    for i in range(ring_rows):
        for j in range(ring_cols):
            if j < ring_cols - 1:
                ids[("h", i, j, 0)] = nid
                ids[("h", i, j, 1)] = nid + 1
                nid += 2
            if i < ring_rows - 1:
                ids[("v", i, j, 0)] = nid
                ids[("v", i, j, 1)] = nid + 1
                nid += 2
    b = GraphBuilder(nid)
    for i in range(ring_rows):
        for j in range(ring_cols):
            path: list[tuple[int, bool]] = []
            if j > 0:
                path += [(ids[("h", i, j - 1, 0)], False), (ids[("h", i, j - 1, 1)], True)]
            if i > 0:
                path += [(ids[("v", i - 1, j, 0)], True), (ids[("v", i - 1, j, 1)], False)]
            if j < ring_cols - 1:
                path += [(ids[("h", i, j, 0)], True), (ids[("h", i, j, 1)], False)]
            if i < ring_rows - 1:
                path += [(ids[("v", i, j, 0)], False), (ids[("v", i, j, 1)], True)]
            if path:
                b.thread(path)
    return b.build()


# -- braid -------------------------------------------------------------


def _braid(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # A bundle of narrow flat braids; each braid draws its own strand count,
    # and the leading strand always passes over.
    budget = rows * cols
    n_braids = max(1, cols // 4)
    per_braid = budget / n_braids
    parts = []
    for _ in range(n_braids):
        s = rng.choice((3, 4, 5))
        length = max(4, round(2 * per_braid / (s - 1)))
        parts.append(_one_braid(s, length))
    return concat_graphs(parts)


def _one_braid(strands: int, length: int) -> TextileGraph:
    paths: list[list[tuple[int, bool]]] = [[] for _ in range(strands)]
    occupant = list(range(strands))
    nid = 0
    for r in range(length):
        for p in range(r % 2, strands - 1, 2):
            left, right = occupant[p], occupant[p + 1]
            paths[left].append((nid, True))
            paths[right].append((nid, False))
            occupant[p], occupant[p + 1] = right, left
            nid += 1
    b = GraphBuilder(nid)
    for path in paths:
        b.thread(path)
    return b.build()


# -- mixed media -------------------------------------------------------


def _viet_mix(rows: int, cols: int, rng: random.Random) -> TextileGraph:
    # Separate panels of mail, braid and weave stitched into one item.
    budget = rows * cols
    weights = [rng.uniform(1.6, 2.2), rng.uniform(0.5, 0.9), rng.uniform(0.5, 0.9)]
    scale = budget / sum(weights)
    parts = []
    for kind, w in zip(("mail", "braid", "weave"), weights):
        share = max(16, round(w * scale))
        r = max(4, round(math.sqrt(share * rows / max(cols, 1))))
        c = max(4, round(share / r))
        if kind == "mail":
            parts.append(_chain_mail(r, c, rng))
        elif kind == "braid":
            parts.append(_braid(r, c, rng))
        else:
            fn = rng.choice((_plain, _twill(2, 2)))
            parts.append(weave_from_layers(_layer_matrix(r, c, fn)))
    return concat_graphs(parts)


FAMILIES: dict[str, Callable[[int, int, random.Random], TextileGraph]] = {
    "plain": _grid_family(_plain),
    "twill-2-1": _grid_family(_twill(2, 1)),
    "twill-2-2": _grid_family(_twill(2, 2)),
    "twill-3-1": _grid_family(_twill(3, 1)),
    "twill-3-3": _grid_family(_twill(3, 3)),
    "twill-4-4": _grid_family(_twill(4, 4)),
    "satin": _satin_family,
    "andean": _andean,
    "viet-weave": _viet_weave,
    "triaxial": _triaxial,
    "weft-knit": _weft_knit,
    "warp-knit": _warp_knit,
    "chain-mail": _chain_mail,
    "braid": _braid,
    "warp-above": _warp_above,
    "viet-mix": _viet_mix,
}

FAMILY_NAMES = tuple(FAMILIES)


def generate(family: str, rows: int, cols: int, seed: int = 0) -> TextileGraph:
    """Build one labelled specimen of a family at the given size budget."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; expected one of {', '.join(FAMILY_NAMES)}"
        ) from None
    if rows < 1 or cols < 1:
        raise ValueError(f"size budget must be positive, got {rows}x{cols}")
    g = builder(rows, cols, random.Random(seed))
    return g.with_label(family)
