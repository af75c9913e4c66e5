"""Crossing-graph data model and the TG1 text format.

A textile structure is modelled as a set of crossings, each a 2-tangle where
two thread segments meet.  Every crossing owns four nodes (thread ends): two
on the top lane, two on the bottom lane.  Nodes are addressed globally as
``4 * crossing + slot`` with slots 0, 1 on top and slots 2, 3 on the bottom.
Each node either continues to a node of a different crossing (its peer) or
ends at a thread terminal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

TERMINAL = -1

TOP_SLOTS = (0, 1)
BOTTOM_SLOTS = (2, 3)


class TG1Error(ValueError):
    """Malformed TG1 text.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class NodeSlot:
    """Read-only view of one node: where it continues, its layer, its twin."""

    peer: int
    on_top: bool
    opposite: int


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    nodes: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def __iter__(self) -> Iterator[ValidationIssue]:
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)


class TextileGraph:
    """Immutable crossing graph.

    The canonical constructor takes the flat peer array (length ``4 * n``)
    and derives layers and twin nodes from the slot convention.
    :meth:`from_records` accepts explicit per-node records instead, which is
    how malformed graphs are built for validation tests.
    """

    __slots__ = ("_peers", "_on_top", "_opposite", "_label")

    def __init__(self, peers: Sequence[int], label: str | None = None):
        if len(peers) % 4:
            raise ValueError(f"peer array length {len(peers)} is not a multiple of 4")
        if label is not None and ("\n" in label or "\r" in label):
            raise ValueError("label must be a single line")
        self._peers = tuple(int(p) for p in peers)
        self._on_top = tuple(slot & 2 == 0 for slot in range(len(self._peers)))
        self._opposite = tuple(slot ^ 1 for slot in range(len(self._peers)))
        self._label = label

    @classmethod
    def from_records(
        cls,
        records: Sequence[tuple[int, bool, int]],
        label: str | None = None,
    ) -> "TextileGraph":
        """Build from explicit (peer, on_top, opposite) node records."""
        g = cls([p for p, _, _ in records], label)
        g._on_top = tuple(bool(t) for _, t, _ in records)
        g._opposite = tuple(int(o) for _, _, o in records)
        return g

    # -- basic shape ---------------------------------------------------

    @property
    def label(self) -> str | None:
        return self._label

    @property
    def node_count(self) -> int:
        return len(self._peers)

    @property
    def crossing_count(self) -> int:
        return len(self._peers) // 4

    @property
    def terminal_count(self) -> int:
        return self._peers.count(TERMINAL)

    @property
    def link_count(self) -> int:
        """Number of thread links, terminated ends included: (4n + t) / 2."""
        return (self.node_count + self.terminal_count) // 2

    # -- node access ---------------------------------------------------

    def peer(self, node: int) -> int:
        return self._peers[node]

    def on_top(self, node: int) -> bool:
        return self._on_top[node]

    def opposite(self, node: int) -> int:
        return self._opposite[node]

    def crossing_of(self, node: int) -> int:
        return node // 4

    def slot(self, node: int) -> NodeSlot:
        return NodeSlot(self._peers[node], self._on_top[node], self._opposite[node])

    def slots(self) -> Iterator[NodeSlot]:
        for node in range(len(self._peers)):
            yield self.slot(node)

    def peers(self) -> tuple[int, ...]:
        return self._peers

    def with_label(self, label: str | None) -> "TextileGraph":
        g = TextileGraph(self._peers, label)
        g._on_top = self._on_top
        g._opposite = self._opposite
        return g

    # -- equality ------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TextileGraph):
            return NotImplemented
        return (
            self._peers == other._peers
            and self._on_top == other._on_top
            and self._opposite == other._opposite
            and self._label == other._label
        )

    def __hash__(self) -> int:
        return hash((self._peers, self._on_top, self._opposite, self._label))

    def __repr__(self) -> str:
        tag = f" {self._label!r}" if self._label else ""
        return f"<TextileGraph{tag} crossings={self.crossing_count}>"


def validate(g: TextileGraph) -> ValidationReport:
    """Check the structural invariants; collects issues instead of raising.

    The parity condition (4n plus the terminal count is even) is implied by
    peer symmetry, since non-terminal nodes pair up; it is stated in the
    model but can never fire on its own, so it is not re-checked here.
    """
    issues: list[ValidationIssue] = []
    n_nodes = g.node_count

    for node in range(n_nodes):
        p = g.peer(node)
        if p != TERMINAL and not 0 <= p < n_nodes:
            issues.append(
                ValidationIssue(
                    "peer-range",
                    f"node {node} has peer {p} outside 0..{n_nodes - 1}",
                    (node,),
                )
            )
            continue
        if p != TERMINAL:
            if p // 4 == node // 4:
                issues.append(
                    ValidationIssue(
                        "peer-same-crossing",
                        f"node {node} peers with node {p} of the same crossing",
                        (node, p),
                    )
                )
            elif g.peer(p) != node:
                issues.append(
                    ValidationIssue(
                        "peer-symmetry",
                        f"node {node} points to node {p}, but node {p} points to {g.peer(p)}",
                        (node, p),
                    )
                )

        o = g.opposite(node)
        if not 0 <= o < n_nodes or o // 4 != node // 4 or o == node:
            issues.append(
                ValidationIssue(
                    "opposite-crossing",
                    f"node {node} has opposite {o} outside its own crossing",
                    (node,),
                )
            )
            continue
        if g.opposite(o) != node:
            issues.append(
                ValidationIssue(
                    "opposite-involution",
                    f"node {node} has opposite {o}, but node {o} has opposite {g.opposite(o)}",
                    (node, o),
                )
            )
        if g.on_top(o) != g.on_top(node):
            issues.append(
                ValidationIssue(
                    "opposite-layer",
                    f"nodes {node} and {o} are opposites but sit on different layers",
                    (node, o),
                )
            )

    for c in range(g.crossing_count):
        tops = sum(1 for s in range(4) if g.on_top(4 * c + s))
        if tops != 2:
            issues.append(
                ValidationIssue(
                    "layer-pair",
                    f"crossing {c} has {tops} top nodes, expected exactly 2",
                    tuple(range(4 * c, 4 * c + 4)),
                )
            )

    return ValidationReport(tuple(issues))


def parse(text: str, label: str | None = None) -> TextileGraph:
    """Parse TG1 text into a validated graph.

    Raises :class:`TG1Error` with a 1-based line number on malformed input,
    and on structural violations found by :func:`validate`.  An explicit
    ``label`` argument overrides any LABEL line.
    """
    header_n: int | None = None
    file_label: str | None = None
    rows: list[tuple[int, int, int, int]] = []
    expect_label = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header_n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "TG1":
                raise TG1Error(f"expected 'TG1 <count>' header, got {line!r}", lineno)
            try:
                header_n = int(parts[1])
            except ValueError:
                raise TG1Error(f"bad crossing count {parts[1]!r}", lineno) from None
            if header_n < 0:
                raise TG1Error(f"negative crossing count {header_n}", lineno)
            expect_label = True
            continue
        if expect_label and line.startswith("LABEL"):
            rest = raw.strip()[len("LABEL") :]
            if rest and not rest[0].isspace():
                raise TG1Error(f"malformed LABEL line {line!r}", lineno)
            file_label = rest.strip()
            expect_label = False
            continue
        expect_label = False
        if len(rows) >= header_n:
            raise TG1Error(f"unexpected content after {header_n} crossing rows", lineno)
        parts = line.split()
        if len(parts) != 4:
            raise TG1Error(f"expected 4 peer fields, got {len(parts)}", lineno)
        try:
            row = tuple(int(p) for p in parts)
        except ValueError:
            raise TG1Error(f"non-integer peer field in {line!r}", lineno) from None
        rows.append(row)  # type: ignore[arg-type]

    if header_n is None:
        raise TG1Error("empty input, expected a TG1 header")
    if len(rows) < header_n:
        raise TG1Error(f"header declares {header_n} crossings, found {len(rows)}")

    peers = [p for row in rows for p in row]
    g = TextileGraph(peers, label if label is not None else file_label)
    report = validate(g)
    if not report.ok:
        first = report.issues[0]
        more = f" (+{len(report) - 1} more)" if len(report) > 1 else ""
        raise TG1Error(f"invalid graph: {first.message}{more}")
    return g


def serialize(g: TextileGraph) -> str:
    """Render the canonical TG1 text for a graph.

    Only graphs following the slot convention (slots 0, 1 on top, opposites
    adjacent) can be encoded; the format stores nothing but the peer array.
    """
    for node in range(g.node_count):
        if g.on_top(node) != (node & 2 == 0) or g.opposite(node) != node ^ 1:
            raise ValueError(
                f"node {node} deviates from the slot convention; not representable"
            )
    lines = [f"TG1 {g.crossing_count}"]
    if g.label is not None:
        lines.append(f"LABEL {g.label}")
    peers = g.peers()
    for c in range(g.crossing_count):
        lines.append(" ".join(str(p) for p in peers[4 * c : 4 * c + 4]))
    return "\n".join(lines) + "\n"


def load(path: str) -> TextileGraph:
    """Read and parse one TG1 file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(g: TextileGraph, path: str) -> None:
    """Write a graph to a TG1 file with LF line endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(g))
