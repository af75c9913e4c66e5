"""Corpus assembly: orientation changes, crossing flips, dataset protocol.

The graph carries no coordinates, so rotations and mirrorings act purely as
relabelings: the crossing order is permuted and the two walks inside a lane
may swap.  Layers are never exchanged between lanes (the fabric is not
turned over), which is exactly why fingerprints are unaffected.
"""

from __future__ import annotations

import csv
import hashlib
import os
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .graph import TERMINAL, TextileGraph
from .patterns import FAMILY_NAMES, generate

TRANSFORMS = ("rotate90", "rotate180", "rotate270", "mirror-h", "mirror-v")


def _relabel(
    g: TextileGraph,
    perm: list[int],
    swap_top: bool,
    swap_bottom: bool,
    lane_flip: frozenset[int] = frozenset(),
) -> TextileGraph:
    n = g.crossing_count
    slot_map = [0] * (4 * n)
    for c in range(n):
        base = 4 * c
        new_base = 4 * perm[c]
        flip = 2 if c in lane_flip else 0
        for s in range(4):
            ns = s
            if swap_top and s < 2:
                ns = s ^ 1
            elif swap_bottom and s >= 2:
                ns = s ^ 1
            slot_map[base + s] = new_base + (ns ^ flip)
    peers = [TERMINAL] * (4 * n)
    for node in range(4 * n):
        p = g.peer(node)
        peers[slot_map[node]] = p if p == TERMINAL else slot_map[p]
    return TextileGraph(peers, g.label)


def transform(g: TextileGraph, op: str) -> TextileGraph:
    """Apply one orientation change; fingerprints are invariant under all."""
    n = g.crossing_count
    reverse = list(range(n - 1, -1, -1))
    identity = list(range(n))
    if op == "rotate90":
        return _relabel(g, reverse, True, False)
    if op == "rotate180":
        return _relabel(g, reverse, True, True)
    if op == "rotate270":
        return _relabel(g, reverse, False, True)
    if op == "mirror-h":
        return _relabel(g, identity, True, True)
    if op == "mirror-v":
        return _relabel(g, reverse, False, False)
    raise ValueError(f"unknown transform {op!r}; expected one of {', '.join(TRANSFORMS)}")


@dataclass(frozen=True)
class PerturbationPlan:
    """Noise applied to a generated specimen before it enters a corpus."""

    flip_fraction: float = 0.01
    rotate: str = "none"  # none, 90, 180, 270
    mirror: str = "none"  # none, h, v
    seed: int = 0


def perturb(g: TextileGraph, plan: PerturbationPlan) -> TextileGraph:
    """Flip a seeded sample of crossings, then reorient per the plan.

    A flip exchanges which thread pair of the crossing lies on top, so the
    labels of all incident links change.
    """
    n = g.crossing_count
    rng = random.Random(plan.seed)
    count = round(plan.flip_fraction * n)
    flipped = frozenset(rng.sample(range(n), count)) if count else frozenset()
    out = _relabel(g, list(range(n)), False, False, lane_flip=flipped)
    if plan.rotate != "none":
        out = transform(out, f"rotate{plan.rotate}")
    if plan.mirror == "h":
        out = transform(out, "mirror-h")
    elif plan.mirror == "v":
        out = transform(out, "mirror-v")
    return out


# -- dataset protocol --------------------------------------------------


@dataclass(frozen=True)
class CorpusConfig:
    families: tuple[str, ...] = FAMILY_NAMES
    samples: int = 25
    rows: int = 24
    cols: int = 24
    size_low: int | None = None
    size_high: int | None = None
    flip_rate: float = 0.01
    rotate_rate: float = 0.85
    mirror_rate: float = 0.35
    seed: int = 0

    @classmethod
    def full_scale(cls, **overrides) -> "CorpusConfig":
        base = cls(samples=100, rows=72, cols=72)
        return replace(base, **overrides)

    def size_bounds(self) -> tuple[int, int]:
        lo = self.size_low if self.size_low is not None else max(6, round(self.rows * 0.7))
        hi = self.size_high if self.size_high is not None else round(self.rows * 1.3)
        return lo, max(lo, hi)


@dataclass
class Corpus:
    graphs: dict[str, TextileGraph]
    labels: dict[str, str]

    def __len__(self) -> int:
        return len(self.graphs)


def _sample_seed(master: int, family: str, index: int) -> int:
    # Stable across platforms and processes; str hash() is salted, so no.
    digest = hashlib.sha256(f"{master}/{family}/{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def build_corpus(cfg: CorpusConfig) -> Corpus:
    """Generate the full labelled corpus in memory, deterministically."""
    unknown = [f for f in cfg.families if f not in FAMILY_NAMES]
    if unknown:
        raise ValueError(f"unknown families: {', '.join(unknown)}")
    lo, hi = cfg.size_bounds()
    graphs: dict[str, TextileGraph] = {}
    labels: dict[str, str] = {}
    for family in cfg.families:
        for i in range(cfg.samples):
            rng = random.Random(_sample_seed(cfg.seed, family, i))
            rows = rng.randint(lo, hi)
            cols = rng.randint(lo, hi)
            g = generate(family, rows, cols, rng.randrange(2**31))
            plan = PerturbationPlan(
                flip_fraction=cfg.flip_rate,
                rotate=rng.choice(("90", "180", "270")) if rng.random() < cfg.rotate_rate else "none",
                mirror=rng.choice(("h", "v")) if rng.random() < cfg.mirror_rate else "none",
                seed=rng.randrange(2**31),
            )
            item = f"{family}-{i:03d}"
            graphs[item] = perturb(g, plan)
            labels[item] = family
    return Corpus(graphs, labels)


def write_corpus(corpus: Corpus, out_dir: str) -> str:
    """Write one TG1 file per item plus manifest.csv; returns manifest path."""
    from .graph import save

    os.makedirs(out_dir, exist_ok=True)
    manifest = os.path.join(out_dir, "manifest.csv")
    with open(manifest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label"])
        for item, g in corpus.graphs.items():
            rel = f"{item}.tg1"
            save(g, os.path.join(out_dir, rel))
            writer.writerow([rel, corpus.labels[item]])
    return manifest


def load_corpus(manifest_path: str) -> Corpus:
    """Read a manifest.csv and every graph it references."""
    from .graph import load

    base = os.path.dirname(os.path.abspath(manifest_path))
    graphs: dict[str, TextileGraph] = {}
    labels: dict[str, str] = {}
    with open(manifest_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["path", "label"]:
            raise ValueError(f"{manifest_path}: expected a 'path,label' header")
        for row in reader:
            if not row:
                continue
            if len(row) < 2:
                raise ValueError(f"{manifest_path}: short row {row!r}")
            rel, label = row[0].strip(), row[1].strip()
            item = os.path.splitext(rel)[0].replace(os.sep, "/")
            graphs[item] = load(os.path.join(base, rel))
            labels[item] = label
    return Corpus(graphs, labels)
