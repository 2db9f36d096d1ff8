"""Finite binary game trees for composed coin-flipping games.

A game is a binary tree: each internal node is one coin flip ("up" means
outcome 0, which is the side the analyzed player wants), each leaf ends the
game with label 0 (up side wins) or 1 (down side wins).  The honest game
reaches a node x of depth D(x) with probability 2**-D(x).

Per node we track the honest win probability P_W(x) (probability that
outcome 0 wins the game, given play has reached x) and, for internal nodes,
the advantage Delta(x) = P_W(up child) - P_W(down child), the amount a
cheater gains by winning the flip at x.

Depths are capped at 52 so every 2**-D and every P_W is an exact dyadic
rational in 64-bit floats; the identities tested elsewhere then hold to
machine precision instead of approximately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import rng

MAX_DEPTH = 52


class TreeParseError(ValueError):
    """Malformed tree document; message names the offending node path."""


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Flip:
    up: "Node"
    down: "Node"


Node = Leaf | Flip
GameTree = Node


@dataclass(frozen=True)
class NodeInfo:
    depth: int
    p_w: float
    delta: float | None  # None on leaves


@dataclass(frozen=True)
class TreeAnnotation:
    """Per-node facts keyed by the root-to-node path ('' = root, then U/D)."""

    nodes: dict[str, NodeInfo]

    @property
    def p_w_root(self) -> float:
        return self.nodes[""].p_w

    def internal(self) -> list[tuple[str, NodeInfo]]:
        return [(p, info) for p, info in self.nodes.items() if info.delta is not None]


def parse_tree(text: str) -> GameTree:
    """Parse the JSON tree document.

    Schema: a node is {"leaf": 0|1} or {"flip": {"up": node, "down": node}}.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeParseError(f"invalid JSON: {exc}") from exc
    return _parse_node(doc, "")


def _parse_node(obj, path: str) -> Node:
    where = f"node at path '{path}'"
    if not isinstance(obj, dict):
        raise TreeParseError(f"{where}: expected an object, got {type(obj).__name__}")
    if set(obj) == {"leaf"}:
        label = obj["leaf"]
        # bool is an int subclass, so test it first
        if isinstance(label, bool) or label not in (0, 1):
            raise TreeParseError(f"{where}: leaf label must be 0 or 1, got {label!r}")
        return Leaf(label)
    if set(obj) == {"flip"}:
        inner = obj["flip"]
        if not isinstance(inner, dict):
            raise TreeParseError(f"{where}: 'flip' must hold an object")
        for child in ("up", "down"):
            if child not in inner:
                raise TreeParseError(f"{where}: missing '{child}' child")
        if set(inner) != {"up", "down"}:
            extra = sorted(set(inner) - {"up", "down"})
            raise TreeParseError(f"{where}: unexpected keys {extra}")
        return Flip(_parse_node(inner["up"], path + "U"),
                    _parse_node(inner["down"], path + "D"))
    raise TreeParseError(f"{where}: expected exactly one of 'leaf' or 'flip'")


def serialize_tree(tree: GameTree) -> str:
    """Compact JSON document; round-trips through parse_tree."""
    return json.dumps(_to_obj(tree), separators=(",", ":"))


def _to_obj(node: Node):
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    return {"flip": {"up": _to_obj(node.up), "down": _to_obj(node.down)}}


def depth(tree: GameTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(depth(tree.up), depth(tree.down))


def gen_best_of(n: int) -> GameTree:
    """Early-terminating majority game over n flips (n odd).

    A leaf appears as soon as one side has won ceil(n/2) flips; its label is
    0 when the up side took the majority.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and positive, got {n}")
    if n > MAX_DEPTH:
        raise ValueError(f"n={n} exceeds the depth cap {MAX_DEPTH}")
    need = (n + 1) // 2

    def build(up_wins: int, down_wins: int) -> Node:
        if up_wins == need:
            return Leaf(0)
        if down_wins == need:
            return Leaf(1)
        return Flip(build(up_wins + 1, down_wins), build(up_wins, down_wins + 1))

    return build(0, 0)


def gen_full(tree_depth: int, labels) -> GameTree:
    """Complete tree of the given depth, leaves labeled left to right (up first)."""
    if tree_depth < 1:
        raise ValueError(f"depth must be positive, got {tree_depth}")
    if tree_depth > MAX_DEPTH:
        raise ValueError(f"depth {tree_depth} exceeds the depth cap {MAX_DEPTH}")
    labels = list(labels)
    if len(labels) != 2 ** tree_depth:
        raise ValueError(f"need {2 ** tree_depth} labels for depth {tree_depth}, "
                         f"got {len(labels)}")
    for lab in labels:
        if isinstance(lab, bool) or lab not in (0, 1):
            raise ValueError(f"leaf label must be 0 or 1, got {lab!r}")

    def build(lo: int, hi: int) -> Node:
        if hi - lo == 1:
            return Leaf(labels[lo])
        mid = (lo + hi) // 2
        return Flip(build(lo, mid), build(mid, hi))

    return build(0, 2 ** tree_depth)


def mirror(tree: GameTree) -> GameTree:
    """Same shape with every leaf label complemented."""
    if isinstance(tree, Leaf):
        return Leaf(1 - tree.label)
    return Flip(mirror(tree.up), mirror(tree.down))


def _random_node(budget: int, stream: rng.Stream) -> Node:
    if budget > 0 and stream.next_double() >= 1.0 / 3.0:
        up = _random_node(budget - 1, stream)
        down = _random_node(budget - 1, stream)
        return Flip(up, down)
    return Leaf(stream.next_u64() & 1)


def gen_random(max_depth: int, seed: int) -> GameTree:
    """Random tree of depth <= max_depth, deterministic in seed.

    Labels and shape are unconstrained; use gen_random_fair when the root
    must be a fair coin.
    """
    if max_depth < 0 or max_depth > MAX_DEPTH:
        raise ValueError(f"max_depth must be in [0, {MAX_DEPTH}], got {max_depth}")
    return _random_node(max_depth, rng.Stream(seed))


def gen_random_fair(max_depth: int, seed: int) -> GameTree:
    """Random tree with P_W(root) exactly 1/2.

    Built as Flip(T, mirror(T)) for a random T of depth <= max_depth - 1;
    mirroring complements every leaf, so P_W(mirror(T)) = 1 - P_W(T) and the
    root averages to 1/2 with no rounding at all.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if max_depth > MAX_DEPTH:
        raise ValueError(f"max_depth {max_depth} exceeds the depth cap {MAX_DEPTH}")
    sub = _random_node(max_depth - 1, rng.Stream(seed))
    return Flip(sub, mirror(sub))


def annotate(tree: GameTree) -> TreeAnnotation:
    """Compute depth, P_W and Delta for every node in one bottom-up pass."""
    if depth(tree) > MAX_DEPTH:
        raise ValueError(f"tree depth exceeds {MAX_DEPTH}; dyadic exactness "
                         "would be lost")
    nodes: dict[str, NodeInfo] = {}

    def walk(node: Node, d: int, path: str) -> float:
        if isinstance(node, Leaf):
            p = 1.0 if node.label == 0 else 0.0
            nodes[path] = NodeInfo(d, p, None)
            return p
        pu = walk(node.up, d + 1, path + "U")
        pd = walk(node.down, d + 1, path + "D")
        p = (pu + pd) / 2.0
        nodes[path] = NodeInfo(d, p, pu - pd)
        return p

    walk(tree, 0, "")
    return TreeAnnotation(nodes)


def lemma_sum(tree: GameTree) -> float:
    """Sum over internal nodes of 2**-D(x) * Delta(x)**2.

    Equals 4*p*(1-p) with p = P_W(root); in particular 1 for fair trees.
    """
    ann = annotate(tree)
    total = 0.0
    for _, info in ann.internal():
        total += 2.0 ** (-info.depth) * info.delta * info.delta
    return total


def leaf_win_mass(tree: GameTree) -> float:
    """P_W(root) recomputed as the direct leaf sum of 2**-D(y) * P_W(y)."""
    def walk(node: Node, d: int) -> float:
        if isinstance(node, Leaf):
            return 2.0 ** (-d) if node.label == 0 else 0.0
        return walk(node.up, d + 1) + walk(node.down, d + 1)

    return walk(tree, 0)
