"""Adversary analysis for coin games composed over a tree.

A cheater playing a tree game picks a bias eps(x) for every internal node x.
To leading order in small biases, raising the win probability from 1/2 to
1/2 + eps_tot while minimizing the total catch probability is a constrained
optimization with a closed-form solution: with S = sum over internal nodes
of 2**-D(x) |Delta(x)|**(b/(b-1)),

    eps(x) = eps_tot * sign(Delta(x)) * |Delta(x)|**(1/(b-1)) / S

and the composed game is again a cheat-sensitive coin with the same exponent
b and coefficient a_new = a * S**(1-b).  For b = 2 the tree identity S = 1
(fair trees) makes a_new = a: quadratic detection survives composition
unchanged.  For b > 2 composition strictly weakens detection.

Everything here is for the standard model; linear detection (b = 1) breaks
the closed form's exponent 1/(b-1) and is handled exactly by the walk module
instead.

brute_force_min_pc is the independent check on the closed form: an
exhaustive search of the per-node grid {-1/2, ..., 1/2} in steps of
grid_step.  It is implemented as an exact dynamic program over per-subtree
Pareto frontiers of (win probability, catch probability), which covers the
same strategy space and returns the same minimum as a literal product loop,
only in feasible time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cheat_model
from .cheat_model import CheatModel, OutcomeTriple
from .game_tree import Flip, GameTree, Leaf, annotate

Strategy = dict[str, float]

# cap on materialized grid combinations per node in the brute-force search
_MAX_COMBOS = 10_000_000


@dataclass(frozen=True)
class CompositionResult:
    """Leading-order optimum: composed sensitivity, multiplier, per-node biases."""

    a_new: float
    lam: float  # Lagrange multiplier, serialized as "lambda"
    strategy: Strategy
    eps_tot: float
    predicted_pc: float
    clipped: bool

    def to_json_dict(self) -> dict:
        return {
            "a_new": self.a_new,
            "lambda": self.lam,
            "eps_tot": self.eps_tot,
            "predicted_pc": self.predicted_pc,
            "clipped": self.clipped,
            "strategy": {path: eps for path, eps in sorted(self.strategy.items())},
        }


def _fair_internal(tree: GameTree):
    ann = annotate(tree)
    internal = ann.internal()
    if not internal:
        raise ValueError("tree has no internal node; nothing to compose")
    if abs(ann.p_w_root - 0.5) > 1e-12:
        raise ValueError(f"tree is not fair: P_W(root) = {ann.p_w_root}")
    return internal


def _weight_sum(internal, b: float) -> float:
    expo = b / (b - 1.0)
    total = 0.0
    for _, info in internal:
        if info.delta != 0.0:
            total += 2.0 ** (-info.depth) * abs(info.delta) ** expo
    return total


def leading_order(tree: GameTree, a: float, b: float, eps_tot: float) -> CompositionResult:
    """Closed-form optimal small-bias strategy and the composed a_new.

    Requires b > 1 (use the walk module for linear detection) and a fair
    tree.  Nodes with Delta = 0 cannot move the outcome and get eps = 0.
    Biases exceeding 1/2 in magnitude (possible when b != 2) are clamped
    and reported through the clipped flag.
    """
    if b <= 1.0:
        raise ValueError(f"leading_order requires b > 1, got {b}; linear "
                         "detection is solved exactly by the walk module")
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if abs(eps_tot) > 0.5:
        raise ValueError(f"|eps_tot| must be <= 1/2, got {eps_tot}")
    internal = _fair_internal(tree)
    s = _weight_sum(internal, b)
    if s == 0.0:
        raise ValueError("every Delta is zero; no strategy can move the outcome")

    expo = 1.0 / (b - 1.0)
    strategy: Strategy = {}
    clipped = False
    for path, info in internal:
        if info.delta == 0.0:
            strategy[path] = 0.0
            continue
        eps = eps_tot * math.copysign(abs(info.delta) ** expo, info.delta) / s
        if abs(eps) > 0.5:
            eps = math.copysign(0.5, eps)
            clipped = True
        strategy[path] = eps

    a_new = a * s ** (1.0 - b)
    lam = math.copysign(a * b * (abs(eps_tot) / s) ** (b - 1.0), eps_tot)
    predicted_pc = a_new * abs(eps_tot) ** b
    return CompositionResult(a_new, lam, strategy, eps_tot, predicted_pc, clipped)


def a_new_of_b(tree: GameTree, a: float, b: float) -> float:
    """Composed sensitivity a * S**(1-b) without building the strategy."""
    if b <= 1.0:
        raise ValueError(f"a_new_of_b requires b > 1, got {b}")
    internal = _fair_internal(tree)
    s = _weight_sum(internal, b)
    if s == 0.0:
        raise ValueError("every Delta is zero; a_new is undefined")
    return a * s ** (1.0 - b)


def derivative_in_b(tree: GameTree, a: float, b: float, h: float = 0.01) -> float:
    """Central finite difference of a_new_of_b at b."""
    if not 0.0 < h <= 0.1:
        raise ValueError(f"h must be in (0, 0.1], got {h}")
    if b - h <= 1.0:
        raise ValueError(f"b - h must exceed 1, got b = {b}, h = {h}")
    return (a_new_of_b(tree, a, b + h) - a_new_of_b(tree, a, b - h)) / (2.0 * h)


def exact_outcome(tree: GameTree, model: CheatModel, strategy: Strategy) -> OutcomeTriple:
    """Exact game outcome (p0, p1, pc) under a full per-node strategy.

    No leading-order approximation: one recursive pass weighting children by
    the per-node triple and accumulating catch mass along the way.
    """
    if model.variant != cheat_model.STD:
        raise ValueError("exact_outcome expects a standard-variant model")

    def rec(node, path: str) -> tuple[float, float, float]:
        if isinstance(node, Leaf):
            return (1.0, 0.0, 0.0) if node.label == 0 else (0.0, 1.0, 0.0)
        if path not in strategy:
            raise ValueError(f"strategy is missing node '{path}'")
        t = cheat_model.triple(model, strategy[path])
        u = rec(node.up, path + "U")
        d = rec(node.down, path + "D")
        return (t.p0 * u[0] + t.p1 * d[0],
                t.p0 * u[1] + t.p1 * d[1],
                t.pc + t.p0 * u[2] + t.p1 * d[2])

    p0, p1, pc = rec(tree, "")
    return OutcomeTriple(p0, p1, pc)


# ---------------------------------------------------------------------------
# Brute-force oracle.
#
# The strategy space is the full grid product over internal nodes.  Instead
# of looping over it (1001**5 points for five nodes at step 1e-3), each
# subtree keeps the Pareto frontier of achievable (win, catch) pairs: a
# dropped pair is dominated by a kept one (win >= it, catch <= it), and both
# coordinates are monotone under composition with the parent flip, so the
# dropped pair can never beat the kept one downstream.  Per-strategy
# arithmetic is ordered exactly as in exact_outcome's recursion, which keeps
# this search bit-identical to the literal enumeration, including which
# grid points count as feasible.
# ---------------------------------------------------------------------------


class _Frontier:
    """Nondominated (w, c) pairs of one subtree, both strictly ascending.

    eps_idx / up_idx / down_idx record, per pair, the grid choice at this
    node and the child pairs that produced it (-1 where a zero-probability
    branch made the child irrelevant; reconstruction fills honest zeros).
    """

    __slots__ = ("w", "c", "eps_idx", "up_idx", "down_idx")

    def __init__(self, w, c, eps_idx, up_idx, down_idx):
        self.w = w
        self.c = c
        self.eps_idx = eps_idx
        self.up_idx = up_idx
        self.down_idx = down_idx

    @classmethod
    def leaf(cls, label: int) -> "_Frontier":
        none = np.full(1, -1, dtype=np.int32)
        return cls(np.array([1.0 if label == 0 else 0.0]), np.zeros(1),
                   none.copy(), none.copy(), none.copy())

    def __len__(self) -> int:
        return len(self.w)


def _prune(w, c, eps_idx, up_idx, down_idx) -> _Frontier:
    # sort win descending then catch ascending; lexsort is stable, so exact
    # ties resolve to the earliest-generated entry (eps, then down, then up)
    order = np.lexsort((c, -w))
    cs = c[order]
    keep = np.empty(len(cs), dtype=bool)
    keep[0] = True
    running = np.minimum.accumulate(cs)
    keep[1:] = cs[1:] < running[:-1]
    sel = order[keep][::-1]
    return _Frontier(w[sel], c[sel], eps_idx[sel], up_idx[sel], down_idx[sel])


def _combine(grid, triples, up: _Frontier, down: _Frontier) -> _Frontier:
    nu, nd = len(up), len(down)
    sizes = []
    for p0, p1, pc in triples:
        if p0 > 0.0 and p1 > 0.0:
            sizes.append(nu * nd)
        elif p1 == 0.0 and p0 > 0.0:
            sizes.append(nu)
        elif p0 == 0.0 and p1 > 0.0:
            sizes.append(nd)
        else:
            sizes.append(1)
    if sum(sizes) > _MAX_COMBOS:
        raise ValueError(f"tree too large for brute force at this grid step "
                         f"({sum(sizes)} grid combinations at one node)")

    ws, cs, es, us, ds = [], [], [], [], []
    for e_idx, (p0, p1, pc) in enumerate(triples):
        if p0 > 0.0 and p1 > 0.0:
            # down-major layout so stable sorts see (eps, down, up) order
            ws.append(((p1 * down.w)[:, None] + (p0 * up.w)[None, :]).ravel())
            cs.append(((p1 * down.c)[:, None] + (pc + p0 * up.c)[None, :]).ravel())
            us.append(np.tile(np.arange(nu, dtype=np.int32), nd))
            ds.append(np.repeat(np.arange(nd, dtype=np.int32), nu))
        elif p1 == 0.0 and p0 > 0.0:
            # the down branch is unreachable: one representative combo
            ws.append(p0 * up.w + 0.0)
            cs.append((pc + p0 * up.c) + 0.0)
            us.append(np.arange(nu, dtype=np.int32))
            ds.append(np.full(nu, -1, dtype=np.int32))
        elif p0 == 0.0 and p1 > 0.0:
            ws.append(p1 * down.w + 0.0)
            cs.append(pc + p1 * down.c)
            us.append(np.full(nd, -1, dtype=np.int32))
            ds.append(np.arange(nd, dtype=np.int32))
        else:
            ws.append(np.array([0.0]))
            cs.append(np.array([pc]))
            us.append(np.full(1, -1, dtype=np.int32))
            ds.append(np.full(1, -1, dtype=np.int32))
        es.append(np.full(sizes[e_idx], e_idx, dtype=np.int32))

    return _prune(np.concatenate(ws), np.concatenate(cs), np.concatenate(es),
                  np.concatenate(us), np.concatenate(ds))


def _first_feasible(p1: float, down_w: np.ndarray, rhs_base: np.ndarray,
                    target: float) -> np.ndarray:
    """Per up-entry, smallest down index j with rhs_base + p1*down_w[j] >= target.

    searchsorted on the divided threshold can be off by an ulp, so the result
    is corrected in both directions against the exact comparison the plain
    enumeration would use.  Returns len(down_w) where nothing is feasible.
    """
    nd = len(down_w)
    j = np.searchsorted(down_w, (target - rhs_base) / p1, side="left")
    for _ in range(64):
        jp = np.where(j > 0, j - 1, 0)
        back = (j > 0) & (rhs_base + p1 * down_w[jp] >= target)
        if not back.any():
            break
        j = np.where(back, j - 1, j)
    else:
        raise RuntimeError("feasibility search failed to settle (backward)")
    for _ in range(64):
        jc = np.where(j < nd, j, nd - 1)
        fwd = (j < nd) & (rhs_base + p1 * down_w[jc] < target)
        if not fwd.any():
            break
        j = np.where(fwd, j + 1, j)
    else:
        raise RuntimeError("feasibility search failed to settle (forward)")
    return j


def brute_force_min_pc(tree: GameTree, model: CheatModel, eps_tot: float,
                       grid_step: float) -> tuple[Strategy, float]:
    """Exhaustive grid-search oracle for the minimum catch probability.

    Over strategies with every eps(x) on the grid of multiples of grid_step,
    restricted to those whose exact win excess reaches eps_tot*(1 - grid_step),
    returns a strategy of minimum exact catch probability and that minimum.
    Small trees only; the search is exact over the full grid product.
    """
    if model.variant != cheat_model.STD:
        raise ValueError("brute force searches the standard model grid only")
    if grid_step < 1e-3:
        raise ValueError(f"grid_step must be >= 1e-3, got {grid_step}")
    ann = annotate(tree)
    n_internal = len(ann.internal())
    if n_internal == 0:
        raise ValueError("tree has no internal node; nothing to search")
    if n_internal > 5:
        raise ValueError(f"tree too large: {n_internal} internal nodes, limit 5")

    kmax = int(math.floor(0.5 / grid_step + 1e-9))
    grid = [k * grid_step for k in range(-kmax, kmax + 1)]
    grid = [e for e in grid
            if abs(e) <= 0.5 and model.a * abs(e) ** model.b <= 1.0]
    triples = [cheat_model.triple(model, e).as_tuple() for e in grid]
    target = ann.p_w_root + eps_tot * (1.0 - grid_step)

    assert isinstance(tree, Flip)
    frontier_of: dict[int, _Frontier] = {}

    def build(node: GameTree) -> _Frontier:
        if isinstance(node, Leaf):
            f = _Frontier.leaf(node.label)
        else:
            f = _combine(grid, triples, build(node.up), build(node.down))
        frontier_of[id(node)] = f
        return f

    f_up = build(tree.up)
    f_down = build(tree.down)

    best = None  # (pc, eps_idx, up_entry, down_entry)
    for e_idx, (p0, p1, pc) in enumerate(triples):
        if p0 > 0.0 and p1 > 0.0:
            rhs = p0 * f_up.w
            j = _first_feasible(p1, f_down.w, rhs, target)
            ok = j < len(f_down)
            if not ok.any():
                continue
            jj = np.where(ok, j, 0)
            cand = (pc + p0 * f_up.c) + p1 * f_down.c[jj]
            cand[~ok] = np.inf
            i = int(np.argmin(cand))
            this = (float(cand[i]), e_idx, i, int(jj[i]))
        elif p1 == 0.0 and p0 > 0.0:
            ok = (p0 * f_up.w + 0.0) >= target
            if not ok.any():
                continue
            cand = (pc + p0 * f_up.c) + 0.0
            cand[~ok] = np.inf
            i = int(np.argmin(cand))
            this = (float(cand[i]), e_idx, i, -1)
        elif p0 == 0.0 and p1 > 0.0:
            ok = (p1 * f_down.w + 0.0) >= target
            if not ok.any():
                continue
            cand = pc + p1 * f_down.c
            cand[~ok] = np.inf
            i = int(np.argmin(cand))
            this = (float(cand[i]), e_idx, -1, i)
        else:
            if not 0.0 >= target:
                continue
            this = (pc, e_idx, -1, -1)
        if best is None or this[0] < best[0]:
            best = this

    if best is None:
        raise ValueError(f"no grid strategy reaches win excess "
                         f"{eps_tot * (1.0 - grid_step)}")

    strategy: Strategy = {}

    def honest_fill(node: GameTree, path: str) -> None:
        if isinstance(node, Flip):
            strategy[path] = 0.0
            honest_fill(node.up, path + "U")
            honest_fill(node.down, path + "D")

    def descend(node: GameTree, path: str, entry: int) -> None:
        if isinstance(node, Leaf):
            return
        if entry < 0:
            honest_fill(node, path)
            return
        f = frontier_of[id(node)]
        strategy[path] = grid[int(f.eps_idx[entry])]
        descend(node.up, path + "U", int(f.up_idx[entry]))
        descend(node.down, path + "D", int(f.down_idx[entry]))

    min_pc, e_idx, u_entry, d_entry = best
    strategy[""] = grid[e_idx]
    descend(tree.up, "U", u_entry)
    descend(tree.down, "D", d_entry)
    return strategy, min_pc
