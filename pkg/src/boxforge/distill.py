"""Exhaustive two-copy distillation scan.

Given a parent box, evaluates every canonical two-copy wiring pair on
parent (x) parent and reports the Pareto frontier over the requested
linear objectives (CHSH, tilted CHSH per alpha, optionally the Hardy
success cell), the top results per single objective, and whether one pair
attains every objective's maximum simultaneously (a "gold protocol" for
this parent).

The scan is exact: a child's input-(x, y) cell depends only on the two
one-input strategies used there, so the 192 x 192 joint blocks are
computed once and the 192**4 wiring pairs reduce to algebra over those
blocks.  Strategies whose blocks coincide on this particular parent are
merged first (they give identical children), and the enumeration is
exhaustive over the surviving combinations.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass

import numpy as np

from .box_core import Box222, NCopyBox, chsh, evaluate, hardy_stats, tensor, tilted_chsh
from .wiring import party_wiring_from_blocks, per_input_classes

_ROUND = 12  # merge/dedup resolution, decimal digits


@dataclass(frozen=True)
class Mixture:
    """Shared-randomness mixture over deterministic scan results."""

    weights: tuple
    components: tuple  # (blocks_a, blocks_b) per component


@dataclass(frozen=True)
class SearchResult:
    """One child of the scan: the wiring pair (per-input representative
    table blocks per party), the child box, and its objective values."""

    blocks_a: tuple
    blocks_b: tuple
    child: Box222
    objectives: dict
    pareto: bool = False
    gold: bool = False
    best_for: tuple = ()
    mixture: Mixture | None = None

    def party_a_wiring(self):
        return party_wiring_from_blocks(*self.blocks_a)

    def party_b_wiring(self):
        return party_wiring_from_blocks(*self.blocks_b)


# ---------------------------------------------------------------------------
# Block machinery
# ---------------------------------------------------------------------------


def _strategy_one_hots(classes: list) -> np.ndarray:
    """W[s, a, (u1 u2 a1 a2)]: one-hot of each strategy's schedule."""
    n = len(classes)
    w = np.zeros((n, 2, 16))
    for s, cls in enumerate(classes):
        for a1, a2 in itertools.product((0, 1), repeat=2):
            flat = ((int(cls.u1[a1, a2]) * 2 + int(cls.u2[a1, a2])) * 2 + a1) * 2 + a2
            w[s, int(cls.out[a1, a2]), flat] += 1.0
    return w


def _blocks(parent2: NCopyBox, classes: list) -> np.ndarray:
    """B[s, t, a, b]: child cell when party A runs one-input strategy s and
    party B runs t on the 2-copy parent."""
    t8 = parent2.table.reshape(2, 2, 2, 2, 2, 2, 2, 2)  # x1 x2 y1 y2 a1 a2 b1 b2
    p = np.transpose(t8, (0, 1, 4, 5, 2, 3, 6, 7)).reshape(16, 16)
    w = _strategy_one_hots(classes)
    n = len(classes)
    flat = w.reshape(n * 2, 16)
    blocks = flat @ p @ flat.T
    return blocks.reshape(n, 2, n, 2).transpose(0, 2, 1, 3)


def _dedup_axis(blocks: np.ndarray, axis: int) -> np.ndarray:
    """Lowest-index strategies with pairwise distinct block slices on this
    parent (identical slices produce identical children everywhere)."""
    r = np.round(blocks, _ROUND)
    n = r.shape[axis]
    seen = set()
    keep = []
    for i in range(n):
        sl = r[i] if axis == 0 else r[:, i]
        key = sl.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return np.array(keep, dtype=int)


def _cell_matrices(blocks: np.ndarray, alphas, include_hardy: bool):
    """Per-objective quadruples (C00, C01, C10, C11) of (S, T) matrices so
    that value(s0,s1,t0,t1) = C00[s0,t0] + C01[s0,t1] + C10[s1,t0] + C11[s1,t1]."""
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
    e = np.einsum("stab,ab->st", blocks, sign)
    m = np.einsum("stab,a->st", blocks, np.array([1.0, -1.0]))
    q00 = blocks[:, :, 0, 0]
    zero = np.zeros_like(e)

    names = ["chsh"]
    quads = [(e, e, e, -e)]
    for alpha in alphas:
        names.append(f"chsh_alpha[{alpha:g}]")
        quads.append((e + float(alpha) * m, e, e, -e))
    if include_hardy:
        names.append("hardy_q")
        quads.append((q00, zero, zero, zero))
    return names, quads


def exhaustive_chsh_max(parent: Box222) -> float:
    """Exact maximum child CHSH over all canonical wiring pairs on
    parent (x) parent (four-cell sum decomposition, no enumeration of
    pairs needed)."""
    classes = per_input_classes()
    blocks = _blocks(tensor(parent, parent), classes)
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
    e = np.einsum("stab,ab->st", blocks, sign)
    best = -np.inf
    for s0 in range(e.shape[0]):
        m1 = (e[s0][None, :] + e).max(axis=1)  # best t0 per s1
        m2 = (e[s0][None, :] - e).max(axis=1)  # best t1 per s1
        best = max(best, float((m1 + m2).max()))
    return best


# ---------------------------------------------------------------------------
# Pareto utilities
# ---------------------------------------------------------------------------


def _pareto_mask(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Non-dominated rows under maximization; duplicate rows keep their
    first occurrence only."""
    n = points.shape[0]
    order = np.lexsort(points.T[::-1])[::-1]
    keep = np.ones(n, dtype=bool)
    for pos, i in enumerate(order):
        if not keep[i]:
            continue
        for j in order[:pos]:
            if not keep[j]:
                continue
            if np.all(points[j] >= points[i] - tol):
                if np.any(points[j] > points[i] + tol) or not np.all(
                    points[j] == points[i]
                ):
                    keep[i] = False
                    break
                keep[i] = False  # exact duplicate, keep the earlier row
                break
    return keep


def _merge_frontier(pts: list, idx: list, tol: float = 1e-12):
    if not pts:
        return [], []
    arr = np.array(pts)
    mask = _pareto_mask(arr, tol)
    return [pts[i] for i in range(len(pts)) if mask[i]], [
        idx[i] for i in range(len(pts)) if mask[i]
    ]


# ---------------------------------------------------------------------------
# The scan
# ---------------------------------------------------------------------------


def _child_from_blocks(blocks, s0, s1, t0, t1) -> Box222:
    table = np.empty((2, 2, 2, 2))
    table[0, 0] = blocks[s0, t0]
    table[0, 1] = blocks[s0, t1]
    table[1, 0] = blocks[s1, t0]
    table[1, 1] = blocks[s1, t1]
    return Box222(np.clip(table, 0.0, 1.0))


def _evaluate_objectives(child: Box222, names, alphas) -> dict:
    out = {}
    for name in names:
        if name == "chsh":
            out[name] = evaluate(chsh(), child)
        elif name == "hardy_q":
            out[name] = hardy_stats(child).q
        else:
            alpha = float(name[name.index("[") + 1 : -1])
            out[name] = evaluate(tilted_chsh(alpha), child)
    return out


def scan(parent: Box222, alphas=(), top_k: int = 3, include_hardy: bool = True,
         checkpoint: str | None = None, jobs: int = 1) -> list:
    """Evaluate all canonical two-copy wiring pairs on parent (x) parent.

    Returns SearchResults for the exact Pareto frontier over the objective
    vector plus the top_k behaviour-distinct results per single objective.
    A result is flagged gold when it attains every objective maximum at
    once; since the scan is exhaustive, no gold flag proves no
    deterministic pair does for this parent.

    `checkpoint` names a JSON file updated after each outer chunk so an
    interrupted scan resumes where it stopped.  `jobs` partitions the outer
    loop (results are merged in index order, so the output is identical
    for any job count).
    """
    classes = per_input_classes()
    parent2 = tensor(parent, parent)
    blocks = _blocks(parent2, classes)
    rows = _dedup_axis(blocks, 0)
    cols = _dedup_axis(blocks, 1)
    rblocks = blocks[np.ix_(rows, cols)]
    names, quads = _cell_matrices(rblocks, tuple(alphas), include_hardy)
    n_obj = len(names)
    n_rows, n_cols = len(rows), len(cols)

    state = {"done": [], "frontier_pts": [], "frontier_idx": [], "top": {}}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            saved = json.load(fh)
        if saved.get("shape") == [n_rows, n_cols] and saved.get("names") == names:
            state = saved["state"]

    done = set(tuple(d) if isinstance(d, list) else d for d in state["done"])
    frontier_pts = [tuple(p) for p in state["frontier_pts"]]
    frontier_idx = [tuple(i) for i in state["frontier_idx"]]
    top = {name: [tuple(v) for v in state["top"].get(name, [])] for name in names}

    def chunk_work(s0: int):
        pts, idx = [], []
        tops = {name: [] for name in names}
        for s1 in range(n_rows):
            u = np.empty((n_obj, n_cols))
            v = np.empty((n_obj, n_cols))
            for k, (c00, c01, c10, c11) in enumerate(quads):
                u[k] = c00[s0] + c10[s1]
                v[k] = c01[s0] + c11[s1]
            # local frontier of {u[:,t0] + v[:,t1]} lives inside
            # pareto(u-columns) x pareto(v-columns)
            um = _pareto_mask(u.T)
            vm = _pareto_mask(v.T)
            ti = np.nonzero(um)[0]
            tj = np.nonzero(vm)[0]
            cand = u[:, ti][:, :, None] + v[:, tj][:, None, :]
            flat = cand.reshape(n_obj, -1).T
            mask = _pareto_mask(flat)
            for pos in np.nonzero(mask)[0]:
                t0 = int(ti[pos // len(tj)])
                t1 = int(tj[pos % len(tj)])
                pts.append(tuple(flat[pos]))
                idx.append((s0, s1, t0, t1))
            for k, name in enumerate(names):
                full = u[k][:, None] + v[k][None, :]
                flat_k = full.reshape(-1)
                take = min(top_k, flat_k.size)
                part = np.argpartition(flat_k, -take)[-take:]
                for p in part:
                    tops[name].append(
                        (float(flat_k[p]), (s0, s1, int(p // n_cols), int(p % n_cols)))
                    )
        return pts, idx, tops

    pending = [s0 for s0 in range(n_rows) if s0 not in done]
    if jobs > 1 and pending:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(chunk_work, pending))
    else:
        results = [chunk_work(s0) for s0 in pending]

    for s0, (pts, idx, tops) in zip(pending, results):
        frontier_pts.extend(pts)
        frontier_idx.extend(idx)
        frontier_pts, frontier_idx = _merge_frontier(frontier_pts, frontier_idx)
        for name in names:
            merged = top[name] + tops[name]
            merged.sort(key=lambda rec: (-rec[0], rec[1]))
            top[name] = merged[: 4 * top_k]
        done.add(s0)
        if checkpoint:
            payload = {
                "shape": [n_rows, n_cols],
                "names": names,
                "state": {
                    "done": sorted(done),
                    "frontier_pts": [list(p) for p in frontier_pts],
                    "frontier_idx": [list(i) for i in frontier_idx],
                    "top": {k: [[rec[0], list(rec[1])] for rec in v] for k, v in top.items()},
                },
            }
            tmp = checkpoint + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(payload, fh)
            os.replace(tmp, checkpoint)

    top = {
        name: [(rec[0], tuple(rec[1])) for rec in v] for name, v in top.items()
    }

    maxima = {name: max(rec[0] for rec in v) for name, v in top.items()}
    results_out = {}

    def add_result(combo, pareto=False, best_for=()):
        key = tuple(combo)
        if key in results_out:
            prev = results_out[key]
            results_out[key] = SearchResult(
                blocks_a=prev.blocks_a,
                blocks_b=prev.blocks_b,
                child=prev.child,
                objectives=prev.objectives,
                pareto=prev.pareto or pareto,
                gold=prev.gold,
                best_for=tuple(sorted(set(prev.best_for) | set(best_for))),
                mixture=None,
            )
            return
        s0, s1, t0, t1 = combo
        child = _child_from_blocks(rblocks, s0, s1, t0, t1)
        objs = _evaluate_objectives(child, names, alphas)
        results_out[key] = SearchResult(
            blocks_a=(classes[rows[s0]].block, classes[rows[s1]].block),
            blocks_b=(classes[cols[t0]].block, classes[cols[t1]].block),
            child=child,
            objectives=objs,
            pareto=pareto,
            best_for=tuple(best_for),
        )

    for combo in frontier_idx:
        add_result(combo, pareto=True)
    for name in names:
        seen_vals = 0
        used = set()
        for val, combo in top[name]:
            if combo in used:
                continue
            used.add(combo)
            add_result(combo, best_for=(name,))
            seen_vals += 1
            if seen_vals >= top_k:
                break

    # gold: a frontier point attaining every single-objective maximum
    out = []
    for key in sorted(results_out):
        r = results_out[key]
        gold = all(abs(r.objectives[n] - maxima[n]) <= 1e-10 for n in names)
        if gold:
            r = SearchResult(
                blocks_a=r.blocks_a, blocks_b=r.blocks_b, child=r.child,
                objectives=r.objectives, pareto=r.pareto, gold=True,
                best_for=r.best_for, mixture=r.mixture,
            )
        out.append(r)
    return out


def scan_stochastic(parent: Box222, alphas=(), support: int = 2,
                    top_k: int = 3, include_hardy: bool = True) -> list:
    """Optimal shared-randomness mixtures over the deterministic children.

    Objectives are linear in the child table, so per single objective the
    optimum over mixtures is a deterministic child (weight-1 "mixture").
    With two or more objectives the mixture frontier is the convex hull of
    the deterministic frontier; the hull edges are witnessed by 2-support
    midpoint mixtures of adjacent frontier points.  `support` = 1 reduces
    to the deterministic scan.
    """
    det = scan(parent, alphas=alphas, top_k=top_k, include_hardy=include_hardy)
    if support < 1:
        raise ValueError("support must be >= 1")
    if support == 1:
        return det

    names = sorted({n for r in det for n in r.objectives})
    out = list(det)
    for name in names:
        best = max(det, key=lambda r: (r.objectives[name], r.blocks_a, r.blocks_b))
        out.append(
            SearchResult(
                blocks_a=best.blocks_a,
                blocks_b=best.blocks_b,
                child=best.child,
                objectives=dict(best.objectives),
                best_for=(name,),
                mixture=Mixture(weights=(1.0,),
                                components=((best.blocks_a, best.blocks_b),)),
            )
        )

    frontier = [r for r in det if r.pareto]
    if len(names) >= 2 and len(frontier) >= 2:
        i, j = names[0], names[1]
        pts = sorted(frontier, key=lambda r: (r.objectives[i], -r.objectives[j]))
        for r1, r2 in zip(pts, pts[1:]):
            table = 0.5 * r1.child.table + 0.5 * r2.child.table
            child = Box222(table)
            out.append(
                SearchResult(
                    blocks_a=r1.blocks_a,
                    blocks_b=r1.blocks_b,
                    child=child,
                    objectives=_evaluate_objectives(child, names, alphas),
                    mixture=Mixture(
                        weights=(0.5, 0.5),
                        components=(
                            (r1.blocks_a, r1.blocks_b),
                            (r2.blocks_a, r2.blocks_b),
                        ),
                    ),
                )
            )
    return out
