"""Best-bound branch-and-bound over LP relaxations, plus small-model oracles."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .model import MilpModel, Solution, SolverConfig, relative_gap
from . import simplex
from .simplex import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    STALLED,
    UNBOUNDED,
    build_standard_form,
    redual_from_tableau,
    resolve_dual_from_basis,
    solve_lp_scratch,
)

INF = math.inf

_CACHE_BYTES = 256 * 1024 * 1024


class _TableauCache:
    """Keeps the most recent node tableaux for dual warm starts."""

    def __init__(self, max_bytes=_CACHE_BYTES):
        self.max_bytes = max_bytes
        self.items = OrderedDict()
        self.bytes = 0

    def put(self, key, state):
        if state.tableau is None:
            return
        size = state.tableau.nbytes
        if size > self.max_bytes:
            return
        while self.bytes + size > self.max_bytes and self.items:
            _, old = self.items.popitem(last=False)
            self.bytes -= old.tableau.nbytes
        self.items[key] = state
        self.bytes += size

    def get(self, key):
        state = self.items.get(key)
        if state is not None:
            self.items.move_to_end(key)
        return state


def _model_arrays(model: MilpModel):
    c = np.zeros(model.n_vars)
    for j, coef in model.obj_coeffs.items():
        c[j] = coef
    return c, np.array(model.lb, float), np.array(model.ub, float)


def tighten_singleton_rows(model: MilpModel, lb, ub):
    """Fold single-variable rows into bounds; returns skipped row indices.

    Returns None when the tightening proves the model infeasible.
    """
    lb = lb.copy()
    ub = ub.copy()
    skip = []
    for i, row in enumerate(model.constraints):
        if len(row.coeffs) != 1:
            continue
        j, a = row.coeffs[0]
        if a == 0.0:
            continue
        val = row.rhs / a
        if row.sense == "==":
            lo, hi = val, val
        elif (row.sense == "<=") == (a > 0.0):
            lo, hi = -INF, val
        else:
            lo, hi = val, INF
        lb[j] = max(lb[j], lo)
        ub[j] = min(ub[j], hi)
        skip.append(i)
    for j in range(model.n_vars):
        if model.is_integer[j]:
            lb[j] = math.ceil(lb[j] - 1e-9)
            ub[j] = math.floor(ub[j] + 1e-9)
        if lb[j] > ub[j] + 1e-9:
            return None
        ub[j] = max(ub[j], lb[j])
    return lb, ub, skip


def _status_name(code):
    return {OPTIMAL: "optimal", UNBOUNDED: "unbounded", DUAL_INFEASIBLE: "infeasible"}.get(code, "stalled")


def solve_lp(model: MilpModel) -> Solution:
    """Solve the continuous relaxation with the two-phase primal simplex."""
    c, lb0, ub0 = _model_arrays(model)
    tight = tighten_singleton_rows(model, lb0, ub0)
    if tight is None:
        return Solution(status="infeasible")
    lb, ub, skip = tight
    sf = build_standard_form(model, skip_rows=skip)
    res = solve_lp_scratch(sf, c, model.obj_constant, lb, ub)
    if res.status == DUAL_INFEASIBLE:
        return Solution(status="infeasible", n_simplex_iterations=res.iterations)
    if res.status == UNBOUNDED:
        return Solution(status="unbounded", n_simplex_iterations=res.iterations)
    return Solution(
        status="optimal",
        x=res.x,
        objective=res.objective,
        best_bound=res.objective,
        gap=0.0,
        n_simplex_iterations=res.iterations,
    )


def _fractional_candidates(x, int_idx, tol):
    worst = None
    worst_score = tol
    for j in int_idx:
        frac = x[j] - math.floor(x[j])
        dist = min(frac, 1.0 - frac)
        if dist > worst_score + 1e-12:
            worst_score = dist
            worst = j
    return worst


def _snap_integers(x, int_idx):
    out = x.copy()
    for j in int_idx:
        out[j] = round(out[j])
    return out


def solve_milp(model: MilpModel, config: SolverConfig | None = None) -> Solution:
    """Gap-controlled best-bound branch and bound.

    Branching: most-fractional integer variable, ties by lowest index.
    Every incumbent is re-verified against the original rows; the
    incumbent log records (wall seconds, incumbent, global bound) at every
    improvement.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    c, lb_m, ub_m = _model_arrays(model)
    tight = tighten_singleton_rows(model, lb_m, ub_m)
    if tight is None:
        return Solution(status="infeasible")
    lb_root, ub_root, skip = tight
    sf = build_standard_form(model, skip_rows=skip)
    int_idx = model.integer_indices()

    log = []
    inc_x = None
    inc_obj = INF
    n_nodes = 0
    n_iters = 0
    cache = _TableauCache()
    seq = itertools.count()

    def wall():
        return time.perf_counter() - t0

    def node_bounds(diffs):
        lb = lb_root.copy()
        ub = ub_root.copy()
        for j, (lo, hi) in diffs.items():
            lb[j] = lo
            ub[j] = hi
        return lb, ub

    root = solve_lp_scratch(sf, c, model.obj_constant, lb_root, ub_root)
    n_iters += root.iterations
    if root.status == DUAL_INFEASIBLE:
        return Solution(status="infeasible", n_simplex_iterations=n_iters)
    if root.status == UNBOUNDED:
        return Solution(status="unbounded", n_simplex_iterations=n_iters)

    def try_incumbent(x_raw, tag="node"):
        nonlocal inc_x, inc_obj
        x = _snap_integers(x_raw, int_idx)
        if model.max_violation(x) > config.feasibility_tol * 10.0:
            return False
        obj = model.objective_value(x)
        if obj < inc_obj - 1e-12:
            inc_x = x
            inc_obj = obj
            return True
        return False

    def rounding_heuristic(x_relax):
        """Fix integers at their rounded relaxation values, solve the rest."""
        lb = lb_root.copy()
        ub = ub_root.copy()
        for j in int_idx:
            v = min(max(round(x_relax[j]), lb[j]), ub[j])
            lb[j] = v
            ub[j] = v
        res = solve_lp_scratch(sf, c, model.obj_constant, lb, ub)
        if res.status == OPTIMAL:
            return try_incumbent(res.x, tag="heuristic")
        return False

    # root node
    heap = []
    root_id = next(seq)
    frac = _fractional_candidates(root.x, int_idx, config.integrality_tol)
    global_bound = root.objective
    if frac is None:
        if try_incumbent(root.x, tag="root"):
            log.append((wall(), inc_obj, global_bound))
        return Solution(
            status="optimal",
            x=inc_x,
            objective=inc_obj,
            best_bound=root.objective,
            gap=relative_gap(inc_obj, root.objective),
            incumbent_log=log,
            n_nodes=1,
            n_simplex_iterations=n_iters,
        )
    if int_idx and rounding_heuristic(root.x):
        log.append((wall(), inc_obj, global_bound))
    cache.put(root_id, root)
    heapq.heappush(heap, (root.objective, root_id, {}, root.basis, root.vstat, root_id))

    status = "optimal"
    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None

    def solve_node(entry):
        nonlocal n_iters
        bound, node_id, diffs, basis, vstat, parent_id = entry
        lb, ub = node_bounds(diffs)
        parent_state = cache.get(parent_id)
        res = None
        if parent_state is not None and parent_state.tableau is not None:
            res = redual_from_tableau(sf, c, model.obj_constant, parent_state, lb, ub)
            if res.status not in (OPTIMAL, UNBOUNDED):
                res = None
        if res is None and basis is not None:
            res = resolve_dual_from_basis(sf, c, model.obj_constant, lb, ub, basis, vstat, art_sign=root.art_sign)
            if res.status not in (OPTIMAL, UNBOUNDED):
                res = None
        if res is None:
            # infeasibility claims from warm starts are re-proven from scratch
            res = solve_lp_scratch(sf, c, model.obj_constant, lb, ub)
        return res

    try:
        while heap:
            global_bound = heap[0][0]
            if inc_obj < INF and relative_gap(inc_obj, global_bound) <= config.gap:
                status = "gap_limit" if heap else "optimal"
                break
            if config.time_limit is not None and wall() > config.time_limit:
                status = "time_limit"
                break
            if config.node_limit is not None and n_nodes >= config.node_limit:
                status = "node_limit"
                break

            batch = []
            width = config.workers if pool is not None else 1
            while heap and len(batch) < width:
                entry = heapq.heappop(heap)
                if entry[0] >= inc_obj - 1e-12:
                    continue  # cutoff
                batch.append(entry)
            if not batch:
                if not heap:
                    break
                continue

            if pool is not None and len(batch) > 1:
                results = list(pool.map(solve_node, batch))
            else:
                results = [solve_node(e) for e in batch]

            for entry, res in zip(batch, results):
                bound, node_id, diffs, _, _, _ = entry
                n_nodes += 1
                n_iters += res.iterations
                if res.status == DUAL_INFEASIBLE:
                    continue
                if res.status == UNBOUNDED:
                    # integer restriction cannot repair an unbounded relaxation ray
                    status = "unbounded"
                    heap.clear()
                    break
                obj = res.objective
                if obj >= inc_obj - 1e-12:
                    continue
                frac = _fractional_candidates(res.x, int_idx, config.integrality_tol)
                if frac is None:
                    if try_incumbent(res.x):
                        log.append((wall(), inc_obj, max(global_bound, bound)))
                    continue
                if config.heuristic_period and n_nodes % config.heuristic_period == 0:
                    if rounding_heuristic(res.x):
                        log.append((wall(), inc_obj, global_bound))
                cache.put(node_id, res)
                fl = math.floor(res.x[frac])
                lo_diffs = dict(diffs)
                lo_diffs[frac] = (lb_root[frac] if frac not in diffs else diffs[frac][0], fl)
                hi_diffs = dict(diffs)
                hi_diffs[frac] = (fl + 1.0, ub_root[frac] if frac not in diffs else diffs[frac][1])
                for child in (lo_diffs, hi_diffs):
                    lo, hi = child[frac]
                    if lo > hi + 1e-9:
                        continue
                    heapq.heappush(heap, (obj, next(seq), child, res.basis, res.vstat, node_id))
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if not heap and status == "optimal":
        global_bound = inc_obj if inc_obj < INF else global_bound
    if inc_x is None:
        if status in ("optimal",):
            return Solution(status="infeasible", n_nodes=n_nodes, n_simplex_iterations=n_iters)
        return Solution(status=status, n_nodes=n_nodes, n_simplex_iterations=n_iters, best_bound=global_bound)
    gap = relative_gap(inc_obj, global_bound)
    if status == "optimal" and gap > config.gap:
        status = "gap_limit"
    elif status == "gap_limit" and gap <= 1e-12:
        status = "optimal"
    log.append((wall(), inc_obj, global_bound))
    return Solution(
        status=status,
        x=inc_x,
        objective=inc_obj,
        best_bound=global_bound,
        gap=gap,
        incumbent_log=log,
        n_nodes=n_nodes,
        n_simplex_iterations=n_iters,
    )


def enumerate_oracle(model: MilpModel, max_binaries: int = 20) -> Solution:
    """Exact optimum by enumerating every binary assignment.

    Only binary integer variables are supported; each assignment fixes the
    binaries and solves the remaining LP from scratch.
    """
    int_idx = model.integer_indices()
    for j in int_idx:
        if model.lb[j] < -1e-9 or model.ub[j] > 1.0 + 1e-9:
            raise ValueError("enumeration oracle supports binary variables only")
    if len(int_idx) > max_binaries:
        raise ValueError(f"too many binaries for enumeration ({len(int_idx)} > {max_binaries})")
    c, lb_m, ub_m = _model_arrays(model)
    tight = tighten_singleton_rows(model, lb_m, ub_m)
    if tight is None:
        return Solution(status="infeasible")
    lb_root, ub_root, skip = tight
    sf = build_standard_form(model, skip_rows=skip)
    best = None
    best_obj = INF
    for bits in itertools.product((0.0, 1.0), repeat=len(int_idx)):
        lb = lb_root.copy()
        ub = ub_root.copy()
        feasible_fix = True
        for j, v in zip(int_idx, bits):
            if v < lb[j] - 1e-9 or v > ub[j] + 1e-9:
                feasible_fix = False
                break
            lb[j] = v
            ub[j] = v
        if not feasible_fix:
            continue
        res = solve_lp_scratch(sf, c, model.obj_constant, lb, ub)
        if res.status == OPTIMAL and res.objective < best_obj - 1e-12:
            best_obj = res.objective
            best = res.x.copy()
            for j, v in zip(int_idx, bits):
                best[j] = v
    if best is None:
        return Solution(status="infeasible")
    return Solution(status="optimal", x=best, objective=best_obj, best_bound=best_obj, gap=0.0)
