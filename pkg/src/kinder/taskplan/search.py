"""The hFF heuristic and greedy best-first plan streaming."""

from __future__ import annotations

import heapq
import math
import time
from typing import Callable, Iterator

from kinder.taskplan.model import Atom, GroundOperator, GroundProblem


def hff(
    state: frozenset[Atom],
    goal: frozenset[Atom],
    operators: tuple[GroundOperator, ...],
) -> float:
    """Relaxed-plan length from the delete-free planning graph.

    Returns 0 when the goal is already satisfied and infinity when the goal
    is unreachable in the relaxation. Extraction selects the lowest-layer
    achiever per subgoal, ties broken by operator name then arguments.
    """
    if goal <= state:
        return 0.0
    fact_layer: dict[Atom, int] = {a: 0 for a in state}
    op_layer: dict[GroundOperator, int] = {}
    achievers: dict[Atom, list[GroundOperator]] = {}
    frontier = True
    layer = 0
    while frontier:
        frontier = False
        layer += 1
        for op in operators:
            if op in op_layer:
                continue
            if all(fact_layer.get(p, math.inf) <= layer - 1 for p in op.preconditions):
                op_layer[op] = layer - 1
                for atom in op.add_effects:
                    if atom not in fact_layer:
                        fact_layer[atom] = layer
                        frontier = True
                    achievers.setdefault(atom, []).append(op)
        if goal <= fact_layer.keys() and all(
            fact_layer[g] < layer for g in goal
        ):
            break
    if not goal <= fact_layer.keys():
        return math.inf

    # Backward best-supporter extraction.
    plan: set[GroundOperator] = set()
    needed = sorted(goal, key=lambda a: -fact_layer[a])
    satisfied: set[Atom] = set()
    queue = list(needed)
    while queue:
        queue.sort(key=lambda a: -fact_layer[a])
        atom = queue.pop(0)
        if atom in satisfied or fact_layer[atom] == 0:
            satisfied.add(atom)
            continue
        satisfied.add(atom)
        best = min(
            achievers[atom],
            key=lambda op: (op_layer[op], op.name, op.args),
        )
        if best not in plan:
            plan.add(best)
            for pre in best.preconditions:
                if pre not in satisfied:
                    queue.append(pre)
    return float(len(plan))


def gbfs_plans(
    problem: GroundProblem,
    max_plans: int = 10,
    deadline: float = 60.0,
    clock: Callable[[], float] = time.monotonic,
    max_expansions: int = 200_000,
) -> Iterator[tuple[GroundOperator, ...]]:
    """Stream distinct plans from greedy best-first search ordered by hFF.

    Ties break FIFO. Goal nodes yield their plans (duplicate action
    sequences suppressed) and are not expanded further. The stream ends at
    max_plans, the wall-clock deadline, or search exhaustion.
    """
    assert max_plans >= 1
    start_time = clock()
    init = problem.init
    goal = problem.goal
    ops = problem.operators

    counter = 0
    h0 = hff(init, goal, ops)
    if math.isinf(h0):
        return
    heap: list[tuple[float, int, frozenset[Atom], tuple[GroundOperator, ...]]] = []
    heapq.heappush(heap, (h0, counter, init, ()))
    # Path-local cycle prevention: ancestors stored per node.
    ancestors: dict[int, frozenset[int]] = {counter: frozenset({hash(init)})}
    yielded: set[tuple[GroundOperator, ...]] = set()
    expansions = 0

    while heap:
        if clock() - start_time > deadline:
            return
        _, node_id, atoms, plan = heapq.heappop(heap)
        path_hashes = ancestors.pop(node_id)
        if goal <= atoms:
            if plan not in yielded:
                yielded.add(plan)
                yield plan
                if len(yielded) >= max_plans:
                    return
            continue
        expansions += 1
        if expansions > max_expansions:
            return
        for op in ops:
            if not op.applicable(atoms):
                continue
            succ = op.apply(atoms)
            succ_hash = hash(succ)
            # Prune revisits along this node's own path (do-undo loops).
            if succ_hash in path_hashes:
                continue
            h = hff(succ, goal, ops)
            if math.isinf(h):
                continue
            counter += 1
            ancestors[counter] = path_hashes | {succ_hash}
            heapq.heappush(heap, (h, counter, succ, plan + (op,)))
