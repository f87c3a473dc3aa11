"""Communication scheduling: complete a fixed (processor, superstep)
assignment with a minimum-cost communication set.

Costs here are communication units (multiples of g) summed over supersteps;
latency is excluded by default since every feasible communication set for a
fixed assignment can be charged the same way by the caller.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .dag import Dag
from .schedule import BspSchedule, CommModel, MachineParams


class CsError(Exception):
    pass


@dataclass(frozen=True)
class CsInstance:
    """A DAG with fixed processors and supersteps, communications still open.

    assign maps node -> ((p, s), ...); multiple copies appear only when the
    caller works with duplication. maxbsp shifts the legal send windows by one
    (values sendable only strictly after being computed, consumed strictly
    after arriving).
    """

    dag: Dag
    P: int
    S: int
    assign: Dict[int, Tuple[Tuple[int, int], ...]]
    maxbsp: bool = False

    @staticmethod
    def from_maps(dag: Dag, P: int, S: int, pi: Dict[int, int], tau: Dict[int, int],
                  maxbsp: bool = False) -> "CsInstance":
        assign = {v: ((pi[v], tau[v]),) for v in range(1, dag.node_count + 1)}
        return CsInstance(dag, P, S, assign, maxbsp)

    def __post_init__(self):
        for v in range(1, self.dag.node_count + 1):
            if v not in self.assign or not self.assign[v]:
                raise CsError(f"node {v} unassigned")
            for (p, s) in self.assign[v]:
                if not (1 <= p <= self.P and 1 <= s <= self.S):
                    raise CsError(f"node {v} out of range")
        gap = 2 if self.maxbsp else 1
        for (u, v) in self.dag.edges:
            for (pv, sv) in self.assign[v]:
                if any(pu == pv and su <= sv for (pu, su) in self.assign[u]):
                    continue
                if not any(su + gap <= sv for (pu, su) in self.assign[u]):
                    raise CsError(f"edge ({u}, {v}) admits no communication slot")

    def pi(self, v: int) -> int:
        return self.assign[v][0][0]

    def tau(self, v: int) -> int:
        return self.assign[v][0][1]


@dataclass
class Requirement:
    value: int
    target: int
    first_need: int
    options: List[FrozenSet[Tuple[int, int, int, int]]] = field(default_factory=list)


def cross_requirements(inst: CsInstance) -> List[Requirement]:
    """One requirement per (value, target processor) pair that some consumer
    copy cannot satisfy locally; first_need is the earliest such superstep."""
    need: Dict[Tuple[int, int], int] = {}
    for (u, v) in inst.dag.edges:
        for (pv, sv) in inst.assign[v]:
            if any(pu == pv and su <= sv for (pu, su) in inst.assign[u]):
                continue
            key = (u, pv)
            need[key] = min(need.get(key, sv), sv)
    return [
        Requirement(u, p, s) for (u, p), s in sorted(need.items())
    ]


def _direct_window(inst: CsInstance, src_sup: int, first_need: int) -> range:
    lo = src_sup + (1 if inst.maxbsp else 0)
    return range(lo, first_need)


def cs_eager(inst: CsInstance) -> FrozenSet[Tuple[int, int, int, int]]:
    """Send every needed cross value in the superstep it is computed."""
    gamma = set()
    for req in cross_requirements(inst):
        (p1, s1) = inst.assign[req.value][0]
        window = _direct_window(inst, s1, req.first_need)
        if len(window) == 0:
            raise CsError(f"value {req.value} has no legal send superstep")
        gamma.add((req.value, p1, req.target, window[0]))
    return frozenset(gamma)


def cs_lazy(inst: CsInstance) -> FrozenSet[Tuple[int, int, int, int]]:
    """Send every needed cross value in the superstep before first use."""
    gamma = set()
    for req in cross_requirements(inst):
        (p1, s1) = inst.assign[req.value][0]
        window = _direct_window(inst, s1, req.first_need)
        if len(window) == 0:
            raise CsError(f"value {req.value} has no legal send superstep")
        gamma.add((req.value, p1, req.target, window[-1]))
    return frozenset(gamma)


def comm_cost(
    inst: CsInstance,
    gamma: FrozenSet[Tuple[int, int, int, int]],
    model: CommModel,
) -> int:
    """Total communication units over supersteps (h-relation sum)."""
    sent = [[0] * inst.P for _ in range(inst.S)]
    rec = [[0] * inst.P for _ in range(inst.S)]
    if model.cast == "broadcast":
        for (v, p1, s) in {(v, p1, s) for (v, p1, _, s) in gamma}:
            sent[s - 1][p1 - 1] += inst.dag.w_comm(v)
    else:
        for (v, p1, p2, s) in gamma:
            sent[s - 1][p1 - 1] += inst.dag.w_comm(v)
    for (v, p1, p2, s) in gamma:
        rec[s - 1][p2 - 1] += inst.dag.w_comm(v)
    return sum(
        max(max(sent[s][p], rec[s][p]) for p in range(inst.P))
        for s in range(inst.S)
    )


def cs_greedy_p2(inst: CsInstance) -> FrozenSet[Tuple[int, int, int, int]]:
    """Optimal communication set for two processors.

    Per superstep, send every value needed next superstep; the direction with
    fewer such values tops up with pending values in earliest-need order
    (ties: lower node index) up to the forced phase cost.
    """
    if inst.P != 2:
        raise CsError("greedy applies to P = 2 only")
    if inst.maxbsp:
        raise CsError("greedy covers the standard superstep model only")
    reqs = cross_requirements(inst)
    # pending[(a, b)] = requirements a -> b not yet sent
    remaining: Dict[Tuple[int, int], List[Requirement]] = {(1, 2): [], (2, 1): []}
    for req in reqs:
        src = inst.assign[req.value][0][0]
        remaining[(src, req.target)].append(req)
    gamma = set()
    for s in range(1, inst.S):
        avail = {
            d: sorted(
                (r for r in remaining[d] if inst.assign[r.value][0][1] <= s),
                key=lambda r: (r.first_need, r.value),
            )
            for d in remaining
        }
        phase = max(
            sum(1 for r in avail[d] if r.first_need == s + 1) for d in avail
        )
        for d, ordered in avail.items():
            for r in ordered[:phase]:
                gamma.add((r.value, d[0], d[1], s))
                remaining[d].remove(r)
    if any(remaining.values()):
        raise CsError("instance infeasible for greedy")  # cannot happen
    return frozenset(gamma)


def _relay_paths(
    inst: CsInstance, value: int, p1: int, s1: int, target: int, first_need: int
) -> List[FrozenSet[Tuple[int, int, int, int]]]:
    """All multi-hop delivery plans from a holder to the target; each hop
    takes one communication phase and strictly later supersteps."""
    lo = s1 + (1 if inst.maxbsp else 0)
    plans = []

    def extend(path_procs: List[int], path_tuples: List, s_min: int):
        cur = path_procs[-1]
        if cur == target:
            plans.append(frozenset(path_tuples))
            return
        if len(path_procs) - 1 >= inst.P - 1:  # hop budget
            return
        for nxt in range(1, inst.P + 1):
            if nxt in path_procs:
                continue
            for s in range(s_min, first_need):
                extend(
                    path_procs + [nxt],
                    path_tuples + [(value, cur, nxt, s)],
                    s + 1,
                )

    extend([p1], [], lo)
    return plans


def cs_bruteforce(
    inst: CsInstance,
    model: CommModel,
    limit: int = 20,
    objective: str = "comm",
    params: Optional[MachineParams] = None,
) -> Tuple[FrozenSet[Tuple[int, int, int, int]], int]:
    """Exact minimum communication set by branch and bound over delivery plans.

    objective "comm" minimizes total communication units; "maxbsp" minimizes
    the full overlapped-superstep cost sum_s max(work_s, g*comm_s [+ L]) and
    requires params.
    """
    reqs = cross_requirements(inst)
    if len(reqs) > limit:
        raise CsError(f"{len(reqs)} cross requirements exceed the limit {limit}")

    work = None
    if objective == "maxbsp":
        if params is None:
            raise CsError("maxbsp objective needs machine parameters")
        work_ps = [[0] * inst.P for _ in range(inst.S)]
        for v, copies in inst.assign.items():
            for (p, s) in copies:
                work_ps[s - 1][p - 1] += inst.dag.w_work(v)
        work = [max(row) for row in work_ps]
    elif objective != "comm":
        raise CsError(f"unknown objective {objective!r}")

    for req in reqs:
        opts: Set[FrozenSet] = set()
        for (p1, s1) in inst.assign[req.value]:
            if p1 == req.target:
                continue
            for s in _direct_window(inst, s1, req.first_need):
                opts.add(frozenset([(req.value, p1, req.target, s)]))
            if model.transfer == "free":
                for plan in _relay_paths(
                    inst, req.value, p1, s1, req.target, req.first_need
                ):
                    opts.add(plan)
        if not opts:
            raise CsError(f"value {req.value} undeliverable to p{req.target}")
        req.options = sorted(opts, key=lambda f: (len(f), sorted(f)))
    reqs.sort(key=lambda r: len(r.options))

    def evaluate(tuples: FrozenSet) -> int:
        if objective == "comm":
            return comm_cost(inst, tuples, model)
        sent = [[0] * inst.P for _ in range(inst.S)]
        rec = [[0] * inst.P for _ in range(inst.S)]
        for (v, p1, p2, s) in tuples:
            sent[s - 1][p1 - 1] += inst.dag.w_comm(v)
            rec[s - 1][p2 - 1] += inst.dag.w_comm(v)
        total = 0
        for s in range(inst.S):
            c = max(max(sent[s][p], rec[s][p]) for p in range(inst.P))
            lat = params.L if c > 0 else 0
            total += max(work[s], params.g * c + lat)
        return total

    best: List = [None, None]

    def run(i: int, tuples: FrozenSet):
        val = evaluate(tuples)
        if best[1] is not None and val >= best[1]:
            return
        if i == len(reqs):
            best[0], best[1] = tuples, val
            return
        for opt in reqs[i].options:
            run(i + 1, tuples | opt)

    run(0, frozenset())
    return best[0], best[1]
