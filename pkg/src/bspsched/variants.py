"""Evaluators for neighboring machine models: classical list scheduling,
communication delays, single-port duplex timing, and overlapped supersteps.

Timed conventions: a node with start time t >= 1 and work weight w occupies the
unit slots [t, t+w-1]; makespan = max over nodes of t+w-1. The edge rule
t(u) + w(u) <= t(v) covers both unit and weighted inputs.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .dag import Dag
from .schedule import BspSchedule, MachineParams, ScheduleError, ValidityReport


@dataclass(frozen=True)
class TimedSchedule:
    processor_count: int
    assign: Dict[int, Tuple[Tuple[int, int], ...]]  # node -> ((p, t), ...)
    timed_comms: FrozenSet[Tuple[int, int, int, int]] = frozenset()  # (v,p1,p2,t0)

    def __post_init__(self):
        P = self.processor_count
        if P < 1:
            raise ScheduleError("processor count must be >= 1")
        for v, copies in self.assign.items():
            if not copies:
                raise ScheduleError(f"node {v} has no assignment")
            for (p, t) in copies:
                if not (1 <= p <= P) or t < 1:
                    raise ScheduleError(f"node {v}: bad placement ({p}, {t})")
        for (v, p1, p2, t0) in self.timed_comms:
            if p1 == p2 or not (1 <= p1 <= P and 1 <= p2 <= P) or t0 < 1:
                raise ScheduleError(f"bad timed comm {(v, p1, p2, t0)}")

    def single(self, v: int) -> Tuple[int, int]:
        copies = self.assign[v]
        if len(copies) != 1:
            raise ScheduleError(f"node {v} has {len(copies)} copies")
        return copies[0]


def makespan(dag: Dag, ts: TimedSchedule) -> int:
    return max(
        t + dag.w_work(v) - 1 for v, copies in ts.assign.items() for (_, t) in copies
    )


def _collisions(dag: Dag, ts: TimedSchedule, report: ValidityReport) -> None:
    busy: Dict[Tuple[int, int], int] = {}
    for v, copies in ts.assign.items():
        for (p, t) in copies:
            for slot in range(t, t + dag.w_work(v)):
                key = (p, slot)
                if key in busy:
                    report.add(
                        "collision", v, f"nodes {busy[key]} and {v} overlap on p{p}"
                    )
                else:
                    busy[key] = v


def _blocked_boundaries(dag: Dag, ts: TimedSchedule) -> set:
    """Boundaries b (after slot b) straddled by some node's execution."""
    blocked = set()
    for v, copies in ts.assign.items():
        w = dag.w_work(v)
        for (_, t) in copies:
            for b in range(t, t + w - 1):
                blocked.add(b)
    return blocked


def check_classical(
    dag: Dag,
    ts: TimedSchedule,
    barrier_sync: bool = False,
    duplication: bool = False,
) -> Tuple[ValidityReport, int]:
    report = ValidityReport()
    for v in range(1, dag.node_count + 1):
        if v not in ts.assign:
            report.add("assign", v, f"node {v} not assigned")
            return report, 0
        if not duplication and len(ts.assign[v]) != 1:
            report.add("assign", v, f"node {v} duplicated without duplication mode")
    _collisions(dag, ts, report)
    blocked = _blocked_boundaries(dag, ts) if barrier_sync else set()
    for (u, v) in dag.edges:
        for (pv, tv) in ts.assign[v]:
            ok = False
            for (pu, tu) in ts.assign[u]:
                done = tu + dag.w_work(u)  # first slot after u
                if done > tv:
                    continue
                if pu == pv:
                    ok = True
                    break
                if not barrier_sync:
                    ok = True
                    break
                # cross edge needs a free synchronization boundary in between
                if any(b not in blocked for b in range(done - 1, tv)):
                    ok = True
                    break
            if not ok:
                report.add("edge", (u, v), f"dependency {u} -> {v} not satisfied")
    return report, makespan(dag, ts)


def check_commdelay(dag: Dag, ts: TimedSchedule, g: int) -> Tuple[ValidityReport, int]:
    report = ValidityReport()
    for v in range(1, dag.node_count + 1):
        if v not in ts.assign:
            report.add("assign", v, f"node {v} not assigned")
            return report, 0
    _collisions(dag, ts, report)
    for (u, v) in dag.edges:
        pu, tu = ts.single(u)
        pv, tv = ts.single(v)
        need = tu + dag.w_work(u) + (g if pu != pv else 0)
        if tv < need:
            report.add("edge", (u, v), f"node {v} starts before {need}")
    return report, makespan(dag, ts)


def check_spd(dag: Dag, ts: TimedSchedule, g: int) -> Tuple[ValidityReport, int]:
    report = ValidityReport()
    for v in range(1, dag.node_count + 1):
        if v not in ts.assign:
            report.add("assign", v, f"node {v} not assigned")
            return report, 0
    _collisions(dag, ts, report)
    for t in ts.timed_comms:
        v, p1, p2, t0 = t
        pv, tv = ts.single(v)
        if pv != p1 or tv + dag.w_work(v) - 1 > t0:
            report.add("send", t, f"value {v} not ready on p{p1} at time {t0}")
    # single-port rule: per-processor send intervals disjoint, likewise receive
    for role, idx in (("send", 1), ("receive", 2)):
        by_proc: Dict[int, List[int]] = {}
        for t in ts.timed_comms:
            by_proc.setdefault(t[idx], []).append(t[3])
        for p, starts in by_proc.items():
            starts.sort()
            for a, b in zip(starts, starts[1:]):
                if b < a + g:
                    report.add(
                        "port", p, f"overlapping {role} intervals on p{p} at {a}, {b}"
                    )
    for (u, v) in dag.edges:
        pu, tu = ts.single(u)
        pv, tv = ts.single(v)
        if pu == pv:
            if tu + dag.w_work(u) > tv:
                report.add("edge", (u, v), "order violated on one processor")
            continue
        ok = any(
            t[0] == u and t[1] == pu and t[2] == pv and tu <= t[3] and t[3] + g < tv
            for t in ts.timed_comms
        )
        if not ok:
            report.add("edge", (u, v), f"no transfer delivers {u} to p{pv} in time")
    return report, makespan(dag, ts)


def check_maxbsp(
    dag: Dag,
    sched: BspSchedule,
    params: MachineParams,
    alt_latency: bool = False,
) -> Tuple[ValidityReport, int]:
    """Overlapped-superstep variant: a value must be computed strictly before
    the superstep that sends it and consumed strictly after; superstep cost is
    max(work, g*comm + L) (or max(work, g*comm) + L with alt_latency)."""
    report = ValidityReport()
    P, S = sched.processor_count, sched.superstep_count
    for v in range(1, dag.node_count + 1):
        if v not in sched.assign:
            report.add("assign", v, f"node {v} not assigned")
            return report, 0
    for t in sched.comms:
        v, p1, p2, s = t
        if not any(p == p1 and sv < s for (p, sv) in sched.assign[v]):
            report.add("send", t, f"value {v} not computed on p{p1} before superstep {s}")
    for (u, v) in dag.edges:
        for (pv, sv) in sched.assign[v]:
            if any(pu == pv and su <= sv for (pu, su) in sched.assign[u]):
                continue
            ok = any(
                cu == u and c2 == pv and cs < sv
                and any(pu == c1 and su < cs for (pu, su) in sched.assign[u])
                for (cu, c1, c2, cs) in sched.comms
            )
            if not ok:
                report.add("edge", (u, v), f"value {u} not delivered to p{pv} in time")

    work_ps = [[0] * P for _ in range(S)]
    for v, copies in sched.assign.items():
        for (p, s) in copies:
            work_ps[s - 1][p - 1] += dag.w_work(v)
    sent = [[0] * P for _ in range(S)]
    rec = [[0] * P for _ in range(S)]
    for (v, p1, p2, s) in sched.comms:
        sent[s - 1][p1 - 1] += dag.w_comm(v)
        rec[s - 1][p2 - 1] += dag.w_comm(v)
    total = 0
    for s in range(S):
        w = max(work_ps[s])
        c = max(max(sent[s][p], rec[s][p]) for p in range(P))
        lat = params.L if c > 0 else 0
        if alt_latency:
            total += max(w, params.g * c) + lat
        else:
            total += max(w, params.g * c + lat)
    return report, total


def convert_spd_to_bsp(dag: Dag, ts: TimedSchedule, g: int) -> BspSchedule:
    """Chop the timeline into g-length windows; window m becomes superstep m.

    Nodes starting in a window compute there; transfers starting in a window
    are sent in its communication phase. Port-disjointness guarantees at most
    one send and one receive per processor per window.
    """
    if g < 1:
        raise ScheduleError("conversion needs g >= 1")
    horizon = makespan(dag, ts)
    for t in ts.timed_comms:
        horizon = max(horizon, t[3] + g)
    S = (horizon + g - 1) // g

    def window(t: int) -> int:
        return (t - 1) // g + 1

    assign = {}
    for v, copies in ts.assign.items():
        (p, t) = copies[0]
        assign[v] = ((p, window(t)),)
    comms = frozenset(
        (v, p1, p2, window(t0)) for (v, p1, p2, t0) in ts.timed_comms
    )
    return BspSchedule(
        processor_count=ts.processor_count,
        superstep_count=max(S, 1),
        assign=assign,
        comms=comms,
    )


def parse_timed_schedule(text: str, dag: Dag) -> TimedSchedule:
    """Format: "p v x [k]" processor lines, "at v t [k]" time lines,
    "t v p1 p2 t0" comm lines."""
    proc: Dict[Tuple[int, int], int] = {}
    times: Dict[Tuple[int, int], int] = {}
    comms = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        try:
            if parts[0] == "p" and len(parts) in (3, 4):
                k = int(parts[3]) if len(parts) == 4 else 1
                proc[(int(parts[1]), k)] = int(parts[2])
            elif parts[0] == "at" and len(parts) in (3, 4):
                k = int(parts[3]) if len(parts) == 4 else 1
                times[(int(parts[1]), k)] = int(parts[2])
            elif parts[0] == "t" and len(parts) == 5:
                comms.add(tuple(int(x) for x in parts[1:]))
            else:
                raise ValueError
        except ValueError:
            raise ScheduleError(f"line {lineno}: malformed timed schedule line") from None
    assign: Dict[int, List[Tuple[int, int]]] = {}
    for (v, k), x in sorted(proc.items()):
        if (v, k) not in times:
            raise ScheduleError(f"node {v} copy {k}: processor without start time")
        assign.setdefault(v, []).append((x, times[(v, k)]))
    if set(assign) != set(range(1, dag.node_count + 1)):
        missing = sorted(set(range(1, dag.node_count + 1)) - set(assign))
        raise ScheduleError(f"nodes without assignment: {missing}")
    P = max(
        [x for x in proc.values()]
        + [t[1] for t in comms]
        + [t[2] for t in comms]
    )
    return TimedSchedule(
        processor_count=P,
        assign={v: tuple(pairs) for v, pairs in assign.items()},
        timed_comms=frozenset(comms),
    )


def serialize_timed_schedule(ts: TimedSchedule) -> str:
    out = []
    for v in sorted(ts.assign):
        copies = ts.assign[v]
        if len(copies) == 1:
            (p, t) = copies[0]
            out.append(f"p {v} {p}")
            out.append(f"at {v} {t}")
        else:
            for k, (p, t) in enumerate(sorted(copies), start=1):
                out.append(f"p {v} {p} {k}")
                out.append(f"at {v} {t} {k}")
    for (v, p1, p2, t0) in sorted(ts.timed_comms):
        out.append(f"t {v} {p1} {p2} {t0}")
    return "\n".join(out) + "\n"
