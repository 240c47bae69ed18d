"""SCC/DAG analysis of a non-negative matrix, exact algebraic spectral radii,
and the annotated automaton that tracks (radius, count) signatures of runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from .algebraic import AlgebraicNumber, compare, spectral_radius_of_matrix
from .automata import InputError, Matrix, Nfa, WeightedAutomaton


@dataclass(frozen=True)
class SccInfo:
    members: frozenset  # state indices
    radius: AlgebraicNumber
    period: int  # 0 iff the SCC's matrix is all-zero


@dataclass(frozen=True)
class SccDag:
    sccs: tuple  # of SccInfo, in reverse topological discovery order
    scc_of: tuple  # state index -> scc index
    edges: frozenset  # of (scc index, scc index), positive cross transitions


def _tarjan(n: int, succ) -> list[list[int]]:
    """Iterative Tarjan; returns SCCs as lists of vertex indices."""
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _scc_period(members: list[int], m: Matrix) -> int:
    """Period via BFS levels: gcd of level(u)+1-level(v) over internal edges."""
    internal = [
        (u, v) for u in members for v in members if m[u][v] > 0
    ]
    if not internal:
        return 0
    root = members[0]
    level = {root: 0}
    frontier = [root]
    adj = {u: [v for v in members if m[u][v] > 0] for u in members}
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u, v in internal:
        g = gcd(g, level[u] + 1 - level[v])
    return abs(g)


def scc_decompose(m: Matrix) -> SccDag:
    """SCCs of the positive-support digraph of a non-negative matrix, with
    exact spectral radius and period per component."""
    n = len(m)

    def succ(u):
        return [v for v in range(n) if m[u][v] > 0]

    comps = _tarjan(n, succ)
    scc_of = [0] * n
    infos = []
    for ci, comp in enumerate(comps):
        for v in comp:
            scc_of[v] = ci
        sub = tuple(tuple(m[u][v] for v in comp) for u in comp)
        radius = spectral_radius_of_matrix(sub) if comp else None
        infos.append(
            SccInfo(frozenset(comp), radius, _scc_period(comp, m))
        )
    edges = frozenset(
        (scc_of[u], scc_of[v])
        for u in range(n)
        for v in range(n)
        if m[u][v] > 0 and scc_of[u] != scc_of[v]
    )
    return SccDag(tuple(infos), tuple(scc_of), edges)


def scc_decompose_unary(wa: WeightedAutomaton) -> SccDag:
    if not wa.is_unary():
        raise InputError("unary SCC analysis requires a single-letter alphabet")
    return scc_decompose(wa.matrix(wa.alphabet[0]))


def local_period(wa: WeightedAutomaton, s: str, t: str) -> int:
    """lcm over DAG paths from SCC(s) to SCC(t) of the gcd of member periods.

    Used only by analysis and tests; no decider consumes it.
    """
    dag = scc_decompose_unary(wa)
    si, ti = dag.scc_of[wa.index(s)], dag.scc_of[wa.index(t)]
    succs: dict = {}
    for (a, b) in dag.edges:
        succs.setdefault(a, set()).add(b)
    gcds: set = set()

    def walk(node, acc):
        acc = gcd(acc, dag.sccs[node].period)
        if node == ti:
            gcds.add(acc)
        for nxt in succs.get(node, ()):
            walk(nxt, acc)

    walk(si, 0)
    if not gcds:
        return 0
    out = 1
    for g in gcds:
        out = lcm(out, g) if g else out
    return out


@dataclass(frozen=True)
class RhoK:
    """A (radius, count) growth signature rho^n * n^k, ordered lexicographically."""

    rho: AlgebraicNumber
    k: int

    def cmp(self, other: "RhoK") -> int:
        c = compare(self.rho, other.rho)
        if c != 0:
            return c
        return (self.k > other.k) - (self.k < other.k)


@dataclass(frozen=True)
class RadiusTable:
    """Deduplicated spectral radii, sorted ascending; annotations hold indices."""

    radii: tuple  # of AlgebraicNumber, strictly ascending

    def index_of(self, radius: AlgebraicNumber) -> int:
        for i, r in enumerate(self.radii):
            if compare(r, radius) == 0:
                return i
        raise InputError("radius not in table")

    @classmethod
    def build(cls, radii) -> "RadiusTable":
        kept: list = []
        for r in radii:
            if not any(compare(r, x) == 0 for x in kept):
                kept.append(r)
        kept.sort(key=_SortKey)
        return cls(tuple(kept))


class _SortKey:
    def __init__(self, value):
        self.value = value

    def __lt__(self, other):
        return compare(self.value, other.value) < 0


@dataclass(frozen=True)
class AnnotatedAutomaton:
    """Reachable (state, radius index, count) triples of a unary automaton,
    lifted per the four growth-tracking transition rules.

    The admissible set is the collection of annotations reachable at the
    final state; its size is at most |Q|^2.
    """

    wa: WeightedAutomaton
    start: tuple  # (state, radius index, k)
    states: tuple  # of (state, radius index, k)
    transitions: frozenset  # of (triple, triple)
    table: RadiusTable
    final: str

    def admissible(self) -> list[tuple[int, int]]:
        out = sorted(
            {(ri, k) for (q, ri, k) in self.states if q == self.final}
        )
        return out


def annotate(
    wa: WeightedAutomaton,
    s: str,
    dag: Optional[SccDag] = None,
    table: Optional[RadiusTable] = None,
) -> AnnotatedAutomaton:
    """Annotated automaton from s over a unary weighted automaton.

    Requires the normalized single-final shape and s off every cycle (make a
    copy of s first if needed).  States are (q, rho, k) where rho is the
    largest SCC radius seen by the run so far and k+1 the number of distinct
    SCCs with that radius.
    """
    if not wa.is_unary():
        raise InputError("annotation requires a unary automaton")
    m = wa.matrix(wa.alphabet[0])
    if dag is None:
        dag = scc_decompose(m)
    if table is None:
        table = RadiusTable.build([info.radius for info in dag.sccs])
    finals = sorted(wa.finals)
    if len(finals) != 1:
        raise InputError("annotate requires the single-final normalized shape")
    t = finals[0]
    rank = [table.index_of(info.radius) for info in dag.sccs]
    si = wa.index(s)
    start = (s, rank[dag.scc_of[si]], 0)
    states = {start}
    transitions = set()
    frontier = [start]
    n = wa.n
    while frontier:
        nxt = []
        for (q, ri, k) in frontier:
            qi = wa.index(q)
            for vj in range(n):
                if m[qi][vj] <= 0:
                    continue
                q2 = wa.states[vj]
                same = dag.scc_of[qi] == dag.scc_of[vj]
                r2 = rank[dag.scc_of[vj]]
                if same:
                    tgt = (q2, ri, k)
                elif r2 == ri:
                    tgt = (q2, ri, k + 1)
                elif r2 < ri:
                    tgt = (q2, ri, k)
                else:
                    tgt = (q2, r2, 0)
                transitions.add(((q, ri, k), tgt))
                if tgt not in states:
                    states.add(tgt)
                    nxt.append(tgt)
        frontier = nxt
    ann = AnnotatedAutomaton(
        wa, start, tuple(sorted(states)), frozenset(transitions), table, t
    )
    assert len(ann.admissible()) <= wa.n * wa.n
    return ann


def degree_language(ann: AnnotatedAutomaton, x: tuple[int, int], mode: str) -> Nfa:
    """Unary NFA accepting lengths whose degree reaches the threshold x.

    mode "geq": some run signature is >= x; mode "gt": strictly above.
    x is an (radius index, k) pair over the annotation's radius table and
    must be admissible.
    """
    if mode not in ("geq", "gt"):
        raise InputError(f"unknown degree mode {mode!r}")
    ri, k = x
    if not (0 <= ri < len(ann.table.radii)) or not (0 <= k <= ann.wa.n):
        raise InputError(f"threshold {x} is not admissible for this automaton")
    letter = ann.wa.alphabet[0]
    name = {st: f"{st[0]}~{st[1]}~{st[2]}" for st in ann.states}
    if mode == "geq":
        ok = lambda sig: sig >= x
    else:
        ok = lambda sig: sig > x
    finals = frozenset(
        name[st] for st in ann.states if st[0] == ann.final and ok((st[1], st[2]))
    )
    return Nfa(
        tuple(name[st] for st in ann.states),
        (letter,),
        frozenset((name[a], letter, name[b]) for (a, b) in ann.transitions),
        name[ann.start],
        finals,
    )


def copy_start_off_cycles(wa: WeightedAutomaton, s: str) -> tuple[WeightedAutomaton, str]:
    """Fresh copy of s carrying its outgoing transitions, so the start state
    lies on no cycle.  Weights of nonempty words from the copy equal those
    from s; the copy is never final (the empty word stays with the
    containment check), preserving the single-final shape."""
    base = f"{s}^"
    fresh = base
    k = 0
    while fresh in wa.states:
        fresh = f"{base}{k}"
        k += 1
    states = wa.states + (fresh,)
    si = wa.index(s)
    trans = {}
    for a in wa.alphabet:
        m = wa.trans[a]
        rows = [tuple(row) + (Fraction(0),) for row in m]
        rows.append(tuple(m[si]) + (Fraction(0),))
        trans[a] = tuple(rows)
    return WeightedAutomaton(states, wa.alphabet, trans, wa.finals), fresh


def scc_debug_dump(wa: WeightedAutomaton, s: Optional[str] = None) -> dict:
    """JSON-ready dump of the SCC DAG and, from s, the admissible-pair table."""
    dag = scc_decompose_unary(wa)
    out = {
        "sccs": [
            {
                "members": sorted(wa.states[i] for i in info.members),
                "radius": _radius_json(info.radius),
                "period": info.period,
            }
            for info in dag.sccs
        ],
        "edges": sorted([a, b] for (a, b) in dag.edges),
    }
    if s is not None:
        from .automata import normalize_single_final

        nwa = normalize_single_final(wa)
        nwa, fresh = copy_start_off_cycles(nwa, s)
        ann = annotate(nwa, fresh)
        out["admissible"] = [
            {"radius": _radius_json(ann.table.radii[ri]), "k": k}
            for (ri, k) in ann.admissible()
        ]
    return out


def _radius_json(r: AlgebraicNumber) -> dict:
    refined = r.refined(Fraction(1, 10**12))
    return {
        "poly": list(r.poly),
        "interval": [str(refined.lo), str(refined.hi)],
        "approx": r.to_float(),
    }
