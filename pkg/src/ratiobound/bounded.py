"""Decider for queries whose languages are bounded: reductions down to the
plus-letter-bounded core, per-block growth-signature detectors, Parikh
decompositions into linear sets, and emission/semi-decision of divergence
sentences over the reals with logarithms.

Also hosts the finitely-ambiguous check, which consumes externally supplied
growth tuples and semi-decides exponential-sum domination sentences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebraic import AlgebraicNumber, compare
from .automata import (
    InputError,
    Nfa,
    Query,
    ResourceError,
    WeightedAutomaton,
    nfa_of,
    weight_blocks,
)
from .intervals import FInterval, ivl_sum, ln_fraction_bounds
from .nfaops import lc_check, nfa_contained
from .realexp import (
    FAILS,
    HOLDS,
    UNKNOWN,
    DivergenceRow,
    DivergenceSystem,
    LogCoeff,
    RealExpFormula,
    SemiDecision,
    semi_decide,
)
from .spectral import RadiusTable, RhoK, scc_decompose

MONITOR_CAP = 20000
LINEAR_SET_CAP = 10000


# ---------------------------------------------------------------------------
# public value types


@dataclass(frozen=True)
class RhoVector:
    """Per-block growth signatures; the order is pointwise on lexicographic
    (radius, count) components.  Blocks with only loop-free singleton runs
    carry the shared infinitesimal placeholder radius."""

    entries: tuple  # of RhoK

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class DegreeSet:
    """A maximal antichain of growth-signature vectors."""

    vectors: tuple  # of RhoVector


@dataclass(frozen=True)
class LinearSet:
    """{ base + diag(periods) * lam : lam in N^m }, periods unit multiples."""

    base: tuple
    periods: tuple

    def member(self, lam) -> tuple:
        return tuple(b + r * l for b, r, l in zip(self.base, self.periods, lam))

    def members(self, lam_max: int):
        from itertools import product

        m = len(self.base)
        for lam in product(range(lam_max + 1), repeat=m):
            yield self.member(lam)


@dataclass(frozen=True)
class DeltaTuple:
    """One attainable pair of exponential sums for a finitely ambiguous
    comparison: weights p, r and per-coordinate bases q^i, s^i, all > 0."""

    p: tuple
    q_rows: tuple
    r: tuple
    s_rows: tuple

    def __post_init__(self):
        if len(self.p) != len(self.q_rows) or len(self.r) != len(self.s_rows):
            raise InputError("tuple weights and rows must align")
        dims = {len(q) for q in self.q_rows} | {len(s) for s in self.s_rows}
        if len(dims) > 1:
            raise InputError("inconsistent tuple dimensions")
        for v in (*self.p, *self.r):
            if Fraction(v) <= 0:
                raise InputError("tuple entries must be strictly positive")
        for row in (*self.q_rows, *self.s_rows):
            for v in row:
                if Fraction(v) <= 0:
                    raise InputError("tuple entries must be strictly positive")

    @property
    def dim(self) -> int:
        return len(self.q_rows[0]) if self.q_rows else 0


# ---------------------------------------------------------------------------
# boundedness detection and reductions


def detect_letter_bounded(wa: WeightedAutomaton, s: str):
    """A letter sequence whose starred blocks cover L_s, or None.

    Structure: in the trimmed support NFA every cycle must be single-letter;
    the sequence interleaves SCC loop letters with cross-edge letters in
    topological order, then the containment is verified directly.
    """
    n = nfa_of(wa, s)
    reach = {n.start}
    frontier = [n.start]
    while frontier:
        nxt = []
        for q in frontier:
            for (p, a, q2) in n.transitions:
                if p == q and q2 not in reach:
                    reach.add(q2)
                    nxt.append(q2)
        frontier = nxt
    co = set(n.finals)
    changed = True
    while changed:
        changed = False
        for (p, a, q2) in n.transitions:
            if q2 in co and p not in co:
                co.add(p)
                changed = True
    live = reach & co
    if not live or not (live & n.finals):
        return ()
    trans = [(p, a, q2) for (p, a, q2) in n.transitions if p in live and q2 in live]
    order = sorted(live)
    idx = {q: i for i, q in enumerate(order)}

    def succ(i):
        return [idx[q2] for (p, a, q2) in trans if p == order[i]]

    from .spectral import _tarjan

    comps = _tarjan(len(order), succ)
    scc_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            scc_of[order[v]] = ci
    loop_letter = {}
    for ci, comp in enumerate(comps):
        letters = {
            a
            for (p, a, q2) in trans
            if scc_of[p] == ci and scc_of[q2] == ci
        }
        if len(letters) > 1:
            return None
        loop_letter[ci] = letters.pop() if letters else None
    incoming: dict = {ci: set() for ci in range(len(comps))}
    dag_edges = set()
    for (p, a, q2) in trans:
        if scc_of[p] != scc_of[q2]:
            incoming[scc_of[q2]].add(a)
            dag_edges.add((scc_of[p], scc_of[q2]))
    # topological order, greedily continuing the current letter so parallel
    # same-letter branches share blocks
    indeg = {ci: 0 for ci in range(len(comps))}
    for (u, v) in dag_edges:
        indeg[v] += 1
    ready = [ci for ci in range(len(comps)) if indeg[ci] == 0]
    topo = []
    last = None
    while ready:
        ready.sort(key=lambda ci: (loop_letter[ci] != last, str(loop_letter[ci]), ci))
        ci = ready.pop(0)
        topo.append(ci)
        if loop_letter[ci] is not None:
            last = loop_letter[ci]
        for (u, v) in sorted(dag_edges):
            if u == ci:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
    seq: list = []
    for ci in topo:
        seq.extend(sorted(incoming[ci]))
        if loop_letter[ci] is not None:
            seq.append(loop_letter[ci])
    collapsed = []
    for a in seq:
        if not collapsed or collapsed[-1] != a:
            collapsed.append(a)
    if not nfa_contained(n, _letter_star_nfa(tuple(collapsed), n.alphabet)):
        return None
    # greedy minimization: drop blocks while containment still verifies
    changed = True
    while changed:
        changed = False
        for i in range(len(collapsed)):
            cand = collapsed[:i] + collapsed[i + 1 :]
            merged = []
            for a in cand:
                if not merged or merged[-1] != a:
                    merged.append(a)
            if merged and nfa_contained(n, _letter_star_nfa(tuple(merged), n.alphabet)):
                collapsed = merged
                changed = True
                break
    return tuple(collapsed)


def _letter_star_nfa(letters, alphabet) -> Nfa:
    """NFA for a1* a2* ... am* (blocks may repeat letters)."""
    m = len(letters)
    states = tuple(f"p{i}" for i in range(m + 1))
    trans = set()
    for i in range(m):
        for j in range(i, m):
            trans.add((states[i], letters[j], states[j + 1]))
        trans.add((states[i + 1], letters[i], states[i + 1]))
    return Nfa(
        states,
        tuple(alphabet),
        frozenset(trans),
        states[0],
        frozenset(states),
    )


@dataclass(frozen=True)
class LetterBoundedQuery:
    automaton: WeightedAutomaton
    s: str
    s_prime: str
    letters: tuple  # output block letters, one per bounding word


def bounded_to_letter_bounded(
    wa: WeightedAutomaton, s: str, s_prime: str, words
) -> LetterBoundedQuery:
    """Collapse bounding words w1..wm to fresh block letters via a transducer
    product: for every decomposition w = w1^n1...wm^nm, the new automaton
    weighs a1^n1...am^nm exactly as the original weighs w."""
    words = [str(w) for w in words]
    if not words:
        raise InputError("empty bounding word list")
    for w in words:
        if not w:
            raise InputError("bounding words must be nonempty")
        for ch in w:
            if ch not in wa.alphabet:
                raise InputError(f"bounding word letter {ch!r} not in the alphabet")
    m = len(words)
    out_letters = tuple(f"a{i+1}" for i in range(m))
    # transducer: per support pattern, a chain of word readers; emissions
    # happen on the last letter of each bounding word
    tstates = ["q0"]
    tedges = []  # (t, input, output or None, t')
    patterns = []
    for mask in range(1, 2**m):
        patterns.append(tuple(i for i in range(m) if mask >> i & 1))
    for pat in patterns:
        k = len(pat)
        tag = "p" + "".join(str(i + 1) for i in pat)
        heads = []
        for j, wi in enumerate(pat):
            word = words[wi]
            chain = [f"{tag}.f{j}"]
            for l in range(1, len(word)):
                chain.append(f"{tag}.m{j}.{l}")
            heads.append(chain)
        terminal = f"{tag}.end"
        for j, wi in enumerate(pat):
            word = words[wi]
            chain = heads[j]
            tstates.extend(chain)
            for l in range(len(word) - 1):
                tedges.append((chain[l], word[l], None, chain[l + 1]))
            nxt = heads[j + 1][0] if j + 1 < len(pat) else terminal
            tedges.append((chain[-1], word[-1], out_letters[wi], chain[0]))
            tedges.append((chain[-1], word[-1], out_letters[wi], nxt))
        tstates.append(terminal)
        # q0 mirrors the first block's entry edges
        entry = heads[0][0]
        for (t, x, out, t2) in list(tedges):
            if t == entry:
                tedges.append(("q0", x, out, t2))
    # product with the automaton, then epsilon elimination; everything stays
    # sparse because transducer states have constant out-degree
    eps: dict = {}
    emit: dict = {a: {} for a in out_letters}
    for (t, x, out, t2) in tedges:
        mm = wa.trans[x]
        for qi in range(wa.n):
            row = mm[qi]
            for qj in range(wa.n):
                w = row[qj]
                if w == 0:
                    continue
                i = (wa.states[qi], t)
                j = (wa.states[qj], t2)
                target = eps if out is None else emit[out]
                bucket = target.setdefault(i, {})
                bucket[j] = bucket.get(j, Fraction(0)) + w
    r = max(len(w) for w in words) - 1
    # acc = sum of eps^x for x = 0..r, as a sparse matrix
    acc: dict = {}
    frontier: dict = {}
    for i in set(eps) | {k for row in eps.values() for k in row}:
        acc.setdefault(i, {})[i] = Fraction(1)
        frontier.setdefault(i, {})[i] = Fraction(1)
    for _ in range(r):
        nxt: dict = {}
        for i, row in frontier.items():
            for k, w in row.items():
                for j, w2 in eps.get(k, {}).items():
                    bucket = nxt.setdefault(i, {})
                    bucket[j] = bucket.get(j, Fraction(0)) + w * w2
        for i, row in nxt.items():
            for j, w in row.items():
                bucket = acc.setdefault(i, {})
                bucket[j] = bucket.get(j, Fraction(0)) + w
        frontier = nxt
    sparse_trans: dict = {a: {} for a in out_letters}
    for a in out_letters:
        em = emit[a]
        for i, row in acc.items():
            for k, w in row.items():
                for j, w2 in em.get(k, {}).items():
                    bucket = sparse_trans[a].setdefault(i, {})
                    bucket[j] = bucket.get(j, Fraction(0)) + w * w2
        # pure emissions from states without epsilon history
        for i, row in em.items():
            if i not in acc:
                bucket = sparse_trans[a].setdefault(i, {})
                for j, w2 in row.items():
                    bucket[j] = bucket.get(j, Fraction(0)) + w2
    # accept only at completed patterns (or before any input): the final
    # emission otherwise branches to both restart and advance states and
    # would double-count every path
    start_states = {(s, "q0"), (s_prime, "q0")}

    def is_final(node):
        q, t = node
        return q in wa.finals and (t == "q0" or t.endswith(".end"))

    live = set(start_states)
    frontier_nodes = list(start_states)
    while frontier_nodes:
        new = []
        for node in frontier_nodes:
            for a in out_letters:
                for j in sparse_trans[a].get(node, {}):
                    if j not in live:
                        live.add(j)
                        new.append(j)
        frontier_nodes = new
    pre: dict = {}
    for a in out_letters:
        for i, row in sparse_trans[a].items():
            for j in row:
                pre.setdefault(j, set()).add(i)
    co = {node for node in live if is_final(node)}
    frontier_nodes = list(co)
    while frontier_nodes:
        new = []
        for node in frontier_nodes:
            for i in pre.get(node, ()):
                if i in live and i not in co:
                    co.add(i)
                    new.append(i)
        frontier_nodes = new
    keep = (live & co) | start_states
    names = {node: f"{node[0]}|{node[1]}" for node in keep}
    triples = []
    for a in out_letters:
        for i, row in sparse_trans[a].items():
            if i not in keep:
                continue
            for j, w in row.items():
                if j in keep and w != 0:
                    triples.append((names[i], a, w, names[j]))
    finals = frozenset(names[node] for node in keep if is_final(node))
    out = WeightedAutomaton.from_transitions(
        tuple(sorted(names[node] for node in keep)),
        out_letters,
        triples,
        finals,
    )
    return LetterBoundedQuery(out, names[(s, "q0")], names[(s_prime, "q0")], out_letters)


@dataclass(frozen=True)
class PlusQuery:
    """One plus-letter-bounded sub-question with distinct block letters."""

    automaton: WeightedAutomaton
    s: str
    s_prime: str
    letters: tuple  # fresh block letters b1..bk
    source_letters: tuple  # the original letter of each block


def letter_bounded_to_plus(
    wa: WeightedAutomaton, s: str, s_prime: str, letters
) -> list:
    """Split a starred letter bound into plus-bounded sub-questions, one per
    distinct collapsed subsequence; the query answer is the conjunction."""
    letters = tuple(letters)
    patterns = {}
    for mask in range(1, 2 ** len(letters)):
        sub = tuple(letters[i] for i in range(len(letters)) if mask >> i & 1)
        collapsed = []
        for a in sub:
            if not collapsed or collapsed[-1] != a:
                collapsed.append(a)
        patterns.setdefault(tuple(collapsed), None)
    out = []
    for pat in sorted(patterns):
        out.append(_plus_subquery(wa, s, s_prime, pat))
    return out


def _plus_subquery(wa, s, s_prime, pat) -> PlusQuery:
    """Product with the plus-bound DFA for `pat`, then per-block relabeling."""
    k = len(pat)
    dfa_states = tuple(range(k + 1))
    prod_states = [(q, d) for q in wa.states for d in dfa_states]
    names = {qd: f"{qd[0]}@{qd[1]}" for qd in prod_states}
    trans = []
    for (q, a, w, q2) in wa.transitions():
        for d in dfa_states:
            targets = []
            if d >= 1 and pat[d - 1] == a:
                targets.append(d)
            if d < k and pat[d] == a:
                targets.append(d + 1)
            for d2 in targets:
                trans.append((names[(q, d)], a, w, names[(q2, d2)]))
    finals = frozenset(
        names[(q, k)] for q in wa.states if q in wa.finals
    )
    prod = WeightedAutomaton.from_transitions(
        tuple(names[qd] for qd in prod_states), wa.alphabet, trans, finals
    )
    return relabel_plus_blocks(prod, names[(s, 0)], names[(s_prime, 0)], pat)


def relabel_plus_blocks(
    wa: WeightedAutomaton, s: str, s_prime: str, letters
) -> PlusQuery:
    """Associate every transition with its unique block of a1+...am+ and
    relabel it with a fresh per-block letter.

    Adjacent duplicate letters must already be collapsed.  A transition
    usable in two different blocks contradicts boundedness and raises."""
    letters = tuple(letters)
    m = len(letters)
    for i in range(m - 1):
        if letters[i] == letters[i + 1]:
            raise InputError("collapse adjacent duplicate letters first")
    # liveness over the product with the block DFA (state = blocks entered)
    n = wa.n
    live = set()
    frontier = [(wa.index(s), 0), (wa.index(s_prime), 0)]
    live.update(frontier)
    edges = []
    while frontier:
        nxt = []
        for (qi, d) in frontier:
            for a in wa.alphabet:
                mm = wa.trans[a]
                targets = []
                if d >= 1 and letters[d - 1] == a:
                    targets.append(d)
                if d < m and letters[d] == a:
                    targets.append(d + 1)
                for d2 in targets:
                    for qj in range(n):
                        if mm[qi][qj] > 0:
                            edges.append(((qi, d), a, (qj, d2)))
                            if (qj, d2) not in live:
                                live.add((qj, d2))
                                nxt.append((qj, d2))
        frontier = nxt
    finals_idx = {wa.index(f) for f in wa.finals}
    good = {(qi, d) for (qi, d) in live if qi in finals_idx and d == m}
    co = set(good)
    pre: dict = {}
    for (u, a, v) in edges:
        pre.setdefault(v, []).append(u)
    frontier = list(good)
    while frontier:
        nxt = []
        for v in frontier:
            for u in pre.get(v, ()):
                if u not in co:
                    co.add(u)
                    nxt.append(u)
        frontier = nxt
    usable: dict = {}
    for ((qi, d), a, (qj, d2)) in edges:
        if (qi, d) in co and (qj, d2) in co:
            usable.setdefault((qi, a, qj), set()).add(d2)
    fresh = tuple(f"b{i+1}" for i in range(m))
    trans = []
    for (qi, a, qj), blocks in sorted(usable.items()):
        if len(blocks) > 1:
            raise InputError(
                f"transition {wa.states[qi]!r}-{a!r}->{wa.states[qj]!r} is usable "
                f"in blocks {sorted(blocks)}, contradicting boundedness"
            )
        (d2,) = blocks
        trans.append((wa.states[qi], fresh[d2 - 1], wa.trans[a][qi][qj], wa.states[qj]))
    out = WeightedAutomaton.from_transitions(wa.states, fresh, trans, wa.finals)
    return PlusQuery(out, s, s_prime, fresh, letters)


# ---------------------------------------------------------------------------
# per-block growth analysis


@dataclass(frozen=True)
class BlockInfo:
    scc_of: tuple  # state index -> scc id (within this block's matrix)
    rad_of_state: tuple  # state index -> radius index in the shared table


@dataclass(frozen=True)
class PlusAnalysis:
    """Shared data for one plus-letter-bounded question: the radius table
    with the infinitesimal placeholder, per-block SCC structure, the two
    determinized signature monitors and their synchronized product."""

    query: PlusQuery
    table: RadiusTable
    delta_idx: int
    zero_idx: Optional[int]
    blocks: tuple
    det_s: "MonitorDfa"
    det_p: "MonitorDfa"
    product_states: tuple  # of (i, j) pairs
    product_trans: dict  # (state index, letter index) -> state index
    dsets: tuple  # per product state: (D_s tuple, D_p tuple) of signatures


@dataclass(frozen=True)
class MonitorDfa:
    states: tuple  # of frozensets of monitor triples
    trans: dict  # (state index, letter index) -> state index
    sigsets: tuple  # per state: frozenset of complete signatures


def _maximal(signatures):
    sigs = sorted(signatures)
    out = []
    for v in sigs:
        if not any(_vec_lt(v, w) for w in sigs if w != v):
            out.append(v)
    return tuple(out)


def _vec_le(v, w):
    return all(a <= b for a, b in zip(v, w))


def _vec_lt(v, w):
    return _vec_le(v, w) and v != w


def plus_analysis(pq: PlusQuery, cap: int = MONITOR_CAP) -> PlusAnalysis:
    wa = pq.automaton
    m = len(pq.letters)
    dags = [scc_decompose(wa.matrix(a)) for a in pq.letters]
    radii = [info.radius for dag in dags for info in dag.sccs]
    zero = AlgebraicNumber.from_rational(Fraction(0))
    positives = [r for r in radii if r.sign() > 0]
    if positives:
        min_pos = positives[0]
        for r in positives[1:]:
            if compare(r, min_pos) < 0:
                min_pos = r
        delta = min_pos.scaled(Fraction(1, 2))
    else:
        delta = AlgebraicNumber.from_rational(Fraction(1, 2))
    table = RadiusTable.build(radii + [zero, delta])
    delta_idx = table.index_of(delta)
    zero_idx = table.index_of(zero)
    blocks = []
    for dag in dags:
        rad_idx = [table.index_of(info.radius) for info in dag.sccs]
        blocks.append(
            BlockInfo(
                tuple(dag.scc_of),
                tuple(rad_idx[dag.scc_of[qi]] for qi in range(wa.n)),
            )
        )
    blocks = tuple(blocks)
    ctx = _MonitorContext(wa, pq.letters, blocks, delta_idx, zero_idx)
    det_s = _determinize_monitor(ctx, pq.s, cap)
    det_p = _determinize_monitor(ctx, pq.s_prime, cap)
    # synchronized product over the block letters
    start = (0, 0)
    pstates = [start]
    pindex = {start: 0}
    ptrans = {}
    frontier = [start]
    while frontier:
        nxt = []
        for (i, j) in frontier:
            for li in range(m):
                ti = det_s.trans.get((i, li))
                tj = det_p.trans.get((j, li))
                if ti is None or tj is None:
                    continue
                tgt = (ti, tj)
                if tgt not in pindex:
                    pindex[tgt] = len(pstates)
                    pstates.append(tgt)
                    nxt.append(tgt)
                ptrans[(pindex[(i, j)], li)] = pindex[tgt]
        frontier = nxt
    dsets = []
    for (i, j) in pstates:
        dsets.append(
            (
                _maximal(det_s.sigsets[i]),
                _maximal(det_p.sigsets[j]),
            )
        )
    return PlusAnalysis(
        pq,
        table,
        delta_idx,
        zero_idx,
        blocks,
        det_s,
        det_p,
        tuple(pstates),
        ptrans,
        tuple(dsets),
    )


@dataclass(frozen=True)
class _MonitorContext:
    wa: WeightedAutomaton
    letters: tuple
    blocks: tuple
    delta_idx: int
    zero_idx: int

    def entry(self, j: int, qi: int):
        ri = self.blocks[j].rad_of_state[qi]
        if ri == self.zero_idx:
            return (self.delta_idx, 0)
        return (ri, 0)

    def update(self, j: int, ann, qi: int, vj: int):
        b = self.blocks[j]
        r2 = b.rad_of_state[vj]
        if ann == (self.delta_idx, 0):
            if r2 == self.zero_idx:
                return ann
            return (r2, 0)
        if b.scc_of[qi] == b.scc_of[vj]:
            return ann
        if r2 == ann[0]:
            return (ann[0], ann[1] + 1)
        if r2 < ann[0]:
            return ann
        return (r2, 0)


def _determinize_monitor(ctx: _MonitorContext, start: str, cap: int) -> MonitorDfa:
    wa = ctx.wa
    m = len(ctx.letters)
    si = wa.index(start)
    matrices = [wa.matrix(a) for a in ctx.letters]
    succs = [
        [
            [vj for vj in range(wa.n) if matrices[li][qi][vj] > 0]
            for qi in range(wa.n)
        ]
        for li in range(m)
    ]
    init = frozenset([(si, (), None)])

    def step(mset, li):
        out = set()
        for (qi, hist, ann) in mset:
            if ann is None:
                if li == 0:
                    for vj in succs[0][qi]:
                        out.add((vj, (), ctx.update(0, ctx.entry(0, qi), qi, vj)))
                continue
            j = len(hist)
            if li == j:
                for vj in succs[li][qi]:
                    out.add((vj, hist, ctx.update(li, ann, qi, vj)))
            elif li == j + 1 and li < m:
                for vj in succs[li][qi]:
                    out.add(
                        (
                            vj,
                            hist + (ann,),
                            ctx.update(li, ctx.entry(li, qi), qi, vj),
                        )
                    )
        return frozenset(out)

    states = [init]
    index = {init: 0}
    trans = {}
    frontier = [init]
    while frontier:
        nxt = []
        for mset in frontier:
            for li in range(m):
                tgt = step(mset, li)
                if not tgt:
                    continue
                if tgt not in index:
                    if len(states) >= cap:
                        raise ResourceError(
                            f"signature monitor exceeded {cap} subset states"
                        )
                    index[tgt] = len(states)
                    states.append(tgt)
                    nxt.append(tgt)
                trans[(index[mset], li)] = index[tgt]
        frontier = nxt
    finals_idx = {wa.index(f) for f in wa.finals}
    sigsets = []
    for mset in states:
        sigs = frozenset(
            hist + (ann,)
            for (qi, hist, ann) in mset
            if qi in finals_idx and ann is not None and len(hist) == m - 1
        )
        sigsets.append(sigs)
    return MonitorDfa(tuple(states), trans, tuple(sigsets))


def signature_to_rhovector(analysis: PlusAnalysis, sig) -> RhoVector:
    return RhoVector(
        tuple(RhoK(analysis.table.radii[ri], k) for (ri, k) in sig)
    )


def rhovector_to_signature(analysis: PlusAnalysis, vec: RhoVector):
    sig = []
    for rk in vec.entries:
        ri = None
        for i, r in enumerate(analysis.table.radii):
            if compare(r, rk.rho) == 0:
                ri = i
                break
        if ri is None:
            return None
        sig.append((ri, rk.k))
    return tuple(sig)


# ---------------------------------------------------------------------------
# detectors, Parikh decomposition


def realized_candidates(analysis: PlusAnalysis):
    """Realized (X, D-set) pairs: X ranges over maximal signatures of the
    first state wherever the product can accept with that exact pair."""
    out = {}
    for pi, (d1, d2) in enumerate(analysis.dsets):
        if not d1:
            continue
        for x in d1:
            out.setdefault((x, d2), set()).add(pi)
    return out


def realized_vectors(analysis: PlusAnalysis):
    """Realized candidates with algebraic payloads: (X vector, degree set)."""
    out = []
    for (x_sig, y_sigs) in sorted(realized_candidates(analysis)):
        x = signature_to_rhovector(analysis, x_sig)
        ys = DegreeSet(
            tuple(signature_to_rhovector(analysis, y) for y in y_sigs)
        )
        out.append((x, ys))
    return out


def detector_nfa(analysis: PlusAnalysis, x_sig, y_sigs) -> Nfa:
    """Product-monitor NFA accepting exactly the block words whose first
    state realizes signature X maximally and whose second state's maximal
    signature set is exactly Y."""
    y_key = tuple(sorted(y_sigs))
    finals = frozenset(
        f"d{pi}"
        for pi, (d1, d2) in enumerate(analysis.dsets)
        if x_sig in d1 and tuple(sorted(d2)) == y_key
    )
    letters = analysis.query.letters
    trans = frozenset(
        (f"d{i}", letters[li], f"d{j}")
        for (i, li), j in analysis.product_trans.items()
    )
    return Nfa(
        tuple(f"d{i}" for i in range(len(analysis.product_states))),
        letters,
        trans,
        "d0",
        finals,
    )


def detector(
    pq: PlusQuery, x: RhoVector, y, analysis: Optional[PlusAnalysis] = None
) -> Nfa:
    """Spec-level detector: signatures supplied as algebraic vectors."""
    analysis = analysis if analysis is not None else plus_analysis(pq)
    x_sig = rhovector_to_signature(analysis, x)
    y_sigs = []
    for vec in y:
        s = rhovector_to_signature(analysis, vec)
        if s is None:
            # an unrealizable radius cannot be an exact degree set
            return Nfa(("d0",), pq.letters, frozenset(), "d0", frozenset())
        y_sigs.append(s)
    if x_sig is None:
        return Nfa(("d0",), pq.letters, frozenset(), "d0", frozenset())
    return detector_nfa(analysis, x_sig, tuple(y_sigs))


def parikh_linear_sets(n: Nfa, letters) -> list:
    """Parikh image of a language inside a1+...am+ (distinct letters) as a
    finite union of linear sets with per-coordinate unit-multiple periods.

    Per block, the subset walk from the entry set is a stem-plus-loop; each
    designated crossing state (or acceptance, for the last block) pins the
    block count to a stem position or a loop progression, and blocks are
    independent once the crossing state is fixed.
    """
    letters = tuple(letters)
    m = len(letters)
    if len(set(letters)) != m:
        raise InputError("block letters must be distinct")
    results: list = []

    def walk(entry: frozenset, li: int):
        subsets = []
        index = {}
        cur = entry
        while cur not in index:
            index[cur] = len(subsets)
            subsets.append(cur)
            cur = n.step(cur, letters[li])
        return subsets, index[cur]

    def positions(subsets, loop_start, pred, min_steps: int):
        """Arithmetic progressions of step counts k >= min_steps with
        pred(subsets[k]); loop hits recur with the loop period."""
        period = len(subsets) - loop_start
        progs = []
        for k in range(len(subsets)):
            if k < min_steps or not pred(subsets[k]):
                continue
            if k < loop_start:
                progs.append((k, 0))
            else:
                progs.append((k, period))
        return progs

    def crossers(subset, li):
        return sorted(
            q for q in subset if any(
                (q, letters[li + 1], q2) in n.transitions for q2 in n.states
            )
        )

    def go(li: int, entry: frozenset, base, periods):
        if len(results) > LINEAR_SET_CAP:
            raise ResourceError("linear-set decomposition exceeded the cap")
        subsets, loop_start = walk(entry, li)
        min_steps = 1 if li == 0 else 0
        offset = 0 if li == 0 else 1
        if li == m - 1:
            for (k, r) in positions(
                subsets, loop_start, lambda sub: bool(sub & n.finals), min_steps
            ):
                results.append(
                    LinearSet(base + (offset + k,), periods + (r,))
                )
            return
        cands = set()
        for sub in subsets:
            cands.update(crossers(sub, li))
        for u in sorted(cands):
            for (k, r) in positions(
                subsets, loop_start, lambda sub: u in sub, min_steps
            ):
                entry2 = n.step(frozenset([u]), letters[li + 1])
                if entry2:
                    go(li + 1, entry2, base + (offset + k,), periods + (r,))

    start = frozenset([n.start])
    go(0, start, (), ())
    # deterministic order, duplicates removed
    uniq = sorted(set((ls.base, ls.periods) for ls in results))
    return [LinearSet(b, p) for (b, p) in uniq]


# ---------------------------------------------------------------------------
# formula emission and the decision procedure


def emit_formula(
    analysis: PlusAnalysis, x_sig, y_sigs, lin: LinearSet, u_set
) -> RealExpFormula:
    """The divergence sentence for one candidate: over the unbounded
    coordinates U of the linear set, every compared signature's growth
    against X must sink below every bound.

    Rows with a zero radius anywhere are filtered out (they contribute no
    weight); realized signatures always carry positive radii, so the filter
    is a formality here.
    """
    m = len(analysis.query.letters)
    table = analysis.table.radii
    for (ri, k) in x_sig:
        if ri == analysis.zero_idx:
            raise InputError("X has a zero-radius block: no witnessing path exists")
    u_list = sorted(u_set)
    for i in u_list:
        if lin.periods[i] <= 0:
            raise InputError("U must pick coordinates with positive periods")
    rows = []
    for y in sorted(y_sigs):
        if any(ri == analysis.zero_idx for (ri, k) in y):
            continue  # outside h_Y: contributes no weight
        coeffs = []
        logs = []
        for i in u_list:
            sigma = table[y[i][0]]
            rho = table[x_sig[i][0]]
            coeffs.append(LogCoeff(sigma, rho, Fraction(lin.periods[i])))
            logs.append(y[i][1] - x_sig[i][1])
        rows.append(DivergenceRow(tuple(coeffs), tuple(logs)))
    lower = Fraction(max(lin.base)) if lin.base else Fraction(0)
    lower = max(lower, Fraction(1))
    system = DivergenceSystem(tuple(rows), lower, len(u_list))
    provenance = {
        "X": _sig_text(analysis, x_sig),
        "Y": "{" + ", ".join(_sig_text(analysis, y) for y in sorted(y_sigs)) + "}",
        "linear_set": f"base={list(lin.base)} periods={list(lin.periods)}",
        "U": [i + 1 for i in u_list],
    }
    return RealExpFormula(system, provenance)


def _sig_text(analysis: PlusAnalysis, sig) -> str:
    parts = []
    for (ri, k) in sig:
        r = analysis.table.radii[ri]
        if ri == analysis.delta_idx:
            parts.append(f"(delta,{k})")
        elif r.is_rational:
            parts.append(f"({r.lo},{k})")
        else:
            parts.append(f"(alg{list(r.poly)},{k})")
    return "(" + " ".join(parts) + ")"


@dataclass(frozen=True)
class Candidate:
    x_sig: tuple
    y_sigs: tuple
    lin: LinearSet
    u_set: tuple
    formula: RealExpFormula
    decision: Optional[SemiDecision] = None


@dataclass(frozen=True)
class PlusVerdict:
    verdict: str  # is-big-o | not-big-o | unknown
    holding: Optional[Candidate] = None
    unknowns: tuple = ()
    candidates: int = 0


def decide_plus(
    pq: PlusQuery,
    analysis: Optional[PlusAnalysis] = None,
    start_bits: Optional[int] = None,
    parallel: int = 1,
) -> PlusVerdict:
    """Semi-decide all realized candidates of one plus-bounded sub-question.

    Candidate order is deterministic; any certified divergence wins, then
    any unknown, and boundedness needs every candidate refuted.
    """
    analysis = analysis if analysis is not None else plus_analysis(pq)
    realized = realized_candidates(analysis)
    letters = analysis.query.letters
    candidates = []
    for (x_sig, y_sigs) in sorted(realized):
        det = detector_nfa(analysis, x_sig, y_sigs)
        for lin in parikh_linear_sets(det, letters):
            pos = [i for i in range(len(letters)) if lin.periods[i] > 0]
            for mask in range(2 ** len(pos)):
                u_set = tuple(pos[i] for i in range(len(pos)) if mask >> i & 1)
                candidates.append(
                    Candidate(
                        x_sig,
                        y_sigs,
                        lin,
                        u_set,
                        emit_formula(analysis, x_sig, y_sigs, lin, u_set),
                    )
                )

    def run(cand: Candidate) -> Candidate:
        return Candidate(
            cand.x_sig,
            cand.y_sigs,
            cand.lin,
            cand.u_set,
            cand.formula,
            semi_decide(cand.formula, start_bits=start_bits),
        )

    if parallel > 1 and len(candidates) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallel) as pool:
            decided = list(pool.map(run, candidates))
    else:
        decided = [run(c) for c in candidates]
    unknowns = tuple(c for c in decided if c.decision.verdict == UNKNOWN)
    for cand in decided:
        if cand.decision.verdict == HOLDS:
            return PlusVerdict("not-big-o", cand, unknowns, len(candidates))
    if unknowns:
        return PlusVerdict("unknown", None, unknowns, len(candidates))
    return PlusVerdict("is-big-o", None, (), len(candidates))


@dataclass(frozen=True)
class BoundedResult:
    verdict: str  # is-big-o | not-big-o | unknown
    mode: str
    lc_counterexample: Optional[str] = None
    witness: Optional[dict] = None
    unknown_formulas: tuple = ()
    subqueries: int = 0

    @property
    def is_big_o(self) -> Optional[bool]:
        if self.verdict == "is-big-o":
            return True
        if self.verdict == "not-big-o":
            return False
        return None


def decide_bounded(
    q: Query,
    words=None,
    letters=None,
    start_bits: Optional[int] = None,
    parallel: int = 1,
) -> BoundedResult:
    """Decide a query with bounded languages.

    Bounding words (for general bounds) are caller-supplied; letter bounds
    are auto-detected from the second state when neither is given.  The
    containment check runs first on the original automaton; each starred
    subsequence of the letter bound becomes an independent plus-bounded
    sub-question and the verdicts merge with divergence dominating, then
    unknown, then boundedness.
    """
    lc = lc_check(q)
    if not lc:
        return BoundedResult(
            "not-big-o", "bounded", lc_counterexample=lc.counterexample
        )
    wa, s, sp = q.automaton, q.s, q.s_prime
    base_words = None
    if words is not None:
        base_words = [str(w) for w in words]
        lb = bounded_to_letter_bounded(wa, s, sp, base_words)
        wa, s, sp, letters = lb.automaton, lb.s, lb.s_prime, lb.letters
    elif letters is None:
        letters = detect_letter_bounded(wa, sp)
        if letters is None:
            raise InputError(
                "languages are not letter-bounded; supply bounding words"
            )
    letters = tuple(letters)
    if not letters:
        # only the empty word can be accepted; containment already holds
        return BoundedResult("is-big-o", "bounded", subqueries=0)
    subqueries = letter_bounded_to_plus(wa, s, sp, letters)
    unknowns: list = []
    holding = None
    holding_pq = None
    for pq in subqueries:
        analysis = plus_analysis(pq)
        pv = decide_plus(pq, analysis, start_bits=start_bits, parallel=parallel)
        if pv.verdict == "not-big-o":
            holding = pv.holding
            holding_pq = pq
            break
        unknowns.extend(pv.unknowns)
    if holding is not None:
        witness = _divergence_witness(holding_pq, holding, base_words)
        return BoundedResult(
            "not-big-o", "bounded", witness=witness, subqueries=len(subqueries)
        )
    if unknowns:
        return BoundedResult(
            "unknown",
            "bounded",
            unknown_formulas=tuple(c.formula for c in unknowns),
            subqueries=len(subqueries),
        )
    return BoundedResult("is-big-o", "bounded", subqueries=len(subqueries))


def _divergence_witness(pq: PlusQuery, cand: Candidate, base_words) -> dict:
    """Integer-grid witness: block vectors along the certified ray with
    exactly evaluated, strictly increasing weight ratios."""
    ray = cand.decision.ray or ()
    lin = cand.lin
    m = len(lin.base)
    u_list = list(cand.u_set)
    dmax = max(ray) if ray else Fraction(1)
    scaled = [Fraction(r) / dmax if dmax else Fraction(0) for r in ray]
    den = 1
    for r in scaled:
        den = den * r.denominator // _gcd(den, r.denominator) if r else den
    dint = [int(r * den) for r in scaled]
    ratios = []
    vectors = []
    t = max(1, int(cand.formula.system.lower))
    attempts = 0
    while len(_increasing_run(ratios)) < 3 and attempts < 40:
        lam = [0] * m
        for pos, i in enumerate(u_list):
            lam[i] = 1 + t * dint[pos]
        vec = lin.member(lam)
        blocks = list(zip(pq.letters, vec))
        ws = weight_blocks(pq.automaton, pq.s, blocks)
        wp = weight_blocks(pq.automaton, pq.s_prime, blocks)
        if wp > 0:
            ratios.append(ws / wp)
            vectors.append(vec)
        t *= 2
        attempts += 1
    run = _increasing_run(ratios)
    witness = {
        "provenance": cand.formula.provenance,
        "ray": [str(r) for r in ray],
        "block_letters": list(pq.source_letters),
        "vectors": [list(v) for v in vectors],
        "ratios": [str(r) for r in ratios],
        "increasing_run": [str(ratios[i]) for i in run],
    }
    if base_words is not None:
        witness["bounding_words"] = list(base_words)
    return witness


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def _increasing_run(ratios):
    """Indices of the last run of >= 3 strictly increasing entries, if any."""
    if len(ratios) < 3:
        return []
    for start in range(len(ratios) - 3, -1, -1):
        i, j, k = start, start + 1, start + 2
        if ratios[i] < ratios[j] < ratios[k]:
            return [i, j, k]
    return []


# ---------------------------------------------------------------------------
# finitely ambiguous comparison from supplied growth tuples


@dataclass(frozen=True)
class ExpSumDecision:
    verdict: str
    tuple_index: Optional[int] = None
    direction: Optional[tuple] = None
    witnesses: tuple = ()
    detail: Optional[str] = None


@dataclass(frozen=True)
class ExpSumFormula:
    """Domination sentence for one growth tuple: for every constant there is
    a real point where the first exponential sum exceeds the constant times
    the second."""

    delta: DeltaTuple
    index: int

    def text(self) -> str:
        xs = [f"x{j+1}" for j in range(self.delta.dim)]

        def side(ws, rows):
            terms = []
            for w, row in zip(ws, rows):
                factors = [str(Fraction(w))] + [
                    f"{Fraction(b)}^{x}" for b, x in zip(row, xs)
                ]
                terms.append("*".join(factors))
            return " + ".join(terms) if terms else "0"

        body = f"{side(self.delta.p, self.delta.q_rows)} >= C*({side(self.delta.r, self.delta.s_rows)})"
        quant = " ".join(xs)
        return f"forall C. (C > 0 -> exists {quant} >= 0. {body})"

    def to_smt2(self) -> str:
        d = self.delta
        xs = [f"x{j+1}" for j in range(d.dim)]
        lines = [
            "(set-logic ALL)",
            f"; growth-tuple domination sentence, tuple index {self.index}",
            "(declare-fun expf (Real) Real)",
            "(declare-fun ln (Real) Real)",
            "(assert (forall ((u Real)) (= (ln (expf u)) u)))",
            "(assert (forall ((u Real) (v Real)) (=> (< u v) (< (expf u) (expf v)))))",
        ]

        def powterm(base: Fraction, x: str) -> str:
            from .realexp import _smt_frac

            return f"(expf (* {x} (ln {_smt_frac(Fraction(base))})))"

        def side(ws, rows):
            from .realexp import _smt_frac

            terms = []
            for w, row in zip(ws, rows):
                factors = [_smt_frac(Fraction(w))] + [
                    powterm(Fraction(b), x) for b, x in zip(row, xs)
                ]
                terms.append("(* " + " ".join(factors) + ")")
            if not terms:
                return "0.0"
            return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"

        quant = " ".join(f"({x} Real)" for x in xs)
        bounds = " ".join(f"(>= {x} 0.0)" for x in xs)
        body = f"(and {bounds} (>= {side(d.p, d.q_rows)} (* C {side(d.r, d.s_rows)})))"
        lines.append(
            f"(assert (forall ((C Real)) (=> (> C 0.0) (exists ({quant}) {body}))))"
        )
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


def finitely_ambiguous_formula(deltas) -> list:
    """One domination sentence per growth tuple; the comparison is negative
    exactly when some tuple's sentence holds."""
    formulas = []
    for idx, d in enumerate(deltas):
        if not isinstance(d, DeltaTuple):
            d = DeltaTuple(*d)
        formulas.append(ExpSumFormula(d, idx))
    return formulas


def decide_finitely_ambiguous(
    deltas, start_bits: Optional[int] = None, grid: int = 60
) -> ExpSumDecision:
    """Three-valued check over all supplied tuples: divergence certificates
    are exact rational evaluations on the integer grid along a certified
    direction; boundedness certificates are dominance covers or certified
    direction coverings in the exponent space."""
    best_unknown = None
    for idx, d in enumerate(deltas):
        if not isinstance(d, DeltaTuple):
            d = DeltaTuple(*d)
        res = _exp_sum_semi_decide(d, start_bits=start_bits, grid=grid)
        if res.verdict == HOLDS:
            return ExpSumDecision(
                "not-big-o", idx, res.direction, res.witnesses, res.detail
            )
        if res.verdict == UNKNOWN and best_unknown is None:
            best_unknown = ExpSumDecision("unknown", idx, detail=res.detail)
    if best_unknown is not None:
        return best_unknown
    return ExpSumDecision("is-big-o", detail="all tuples refuted")


@dataclass(frozen=True)
class _ExpSumResult:
    verdict: str
    direction: Optional[tuple] = None
    witnesses: tuple = ()
    detail: Optional[str] = None


def _ratio_at(d: DeltaTuple, x) -> Fraction:
    num = sum(
        Fraction(p) * _powprod(qrow, x) for p, qrow in zip(d.p, d.q_rows)
    )
    den = sum(
        Fraction(r) * _powprod(srow, x) for r, srow in zip(d.r, d.s_rows)
    )
    return num / den


def _powprod(row, x) -> Fraction:
    out = Fraction(1)
    for base, e in zip(row, x):
        out *= Fraction(base) ** e
    return out


def _exp_sum_semi_decide(d: DeltaTuple, start_bits=None, grid=60) -> _ExpSumResult:
    from .realexp import start_bits_default

    bits = start_bits if start_bits is not None else start_bits_default()
    m = d.dim
    # dominance cover: every numerator exponent row appears in the denominator
    if all(
        any(tuple(q) == tuple(srow) for srow in d.s_rows) for q in d.q_rows
    ):
        return _ExpSumResult(FAILS, detail="denominator dominates row-wise")
    if m == 0:
        ratio = _ratio_at(d, ())
        return _ExpSumResult(FAILS, detail=f"constant ratio {ratio}")
    # search a direction whose best numerator slope beats every denominator
    directions = _direction_candidates(m)
    for dvec in directions:
        if _certify_slope_gap(d, dvec, bits):
            wits = _grid_ratio_witnesses(d, dvec, grid)
            if wits is not None:
                return _ExpSumResult(HOLDS, tuple(dvec), tuple(wits))
    if _exp_sum_covering(d, bits):
        return _ExpSumResult(FAILS, detail=f"slope covering at {bits} bits")
    return _ExpSumResult(UNKNOWN, detail="no certificate found")


def _direction_candidates(m: int):
    out = []
    vals = [Fraction(0), Fraction(1, 2), Fraction(1)]
    from itertools import product

    for combo in product(vals, repeat=m):
        if any(combo):
            out.append(list(combo))
    return out


def _slope(row, dvec, bits):
    return ivl_sum(
        FInterval(*ln_fraction_bounds(Fraction(b), bits)).scale(w)
        for b, w in zip(row, dvec)
    )


def _certify_slope_gap(d: DeltaTuple, dvec, bits) -> bool:
    num = [_slope(q, dvec, bits) for q in d.q_rows]
    den = [_slope(s, dvec, bits) for s in d.s_rows]
    best_num = max(iv.lo for iv in num)
    best_den = max(iv.hi for iv in den)
    return best_num > best_den


def _grid_ratio_witnesses(d: DeltaTuple, dvec, grid: int):
    den = 1
    for r in dvec:
        den = den * Fraction(r).denominator // _gcd(den, Fraction(r).denominator)
    dint = [int(Fraction(r) * den) for r in dvec]
    thresholds = [Fraction(10), Fraction(100), Fraction(1000)]
    witnesses = []
    t = 1
    while thresholds and t <= 10**7:
        x = tuple(t * di for di in dint)
        if max(x) > 10**7:
            break
        ratio = _ratio_at(d, x)
        while thresholds and ratio > thresholds[0]:
            witnesses.append((x, str(ratio)))
            thresholds.pop(0)
        t *= 2
    if thresholds:
        return None
    return witnesses


def _exp_sum_covering(d: DeltaTuple, bits) -> bool:
    """Every direction on the sup-norm boundary has some denominator slope
    certifiably at least the best numerator slope (with exact-tie handling
    through identical rows)."""
    m = d.dim
    max_depth = 9

    def num_upper(box):
        vals = []
        for qrow in d.q_rows:
            vals.append(
                ivl_sum(
                    FInterval(*ln_fraction_bounds(Fraction(b), bits)) * iv
                    for b, iv in zip(qrow, box)
                )
            )
        return vals

    def box_ok(box) -> bool:
        nums = num_upper(box)
        dens = []
        for srow in d.s_rows:
            dens.append(
                ivl_sum(
                    FInterval(*ln_fraction_bounds(Fraction(b), bits)) * iv
                    for b, iv in zip(srow, box)
                )
            )
        for j, niv in enumerate(nums):
            covered = False
            for l, div in enumerate(dens):
                if tuple(d.q_rows[j]) == tuple(d.s_rows[l]):
                    covered = True
                    break
                if div.lo >= niv.hi:
                    covered = True
                    break
            if not covered:
                return False
        return True

    def split(box, depth) -> bool:
        if box_ok(box):
            return True
        if depth >= max_depth:
            return False
        widths = [(box[i].hi - box[i].lo, i) for i in range(m)]
        w, i = max(widths)
        if w == 0:
            return False
        mid = (box[i].lo + box[i].hi) / 2
        left = list(box)
        left[i] = FInterval(box[i].lo, mid)
        right = list(box)
        right[i] = FInterval(mid, box[i].hi)
        return split(left, depth + 1) and split(right, depth + 1)

    for fixed in range(m):
        box = [
            FInterval(Fraction(1), Fraction(1))
            if i == fixed
            else FInterval(Fraction(0), Fraction(1))
            for i in range(m)
        ]
        if not split(box, 0):
            return False
    return True
