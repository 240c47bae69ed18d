import random
from fractions import Fraction as F
from itertools import product

import pytest

from ratiobound import (
    DeltaTuple,
    InputError,
    LinearSet,
    Query,
    RhoVector,
    WeightedAutomaton,
    bounded_to_letter_bounded,
    decide_bounded,
    decide_finitely_ambiguous,
    decide_unary,
    detect_letter_bounded,
    detector,
    emit_formula,
    finitely_ambiguous_formula,
    letter_bounded_to_plus,
    parikh_linear_sets,
    plus_analysis,
    weight,
    weight_blocks,
)
from ratiobound.bounded import detector_nfa, realized_candidates
from ratiobound.realexp import FAILS, HOLDS, semi_decide
from ratiobound.samples import relative_orderings, unbounded_ratio
from ratiobound.spectral import RhoK
from ratiobound.algebraic import AlgebraicNumber

from helpers import brute_block_degree, random_wa, words_upto


# ---------------------------------------------------------------------------
# boundedness detection


def test_detect_unary():
    assert detect_letter_bounded(unbounded_ratio(), "s") == ("a",)


def test_detect_two_blocks():
    assert detect_letter_bounded(relative_orderings(F(62, 100)), "s'") == ("a", "b")


def test_detect_alternation_fails():
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "t"],
        ["a", "b"],
        [("p", "a", F(1, 2), "q"), ("q", "b", F(1, 2), "p"), ("p", "a", F(1, 2), "t")],
        ["t"],
    )
    assert detect_letter_bounded(wa, "p") is None


def test_detect_aba_shape():
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "r", "t"],
        ["a", "b"],
        [
            ("p", "a", F(1, 2), "p"),
            ("p", "b", F(1, 4), "q"),
            ("q", "b", F(1, 2), "q"),
            ("q", "a", F(1, 4), "r"),
            ("r", "a", F(1, 2), "r"),
            ("r", "a", F(1, 4), "t"),
        ],
        ["t"],
    )
    assert detect_letter_bounded(wa, "p") == ("a", "b", "a")


# ---------------------------------------------------------------------------
# word-bound reduction


def repeat_word(w, n):
    return w * n


def test_bounded_to_letter_single_word():
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "t"],
        ["a", "b"],
        [
            ("p", "a", F(1, 2), "q"),
            ("q", "b", F(1, 3), "p"),
            ("q", "b", F(1, 4), "t"),
        ],
        ["t"],
    )
    lb = bounded_to_letter_bounded(wa, "p", "q", ["ab"])
    for n in range(7):
        want = weight(wa, "p", repeat_word("ab", n))
        got = weight_blocks(lb.automaton, lb.s, [(lb.letters[0], n)])
        assert got == want


def test_bounded_to_letter_distinct_letters_degenerates():
    wa = relative_orderings(F(62, 100))
    lb = bounded_to_letter_bounded(wa, "s", "s'", ["a", "b"])
    for n1, n2 in product(range(5), repeat=2):
        want = weight(wa, "s", "a" * n1 + "b" * n2)
        got = weight_blocks(
            lb.automaton, lb.s, [(lb.letters[0], n1), (lb.letters[1], n2)]
        )
        assert got == want


def test_bounded_to_letter_overlapping_decompositions():
    """Words like (ab)^4 decompose many ways against abab/a/b/ab blocks;
    every valid decomposition vector must reproduce the same weight."""
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "t"],
        ["a", "b"],
        [
            ("p", "a", F(1, 2), "q"),
            ("q", "b", F(1, 2), "p"),
            ("q", "b", F(1, 4), "t"),
        ],
        ["t"],
    )
    words = ["abab", "a", "b", "ab"]
    lb = bounded_to_letter_bounded(wa, "p", "q", words)
    target = weight(wa, "p", "abababab")
    assert target > 0
    vectors = []
    for n1 in range(3):
        for n2 in range(2):
            for n3 in range(2):
                for n4 in range(5):
                    if (
                        repeat_word("abab", n1)
                        + "a" * n2
                        + "b" * n3
                        + repeat_word("ab", n4)
                        == "abababab"
                    ):
                        vectors.append((n1, n2, n3, n4))
    assert len(vectors) >= 3
    for vec in vectors:
        got = weight_blocks(lb.automaton, lb.s, list(zip(lb.letters, vec)))
        assert got == target, vec


def test_bounded_to_letter_input_errors():
    wa = unbounded_ratio()
    with pytest.raises(InputError):
        bounded_to_letter_bounded(wa, "s", "s'", [])
    with pytest.raises(InputError):
        bounded_to_letter_bounded(wa, "s", "s'", ["ab"])  # b not in alphabet


# ---------------------------------------------------------------------------
# letter-bound to plus-bound


def test_letter_to_plus_subquery_count():
    wa = relative_orderings(F(62, 100))
    subs = letter_bounded_to_plus(wa, "s", "s'", ("a", "b"))
    assert len(subs) == 3  # a+, b+, a+b+


def test_letter_to_plus_weight_preservation():
    wa = relative_orderings(F(62, 100))
    subs = letter_bounded_to_plus(wa, "s", "s'", ("a", "b"))
    by_src = {pq.source_letters: pq for pq in subs}
    pq = by_src[("a", "b")]
    for n1 in range(1, 5):
        for n2 in range(1, 5):
            want = weight(wa, "s", "a" * n1 + "b" * n2)
            got = weight_blocks(pq.automaton, pq.s, list(zip(pq.letters, (n1, n2))))
            assert got == want
    only_a = by_src[("a",)]
    for n in range(1, 6):
        assert weight_blocks(only_a.automaton, only_a.s, [(only_a.letters[0], n)]) == weight(
            wa, "s", "a" * n
        )


def test_relabel_conflict_detection():
    # a transition genuinely usable in blocks 1 and 3 of a+b+a+ means the
    # language cannot be inside the bound; expect a structural error
    from ratiobound import relabel_plus_blocks

    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "t"],
        ["a", "b"],
        [
            ("p", "a", F(1, 2), "p"),
            ("p", "b", F(1, 2), "q"),
            ("q", "b", F(1, 4), "q"),
            ("q", "a", F(1, 4), "p"),
            ("p", "a", F(1, 4), "t"),
        ],
        ["t"],
    )
    with pytest.raises(InputError):
        relabel_plus_blocks(wa, "p", "p", ("a", "b", "a"))


# ---------------------------------------------------------------------------
# detectors and Parikh decomposition


def analysis_ab(p=F(62, 100)):
    wa = relative_orderings(p)
    subs = letter_bounded_to_plus(wa, "s", "s'", ("a", "b"))
    pq = [s for s in subs if s.source_letters == ("a", "b")][0]
    return pq, plus_analysis(pq)


def test_detector_relative_orderings_realized():
    pq, analysis = analysis_ab()
    x = RhoVector(
        (
            RhoK(AlgebraicNumber.from_rational(F(3, 5)), 0),
            RhoK(AlgebraicNumber.from_rational(F(2, 5)), 0),
        )
    )
    realized = realized_candidates(analysis)
    assert realized, "expected realized candidates"
    # locate the candidate whose X matches ((3/5,0),(2/5,0)) exactly
    match = None
    for (x_sig, y_sigs) in sorted(realized):
        radii = [analysis.table.radii[ri] for (ri, k) in x_sig]
        if all(k == 0 for (_, k) in x_sig) and [
            r.lo for r in radii if r.is_rational
        ] == [F(3, 5), F(2, 5)]:
            match = (x_sig, y_sigs)
    assert match is not None
    x_sig, y_sigs = match
    assert y_sigs, "realized degree set should be nonempty"
    ys = [
        [RhoK(analysis.table.radii[ri], k) for (ri, k) in y] for y in y_sigs
    ]
    det = detector(pq, x, [RhoVector(tuple(v)) for v in ys], analysis)
    # the detector accepts the a a b b region
    assert det.accepts([pq.letters[0]] * 2 + [pq.letters[1]] * 2)
    assert det.accepts([pq.letters[0]] * 3 + [pq.letters[1]] * 4)


def test_detector_empty_for_unrealized_y():
    pq, analysis = analysis_ab()
    det = detector(pq, RhoVector(()), [], analysis)
    assert not any(
        det.accepts([pq.letters[0]] * i + [pq.letters[1]] * j)
        for i in range(1, 4)
        for j in range(1, 4)
    )


def test_detector_membership_matches_brute_force():
    rng = random.Random(311)
    from helpers import random_block_wa

    for _ in range(6):
        wa = random_block_wa(rng, per=2)
        s, sp = "L0_0", "L0_1"
        subs = letter_bounded_to_plus(wa, s, sp, ("a", "b"))
        pq = [x for x in subs if x.source_letters == ("a", "b")][0]
        analysis = plus_analysis(pq)
        realized = realized_candidates(analysis)
        for (x_sig, y_sigs) in realized:
            det = detector_nfa(analysis, x_sig, y_sigs)
            for n1 in range(1, 5):
                for n2 in range(1, 5):
                    word = [pq.letters[0]] * n1 + [pq.letters[1]] * n2
                    got = det.accepts(word)
                    ds = brute_block_degree(pq.automaton, pq.s, pq.letters, (n1, n2))
                    dp = brute_block_degree(
                        pq.automaton, pq.s_prime, pq.letters, (n1, n2)
                    )
                    want = x_sig in ds and tuple(sorted(y_sigs)) == tuple(sorted(dp))
                    assert got == want, (x_sig, y_sigs, n1, n2, ds, dp)


def test_parikh_spec_examples():
    from ratiobound import Nfa

    single = Nfa(
        ("S", "A"), ("a",), frozenset({("S", "a", "A"), ("A", "a", "A")}), "S", frozenset({"A"})
    )
    assert parikh_linear_sets(single, ("a",)) == [LinearSet((1,), (1,))]
    two = Nfa(
        ("S", "A0", "A1", "B0", "B1", "B2"),
        ("a", "b"),
        frozenset(
            {
                ("S", "a", "A1"),
                ("A1", "a", "A0"),
                ("A0", "a", "A1"),
                ("A1", "b", "B0"),
                ("B0", "b", "B1"),
                ("B1", "b", "B2"),
                ("B2", "b", "B0"),
            }
        ),
        "S",
        frozenset({"B1"}),
    )
    assert parikh_linear_sets(two, ("a", "b")) == [LinearSet((1, 2), (2, 3))]


def test_parikh_union_matches_enumeration():
    rng = random.Random(331)
    from helpers import random_block_wa

    for _ in range(5):
        wa = random_block_wa(rng, per=2)
        subs = letter_bounded_to_plus(wa, "L0_0", "L0_0", ("a", "b"))
        pq = [s for s in subs if s.source_letters == ("a", "b")][0]
        from ratiobound import nfa_of

        n = nfa_of(pq.automaton, pq.s)
        sets = parikh_linear_sets(n, pq.letters)
        members = set()
        for ls in sets:
            for vec in ls.members(8):
                if all(v <= 8 for v in vec):
                    members.add(vec)
        for n1 in range(1, 9):
            for n2 in range(1, 9):
                word = [pq.letters[0]] * n1 + [pq.letters[1]] * n2
                assert ((n1, n2) in members) == n.accepts(word)


def test_parikh_round_trip_with_detector():
    pq, analysis = analysis_ab()
    for (x_sig, y_sigs) in realized_candidates(analysis):
        det = detector_nfa(analysis, x_sig, y_sigs)
        sets = parikh_linear_sets(det, pq.letters)
        for ls in sets:
            for lam in product(range(4), repeat=len(ls.base)):
                vec = ls.member(lam)
                word = []
                for letter, cnt in zip(pq.letters, vec):
                    word.extend([letter] * cnt)
                assert det.accepts(word), (ls, vec)


# ---------------------------------------------------------------------------
# formulas


def test_emit_formula_identity_rows_are_zero():
    pq, analysis = analysis_ab()
    realized = realized_candidates(analysis)
    (x_sig, y_sigs) = sorted(realized)[0]
    lin = LinearSet((1, 1), (1, 1))
    f = emit_formula(analysis, x_sig, (x_sig,), lin, (0, 1))
    assert all(
        co.exactly_zero() for row in f.system.rows for co in row.coeffs
    )
    assert semi_decide(f).verdict == FAILS


def test_emit_formula_relative_ordering_constants():
    pq, analysis = analysis_ab(F(61, 100))
    realized = realized_candidates(analysis)
    # the interesting candidate has X from s and |Y| = 2
    target = None
    for (x_sig, y_sigs) in sorted(realized):
        if len(y_sigs) == 2:
            target = (x_sig, y_sigs)
    assert target is not None
    x_sig, y_sigs = target
    f = emit_formula(analysis, x_sig, y_sigs, LinearSet((1, 1), (1, 1)), (0, 1))
    nums = sorted(
        str(co.num.rational_value)
        for row in f.system.rows
        for co in row.coeffs
    )
    dens = sorted(
        str(co.den.rational_value)
        for row in f.system.rows
        for co in row.coeffs
    )
    assert nums == ["39/100", "41/100", "59/100", "61/100"]
    assert set(dens) == {"3/5", "2/5"}
    n_states = pq.automaton.n
    for row in f.system.rows:
        for p in row.logs:
            assert -n_states <= p <= n_states


def test_decide_bounded_relative_orderings():
    assert (
        decide_bounded(Query(relative_orderings(F(62, 100)), "s", "s'")).verdict
        == "is-big-o"
    )
    res = decide_bounded(Query(relative_orderings(F(61, 100)), "s", "s'"))
    assert res.verdict == "not-big-o"
    assert len(res.witness["increasing_run"]) >= 3


def test_decide_bounded_agrees_with_unary():
    rng = random.Random(349)
    agreements = 0
    for _ in range(30):
        wa = random_wa(rng, nstates=rng.randint(2, 4), alphabet=("a",), density=0.5)
        q = Query(wa, "q0", "q1")
        want = decide_unary(q).is_big_o
        got = decide_bounded(q)
        assert got.verdict in ("is-big-o", "not-big-o")
        assert (got.verdict == "is-big-o") == want
        agreements += 1
    assert agreements == 30


def test_decide_bounded_lc_failure():
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "t"],
        ["a"],
        [("p", "a", F(1), "t"), ("q", "a", F(1, 2), "q")],
        ["t"],
    )
    res = decide_bounded(Query(wa, "p", "q"))
    assert res.verdict == "not-big-o" and res.lc_counterexample == "a"


def test_decide_bounded_with_words():
    # both sides accept exactly (ab)^n a, with loop rates 3/4 versus 1/2
    trans = [
        ("p", "a", F(3, 4), "q"),
        ("q", "b", F(1), "p"),
        ("p", "a", F(1, 4), "t"),
        ("r", "a", F(1, 2), "r2"),
        ("r2", "b", F(1), "r"),
        ("r", "a", F(1, 2), "t"),
    ]
    wa = WeightedAutomaton.from_transitions(
        ["p", "q", "r", "r2", "t"], ["a", "b"], trans, ["t"]
    )
    for n in range(5):
        assert weight(wa, "p", "ab" * n + "a") == F(3, 4) ** n * F(1, 4)
        assert weight(wa, "r", "ab" * n + "a") == F(1, 2) ** n * F(1, 2)
    res = decide_bounded(Query(wa, "p", "r"), words=["ab", "a"])
    assert res.verdict == "not-big-o"
    res2 = decide_bounded(Query(wa, "r", "p"), words=["ab", "a"])
    assert res2.verdict == "is-big-o"


# ---------------------------------------------------------------------------
# finitely ambiguous


def test_finitely_ambiguous_identical_sides():
    d = DeltaTuple((F(1), F(2)), ((F(2), F(3)), (F(1, 2), F(1))), (F(1), F(2)), ((F(2), F(3)), (F(1, 2), F(1))))
    assert decide_finitely_ambiguous([d]).verdict == "is-big-o"


def test_finitely_ambiguous_single_growing():
    d = DeltaTuple((F(1),), ((F(2),),), (F(1),), ((F(1),),))
    res = decide_finitely_ambiguous([d])
    assert res.verdict == "not-big-o"
    assert res.witnesses


def test_finitely_ambiguous_rejects_nonpositive():
    with pytest.raises(InputError):
        DeltaTuple((F(0),), ((F(2),),), (F(1),), ((F(1),),))


def test_finitely_ambiguous_grid_confirmation():
    """Divergence verdicts replay on the natural-number grid."""
    tuples = [
        DeltaTuple((F(1),), ((F(3, 2), F(2)),), (F(1),), ((F(1), F(2)),)),
        DeltaTuple((F(2),), ((F(1, 2), F(3)),), (F(3),), ((F(1, 2), F(2)),)),
    ]
    for d in tuples:
        res = decide_finitely_ambiguous([d])
        assert res.verdict == "not-big-o"
        from ratiobound.bounded import _ratio_at

        best = F(0)
        grown = False
        for n1 in range(0, 61, 10):
            for n2 in range(0, 61, 10):
                r = _ratio_at(d, (n1, n2))
                if r > 1000:
                    grown = True
        assert grown


def test_finitely_ambiguous_formula_export():
    d = DeltaTuple((F(1),), ((F(2),),), (F(1),), ((F(1),),))
    (f,) = finitely_ambiguous_formula([d])
    assert "2" in f.text()
    smt = f.to_smt2()
    assert "(check-sat)" in smt and "expf" in smt


def test_realized_vectors_payload():
    from ratiobound import realized_vectors
    from ratiobound.bounded import DegreeSet

    pq, analysis = analysis_ab()
    pairs = realized_vectors(analysis)
    assert pairs
    for x, ds in pairs:
        assert isinstance(ds, DegreeSet)
        assert all(len(v.entries) == len(x.entries) for v in ds.vectors)
        # antichain: no vector dominates another
        for v in ds.vectors:
            for w in ds.vectors:
                if v is w:
                    continue
                le = all(
                    (a.cmp(b) <= 0) for a, b in zip(v.entries, w.entries)
                )
                assert not (le and v != w)


def test_decide_bounded_parallel_matches_sequential():
    q = Query(relative_orderings(F(61, 100)), "s", "s'")
    seq = decide_bounded(q)
    par = decide_bounded(q, parallel=3)
    assert seq.verdict == par.verdict == "not-big-o"
    assert seq.witness["provenance"] == par.witness["provenance"]
