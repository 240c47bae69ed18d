"""Canonical example automata used across the test suite and docs."""

from __future__ import annotations

from fractions import Fraction

from .automata import WeightedAutomaton


def unbounded_ratio() -> WeightedAutomaton:
    """Two states with equal languages {a^n : n >= 1} whose weight ratio
    grows like (3/2)^n: geometric decay at 3/4 against decay at 1/2."""
    F = Fraction
    return WeightedAutomaton.from_transitions(
        ["s", "s'", "t"],
        ["a"],
        [
            ("s", "a", F(3, 4), "s"),
            ("s", "a", F(1, 4), "t"),
            ("s'", "a", F(1, 2), "s'"),
            ("s'", "a", F(1, 2), "t"),
        ],
        ["t"],
    )


def different_rates() -> WeightedAutomaton:
    """Period-2 chains where one side decays like (1/2)^n * n at every length
    but the other falls to (1/4)^n on odd lengths, so the ratio diverges
    exactly along the odd progression."""
    F = Fraction
    half, quarter, one = F(1, 2), F(1, 4), F(1)
    trans = [
        # reference side: two period-2 loops at rate 1/2, exits at both parities
        ("s", "a", one, "u1"),
        ("u1", "a", half, "u2"),
        ("u2", "a", half, "u1"),
        ("u1", "a", one, "v1"),
        ("u2", "a", one, "v1"),
        ("v1", "a", half, "v2"),
        ("v2", "a", half, "v1"),
        ("v1", "a", one, "t"),
        ("v2", "a", one, "t"),
        # compared side: the 1/2-rate route only covers even lengths
        ("s'", "a", one, "w0"),
        ("w0", "a", one, "w1"),
        ("w1", "a", half, "w2"),
        ("w2", "a", half, "w1"),
        ("w1", "a", one, "x1"),
        ("x1", "a", half, "x2"),
        ("x2", "a", half, "x1"),
        ("x1", "a", one, "t"),
        # low-rate route covering every length n >= 3
        ("s'", "a", one, "y0"),
        ("y0", "a", one, "y"),
        ("y", "a", quarter, "y"),
        ("y", "a", one, "t"),
    ]
    states = ["s", "u1", "u2", "v1", "v2", "s'", "w0", "w1", "w2", "x1", "x2", "y0", "y", "t"]
    return WeightedAutomaton.from_transitions(states, ["a"], trans, ["t"])


def relative_orderings(p: Fraction) -> WeightedAutomaton:
    """Two-letter chain where both sides share the spectral-radius ordering
    yet the answer flips with p: the compared side mixes rates (p, 0.39)
    and (0.59, 0.41) against (0.6, 0.4)."""
    F = Fraction
    p = Fraction(p)
    if not (0 < p < 1):
        raise ValueError("p must be a probability")
    trans = [
        ("s", "a", F(1), "qa"),
        ("qa", "a", F(3, 5), "qa"),
        ("qa", "a", F(2, 5), "qb"),
        ("qb", "b", F(2, 5), "qb"),
        ("qb", "b", F(3, 5), "t"),
        ("s'", "a", F(1, 2), "u1"),
        ("u1", "a", F(59, 100), "u1"),
        ("u1", "a", F(41, 100), "v1"),
        ("v1", "b", F(41, 100), "v1"),
        ("v1", "b", F(59, 100), "t"),
        ("s'", "a", F(1, 2), "u2"),
        ("u2", "a", p, "u2"),
        ("u2", "a", 1 - p, "v2"),
        ("v2", "b", F(39, 100), "v2"),
        ("v2", "b", F(61, 100), "t"),
    ]
    states = ["s", "qa", "qb", "s'", "u1", "v1", "u2", "v2", "t"]
    return WeightedAutomaton.from_transitions(states, ["a", "b"], trans, ["t"])
