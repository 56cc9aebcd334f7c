"""Independent brute-force oracles for the engines' laws.

Everything here is written with plain Python loops and scalars, on
purpose: these transcriptions share no code with the engines they check.
"""

from __future__ import annotations

from itertools import product


def primitive_effectiveness_table(rel, assignment, force):
    n, m = len(force), len(assignment)
    return [[force[x][a] * rel[x][assignment[a]] for a in range(m)] for x in range(n)]


def primitive_win_probs(rel, assignment, force, a):
    psi = primitive_effectiveness_table(rel, assignment, force)
    total = sum(psi[y][a] for y in range(len(force)))
    if total > 0:
        return [psi[x][a] / total for x in range(len(force))]
    return [1.0 if x == assignment[a] else 0.0 for x in range(len(force))]


def primitive_power_after(rel, assignment, power, force, winners):
    """Scalar transcription of the primitive power law with its fallbacks."""
    n, m = len(power), len(assignment)
    psi = primitive_effectiveness_table(rel, assignment, force)
    out = list(power)
    for a in range(m):
        if n == 1:
            continue
        w = winners[a]
        payment = force[w][a]
        out[w] -= payment
        rest = sum(psi[y][a] for y in range(n) if y != w)
        for x in range(n):
            if x == w:
                continue
            if rest > 0:
                out[x] += payment * psi[x][a] / rest
            else:
                out[x] += payment / (n - 1)
    return out


def primitive_expected_power(rel, assignment, power, force):
    """Exact expectation of the post-step power table over all winner
    combinations (per-good lotteries are independent)."""
    n, m = len(power), len(assignment)
    dists = [primitive_win_probs(rel, assignment, force, a) for a in range(m)]
    expected = [0.0] * n
    combos = []
    for winners in product(range(n), repeat=m):
        prob = 1.0
        for a in range(m):
            prob *= dists[a][winners[a]]
        if prob == 0.0:
            continue
        after = primitive_power_after(rel, assignment, power, force, winners)
        combos.append((winners, prob, after))
        for x in range(n):
            expected[x] += prob * after[x]
    return expected, combos


def good_effectiveness_table(rel, assignment, force):
    n, m = len(force), len(assignment)
    return [
        [[force[x][a][y] * rel[x][assignment[a]] * rel[assignment[a]][y] for y in range(n)] for a in range(m)]
        for x in range(n)
    ]


def good_win_probs(rel, assignment, force, a):
    psi = good_effectiveness_table(rel, assignment, force)
    n = len(force)
    mass = [sum(psi[x][a][w] for x in range(n)) for w in range(n)]
    total = sum(mass)
    return [mass[w] / total for w in range(n)]


def good_power_after(power, force):
    n = len(power)
    m = len(power[0])
    return [
        [[power[x][a][y] + (force[y][a][x] - force[x][a][y]) for y in range(n)] for a in range(m)]
        for x in range(n)
    ]
