"""Rank-based social welfare and adversarial welfare loss.

The adversarial loss of a truthful profile is the welfare of the truthful
plurality winner minus the worst welfare among the equilibrium winners: the
damage (or, when negative, the benefit) a scheduler can inflict by steering
best-response dynamics.  :func:`build_adversarial_tie_profile` constructs a
family of profiles whose loss grows linearly in the number of agents, built
around a deliberate two-way tie that pairwise majority resolves against the
truthful winner.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Profile,
    UtilityVector,
    ValidationError,
    pairwise_count,
    plurality_scores,
    plurality_winner,
    potential_winners,
)
from .dynamics import DEFAULT_MAX_STATES, equilibrium_winners, two_way_tiebreak


@dataclass(frozen=True)
class LossReport:
    truthful_winner: int
    equilibrium_winners: frozenset[int]
    truthful_sw: object
    worst_equilibrium_sw: object
    loss: object


def social_welfare(profile: Profile, u: UtilityVector, alternative: int):
    """Total utility accrued if ``alternative`` wins, over true rankings.

    Exact (int/Fraction) whenever the utility values are exact.
    """
    if u.m != profile.m:
        raise ValidationError("utility vector length must match m")
    return sum(u.at_rank(r.index(alternative) + 1) for r in profile.rankings)


def adversarial_loss(
    profile: Profile, u: UtilityVector, max_states: int = DEFAULT_MAX_STATES
) -> LossReport:
    """Welfare gap between the truthful winner and the worst equilibrium winner."""
    r = plurality_winner(plurality_scores(profile))
    ew = equilibrium_winners(profile, max_states).winners
    truthful_sw = social_welfare(profile, u, r)
    worst = min(social_welfare(profile, u, a) for a in ew)
    return LossReport(
        truthful_winner=r,
        equilibrium_winners=ew,
        truthful_sw=truthful_sw,
        worst_equilibrium_sw=worst,
        loss=truthful_sw - worst,
    )


def loss_lower_bound(m: int, n: int, u: UtilityVector) -> Fraction:
    """The guaranteed loss ``(u_2 - u_m) * (n/m - 2)`` of the construction."""
    gap = Fraction(u.values[1]) - Fraction(u.values[-1])
    return gap * (Fraction(n, m) - 2)


def construction_window(m: int, n: int) -> tuple[int, int]:
    """Validate (m, n) for the adversarial construction; returns (alpha, beta).

    Requirements: m >= 3, n even, alpha = (n + m - 2) / m a positive integer,
    and beta = (alpha - 1) * (m - 2) even with beta / 2 >= 1.
    """
    if m < 3:
        raise ValidationError("construction needs m >= 3")
    if n % 2 != 0:
        raise ValidationError(f"construction needs an even number of agents, got n={n}")
    if (n + m - 2) % m != 0:
        raise ValidationError(
            f"construction needs (n + m - 2) divisible by m; n={n}, m={m} fails"
        )
    alpha = (n + m - 2) // m
    if alpha < 1:
        raise ValidationError("construction needs alpha >= 1")
    beta = (alpha - 1) * (m - 2)
    if beta % 2 != 0:
        raise ValidationError(
            f"construction needs beta = (alpha-1)(m-2) even; alpha={alpha}, m={m} gives beta={beta}"
        )
    if beta // 2 < 1:
        raise ValidationError(
            f"construction needs beta/2 >= 1; alpha={alpha}, m={m} gives beta={beta}"
        )
    return alpha, beta


def _utility_flat_spot(u: UtilityVector) -> int:
    """Position k in [2, m-1] minimizing u_k - u_{k+1}, smallest on ties."""
    vals = u.values
    best_k, best_gap = 2, vals[1] - vals[2]
    for k in range(3, u.m):
        gap = vals[k - 1] - vals[k]
        if gap < best_gap:
            best_k, best_gap = k, gap
    return best_k


def _fill_ranking(m: int, fixed: dict[int, int]) -> tuple[int, ...]:
    """Complete a ranking whose positions ``fixed`` (1-based) are pinned,
    placing the unused alternatives in index order."""
    used = set(fixed.values())
    rest = iter(a for a in range(1, m + 1) if a not in used)
    return tuple(fixed[pos] if pos in fixed else next(rest) for pos in range(1, m + 1))


def build_adversarial_tie_profile(m: int, n: int, u: UtilityVector) -> Profile:
    """Profile with a two-way tie whose adversarial loss is linear in n.

    Alternatives 1 and 2 tie at the top score while every other alternative
    sits one vote behind; pairwise majority favors 2, so the dynamics settle
    on 2 even though 1 is the truthful winner.  Four voter groups realize
    this: alpha voters with 1 first and 2 last, alpha with 2 first and 1
    second, beta/2 - 1 with 1 second and 2 last, and beta/2 + 1 with 2 and 1
    in adjacent positions k, k+1 where the utility vector is flattest.  Tops
    of the last two groups are spread round-robin over 3..m.  The advertised
    properties are asserted before returning.
    """
    if u.m != m:
        raise ValidationError("utility vector length must match m")
    alpha, beta = construction_window(m, n)
    k = _utility_flat_spot(u)

    rankings: list[tuple[int, ...]] = []
    rankings += [_fill_ranking(m, {1: 1, m: 2})] * alpha
    rankings += [_fill_ranking(m, {1: 2, 2: 1})] * alpha
    minor_tops = [3 + i % (m - 2) for i in range(beta)]
    for c in minor_tops[: beta // 2 - 1]:
        rankings.append(_fill_ranking(m, {1: c, 2: 1, m: 2}))
    for c in minor_tops[beta // 2 - 1 :]:
        rankings.append(_fill_ranking(m, {1: c, k: 2, k + 1: 1}))
    profile = Profile(tuple(rankings))

    scores = plurality_scores(profile)
    assert scores[1] == alpha and scores[2] == alpha
    assert all(scores[c] == alpha - 1 for c in range(3, m + 1))
    assert potential_winners(profile) == {1, 2}
    assert pairwise_count(profile, 2, 1) == alpha + beta // 2 + 1
    assert pairwise_count(profile, 1, 2) == alpha + beta // 2 - 1
    assert two_way_tiebreak(profile) == 2
    report = adversarial_loss(profile, u)
    assert Fraction(report.loss) >= loss_lower_bound(m, n, u)
    return profile


def max_adversarial_loss_exhaustive(
    m: int, n: int, u: UtilityVector, cap: int = 10_000_000
) -> tuple[object, Profile]:
    """True worst-case loss over every profile of the given size (tiny m, n).

    Lets the linear lower bound of the construction be compared against the
    exact optimum at desk scale.
    """
    from .oracle import enumerate_all_profiles

    best_loss = None
    best_profile = None
    for profile in enumerate_all_profiles(m, n, cap):
        loss = adversarial_loss(profile, u).loss
        if best_loss is None or loss > best_loss:
            best_loss, best_profile = loss, profile
    assert best_profile is not None
    return best_loss, best_profile
