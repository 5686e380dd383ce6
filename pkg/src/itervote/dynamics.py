"""Best-response dynamics for iterative plurality voting.

Starting from a truthful profile, a scheduler repeatedly picks one agent who
changes their reported top so that a strictly better (by their true ranking)
alternative becomes the plurality winner.  Every such step installs the
mover's new top as the winner, so a reported profile is fully described by
the vector of reported tops; lower positions of reports never matter under
plurality.

The equilibrium-winner set collects the winners of all Nash equilibria
reachable under some scheduler.  Three engines compute it:

* :func:`equilibrium_winners_exhaustive` explores every schedule over raw
  top-vectors (exact sequence counts and depths; small instances only).
* a pruned explorer that collapses agents into (true ranking, reported top)
  classes and resolves any state with a two-way potential-winner set by the
  pairwise-majority rule instead of recursing.
* an analytic fast path (:mod:`itervote._threeway`) for three- and four-way
  ties from a truthful start, used by :func:`equilibrium_winners`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import (
    Profile,
    ValidationError,
    _potential_winners_of_counts,
    _winner_of_counts,
    pairwise_count,
    plurality_scores,
    potential_winners,
)

DEFAULT_MAX_STATES = 5_000_000


class ExplorationBudgetExceeded(RuntimeError):
    """Raised when an exploration visits more states than its budget allows."""

    def __init__(self, budget: int):
        super().__init__(f"state budget of {budget} exceeded")
        self.budget = budget


@dataclass(frozen=True)
class DynamicsState:
    """A truthful profile plus the current vector of reported tops."""

    truthful: Profile
    tops: tuple[int, ...]

    def __post_init__(self) -> None:
        m = self.truthful.m
        if len(self.tops) != self.truthful.n:
            raise ValidationError("tops vector must have one entry per agent")
        if any(not 1 <= t <= m for t in self.tops):
            raise ValidationError("reported tops must be alternatives in 1..m")

    @classmethod
    def initial(cls, profile: Profile) -> "DynamicsState":
        return cls(profile, profile.tops())

    def scores(self) -> tuple[int, ...]:
        counts = [0] * self.truthful.m
        for t in self.tops:
            counts[t - 1] += 1
        return tuple(counts)

    def winner(self) -> int:
        return _winner_of_counts(self.scores())


@dataclass(frozen=True)
class BRStep:
    """A single best-response step: ``agent`` re-tops to ``new_top``, which wins."""

    agent: int
    new_top: int
    new_winner: int


@dataclass(frozen=True)
class EquilibriumResult:
    """Equilibrium winners plus exploration metadata.

    ``sequence_count`` is the number of distinct maximal best-response
    sequences and ``max_depth`` the longest one; both are ``None`` when the
    computation took a shortcut that does not enumerate sequences.
    """

    winners: frozenset[int]
    sequence_count: Optional[int] = None
    max_depth: Optional[int] = None


def _best_target(
    ranking: tuple[int, ...], top: int, counts: list[int], winner: int
) -> Optional[int]:
    """Best alternative this voter could make win, or None if no improvement.

    ``ranking`` is the voter's true ranking, ``top`` their current reported
    top, ``counts`` the current reported plurality scores.  Voters whose
    reported top already wins never move.
    """
    if top == winner:
        return None
    m = len(counts)
    best: Optional[int] = None
    best_pos = ranking.index(winner)  # only targets beating the winner matter
    for a in range(1, m + 1):
        if a == top:
            continue
        pos = ranking.index(a)
        if pos >= best_pos:
            continue
        sa = counts[a - 1] + 1
        wins = True
        for x in range(1, m + 1):
            if x == a:
                continue
            sx = counts[x - 1] - (1 if x == top else 0)
            if sx > sa or (sx == sa and x < a):
                wins = False
                break
        if wins:
            best = a
            best_pos = pos
    return best


def best_response_steps(state: DynamicsState) -> list[BRStep]:
    """All available best-response steps, one per agent that can improve.

    The scheduler's freedom is which of these to apply; an empty list means
    the state is a Nash equilibrium.
    """
    counts = list(state.scores())
    winner = _winner_of_counts(counts)
    steps = []
    for j, ranking in enumerate(state.truthful.rankings):
        target = _best_target(ranking, state.tops[j], counts, winner)
        if target is not None:
            steps.append(BRStep(agent=j, new_top=target, new_winner=target))
    return steps


def apply_step(state: DynamicsState, step: BRStep) -> DynamicsState:
    """Apply a step after re-validating it against the current state."""
    counts = list(state.scores())
    winner = _winner_of_counts(counts)
    target = _best_target(
        state.truthful.rankings[step.agent], state.tops[step.agent], counts, winner
    )
    if target != step.new_top or step.new_winner != step.new_top:
        raise ValidationError(f"step {step} is not a valid best response here")
    tops = list(state.tops)
    tops[step.agent] = step.new_top
    new_state = DynamicsState(state.truthful, tuple(tops))
    assert new_state.winner() == step.new_winner
    return new_state


def equilibrium_winners_exhaustive(
    profile: Profile, max_states: int = DEFAULT_MAX_STATES
) -> EquilibriumResult:
    """Exact equilibrium winners by exploring every best-response schedule.

    Depth-first search over reachable top-vectors, memoized per vector.
    Intended for small instances; raises :class:`ExplorationBudgetExceeded`
    beyond ``max_states`` distinct states.  Every explored sequence is
    checked against the n*m convergence bound and the shrinking
    potential-winner invariant.
    """
    n, m = profile.n, profile.m
    rankings = profile.rankings
    depth_bound = n * m
    memo: dict[tuple[int, ...], tuple[frozenset[int], int, int]] = {}

    def explore(tops: tuple[int, ...]) -> tuple[frozenset[int], int, int]:
        hit = memo.get(tops)
        if hit is not None:
            return hit
        if len(memo) >= max_states:
            raise ExplorationBudgetExceeded(max_states)
        memo[tops] = (frozenset(), 0, 0)  # reserve; cycles are impossible
        counts = [0] * m
        for t in tops:
            counts[t - 1] += 1
        winner = _winner_of_counts(counts)
        pw = _potential_winners_of_counts(counts)
        winners: set[int] = set()
        seqs = 0
        longest = 0
        moved = False
        for j in range(n):
            target = _best_target(rankings[j], tops[j], counts, winner)
            if target is None:
                continue
            moved = True
            child = tops[:j] + (target,) + tops[j + 1 :]
            child_counts = counts.copy()
            child_counts[tops[j] - 1] -= 1
            child_counts[target - 1] += 1
            child_pw = _potential_winners_of_counts(child_counts)
            assert set(child_pw) <= set(pw), "potential winners must shrink"
            sub_winners, sub_seqs, sub_longest = explore(child)
            winners |= sub_winners
            seqs += sub_seqs
            longest = max(longest, 1 + sub_longest)
        if not moved:
            result = (frozenset({winner}), 1, 0)
        else:
            result = (frozenset(winners), seqs, longest)
        memo[tops] = result
        return result

    winners, seqs, longest = explore(profile.tops())
    if longest > depth_bound:
        raise AssertionError(
            f"sequence of length {longest} exceeds the {depth_bound} bound"
        )
    assert winners <= potential_winners(profile)
    return EquilibriumResult(winners, seqs, longest)


def two_way_tiebreak(profile: Profile) -> int:
    """Resolve a two-way potential-winner tie by pairwise majority.

    With potential winners {a, b} and a earlier in tie-breaking order, the
    unique equilibrium winner is a when at least as many agents truly prefer
    a to b; otherwise b.
    """
    pw = sorted(potential_winners(profile))
    if len(pw) != 2:
        raise ValidationError(
            f"two-way resolution needs exactly 2 potential winners, found {len(pw)}"
        )
    a, b = pw
    return a if pairwise_count(profile, a, b) >= pairwise_count(profile, b, a) else b


def _resolve_pair(counts_a: int, counts_b: int, a: int, b: int, pool_a: int, pool_b: int) -> int:
    """Terminal winner of a two-way contest between a < b.

    ``pool_a``/``pool_b`` count agents whose reported top is outside the pair
    split by their true a-vs-b preference.  The contest alternates: whichever
    side trails recruits one supporter per round until a pool runs dry.
    """
    if counts_a == counts_b:
        return a if pool_a >= pool_b else b
    if counts_a == counts_b - 1:
        return a if pool_a > pool_b else b
    raise AssertionError("pair scores inconsistent with a two-way tie")


def _two_way_root_result(profile: Profile, a: int, b: int) -> EquilibriumResult:
    """Winner plus exact sequence count/length for a two-way truthful start."""
    counts = plurality_scores(profile).counts
    pool_a = pool_b = 0
    for ranking in profile.rankings:
        if ranking[0] in (a, b):
            continue
        if ranking.index(a) < ranking.index(b):
            pool_a += 1
        else:
            pool_b += 1
    sa, sb = counts[a - 1], counts[b - 1]
    winner = _resolve_pair(sa, sb, a, b, pool_a, pool_b)
    # Maximal sequences strictly alternate sides, so their count is a product
    # of falling factorials and their length is fixed by the pool sizes.
    if sa == sb:
        if pool_a >= pool_b:
            count = math.factorial(pool_b) * math.perm(pool_a, pool_b)
            depth = 2 * pool_b
        else:
            count = math.factorial(pool_a) * math.perm(pool_b, pool_a + 1)
            depth = 2 * pool_a + 1
    else:
        if pool_a > pool_b:
            count = math.factorial(pool_b) * math.perm(pool_a, pool_b + 1)
            depth = 2 * pool_b + 1
        else:
            count = math.factorial(pool_a) * math.perm(pool_b, pool_a)
            depth = 2 * pool_a
    return EquilibriumResult(frozenset({winner}), count, depth)


class _ClassState:
    """Reported state grouped by (true ranking, reported top) classes."""

    __slots__ = ("counts", "scores")

    def __init__(self, counts: dict[tuple[int, int], int], scores: tuple[int, ...]):
        self.counts = counts
        self.scores = scores

    def key(self) -> tuple:
        return tuple(sorted(self.counts.items()))


def _explore_pruned(
    profile: Profile, max_states: int = DEFAULT_MAX_STATES
) -> tuple[frozenset[int], int, int]:
    """Equilibrium winners via class-grouped search with two-way pruning.

    States are multisets of (true ranking, reported top) pairs; agents of the
    same class are interchangeable, which collapses the raw top-vector space.
    Any state whose potential-winner set has two members is resolved by
    :func:`_resolve_pair` on its reported third-party pools instead of being
    expanded.  Returns (winners, longest explored path, states visited).
    """
    m = profile.m
    uniq: dict[tuple[int, ...], int] = {}
    for ranking in profile.rankings:
        uniq.setdefault(ranking, len(uniq))
    rankings = [r for r, _ in sorted(uniq.items(), key=lambda kv: kv[1])]
    root_counts: dict[tuple[int, int], int] = {}
    for ranking in profile.rankings:
        key = (uniq[ranking], ranking[0])
        root_counts[key] = root_counts.get(key, 0) + 1
    root_scores = plurality_scores(profile).counts

    memo: dict[tuple, tuple[frozenset[int], int]] = {}
    visited = 0

    def pair_pools(counts: dict[tuple[int, int], int], a: int, b: int) -> tuple[int, int]:
        pool_a = pool_b = 0
        for (rid, top), cnt in counts.items():
            if top == a or top == b:
                continue
            if rankings[rid].index(a) < rankings[rid].index(b):
                pool_a += cnt
            else:
                pool_b += cnt
        return pool_a, pool_b

    def explore(state: _ClassState) -> tuple[frozenset[int], int]:
        nonlocal visited
        key = state.key()
        hit = memo.get(key)
        if hit is not None:
            return hit
        visited += 1
        if visited > max_states:
            raise ExplorationBudgetExceeded(max_states)
        scores = state.scores
        winner = _winner_of_counts(scores)
        pw = _potential_winners_of_counts(scores)
        if len(pw) == 1:
            result = (frozenset({winner}), 0)
            memo[key] = result
            return result
        if len(pw) == 2:
            a, b = pw
            pool_a, pool_b = pair_pools(state.counts, a, b)
            result = (
                frozenset({_resolve_pair(scores[a - 1], scores[b - 1], a, b, pool_a, pool_b)}),
                0,
            )
            memo[key] = result
            return result
        winners: set[int] = set()
        longest = 0
        moved = False
        counts_list = list(scores)
        for (rid, top), cnt in list(state.counts.items()):
            if cnt <= 0:
                continue
            target = _best_target(rankings[rid], top, counts_list, winner)
            if target is None:
                continue
            moved = True
            child_counts = dict(state.counts)
            child_counts[(rid, top)] = cnt - 1
            if child_counts[(rid, top)] == 0:
                del child_counts[(rid, top)]
            child_counts[(rid, target)] = child_counts.get((rid, target), 0) + 1
            child_scores = list(scores)
            child_scores[top - 1] -= 1
            child_scores[target - 1] += 1
            sub_winners, sub_longest = explore(
                _ClassState(child_counts, tuple(child_scores))
            )
            winners |= sub_winners
            longest = max(longest, 1 + sub_longest)
        if not moved:
            result = (frozenset({winner}), 0)
        else:
            result = (frozenset(winners), longest)
        memo[key] = result
        return result

    winners, longest = explore(_ClassState(root_counts, root_scores))
    bound = profile.n * m
    if longest > bound:
        raise AssertionError(f"explored a sequence longer than the {bound} bound")
    return winners, longest, visited


def equilibrium_winners_pruned(
    profile: Profile, max_states: int = DEFAULT_MAX_STATES
) -> EquilibriumResult:
    """Pruned exploration entry point (no sequence counting)."""
    winners, longest, _ = _explore_pruned(profile, max_states)
    return EquilibriumResult(winners, None, longest)


def equilibrium_winners(
    profile: Profile, max_states: int = DEFAULT_MAX_STATES
) -> EquilibriumResult:
    """Equilibrium winners of a truthful profile, via the cheapest exact route.

    One potential winner: the profile is already an equilibrium.  Two: the
    pairwise-majority resolution applies directly.  Three or more: an
    analytic phase walk handles three-way ties (any m) and four-way ties at
    m = 4; anything else falls back to the pruned exploration, subject to
    ``max_states``.  Matches :func:`equilibrium_winners_exhaustive` wherever
    both can run.
    """
    pw = sorted(potential_winners(profile))
    if len(pw) == 1:
        return EquilibriumResult(frozenset(pw), 1, 0)
    if len(pw) == 2:
        result = _two_way_root_result(profile, pw[0], pw[1])
    else:
        from . import _threeway

        try:
            winners = _threeway.equilibrium_winners_fast(profile, pw)
            result = EquilibriumResult(winners, None, None)
        except _threeway.FastpathInapplicable:
            result = equilibrium_winners_pruned(profile, max_states)
    assert result.winners <= frozenset(pw)
    return result
