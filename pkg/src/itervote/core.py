"""Domain types and plurality primitives.

Alternatives are 1-based integers ``1..m`` and the integer order doubles as
the tie-breaking order: whenever two alternatives are tied, the one with the
smaller index is favored.  Agents are 0-based positions in a profile.

A :class:`Profile` is an ordered sequence of strict rankings, one per agent;
agent identity matters because the best-response dynamics in
:mod:`itervote.dynamics` distinguishes which agent moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant."""


@dataclass(frozen=True)
class Profile:
    """An ordered tuple of strict rankings over alternatives ``1..m``.

    ``rankings[j]`` lists agent ``j``'s alternatives from most to least
    preferred.  Every ranking must be a permutation of ``1..m``.
    """

    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rankings:
            raise ValidationError("profile needs at least one agent")
        m = len(self.rankings[0])
        if m < 1:
            raise ValidationError("rankings must be nonempty")
        expected = frozenset(range(1, m + 1))
        for j, ranking in enumerate(self.rankings):
            if len(ranking) != m or frozenset(ranking) != expected:
                raise ValidationError(
                    f"agent {j}: ranking {ranking!r} is not a permutation of 1..{m}"
                )

    @classmethod
    def from_rankings(cls, rankings: Iterable[Sequence[int]]) -> "Profile":
        return cls(tuple(tuple(r) for r in rankings))

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings[0])

    def top(self, agent: int) -> int:
        return self.rankings[agent][0]

    def tops(self) -> tuple[int, ...]:
        return tuple(r[0] for r in self.rankings)

    def rank_of(self, agent: int, alternative: int) -> int:
        """1-based position of ``alternative`` in ``agent``'s ranking."""
        return self.rankings[agent].index(alternative) + 1


@dataclass(frozen=True)
class ScoreTable:
    """Plurality scores, stored densely: ``counts[a - 1]`` is the score of ``a``."""

    counts: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.counts)

    def __getitem__(self, alternative: int) -> int:
        return self.counts[alternative - 1]

    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class UtilityVector:
    """Rank-indexed utilities ``u[0] >= u[1] >= ... >= u[m-1] >= 0``.

    An agent receives ``values[i - 1]`` when their ``i``-th ranked
    alternative wins.  Values may be ints, Fractions, or floats; integer and
    Fraction inputs keep all downstream welfare arithmetic exact.
    """

    values: tuple

    def __post_init__(self) -> None:
        vals = self.values
        if len(vals) < 2:
            raise ValidationError("utility vector needs at least two entries")
        if any(v < 0 for v in vals):
            raise ValidationError("utilities must be nonnegative")
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise ValidationError("utilities must be nonincreasing")
        if not vals[0] > vals[-1]:
            raise ValidationError("utility vector must satisfy u_1 > u_m")

    @classmethod
    def from_values(cls, values: Iterable) -> "UtilityVector":
        return cls(tuple(values))

    @classmethod
    def borda(cls, m: int) -> "UtilityVector":
        return cls(tuple(range(m - 1, -1, -1)))

    @classmethod
    def plurality(cls, m: int) -> "UtilityVector":
        return cls((1,) + (0,) * (m - 1))

    @property
    def m(self) -> int:
        return len(self.values)

    def at_rank(self, rank: int):
        """Utility of the ``rank``-th ranked alternative (1-based)."""
        return self.values[rank - 1]


def plurality_scores(profile: Profile) -> ScoreTable:
    """Count how many agents rank each alternative first."""
    counts = [0] * profile.m
    for ranking in profile.rankings:
        counts[ranking[0] - 1] += 1
    return ScoreTable(tuple(counts))


def plurality_winner(scores: ScoreTable) -> int:
    """Smallest-index alternative among those with maximal plurality score."""
    counts = scores.counts
    return counts.index(max(counts)) + 1


def _winner_of_counts(counts: Sequence[int]) -> int:
    return counts.index(max(counts)) + 1


def _potential_winners_of_counts(counts: Sequence[int]) -> tuple[int, ...]:
    # Winner, plus everyone a single extra vote would promote past it:
    # alternatives ordered before the winner need score s(r) - 1, those
    # ordered after need score s(r).
    r = counts.index(max(counts)) + 1
    top = counts[r - 1]
    pw = []
    for a in range(1, len(counts) + 1):
        s = counts[a - 1]
        if a == r or (a < r and s == top - 1) or (a > r and s == top):
            pw.append(a)
    return tuple(pw)


def potential_winners(profile: Profile) -> frozenset[int]:
    """Alternatives that would win if their plurality score rose by one."""
    return frozenset(_potential_winners_of_counts(plurality_scores(profile).counts))


def pairwise_count(profile: Profile, a: int, b: int) -> int:
    """Number of agents that rank ``a`` above ``b``."""
    if a == b:
        raise ValidationError("pairwise count needs two distinct alternatives")
    count = 0
    for ranking in profile.rankings:
        if ranking.index(a) < ranking.index(b):
            count += 1
    return count


def parse_profile_text(text: str) -> Profile:
    """Parse the one-ranking-per-line profile format.

    Each non-comment line holds ``m`` whitespace-separated 1-based integers
    forming a permutation; lines starting with ``#`` are comments.  Errors
    carry the offending 1-based line number.
    """
    rankings: list[tuple[int, ...]] = []
    m: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            entries = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise ValidationError(f"line {lineno}: non-integer token in {line!r}")
        if m is None:
            m = len(entries)
        elif len(entries) != m:
            raise ValidationError(
                f"line {lineno}: expected {m} entries, found {len(entries)}"
            )
        if frozenset(entries) != frozenset(range(1, m + 1)):
            raise ValidationError(
                f"line {lineno}: {line!r} is not a permutation of 1..{m}"
            )
        rankings.append(entries)
    if not rankings:
        raise ValidationError("no rankings found")
    return Profile(tuple(rankings))


def format_profile_text(profile: Profile) -> str:
    """Serialize a profile to the text format; round-trips with the parser."""
    return "\n".join(" ".join(str(a) for a in r) for r in profile.rankings) + "\n"
