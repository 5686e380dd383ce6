"""Brute-force references and exact identity checks.

Everything here exists to validate a faster path somewhere else: full
profile enumeration cross-checks the equilibrium engines against each other,
the exact expected-loss average anchors the Monte Carlo estimator, and the
binomial identities are verified in exact integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

from .core import Profile, UtilityVector, plurality_scores, plurality_winner, potential_winners
from .dynamics import equilibrium_winners, equilibrium_winners_exhaustive
from .welfare import social_welfare

DEFAULT_ENUMERATION_CAP = 10_000_000


class EnumerationCapExceeded(ValueError):
    """The requested enumeration would exceed the configured profile cap."""


@dataclass
class EnumerationReport:
    """Exact expected adversarial loss plus fast-vs-exhaustive cross-check."""

    total_profiles: int
    exact_eadpoa: Fraction
    per_class_means: dict[int, Optional[Fraction]]
    per_class_probabilities: dict[int, Fraction]
    mismatch_list: list[tuple[Profile, frozenset[int], frozenset[int]]] = field(
        default_factory=list
    )


def enumerate_all_profiles(
    m: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[Profile]:
    """Yield every profile of n rankings over m alternatives, in lex order."""
    total = math.factorial(m) ** n
    if total > cap:
        raise EnumerationCapExceeded(
            f"{total} profiles exceed the cap of {cap}; raise the cap to force this"
        )
    perms = list(itertools.permutations(range(1, m + 1)))
    for combo in itertools.product(perms, repeat=n):
        yield Profile(combo)


def exact_eadpoa(
    m: int,
    n: int,
    u: UtilityVector,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> EnumerationReport:
    """Exact expected adversarial loss as a uniform average over all profiles.

    Every profile's loss is computed from the exhaustive equilibrium engine;
    the fast dispatcher runs alongside and any disagreement on the winner set
    is recorded in ``mismatch_list`` (which must stay empty).
    """
    totals: dict[int, int] = {1: 0, 2: 0, 3: 0, 4: 0}
    sums: dict[int, Fraction] = {1: Fraction(0), 2: Fraction(0), 3: Fraction(0), 4: Fraction(0)}
    mismatches: list[tuple[Profile, frozenset[int], frozenset[int]]] = []
    count = 0
    grand = Fraction(0)
    for profile in enumerate_all_profiles(m, n, cap):
        count += 1
        pw = potential_winners(profile)
        bucket = min(len(pw), 4)
        exact = equilibrium_winners_exhaustive(profile)
        fast = equilibrium_winners(profile)
        if fast.winners != exact.winners:
            mismatches.append((profile, fast.winners, exact.winners))
        r = plurality_winner(plurality_scores(profile))
        loss = Fraction(social_welfare(profile, u, r)) - min(
            Fraction(social_welfare(profile, u, a)) for a in exact.winners
        )
        totals[bucket] += 1
        sums[bucket] += loss
        grand += loss
    per_class_means = {
        alpha: (sums[alpha] / totals[alpha] if totals[alpha] else None)
        for alpha in (1, 2, 3, 4)
    }
    per_class_probabilities = {
        alpha: Fraction(totals[alpha], count) for alpha in (1, 2, 3, 4)
    }
    return EnumerationReport(
        total_profiles=count,
        exact_eadpoa=grand / count,
        per_class_means=per_class_means,
        per_class_probabilities=per_class_probabilities,
        mismatch_list=mismatches,
    )


class IdentityCheck(NamedTuple):
    ok: bool
    first_violation: Optional[tuple[int, int]]


def check_binomial_tail_identity(n_max: int) -> IdentityCheck:
    """Verify sum_{k=p}^{n} C(n,k)(n-2k) == -p*C(n,p) for all 0 <= p <= n <= n_max.

    Exact integer arithmetic throughout; returns the first violating (n, p)
    if any exists.
    """
    for n in range(n_max + 1):
        tail = 0  # sum over k in [p, n], built from p = n downward
        for p in range(n, -1, -1):
            tail += math.comb(n, p) * (n - 2 * p)
            if tail != -p * math.comb(n, p):
                return IdentityCheck(False, (n, p))
    return IdentityCheck(True, None)


def check_stirling_ratio(u_max: int) -> list[tuple[int, float]]:
    """Ratios (v+1)*C(u, v+1) / (sqrt(u)*2^u) with v = floor(u/2), u in [4, u_max].

    The numerator is exact; only the final ratio is floating point.  The
    sequence should stay within a fixed band and settle toward a constant
    near 0.4 (the central-binomial growth rate), which the verification
    suite checks and reports.
    """
    if u_max < 4:
        raise ValueError("u_max must be at least 4")
    out = []
    for u in range(4, u_max + 1):
        v = u // 2
        numerator = (v + 1) * math.comb(u, v + 1)
        ratio = float(Fraction(numerator, 2**u)) / math.sqrt(u)
        out.append((u, ratio))
    return out


def stirling_ratio_report(u_max: int, lo: float = 0.1, hi: float = 1.0) -> dict:
    """Band and convergence summary for :func:`check_stirling_ratio`."""
    ratios = check_stirling_ratio(u_max)
    values = [r for _, r in ratios]
    diffs = [abs(values[i + 1] - values[i]) for i in range(len(values) - 1)]
    in_band = all(lo <= r <= hi for r in values)
    shrinking = all(diffs[i + 1] <= diffs[i] + 1e-12 for i in range(len(diffs) - 1))
    return {
        "ratios": ratios,
        "in_band": in_band,
        "band": (lo, hi),
        "diffs_shrinking": shrinking,
        "limit_estimate": values[-1],
    }
