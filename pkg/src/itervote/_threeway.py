"""Closed-form equilibrium winners for three- and four-way ties.

With three potential winners W, only agents whose *reported* top lies outside
W can keep all three alive: each of their moves bumps one W-member by a full
vote, and the winner cycles through W as they fire.  Everything else either
leaves the mover home or collapses the contest to two (or one) potential
winners, at which point the alternating two-way resolution applies.  Two
facts make the collapse computable without search:

* agents of a class (true order on W, reported top) are interchangeable, and
  every route to a given collapse consumes one outside supporter per
  W-member per cycle, so third-party pools at a collapse depend only on how
  many cycles ran, never on which agents moved;
* whether a class can fire at cycle k reduces to count inequalities, because
  consumption within a group of outside supporters is freely reorderable.

The walk therefore advances one forced phase state at a time, emitting every
reachable two-way collapse (resolved in place) and every reachable
equilibrium en route.  Anything outside the proven shape raises
:class:`FastpathInapplicable` and the caller falls back to pruned search.
"""

from __future__ import annotations

from .core import Profile, _potential_winners_of_counts, _winner_of_counts
from .dynamics import _best_target, _resolve_pair

_OUT = 0  # reported top outside W

_ALL_THREE = (1, 2, 3)


class FastpathInapplicable(Exception):
    """The profile falls outside what the analytic fast path covers."""


def equilibrium_winners_fast(profile: Profile, pw: list[int]) -> frozenset[int]:
    """Equilibrium winners for a truthful profile with |PW| in {3, 4}."""
    if len(pw) == 3:
        return _three_way_from_profile(profile, tuple(pw))
    if len(pw) == 4 and profile.m == 4:
        return _four_way_root(profile)
    raise FastpathInapplicable(f"unsupported tie size {len(pw)} at m={profile.m}")


def _three_way_from_profile(profile: Profile, w_set: tuple[int, int, int]) -> frozenset[int]:
    local = {a: i + 1 for i, a in enumerate(w_set)}
    static: dict[tuple[int, tuple[int, ...]], int] = {}
    fuel: dict[tuple[int, ...], int] = {}
    counts = [0, 0, 0]
    for ranking in profile.rankings:
        sigma = tuple(local[a] for a in ranking if a in local)
        top = ranking[0]
        if top in local:
            key = (local[top], sigma)
            static[key] = static.get(key, 0) + 1
            counts[local[top] - 1] += 1
        else:
            fuel[sigma] = fuel.get(sigma, 0) + 1
    winners = _walk_three_way(static, fuel, counts)
    return frozenset(w_set[w - 1] for w in winners)


def _walk_three_way(
    static: dict[tuple[int, tuple[int, ...]], int],
    fuel: dict[tuple[int, ...], int],
    scores: list[int],
) -> set[int]:
    """Run the phase walk over local alternatives 1..3; returns local winners.

    ``static`` maps (reported top, true order on W) to agent counts for
    agents reported inside W; ``fuel`` maps true orders to counts for agents
    reported outside W.  ``scores`` are the W-members' current plurality
    scores; index order is tie-break order.
    """
    group_total = [0, 0, 0]
    for sigma, cnt in fuel.items():
        group_total[sigma[0] - 1] += cnt

    def pair_pools(x: int, y: int, k: list[int]) -> tuple[int, int]:
        # Reported-third-party pools: fuel supporters of a pair member leave
        # the pool as they are consumed; everyone else keeps their side.
        pool_x = pool_y = 0
        for (rhat, sigma), cnt in static.items():
            if rhat == x or rhat == y:
                continue
            if sigma.index(x) < sigma.index(y):
                pool_x += cnt
            else:
                pool_y += cnt
        for sigma, cnt in fuel.items():
            g = sigma[0]
            if g == x or g == y:
                continue
            if sigma.index(x) < sigma.index(y):
                pool_x += cnt
            else:
                pool_y += cnt
        pool_x += group_total[x - 1] - k[x - 1]
        pool_y += group_total[y - 1] - k[y - 1]
        return pool_x, pool_y

    winners: set[int] = set()
    k = [0, 0, 0]
    scores = list(scores)

    for _ in range(sum(group_total) + len(fuel) + 4):
        if _potential_winners_of_counts(scores) != _ALL_THREE:
            raise FastpathInapplicable("walk state lost the three-way tie")
        winner = _winner_of_counts(scores)
        phase_target: int | None = None
        stepping_static = False
        ne_lower = [0, 0, 0]
        ne_upper = list(group_total)

        # Candidate movers: static classes, unconsumed fuel (reported out),
        # and consumed fuel (reported at its group's member).
        combos: list[tuple[str, int, tuple[int, ...], int]] = []
        for (rhat, sigma), cnt in static.items():
            combos.append(("static", rhat, sigma, cnt))
        for sigma, cnt in fuel.items():
            combos.append(("fuel", _OUT, sigma, cnt))
            combos.append(("moved", sigma[0], sigma, cnt))

        for kind, rhat, sigma, cnt in combos:
            if cnt <= 0:
                continue
            target = _best_target(sigma, rhat, scores, winner)
            if target is None:
                continue
            g = sigma[0] - 1
            child = list(scores)
            child[target - 1] += 1
            if rhat != _OUT:
                child[rhat - 1] -= 1
            pw = _potential_winners_of_counts(child)
            if len(pw) == 3:
                if kind != "fuel" or target != sigma[0]:
                    raise FastpathInapplicable("unexpected three-way continuation")
                if phase_target is not None and phase_target != target:
                    raise FastpathInapplicable("ambiguous phase successor")
                phase_target = target
                ne_lower[g] += cnt
                continue
            if kind == "static":
                stepping_static = True
                available = True
            elif kind == "fuel":
                ne_lower[g] += cnt
                available = k[g] < group_total[g]
            else:
                ne_upper[g] -= cnt
                available = k[g] >= 1
            if not available:
                continue
            if len(pw) == 1:
                winners.add(pw[0])
                continue
            x, y = pw
            if rhat == x or rhat == y:
                raise FastpathInapplicable("collapse triggered from inside the pair")
            pool_x, pool_y = pair_pools(x, y, k)
            if sigma.index(x) < sigma.index(y):
                pool_x -= 1
            else:
                pool_y -= 1
            winners.add(_resolve_pair(child[x - 1], child[y - 1], x, y, pool_x, pool_y))

        ne_reachable = not stepping_static and all(
            ne_lower[g] <= k[g] <= ne_upper[g] for g in range(3)
        )
        if ne_reachable:
            winners.add(winner)

        if phase_target is None:
            break
        g = phase_target - 1
        if k[g] >= group_total[g]:
            break
        k[g] += 1
        scores[phase_target - 1] += 1
    else:
        raise FastpathInapplicable("phase walk failed to terminate")

    return winners


def _four_way_root(profile: Profile) -> frozenset[int]:
    """Expand a four-way tie at m=4 one step; every child is a smaller tie."""
    classes: dict[tuple[int, ...], int] = {}
    for ranking in profile.rankings:
        classes[ranking] = classes.get(ranking, 0) + 1
    counts = [0, 0, 0, 0]
    for ranking, cnt in classes.items():
        counts[ranking[0] - 1] += cnt
    winner = _winner_of_counts(counts)

    winners: set[int] = set()
    moved = False
    for ranking, cnt in classes.items():
        target = _best_target(ranking, ranking[0], counts, winner)
        if target is None:
            continue
        moved = True
        child = list(counts)
        child[ranking[0] - 1] -= 1
        child[target - 1] += 1
        pw = _potential_winners_of_counts(child)
        if len(pw) == 4:
            raise FastpathInapplicable("four-way tie survived a move")
        if len(pw) == 1:
            winners.add(pw[0])
        elif len(pw) == 2:
            x, y = pw
            pool_x = pool_y = 0
            for other, ocnt in classes.items():
                if other[0] == x or other[0] == y:
                    continue
                if other.index(x) < other.index(y):
                    pool_x += ocnt
                else:
                    pool_y += ocnt
            if ranking[0] != x and ranking[0] != y:
                if ranking.index(x) < ranking.index(y):
                    pool_x -= 1
                else:
                    pool_y -= 1
            winners.add(_resolve_pair(child[x - 1], child[y - 1], x, y, pool_x, pool_y))
        else:
            winners |= _walk_sub(classes, ranking, target, child, pw)
    if not moved:
        winners.add(winner)
    return frozenset(winners)


def _walk_sub(
    classes: dict[tuple[int, ...], int],
    mover: tuple[int, ...],
    target: int,
    child_counts: list[int],
    w_set: tuple[int, ...],
) -> set[int]:
    local = {a: i + 1 for i, a in enumerate(w_set)}
    static: dict[tuple[int, tuple[int, ...]], int] = {}
    fuel: dict[tuple[int, ...], int] = {}

    def add(bucket_top: int, sigma: tuple[int, ...], amount: int) -> None:
        if bucket_top in local:
            key = (local[bucket_top], sigma)
            static[key] = static.get(key, 0) + amount
            if static[key] == 0:
                del static[key]
        else:
            fuel[sigma] = fuel.get(sigma, 0) + amount
            if fuel[sigma] == 0:
                del fuel[sigma]

    for ranking, cnt in classes.items():
        sigma = tuple(local[a] for a in ranking if a in local)
        add(ranking[0], sigma, cnt)
    mover_sigma = tuple(local[a] for a in mover if a in local)
    add(mover[0], mover_sigma, -1)
    add(target, mover_sigma, +1)

    scores = [child_counts[a - 1] for a in w_set]
    winners = _walk_three_way(static, fuel, scores)
    return {w_set[w - 1] for w in winners}
