"""Exhaustive reference solvers for cross-checking the optimizers.

Everything here is deliberately primitive: subsets are enumerated one bit
flip at a time (a Gray-code walk, so coverage vectors update incrementally),
and manipulation questions are answered by trying every subset of actionable
voters.  None of the solver machinery is imported — these answers come from
a different code path on purpose.

The enumeration cost is exponential, so every entry point takes a cap and
raises :class:`CapExceeded` instead of silently grinding.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OracleBudget:
    """Caps for the exhaustive search (2**max_items subsets get visited)."""

    max_items: int = 20

    def check(self, n_items):
        if n_items > self.max_items:
            raise CapExceeded(
                "exhaustive search over %d items exceeds the cap of %d"
                % (n_items, self.max_items)
            )


class CapExceeded(Exception):
    """The requested exhaustive search is larger than the budget allows."""


@dataclass(frozen=True)
class OracleAnswer:
    feasible: bool
    best_cost: int | None = None
    witness: tuple = ()


def _gray_subsets(n):
    """Yield (subset_as_set, flipped_index, now_in) over a Gray-code walk.

    The first yield is the empty set with no flip (index None).  The set
    object is reused between yields; callers must not hold on to it.
    """
    current = set()
    yield current, None, False
    for step in range(1, 1 << n):
        bit = (step & -step).bit_length() - 1
        if bit in current:
            current.discard(bit)
            yield current, bit, False
        else:
            current.add(bit)
            yield current, bit, True


def brute_cover(instance, caps: OracleBudget | None = None) -> OracleAnswer:
    """Cheapest sub-family meeting every coverage requirement, by enumeration.

    Ties are broken toward the lexicographically smallest sorted index tuple,
    so the answer is deterministic.
    """
    caps = caps or OracleBudget()
    n = instance.n_sets
    caps.check(n)
    need = list(instance.requirements)
    coverage = [0] * instance.m
    cost = 0
    best = None
    for subset, flipped, now_in in _gray_subsets(n):
        if flipped is not None:
            sign = 1 if now_in else -1
            cost += sign * instance.weights[flipped]
            for elem, mult in instance.sets[flipped]:
                coverage[elem] += sign * mult
        if cost > instance.budget:
            continue
        if any(c < r for c, r in zip(coverage, need)):
            continue
        key = (cost, tuple(sorted(subset)))
        if best is None or key < best:
            best = key
    if best is None:
        return OracleAnswer(False)
    return OracleAnswer(True, best[0], best[1])


# ---------------------------------------------------------------------------
# election manipulation by enumeration
# ---------------------------------------------------------------------------


def _approval_scores(ballots, candidates, weights):
    scores = {c: 0 for c in candidates}
    for approved, w in zip(ballots, weights):
        for c in approved:
            scores[c] += w
    return scores


def _wins(scores, p, unique_winner):
    mine = scores.get(p, 0)
    rivals = [s for c, s in scores.items() if c != p]
    if not rivals:
        return True
    top = max(rivals)
    return mine > top if unique_winner else mine >= top


def brute_manipulate(problem, election, preferred, caps=None, unique_winner=False):
    """Answer a manipulation question by trying every subset of voters.

    ``problem`` selects the action:

    * ``"ccdv"``    — delete approval voters, each with a price.
    * ``"ccav"``    — add approval voters from the spare pool, each priced.
    * ``"bribery"`` — rewrite an approval ballot, each voter priced.
    * any of those with voter weights — prices must then be one each.
    * ``"scoring-ccdv"`` — delete ordinal voters under a scoring rule.

    Returns the cheapest feasible action set (deterministic tie-break), or
    ``feasible=False``.
    """
    caps = caps or OracleBudget()
    if problem == "ccdv":
        return _brute_ccdv(election, preferred, caps, unique_winner)
    if problem == "ccav":
        return _brute_ccav(election, preferred, caps, unique_winner)
    if problem == "bribery":
        return _brute_bribery(election, preferred, caps, unique_winner)
    if problem == "scoring-ccdv":
        return _brute_scoring_ccdv(election, preferred, caps, unique_winner)
    raise ValueError("unknown manipulation problem %r" % (problem,))


def _brute_ccdv(election, p, caps, unique_winner):
    voters = election.voters
    n = len(voters)
    caps.check(n)
    best = None
    for subset, _, _ in _gray_subsets(n):
        cost = sum(voters[i].price for i in subset)
        if cost > election.budget:
            continue
        kept = [voters[i] for i in range(n) if i not in subset]
        scores = _approval_scores(
            [v.approved for v in kept],
            election.candidates,
            [v.weight for v in kept],
        )
        if _wins(scores, p, unique_winner):
            key = (cost, tuple(sorted(subset)))
            if best is None or key < best:
                best = key
    if best is None:
        return OracleAnswer(False)
    return OracleAnswer(True, best[0], best[1])


def _brute_ccav(election, p, caps, unique_winner):
    pool = election.pool
    n = len(pool)
    caps.check(n)
    base = _approval_scores(
        [v.approved for v in election.voters],
        election.candidates,
        [v.weight for v in election.voters],
    )
    best = None
    for subset, _, _ in _gray_subsets(n):
        cost = sum(pool[i].price for i in subset)
        if cost > election.budget:
            continue
        scores = dict(base)
        for i in subset:
            for c in pool[i].approved:
                scores[c] += pool[i].weight
        if _wins(scores, p, unique_winner):
            key = (cost, tuple(sorted(subset)))
            if best is None or key < best:
                best = key
    if best is None:
        return OracleAnswer(False)
    return OracleAnswer(True, best[0], best[1])


def _brute_bribery(election, p, caps, unique_winner):
    """Bribed voters end up approving exactly {p}.

    Any feasible bribery can be rewritten (at equal cost, never hurting p)
    so each bribed ballot becomes {p}: p gains at least as much and every
    rival keeps at most its score.  Enumerating that restricted space is
    therefore exact for the yes/no question and for the minimum cost.
    """
    voters = election.voters
    n = len(voters)
    caps.check(n)
    best = None
    for subset, _, _ in _gray_subsets(n):
        cost = sum(voters[i].price for i in subset)
        if cost > election.budget:
            continue
        ballots = [
            frozenset({p}) if i in subset else voters[i].approved
            for i in range(n)
        ]
        scores = _approval_scores(
            ballots, election.candidates, [v.weight for v in voters]
        )
        if _wins(scores, p, unique_winner):
            key = (cost, tuple(sorted(subset)))
            if best is None or key < best:
                best = key
    if best is None:
        return OracleAnswer(False)
    return OracleAnswer(True, best[0], best[1])


def _brute_scoring_ccdv(election, p, caps, unique_winner):
    voters = election.voters
    n = len(voters)
    caps.check(n)
    alpha = election.scoring_vector
    best = None
    for subset, _, _ in _gray_subsets(n):
        cost = sum(voters[i].price for i in subset)
        if cost > election.budget:
            continue
        scores = {c: 0 for c in election.candidates}
        for i in range(n):
            if i in subset:
                continue
            for pos, c in enumerate(voters[i].ranking):
                scores[c] += alpha[pos]
        if _wins(scores, p, unique_winner):
            key = (cost, tuple(sorted(subset)))
            if best is None or key < best:
                best = key
    if best is None:
        return OracleAnswer(False)
    return OracleAnswer(True, best[0], best[1])


# ---------------------------------------------------------------------------
# hard-instance generators
# ---------------------------------------------------------------------------


def subset_sums(numbers):
    """All achievable subset sums (labels the generated instances)."""
    sums = {0}
    for k in numbers:
        sums |= {s + k for s in sums}
    return sums


def gen_partition_wmm(numbers):
    """A one-element weighted multiset multicover encoding of PARTITION.

    One set per number k: it covers the single element k times and weighs k.
    Requiring half the total (rounded up) within a budget of half the total
    (rounded down) is feasible exactly when the numbers split evenly.
    """
    numbers = [int(k) for k in numbers]
    if any(k <= 0 for k in numbers):
        raise ValueError("numbers must be positive")
    total = sum(numbers)
    from .covering import CoverInstance

    return CoverInstance(
        m=1,
        sets=[{0: k} for k in numbers],
        weights=list(numbers),
        requirements=[(total + 1) // 2],
        budget=total // 2,
    )


def gen_subsetsum_mmc(numbers, target):
    """A two-element multiset multicover encoding of SUBSET-SUM.

    Set i covers element 0 exactly k_i times and element 1 (big - k_i)
    times, with big larger than the target; n filler sets cover element 1
    big times each.  Under a budget of n unit-weight sets, meeting the
    requirements (target, n*big - target) forces exactly n sets whose
    element-0 coverage is the target on the nose, so the instance is
    feasible exactly when some subset of the numbers sums to the target.
    """
    numbers = [int(k) for k in numbers]
    target = int(target)
    if any(k <= 0 for k in numbers):
        raise ValueError("numbers must be positive")
    if target <= 0:
        raise ValueError("target must be positive")
    n = len(numbers)
    big = max(max(numbers), target) + 1
    from .covering import CoverInstance

    sets = [{0: k, 1: big - k} for k in numbers]
    sets += [{1: big} for _ in range(n)]
    return CoverInstance(
        m=2,
        sets=sets,
        requirements=[target, n * big - target],
        budget=n,
    )


def gen_hard_instances(kind, count, rng):
    """Labelled covering instances built from NP-hard number problems.

    Returns ``count`` pairs ``(instance, feasible)`` where the label comes
    from an elementary subset-sum enumeration, not from any solver.  ``rng``
    is a :class:`random.Random`; ``kind`` is ``"partition-wmm"`` or
    ``"subsetsum-mmc"``.
    """
    out = []
    for _ in range(count):
        n = rng.randint(3, 7)
        numbers = [rng.randint(1, 12) for _ in range(n)]
        achievable = subset_sums(numbers)
        if kind == "partition-wmm":
            total = sum(numbers)
            label = total % 2 == 0 and total // 2 in achievable
            out.append((gen_partition_wmm(numbers), label))
        elif kind == "subsetsum-mmc":
            if rng.random() < 0.5:
                target = rng.choice(sorted(s for s in achievable if s > 0))
            else:
                target = rng.randint(1, sum(numbers))
            label = target in achievable
            out.append((gen_subsetsum_mmc(numbers, target), label))
        else:
            raise ValueError("unknown instance kind %r" % (kind,))
    return out
