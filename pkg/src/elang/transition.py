"""Successor-state computation for ground theories.

A step is taken from a source state by a set of simultaneous actions.  The
actions' effect statements whose conditions hold in the source state
produce a set of candidate direct effects (fluent literals).  A target
state ``t`` is a successor when some conflict-free subset ``applied`` of the
candidates admits an effect set ``e`` such that:

  a. ``e.changed`` is the least set containing ``applied`` and closed under
     the ramification statements: a statement with head ``h`` and body ``B``
     adds ``h`` whenever every literal of ``B`` holds in ``t`` and at least
     one literal of ``B`` is already in ``e.changed``.  The closure fails,
     ruling ``t`` out, if it ever contains both a literal and its
     complement.  Denials (``false`` heads) never fire.
  b. every literal in ``e.changed`` holds in ``t``;
  c. every fluent atom not mentioned in ``e.changed`` keeps its source
     value (persistence);
  d. ``t`` satisfies every ramification statement read as a state
     constraint, denials included;
  e. every candidate left out of ``applied`` has its complement in
     ``e.changed``: a produced direct effect may only be dropped when the
     changes propagated from the others override it.

Candidate subsets strictly smaller than the full set are kept even when
the full set itself succeeds; overridden effects and their ramifications
are a genuine source of branching, so both readings survive as distinct
successors.

``successor_states`` searches targets over the atoms reachable from
``applied`` through ramification heads (everything else is frozen by
persistence), with unit propagation over the state constraints and a
change-must-be-explainable prune.  ``brute_force_successors`` checks the
definition over all assignments and is the reference the search is tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grounding import GroundTheory, Lit, State
from .model import Atom


@dataclass(frozen=True)
class EffectSet:
    applied: frozenset[Lit]
    changed: frozenset[Lit]


@dataclass(frozen=True)
class Transition:
    source: State
    actions: frozenset[Atom]
    target: State
    effects: EffectSet


def direct_candidates(theory: GroundTheory, state: State, actions: frozenset[Atom]) -> frozenset[Lit]:
    """Direct effect literals produced by ``actions`` in ``state``."""
    out: set[Lit] = set()
    for action in actions:
        for ci in theory.cprops_by_action.get(action, ()):
            cp = theory.cprops[ci]
            if theory.satisfies(state, cp.condition):
                out.add(cp.fluent + 1 if cp.initiates else -(cp.fluent + 1))
    return frozenset(out)


def legal_occurrence(theory: GroundTheory, state: State, actions: frozenset[Atom]) -> bool:
    """True when every precondition of every occurring action holds."""
    for action in actions:
        for pi in theory.pprops_by_action.get(action, ()):
            pp = theory.pprops[pi]
            if pp.impossible or not theory.satisfies(state, pp.condition):
                return False
    return True


def ramification_closure(
    theory: GroundTheory, applied: frozenset[Lit], target: State
) -> EffectSet | None:
    """Least fixpoint of condition (a) against a fixed target, or None when
    the closure runs into a complementary pair."""
    if any(-c in applied for c in applied):
        return None
    changed: set[Lit] = set(applied)
    work = sorted(applied, key=lambda c: (abs(c), c))
    while work:
        lit = work.pop()
        for ri in theory.rprops_by_body_atom.get(abs(lit) - 1, ()):
            rp = theory.rprops[ri]
            if rp.head is None or rp.head in changed:
                continue
            if lit not in rp.condition:
                continue
            if not theory.satisfies(target, rp.condition):
                continue
            if -rp.head in changed:
                return None
            changed.add(rp.head)
            work.append(rp.head)
    return EffectSet(applied, frozenset(changed))


def _conflict_free_subsets(candidates: frozenset[Lit]):
    """All subsets without complementary pairs, in a fixed order."""
    ordered = sorted(candidates, key=lambda c: (abs(c), c))
    n = len(ordered)
    for mask in range(1 << n):
        subset = frozenset(ordered[j] for j in range(n) if mask >> j & 1)
        if any(-c in subset for c in subset):
            continue
        yield subset


def _verify_target(
    theory: GroundTheory,
    source: State,
    applied: frozenset[Lit],
    candidates: frozenset[Lit],
    target: State,
) -> EffectSet | None:
    effects = ramification_closure(theory, applied, target)
    if effects is None:
        return None
    if not all(theory.holds(target, l) for l in effects.changed):
        return None
    mentioned = {abs(l) - 1 for l in effects.changed}
    if any(a not in mentioned for a in source ^ target):
        return None
    if not theory.state_consistent(target):
        return None
    for c in candidates - applied:
        if -c not in effects.changed:
            return None
    return effects


def successor_states(
    theory: GroundTheory, source: State, actions: frozenset[Atom]
) -> list[Transition]:
    """All successors of ``source`` under the simultaneous ``actions``,
    deduplicated by target and sorted by target contents."""
    candidates = direct_candidates(theory, source, actions)
    actions = frozenset(actions)
    if not candidates:
        if not theory.state_consistent(source):
            return []
        effects = EffectSet(frozenset(), frozenset())
        return [Transition(source, actions, source, effects)]
    found: dict[State, Transition] = {}
    heads = {rp.head for rp in theory.rprops if rp.head is not None}
    for applied in _conflict_free_subsets(candidates):
        _search_targets(theory, source, actions, applied, candidates, heads, found)
    return [found[t] for t in sorted(found, key=lambda s: tuple(sorted(s)))]


def _search_targets(
    theory: GroundTheory,
    source: State,
    actions: frozenset[Atom],
    applied: frozenset[Lit],
    candidates: frozenset[Lit],
    heads: set[Lit],
    found: dict[State, Transition],
) -> None:
    # Atoms reachable from the applied effects through ramification heads;
    # persistence freezes everything else at its source value.
    reach: set[int] = {abs(c) - 1 for c in applied}
    work = list(reach)
    while work:
        a = work.pop()
        for ri in theory.rprops_by_body_atom.get(a, ()):
            rp = theory.rprops[ri]
            if rp.head is None:
                continue
            h = abs(rp.head) - 1
            if h not in reach:
                reach.add(h)
                work.append(h)

    # Constraint clauses folded against the frozen atoms.
    clauses: list[list[Lit]] = []
    for clause in theory.constraint_clauses:
        lits: list[Lit] = []
        satisfied = False
        for lit in clause:
            a = abs(lit) - 1
            if a in reach:
                lits.append(lit)
            elif (a in source) == (lit > 0):
                satisfied = True
                break
        if satisfied:
            continue
        if not lits:
            return  # violated by frozen values alone
        clauses.append(sorted(lits, key=lambda c: (abs(c), c)))

    order = sorted(reach)
    assign: dict[int, bool] = {}

    def explainable(atom: int, value: bool) -> bool:
        if (atom in source) == value:
            return True
        lit = atom + 1 if value else -(atom + 1)
        return lit in applied or lit in heads

    def set_value(atom: int, value: bool, trail: list[int]) -> bool:
        if atom in assign:
            return assign[atom] == value
        if not explainable(atom, value):
            return False
        assign[atom] = value
        trail.append(atom)
        return True

    def propagate(trail: list[int]) -> bool:
        progress = True
        while progress:
            progress = False
            for clause in clauses:
                unassigned: Lit | None = None
                open_count = 0
                satisfied = False
                for lit in clause:
                    a = abs(lit) - 1
                    val = assign.get(a)
                    if val is None:
                        unassigned = lit
                        open_count += 1
                    elif val == (lit > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if open_count == 0:
                    return False
                if open_count == 1:
                    assert unassigned is not None
                    if not set_value(abs(unassigned) - 1, unassigned > 0, trail):
                        return False
                    progress = True
        return True

    def leaf() -> None:
        target = frozenset(a for a in reach if assign[a]) | (source - reach)
        effects = _verify_target(theory, source, applied, candidates, target)
        if effects is not None and target not in found:
            found[target] = Transition(source, actions, target, effects)

    def dfs() -> None:
        trail: list[int] = []
        if propagate(trail):
            nxt = next((a for a in order if a not in assign), None)
            if nxt is None:
                leaf()
            else:
                keep = nxt in source
                for value in (keep, not keep):
                    sub: list[int] = []
                    if set_value(nxt, value, sub):
                        dfs()
                    for a in reversed(sub):
                        del assign[a]
        for a in reversed(trail):
            del assign[a]

    seed: list[int] = []
    for c in sorted(applied, key=lambda x: (abs(x), x)):
        if not set_value(abs(c) - 1, c > 0, seed):
            return
    dfs()


def brute_force_successors(
    theory: GroundTheory, source: State, actions: frozenset[Atom], bound: int = 16
) -> list[Transition]:
    """Reference implementation: test every assignment against the
    successor conditions.  Exponential; refuses theories over ``bound``."""
    n = theory.n_fluents
    if n > bound:
        raise ValueError("brute force limited to %d fluent atoms, theory has %d" % (bound, n))
    candidates = direct_candidates(theory, source, actions)
    actions = frozenset(actions)
    found: dict[State, Transition] = {}
    for applied in _conflict_free_subsets(candidates):
        for bits in range(1 << n):
            target = frozenset(i for i in range(n) if bits >> i & 1)
            effects = _verify_target(theory, source, applied, candidates, target)
            if effects is not None and target not in found:
                found[target] = Transition(source, actions, target, effects)
    return [found[t] for t in sorted(found, key=lambda s: tuple(sorted(s)))]
