"""Model enumeration and entailment over ground theories.

A model is a trajectory: one state per time point from 0 to the horizon,
each consecutive pair linked by a successor transition under the actions
scheduled at that step.  Occurrences are trusted: a trajectory whose state
violates a precondition of a scheduled action is discarded.  Observations
prune: a stated value a trajectory disagrees with discards it, so adding
observations can retract earlier conclusions.

Answers are three-valued.  ``domain-inconsistent`` means no model exists
at all; otherwise ``credulous`` asks whether the goals hold together in
some model and ``skeptical`` whether they hold in every model.  Both are
computed by forcing goal literals (or their complements) as virtual
observations and searching for one model, so the enumeration never runs
longer than it has to.

Enumeration order is fixed: initial states complete unobserved fluents in
declaration order trying false first, and successor lists are sorted, so
witnesses, countermodels and budget exhaustion are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grounding import GroundingStats, GroundTheory, Lit, State, _build_indexes, ground
from .grounding import GroundCProp, GroundPProp, GroundRProp
from .model import Atom, DomainDescription, FluentLiteral
from .transition import legal_occurrence, successor_states

MODES = ("credulous", "skeptical")


@dataclass(frozen=True)
class Query:
    mode: str
    goals: frozenset[tuple[FluentLiteral, int]]
    horizon: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("query mode must be credulous or skeptical, got %r" % self.mode)

    def goal_strings(self) -> tuple[str, ...]:
        return tuple("%s holds-at %d" % (lit, t) for lit, t in sorted(self.goals))


@dataclass
class SearchStats:
    models: int = 0
    nodes: int = 0
    transitions: int = 0
    cache_hits: int = 0
    atoms_total: int = 0
    atoms_sliced: int | None = None

    def as_dict(self) -> dict:
        out = {
            "models": self.models,
            "nodes": self.nodes,
            "transitions": self.transitions,
            "cache_hits": self.cache_hits,
            "atoms_total": self.atoms_total,
        }
        if self.atoms_sliced is not None:
            out["atoms_sliced"] = self.atoms_sliced
        return out


class BudgetExceeded(Exception):
    def __init__(self, budget: int, stats: SearchStats):
        super().__init__("search budget of %d nodes exceeded" % budget)
        self.budget = budget
        self.stats = stats


@dataclass(frozen=True)
class Trajectory:
    states: tuple[State, ...]
    actions: tuple[frozenset[Atom], ...]


@dataclass
class EntailmentResult:
    answer: str  # "true" | "false" | "domain-inconsistent"
    mode: str
    goals: tuple[str, ...]
    horizon: int
    backend: str
    witness: dict | None  # rendered trajectory, see render_trajectory
    stats: object  # backend-specific counters exposing as_dict()

    def to_record(self) -> dict:
        return {
            "answer": self.answer,
            "mode": self.mode,
            "goals": list(self.goals),
            "horizon": self.horizon,
            "backend": self.backend,
            "witness": self.witness,
            "stats": self.stats.as_dict(),
        }


def render_trajectory(theory: GroundTheory, traj: Trajectory) -> dict:
    return {
        "states": [sorted(str(theory.fluents[i]) for i in st) for st in traj.states],
        "actions": [sorted(str(a) for a in acts) for acts in traj.actions],
    }


class Evaluator:
    """Shared search context: one successor cache and one node budget for
    all the probes a single answer needs."""

    def __init__(self, theory: GroundTheory, budget: int | None = None):
        self.theory = theory
        self.budget = budget
        self.stats = SearchStats(atoms_total=theory.n_fluents)
        self._succ: dict[tuple[State, frozenset[Atom]], tuple[State, ...]] = {}

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.budget is not None and self.stats.nodes > self.budget:
            raise BudgetExceeded(self.budget, self.stats)

    def successors(self, state: State, actions: frozenset[Atom]) -> tuple[State, ...]:
        key = (state, actions)
        cached = self._succ.get(key)
        if cached is not None:
            self.stats.cache_hits += 1
            return cached
        self.stats.transitions += 1
        result = tuple(tr.target for tr in successor_states(self.theory, state, actions))
        self._succ[key] = result
        return result

    def _initial_states(self, forced: frozenset[Lit]):
        theory = self.theory
        n = theory.n_fluents
        clauses = [sorted(cl, key=lambda c: (abs(c), c)) for cl in theory.constraint_clauses]
        assign: dict[int, bool] = {}

        def set_value(atom: int, value: bool, trail: list[int]) -> bool:
            if atom in assign:
                return assign[atom] == value
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
                        val = assign.get(abs(lit) - 1)
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

        def rec():
            trail: list[int] = []
            if propagate(trail):
                nxt = next((a for a in range(n) if a not in assign), None)
                if nxt is None:
                    self._tick()
                    state = frozenset(a for a in range(n) if assign[a])
                    if theory.state_consistent(state):
                        yield state
                else:
                    for value in (False, True):
                        assign[nxt] = value
                        yield from rec()
                        del assign[nxt]
            for a in reversed(trail):
                del assign[a]

        seed: list[int] = []
        for lit in sorted(forced, key=lambda c: (abs(c), c)):
            if not set_value(abs(lit) - 1, lit > 0, seed):
                return
        yield from rec()

    def models(self, extra: dict[int, frozenset[Lit]] | None = None):
        """Generate every model compatible with the observations plus the
        ``extra`` forced literals, in a fixed order."""
        theory = self.theory
        forced: dict[int, set[Lit]] = {}
        for t, obs in theory.observations.items():
            forced.setdefault(t, set()).update(obs)
        if extra:
            for t, lits in extra.items():
                if not 0 <= t <= theory.horizon:
                    raise ValueError("forced literal at time %d outside 0..%d" % (t, theory.horizon))
                forced.setdefault(t, set()).update(lits)
        frozen = {t: frozenset(lits) for t, lits in forced.items()}
        for lits in frozen.values():
            if any(-l in lits for l in lits):
                return

        def extend(states: tuple[State, ...], acts: tuple[frozenset[Atom], ...], t: int):
            if t == theory.horizon:
                self.stats.models += 1
                yield Trajectory(states, acts)
                return
            state = states[-1]
            actions = theory.occurrences.get(t, frozenset())
            if actions and not legal_occurrence(theory, state, actions):
                return
            self._tick()
            want = frozen.get(t + 1)
            for target in self.successors(state, actions):
                if want is None or all(theory.holds(target, l) for l in want):
                    yield from extend(states + (target,), acts + (actions,), t + 1)

        for s0 in self._initial_states(frozen.get(0, frozenset())):
            yield from extend((s0,), (), 0)

    def first_model(self, extra: dict[int, frozenset[Lit]] | None = None) -> Trajectory | None:
        return next(self.models(extra), None)


def required_horizon(domain: DomainDescription, query: Query) -> int:
    """The horizon a query runs at: explicit if given, otherwise one past
    the largest time point the domain or the goals mention."""
    goal_max = max((t for _, t in query.goals), default=0)
    if query.horizon is not None:
        if query.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if goal_max > query.horizon:
            raise ValueError("goal at time %d lies beyond horizon %d" % (goal_max, query.horizon))
        return query.horizon
    return max(domain.max_time(), goal_max) + 1


def count_models(theory: GroundTheory, budget: int | None = None) -> int:
    ev = Evaluator(theory, budget)
    return sum(1 for _ in ev.models())


def check_consistency(theory: GroundTheory, budget: int | None = None) -> tuple[bool, SearchStats]:
    """Whether at least one model exists."""
    ev = Evaluator(theory, budget)
    return ev.first_model() is not None, ev.stats


def split_goals(theory: GroundTheory, query: Query) -> tuple[list[tuple[Lit, int]], bool]:
    """Validate goals against a theory.  Returns the state-dependent goals
    as timed literal codes (sorted, deduplicated) and whether every goal on
    a constant fluent holds."""
    dynamic_goals: list[tuple[Lit, int]] = []
    constants_ok = True
    for lit, t in sorted(query.goals):
        if not 0 <= t <= theory.horizon:
            raise ValueError("goal at time %d outside 0..%d" % (t, theory.horizon))
        if lit.atom in theory.index:
            dynamic_goals.append((theory.code(lit), t))
        elif lit.atom in theory.constant_values:
            constants_ok &= theory.constant_values[lit.atom] == lit.positive
        else:
            raise ValueError("query mentions %s, not a fluent atom of this domain" % lit.atom)
    return sorted(set(dynamic_goals), key=lambda g: (g[1], abs(g[0]), g[0])), constants_ok


def answer_theory(
    theory: GroundTheory,
    query: Query,
    *,
    budget: int | None = None,
    use_slice: bool = False,
) -> EntailmentResult:
    """Answer a query against an already ground theory."""
    atoms_total = theory.n_fluents
    dynamic_goals, constants_ok = split_goals(theory, query)

    atoms_sliced = None
    if use_slice and dynamic_goals:
        sliced, remap = slice_for_goals(theory, {abs(c) - 1 for c, _ in dynamic_goals})
        dynamic_goals = [
            ((remap[abs(c) - 1] + 1) * (1 if c > 0 else -1), t) for c, t in dynamic_goals
        ]
        theory = sliced
        atoms_sliced = theory.n_fluents

    ev = Evaluator(theory, budget)
    ev.stats.atoms_total = atoms_total
    ev.stats.atoms_sliced = atoms_sliced

    def result(answer: str, witness: Trajectory | None) -> EntailmentResult:
        rendered = None if witness is None else render_trajectory(theory, witness)
        return EntailmentResult(
            answer=answer,
            mode=query.mode,
            goals=query.goal_strings(),
            horizon=theory.horizon,
            backend="engine",
            witness=rendered,
            stats=ev.stats,
        )

    probe = ev.first_model()
    if probe is None:
        return result("domain-inconsistent", None)
    if not constants_ok:
        return result("false", None)
    if query.mode == "credulous":
        extra: dict[int, set[Lit]] = {}
        for code, t in dynamic_goals:
            extra.setdefault(t, set()).add(code)
        witness = ev.first_model({t: frozenset(l) for t, l in extra.items()}) if dynamic_goals else probe
        if witness is not None:
            return result("true", witness)
        return result("false", None)
    for code, t in dynamic_goals:
        counter = ev.first_model({t: frozenset([-code])})
        if counter is not None:
            return result("false", counter)
    return result("true", None)


def answer(
    domain: DomainDescription,
    query: Query,
    *,
    budget: int | None = None,
    use_slice: bool = False,
) -> EntailmentResult:
    """Ground a domain at the horizon the query needs and answer it."""
    theory = ground(domain, required_horizon(domain, query))
    return answer_theory(theory, query, budget=budget, use_slice=use_slice)


# ---------------------------------------------------------------------------
# Relevance slicing


def slice_for_goals(
    theory: GroundTheory, goal_atoms: set[int]
) -> tuple[GroundTheory, dict[int, int]]:
    """Restrict a theory to the fluent atoms connected to the goals.

    Two atoms are connected when some effect or ramification statement
    mentions both (head and body included), so the kept atoms never share a
    statement with a dropped one and the transition relation factorizes.
    Preconditions are filtered to the kept atoms, and observations on
    dropped atoms are removed.  Answers over the slice match the full
    theory whenever the full theory is consistent; an inconsistency caused
    purely by dropped atoms is invisible to the slice.
    """
    edges: list[set[int]] = []
    for cp in theory.cprops:
        edges.append({cp.fluent} | {abs(c) - 1 for c in cp.condition})
    for rp in theory.rprops:
        atoms = {abs(c) - 1 for c in rp.condition}
        if rp.head is not None:
            atoms.add(abs(rp.head) - 1)
        edges.append(atoms)
    keep = set(goal_atoms)
    grew = True
    while grew:
        grew = False
        for edge in edges:
            if edge & keep and not edge <= keep:
                keep |= edge
                grew = True
    kept = sorted(keep)
    remap = {old: new for new, old in enumerate(kept)}

    def rlit(code: Lit) -> Lit:
        return (remap[abs(code) - 1] + 1) * (1 if code > 0 else -1)

    cprops = [
        GroundCProp(cp.action, cp.initiates, remap[cp.fluent], frozenset(map(rlit, cp.condition)), cp.src)
        for cp in theory.cprops
        if cp.fluent in keep
    ]
    rprops = []
    for rp in theory.rprops:
        atoms = {abs(c) - 1 for c in rp.condition}
        if rp.head is not None:
            atoms.add(abs(rp.head) - 1)
        if not atoms and rp.head is None:
            rprops.append(rp)  # groundless denial: the theory is never consistent
        elif atoms and atoms <= keep:
            head = None if rp.head is None else rlit(rp.head)
            rprops.append(GroundRProp(head, frozenset(map(rlit, rp.condition)), rp.src))
    pprops = []
    for pp in theory.pprops:
        filtered = frozenset(rlit(c) for c in pp.condition if abs(c) - 1 in keep)
        if filtered or pp.impossible:
            pprops.append(GroundPProp(pp.action, filtered, pp.src, pp.impossible))
    observations = {}
    for t, obs in theory.observations.items():
        inside = frozenset(rlit(c) for c in obs if abs(c) - 1 in keep)
        if inside:
            observations[t] = inside
    stats = GroundingStats(
        fluent_atoms=len(kept),
        constant_atoms=len(theory.constant_values),
        cprops=len(cprops),
        rprops=sum(1 for r in rprops if r.head is not None),
        denials=sum(1 for r in rprops if r.head is None),
        pprops=len(pprops),
        occurrences=sum(len(v) for v in theory.occurrences.values()),
        observations=sum(len(v) for v in observations.values()),
        horizon=theory.horizon,
    )
    sliced = GroundTheory(
        fluents=tuple(theory.fluents[i] for i in kept),
        index={theory.fluents[i]: remap[i] for i in kept},
        constant_values=dict(theory.constant_values),
        cprops=cprops,
        rprops=rprops,
        pprops=pprops,
        occurrences=dict(theory.occurrences),
        observations=observations,
        horizon=theory.horizon,
        stats=stats,
    )
    _build_indexes(sliced)
    return sliced, remap
