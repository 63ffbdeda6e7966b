"""Propositional backend: clausal compilation plus a small DPLL solver.

The compilation is sound on a restricted fragment where every step is
forced, so a clausal model is exactly a trajectory.  ``check_fragment``
tests the two conditions that guarantee this:

  1. No two effect instances that can apply together (same action, or
     actions scheduled at the same time) may produce changes that clash,
     directly or through ramifications.  "May produce" is closed
     transitively: an effect literal may cause every ramification head
     reachable from it through rule bodies, ignoring the rest of the body.
     A clash is a complementary pair across (or within) these closures.
  2. The ramification dependency graph on fluent atoms (body atom to head
     atom) is acyclic, so derived change has a well-founded definition and
     the triggering conditions below pin every auxiliary variable down.

Within the fragment, candidate effects never conflict, so the engine
applies all of them and the override branching never arises; the encoding
can then define, per step:

  fire(c,t)   <-> the effect instance's condition holds at t
  trig(r,t)   <-> some body literal of the rule was caused at t
  ramify(r,t) <-> the rule's body holds at t+1 and trig(r,t)
  cause(l,t)  <-> some fire or ramify producing l holds

with effect clauses making produced literals hold at t+1, explanation
frame clauses allowing a value to change only when caused, the rules as
state constraints at every time, and observations and preconditions of
scheduled actions as unit clauses.

The solver is a watched-literal DPLL with chronological backtracking,
deterministic (lowest variable first, false first) and budgeted by
decision count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grounding import GroundTheory, Lit, State
from .model import Atom
from .query import (
    BudgetExceeded,
    EntailmentResult,
    Query,
    Trajectory,
    render_trajectory,
    split_goals,
)


@dataclass(frozen=True)
class FragmentViolation:
    kind: str  # "effect-conflict" | "ramification-cycle"
    detail: str

    def __str__(self) -> str:
        return "%s: %s" % (self.kind, self.detail)


@dataclass
class FragmentReport:
    accepted: bool
    violations: list[FragmentViolation]


class FragmentError(Exception):
    def __init__(self, report: FragmentReport):
        lines = "; ".join(str(v) for v in report.violations[:5])
        super().__init__("theory outside the clausal fragment: %s" % lines)
        self.report = report


def _may_cause(theory: GroundTheory, lit: Lit, cache: dict[Lit, frozenset[Lit]]) -> frozenset[Lit]:
    hit = cache.get(lit)
    if hit is not None:
        return hit
    out: set[Lit] = {lit}
    work = [lit]
    while work:
        l = work.pop()
        for ri in theory.rprops_by_body_atom.get(abs(l) - 1, ()):
            rp = theory.rprops[ri]
            if rp.head is None or l not in rp.condition:
                continue
            if rp.head not in out:
                out.add(rp.head)
                work.append(rp.head)
    result = frozenset(out)
    cache[lit] = result
    return result


def check_fragment(theory: GroundTheory) -> FragmentReport:
    """Decide whether the clausal compilation is sound for this theory."""
    violations: list[FragmentViolation] = []

    # Cycles in the ramification dependency graph.
    graph: dict[int, set[int]] = {}
    for rp in theory.rprops:
        if rp.head is None:
            continue
        h = abs(rp.head) - 1
        for c in rp.condition:
            graph.setdefault(abs(c) - 1, set()).add(h)
    color: dict[int, int] = {}  # 1 in progress, 2 done
    stack_path: list[int] = []

    def visit(a: int) -> list[int] | None:
        color[a] = 1
        stack_path.append(a)
        for b in sorted(graph.get(a, ())):
            if color.get(b) == 1:
                return stack_path[stack_path.index(b) :] + [b]
            if color.get(b) != 2:
                cycle = visit(b)
                if cycle is not None:
                    return cycle
        stack_path.pop()
        color[a] = 2
        return None

    for a in sorted(graph):
        if color.get(a) is None:
            cycle = visit(a)
            if cycle is not None:
                names = " -> ".join(str(theory.fluents[i]) for i in cycle)
                violations.append(FragmentViolation("ramification-cycle", names))
                break

    # Clashing effects among instances that can apply together.
    occurring: set[Atom] = set()
    together: set[tuple[Atom, Atom]] = set()
    for acts in theory.occurrences.values():
        ordered = sorted(acts)
        occurring.update(ordered)
        for i, a in enumerate(ordered):
            for b in ordered[i:]:
                together.add((a, b))
    cache: dict[Lit, frozenset[Lit]] = {}
    relevant = [
        (ci, cp) for ci, cp in enumerate(theory.cprops) if cp.action in occurring
    ]

    def clash(cp, cq) -> None:
        li = cp.fluent + 1 if cp.initiates else -(cp.fluent + 1)
        lj = cq.fluent + 1 if cq.initiates else -(cq.fluent + 1)
        ri = _may_cause(theory, li, cache)
        rj = _may_cause(theory, lj, cache)
        for m in sorted(ri, key=lambda c: (abs(c), c)):
            if -m in rj:
                violations.append(
                    FragmentViolation(
                        "effect-conflict",
                        "statements %d and %d can disagree on %s"
                        % (cp.src, cq.src, theory.fluents[abs(m) - 1]),
                    )
                )
                return

    for i, (ci, cp) in enumerate(relevant):
        for cj, cq in relevant[i:]:
            pair = (min(cp.action, cq.action), max(cp.action, cq.action))
            if ci == cj or cp.action == cq.action or pair in together:
                clash(cp, cq)

    return FragmentReport(not violations, violations)


# ---------------------------------------------------------------------------
# Compilation


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list[tuple[int, ...]]
    n_fluents: int
    horizon: int
    names: dict[int, str] = field(default_factory=dict)
    origins: list[str] = field(default_factory=list)

    def fluent_var(self, atom_index: int, time: int) -> int:
        return time * self.n_fluents + atom_index + 1


def compile_theory(theory: GroundTheory) -> CnfInstance:
    """Clausal form of a fragment theory; see the module docstring for the
    variable roles.  Variable numbering is deterministic."""
    n = theory.n_fluents
    horizon = theory.horizon
    inst = CnfInstance(num_vars=(horizon + 1) * n, clauses=[], n_fluents=n, horizon=horizon)
    for t in range(horizon + 1):
        for i in range(n):
            inst.names[t * n + i + 1] = "%s@%d" % (theory.fluents[i], t)

    def new_var(name: str) -> int:
        inst.num_vars += 1
        inst.names[inst.num_vars] = name
        return inst.num_vars

    def add(clause, origin: str) -> None:
        inst.clauses.append(tuple(clause))
        inst.origins.append(origin)

    def at(code: Lit, t: int) -> int:
        v = t * n + abs(code)
        return v if code > 0 else -v

    # State constraints at every time point.
    for ri, rp in enumerate(theory.rprops):
        for t in range(horizon + 1):
            clause = [at(-c, t) for c in sorted(rp.condition, key=lambda x: (abs(x), x))]
            if rp.head is not None:
                clause.append(at(rp.head, t))
            add(clause, "constraint src=%d t=%d" % (rp.src, t))

    # Observation units.
    for t in sorted(theory.observations):
        for code in sorted(theory.observations[t], key=lambda c: (abs(c), c)):
            add([at(code, t)], "observation t=%d" % t)

    # Precondition units for scheduled actions.
    for t in sorted(theory.occurrences):
        for action in sorted(theory.occurrences[t]):
            for pi in theory.pprops_by_action.get(action, ()):
                pp = theory.pprops[pi]
                if pp.impossible:
                    add([], "impossible precondition src=%d t=%d" % (pp.src, t))
                    continue
                for code in sorted(pp.condition, key=lambda c: (abs(c), c)):
                    add([at(code, t)], "precondition src=%d t=%d" % (pp.src, t))

    # Ramification rules in dependency order, so each cause variable is
    # fully defined before any rule consuming it.  The graph is acyclic in
    # the fragment; outside it the order degrades but the compilation is
    # then only used for export, never for answers.
    order = _rule_order(theory)

    # Per-step causal structure.
    for t in range(horizon):
        actions = theory.occurrences.get(t, frozenset())
        fire_vars: dict[int, int] = {}  # cprop index -> var
        producers: dict[Lit, list[int]] = {}
        for action in sorted(actions):
            for ci in theory.cprops_by_action.get(action, ()):
                cp = theory.cprops[ci]
                v = new_var("fire[%d]@%d" % (ci, t))
                fire_vars[ci] = v
                cond = sorted(cp.condition, key=lambda x: (abs(x), x))
                for code in cond:
                    add([-v, at(code, t)], "fire-def src=%d t=%d" % (cp.src, t))
                add([v] + [at(-code, t) for code in cond], "fire-def src=%d t=%d" % (cp.src, t))
                effect = cp.fluent + 1 if cp.initiates else -(cp.fluent + 1)
                add([-v, at(effect, t + 1)], "effect src=%d t=%d" % (cp.src, t))
                producers.setdefault(effect, []).append(v)

        cause_vars: dict[Lit, int] = {}

        def cause_var(code: Lit) -> int | None:
            if code in cause_vars:
                return cause_vars[code]
            prods = producers.get(code)
            if not prods:
                return None
            v = new_var("cause[%s]@%d" % (theory.lit_str(code), t))
            cause_vars[code] = v
            add([-v] + prods, "cause-def %s t=%d" % (theory.lit_str(code), t))
            for p in prods:
                add([-p, v], "cause-def %s t=%d" % (theory.lit_str(code), t))
            return v

        for ri in order:
            rp = theory.rprops[ri]
            if rp.head is None or not rp.condition:
                continue
            body = sorted(rp.condition, key=lambda x: (abs(x), x))
            triggers = [cause_var(code) for code in body]
            triggers = [v for v in triggers if v is not None]
            if not triggers:
                continue  # body untouched by any producible change: never fires
            trig = new_var("trig[%d]@%d" % (ri, t))
            add([-trig] + triggers, "trig-def src=%d t=%d" % (rp.src, t))
            for v in triggers:
                add([-v, trig], "trig-def src=%d t=%d" % (rp.src, t))
            ram = new_var("ramify[%d]@%d" % (ri, t))
            for code in body:
                add([-ram, at(code, t + 1)], "ramify-def src=%d t=%d" % (rp.src, t))
            add([-ram, trig], "ramify-def src=%d t=%d" % (rp.src, t))
            add(
                [ram, -trig] + [at(-code, t + 1) for code in body],
                "ramify-def src=%d t=%d" % (rp.src, t),
            )
            add([-ram, at(rp.head, t + 1)], "ramify-effect src=%d t=%d" % (rp.src, t))
            producers.setdefault(rp.head, []).append(ram)

        # Explanation frame: a changed value needs a cause; clashing causes
        # are ruled out outright (vacuous inside the fragment, kept as a
        # guard rail).
        for i in range(n):
            pos = cause_var(i + 1)
            neg = cause_var(-(i + 1))
            src_t, src_t1 = i + 1 + t * n, i + 1 + (t + 1) * n
            add([-src_t1, src_t] + ([pos] if pos else []), "frame %s t=%d" % (theory.fluents[i], t))
            add([src_t1, -src_t] + ([neg] if neg else []), "frame %s t=%d" % (theory.fluents[i], t))
            if pos and neg:
                add([-pos, -neg], "cause-mutex %s t=%d" % (theory.fluents[i], t))

    return inst


def _rule_order(theory: GroundTheory) -> list[int]:
    """Rule indexes sorted so body atoms' producing rules come first;
    input order inside a stratum and when the graph has cycles."""
    level: dict[int, int] = {}

    def atom_level(a: int, seen: frozenset[int]) -> int:
        if a in level:
            return level[a]
        if a in seen:
            return 0  # cycle: outside the fragment, any order will do
        best = 0
        for ri in theory.rprops_by_head_atom.get(a, ()):
            rp = theory.rprops[ri]
            for c in rp.condition:
                best = max(best, atom_level(abs(c) - 1, seen | {a}) + 1)
        level[a] = best
        return best

    keyed = []
    for ri, rp in enumerate(theory.rprops):
        if rp.head is None:
            continue
        keyed.append((atom_level(abs(rp.head) - 1, frozenset()), ri))
    return [ri for _, ri in sorted(keyed)]


def to_dimacs(inst: CnfInstance, include_names: bool = False) -> str:
    lines = []
    if include_names:
        for v in sorted(inst.names):
            lines.append("c var %d %s" % (v, inst.names[v]))
    lines.append("p cnf %d %d" % (inst.num_vars, len(inst.clauses)))
    for clause in inst.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def provenance(inst: CnfInstance) -> dict:
    """Sidecar mapping variables and clauses back to their origins."""
    return {
        "vars": {str(v): inst.names[v] for v in sorted(inst.names)},
        "clauses": [
            {"lits": list(clause), "origin": origin}
            for clause, origin in zip(inst.clauses, inst.origins)
        ],
    }


# ---------------------------------------------------------------------------
# Solver


@dataclass
class SatStats:
    vars: int = 0
    clauses: int = 0
    decisions: int = 0
    propagations: int = 0
    solves: int = 0

    def as_dict(self) -> dict:
        return {
            "vars": self.vars,
            "clauses": self.clauses,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "solves": self.solves,
        }


class Solver:
    """Watched-literal DPLL, chronological backtracking, deterministic
    branching: lowest unassigned variable, false tried first."""

    def __init__(self, num_vars: int, clauses, budget: int | None = None, stats: SatStats | None = None):
        self.n = num_vars
        self.budget = budget
        self.stats = stats or SatStats()
        self.stats.vars = max(self.stats.vars, num_vars)
        self.empty = False
        self.units: list[int] = []
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        for clause in clauses:
            seen: list[int] = []
            taut = False
            for l in clause:
                if -l in seen:
                    taut = True
                    break
                if l not in seen:
                    seen.append(l)
            if taut:
                continue
            if not seen:
                self.empty = True
            elif len(seen) == 1:
                self.units.append(seen[0])
            else:
                ci = len(self.clauses)
                self.clauses.append(seen)
                self.watches.setdefault(seen[0], []).append(ci)
                self.watches.setdefault(seen[1], []).append(ci)
        self.stats.clauses += len(self.clauses) + len(self.units)

    def solve(self, assumptions=()) -> tuple[bool, dict[int, bool] | None]:
        self.stats.solves += 1
        if self.empty:
            return False, None
        assign = [0] * (self.n + 1)
        trail: list[int] = []
        qhead = 0

        def value(l: int) -> int:
            v = assign[abs(l)]
            return v if l > 0 else -v

        def enqueue(l: int) -> bool:
            v = value(l)
            if v == 1:
                return True
            if v == -1:
                return False
            assign[abs(l)] = 1 if l > 0 else -1
            trail.append(l)
            return True

        def propagate() -> bool:
            nonlocal qhead
            while qhead < len(trail):
                lit = trail[qhead]
                qhead += 1
                self.stats.propagations += 1
                falsified = -lit
                ws = self.watches.get(falsified)
                if not ws:
                    continue
                keep: list[int] = []
                idx = 0
                while idx < len(ws):
                    ci = ws[idx]
                    idx += 1
                    clause = self.clauses[ci]
                    if clause[0] == falsified:
                        clause[0], clause[1] = clause[1], clause[0]
                    if value(clause[0]) == 1:
                        keep.append(ci)
                        continue
                    moved = False
                    for k in range(2, len(clause)):
                        if value(clause[k]) != -1:
                            clause[1], clause[k] = clause[k], clause[1]
                            self.watches.setdefault(clause[1], []).append(ci)
                            moved = True
                            break
                    if moved:
                        continue
                    keep.append(ci)
                    if not enqueue(clause[0]):
                        keep.extend(ws[idx:])
                        self.watches[falsified] = keep
                        return False
                self.watches[falsified] = keep
            return True

        for l in self.units:
            if not enqueue(l):
                return False, None
        for l in assumptions:
            if not enqueue(l):
                return False, None
        if not propagate():
            return False, None

        stack: list[list] = []  # [var, tried_true, trail_len]
        while True:
            var = next((v for v in range(1, self.n + 1) if assign[v] == 0), None)
            if var is None:
                return True, {v: assign[v] == 1 for v in range(1, self.n + 1)}
            self.stats.decisions += 1
            if self.budget is not None and self.stats.decisions > self.budget:
                raise BudgetExceeded(self.budget, self.stats)
            stack.append([var, False, len(trail)])
            enqueue(-var)
            while not propagate():
                flipped = False
                while stack:
                    frame = stack[-1]
                    dvar, tried, tlen = frame
                    for l in trail[tlen:]:
                        assign[abs(l)] = 0
                    del trail[tlen:]
                    qhead = tlen
                    if not tried:
                        frame[1] = True
                        enqueue(dvar)
                        flipped = True
                        break
                    stack.pop()
                if not flipped:
                    return False, None


# ---------------------------------------------------------------------------
# Query bridge


def decode_model(
    inst: CnfInstance, theory: GroundTheory, model: dict[int, bool]
) -> Trajectory:
    states: list[State] = []
    for t in range(theory.horizon + 1):
        states.append(
            frozenset(i for i in range(theory.n_fluents) if model.get(inst.fluent_var(i, t)))
        )
    actions = tuple(
        theory.occurrences.get(t, frozenset()) for t in range(theory.horizon)
    )
    return Trajectory(tuple(states), actions)


def answer_sat(
    theory: GroundTheory, query: Query, *, budget: int | None = None
) -> EntailmentResult:
    """Answer a query by compiling to clauses.  Raises FragmentError when
    the theory is outside the supported fragment."""
    report = check_fragment(theory)
    if not report.accepted:
        raise FragmentError(report)
    dynamic_goals, constants_ok = split_goals(theory, query)
    inst = compile_theory(theory)
    stats = SatStats()

    def result(answer: str, witness_model: dict[int, bool] | None) -> EntailmentResult:
        witness = None
        if witness_model is not None:
            witness = render_trajectory(theory, decode_model(inst, theory, witness_model))
        return EntailmentResult(
            answer=answer,
            mode=query.mode,
            goals=query.goal_strings(),
            horizon=theory.horizon,
            backend="sat",
            witness=witness,
            stats=stats,
        )

    def goal_lit(code: Lit, t: int) -> int:
        v = inst.fluent_var(abs(code) - 1, t)
        return v if code > 0 else -v

    base = Solver(inst.num_vars, inst.clauses, budget, stats)
    sat, model = base.solve()
    if not sat:
        return result("domain-inconsistent", None)
    if not constants_ok:
        return result("false", None)
    if query.mode == "credulous":
        if not dynamic_goals:
            return result("true", model)
        sat, model = base.solve([goal_lit(c, t) for c, t in dynamic_goals])
        return result("true", model) if sat else result("false", None)
    if not dynamic_goals:
        return result("true", None)
    negation = [-goal_lit(c, t) for c, t in dynamic_goals]
    counter = Solver(inst.num_vars, list(inst.clauses) + [tuple(negation)], budget, stats)
    sat, model = counter.solve()
    if sat:
        return result("false", model)
    return result("true", None)
