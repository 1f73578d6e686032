"""State-count reduction by pairing read-0-only states with read-1-only ones.

A pair merges into a single state carrying the zero side's read-0 action
and the one side's read-1 action; every transition into either original
is retargeted at the merged state.  Candidates are found structurally
(a state simply lacks the other action) and, when a read profile from a
scenario suite is supplied, semantically (the suite never exercised the
other action).  Profile-backed merges are sound only relative to that
suite, which is exactly what verify_merge re-checks, run for run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import RunLimits, run
from .machine import Action, Machine
from .tape import Configuration


@dataclass
class ReadProfile:
    """Observed (state -> set of symbols read) over a scenario suite."""

    observed: dict[str, set[int]] = field(default_factory=dict)
    coverage: dict[str, int] = field(default_factory=dict)  # scenario -> steps

    def reads(self, state: str) -> set[int]:
        return self.observed.get(state, set())


def profile_reads(machine: Machine, scenarios) -> ReadProfile:
    """Record each (state, symbol) actually read over the scenario suite.

    Scenarios are harness Scenario objects whose entry states name
    states of `machine`; their machine_ref is ignored.  Each scenario
    runs exactly as the harness would judge it (transfer expectations
    stop at their target), so the profile's horizon is the same one
    verify_merge later compares.
    """
    from .harness import execute_scenario

    profile = ReadProfile()
    sink: set = set()
    for scn in scenarios:
        outcome = execute_scenario(scn, machine, profile=sink)
        profile.coverage[scn.name] = outcome.steps
    for state, sym in sink:
        profile.observed.setdefault(state, set()).add(sym)
    return profile


@dataclass(frozen=True)
class MergePair:
    zero_state: str
    one_state: str
    merged_name: str
    dropped: tuple[str, ...] = ()  # actions suppressed by a profile-backed pair


@dataclass
class MergePlan:
    pairs: list[MergePair] = field(default_factory=list)
    residual_zero: list[str] = field(default_factory=list)
    residual_one: list[str] = field(default_factory=list)

    def serialize(self) -> str:
        lines = []
        for p in self.pairs:
            lines.append(f"merge {p.zero_state} {p.one_state} as {p.merged_name}")
            for d in p.dropped:
                lines.append(f"# drops {d}")
        for s in self.residual_zero:
            lines.append(f"# residual zero-only {s}")
        for s in self.residual_one:
            lines.append(f"# residual one-only {s}")
        return "\n".join(lines) + ("\n" if lines else "")


def parse_plan(text: str) -> MergePlan:
    plan = MergePlan()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5 or parts[0] != "merge" or parts[3] != "as":
            raise ValueError(f"line {lineno}: expected 'merge <zero> <one> as <name>'")
        plan.pairs.append(MergePair(parts[1], parts[2], parts[4]))
    return plan


def propose_merges(machine: Machine, profile: ReadProfile | None = None) -> MergePlan:
    """Greedy pairing in table order.

    A state is zero-capable if it has no read-1 action, or the profile
    never saw it read 1; one-capable symmetrically.  States capable of
    both sides (never entered on the suite) fill whichever side runs
    short.  The start state only participates with profile evidence.
    """
    strict_zero: list[str] = []
    strict_one: list[str] = []
    flex: list[str] = []
    for name, (on_zero, on_one) in machine.states.items():
        obs = profile.reads(name) if profile is not None else None
        zero_cap = _capable(on_zero, on_one, obs, zero_side=True)
        one_cap = _capable(on_zero, on_one, obs, zero_side=False)
        if name == machine.start:
            # pairing the start is only safe with profile evidence that
            # the conflicting read never happens
            zero_cap = zero_cap and obs is not None and 1 not in obs
            one_cap = one_cap and obs is not None and 0 not in obs
        if zero_cap and one_cap:
            flex.append(name)
        elif zero_cap:
            strict_zero.append(name)
        elif one_cap:
            strict_one.append(name)

    pairs: list[MergePair] = []
    zq, oq, fq = strict_zero[:], strict_one[:], flex[:]
    while zq and oq:
        pairs.append(_pair(machine, zq.pop(0), oq.pop(0), profile))
    while zq and fq:
        pairs.append(_pair(machine, zq.pop(0), fq.pop(0), profile))
    while oq and fq:
        pairs.append(_pair(machine, fq.pop(0), oq.pop(0), profile))
    while len(fq) >= 2:
        pairs.append(_pair(machine, fq.pop(0), fq.pop(0), profile))
    return MergePlan(pairs=pairs, residual_zero=zq + fq, residual_one=oq)


def _capable(on_zero, on_one, obs, zero_side: bool) -> bool:
    needed, other = (on_zero, on_one) if zero_side else (on_one, on_zero)
    if needed is None:
        return False  # merged state would lack its defining action
    if obs is None:
        return other is None  # no profile: structural one-sidedness only
    # With a profile the other-side read must be unobserved even when the
    # action is structurally missing: that read would have halted, and a
    # merge would mask the halt.
    return (1 if zero_side else 0) not in obs


def _pair(machine: Machine, zero_state: str, one_state: str, profile) -> MergePair:
    dropped = []
    if machine.action(zero_state, 1) is not None:
        dropped.append(f"{zero_state} read-1")
    if machine.action(one_state, 0) is not None:
        dropped.append(f"{one_state} read-0")
    return MergePair(zero_state, one_state, f"{zero_state}+{one_state}", tuple(dropped))


def apply_merges(machine: Machine, plan: MergePlan) -> Machine:
    """Machine with each pair fused; state count drops by len(pairs)."""
    zero_of = {}
    one_of = {}
    alias = merge_alias(plan)
    for p in plan.pairs:
        for s in (p.zero_state, p.one_state):
            if s not in machine.states:
                raise ValueError(f"merge pair names unknown state {s!r}")
        if machine.action(p.zero_state, 0) is None:
            raise ValueError(f"{p.zero_state} has no read-0 action; cannot take the zero side")
        if machine.action(p.one_state, 1) is None:
            raise ValueError(f"{p.one_state} has no read-1 action; cannot take the one side")
        if not p.dropped:
            # structural pair: confirm one-sidedness
            if machine.action(p.zero_state, 1) is not None or machine.action(p.one_state, 0) is not None:
                raise ValueError(
                    f"pair ({p.zero_state}, {p.one_state}) is not one-sided and carries no drop record"
                )
        zero_of[p.merged_name] = p.zero_state
        one_of[p.merged_name] = p.one_state
    counts: dict[str, int] = {}
    for p in plan.pairs:
        for s in (p.zero_state, p.one_state):
            counts[s] = counts.get(s, 0) + 1
    dupes = [s for s, c in counts.items() if c > 1]
    if dupes:
        raise ValueError(f"states appear in more than one pair: {dupes}")

    def retarget(act: Action | None) -> Action | None:
        if act is None:
            return None
        t = alias.get(act.target)
        return act if t is None else act._replace(target=t)

    merged_emitted: set[str] = set()
    states: dict[str, tuple[Action | None, Action | None]] = {}
    for name, (on_zero, on_one) in machine.states.items():
        m = alias.get(name)
        if m is None:
            states[name] = (retarget(on_zero), retarget(on_one))
        elif m not in merged_emitted:
            merged_emitted.add(m)
            states[m] = (
                retarget(machine.action(zero_of[m], 0)),
                retarget(machine.action(one_of[m], 1)),
            )
    return Machine(
        name=f"{machine.name} (merged)",
        start=alias.get(machine.start, machine.start),
        states=states,
    )


def merge_alias(plan: MergePlan) -> dict[str, str]:
    alias: dict[str, str] = {}
    for p in plan.pairs:
        alias[p.zero_state] = p.merged_name
        alias[p.one_state] = p.merged_name
    return alias


@dataclass
class ScenarioComparison:
    name: str
    equivalent: bool
    kind_a: str
    kind_b: str
    steps_a: int
    steps_b: int
    first_divergence: int | None = None
    detail: str = ""


@dataclass
class MergeVerdict:
    equivalent: bool
    comparisons: list[ScenarioComparison]

    def __str__(self) -> str:
        if self.equivalent:
            return f"equivalent on all {len(self.comparisons)} scenarios, step for step"
        bad = [c for c in self.comparisons if not c.equivalent]
        lines = [f"divergent on {len(bad)} of {len(self.comparisons)} scenarios:"]
        lines += [f"  {c.name}: {c.detail} (first divergence step {c.first_divergence})" for c in bad]
        return "\n".join(lines)


def verify_merge(original: Machine, merged: Machine, scenarios, plan: MergePlan | None = None) -> MergeVerdict:
    """Per scenario: same outcome kind, same step count, same final tape.

    Scenarios run exactly as the harness judges them; entry and watch
    state names are translated through the merge aliases for the merged
    run.  On divergence the pair is re-run in lockstep to locate the
    first differing step.
    """
    from .harness import execute_scenario

    alias = merge_alias(plan) if plan else {}
    comparisons = []
    for scn in scenarios:
        out_a = execute_scenario(scn, original)
        out_b = execute_scenario(scn, merged, alias=alias)
        end_a = alias.get(out_a.config.state, out_a.config.state)
        same = (
            out_a.kind == out_b.kind
            and out_a.steps == out_b.steps
            and end_a == out_b.config.state
            and out_a.config.tape.content_equal(out_b.config.tape)
        )
        comp = ScenarioComparison(
            scn.name, same, out_a.kind, out_b.kind, out_a.steps, out_b.steps
        )
        if not same:
            comp.first_divergence, comp.detail = _locate_divergence(
                original, merged, scn, alias, cap=min(out_a.steps, out_b.steps) + 1
            )
        comparisons.append(comp)
    return MergeVerdict(all(c.equivalent for c in comparisons), comparisons)


def _locate_divergence(original, merged, scn, alias, cap):
    """Lockstep single-step co-simulation; returns (step, detail)."""
    entry_a = scn.entry or original.start
    entry_b = alias.get(entry_a, entry_a)
    cfg_a = Configuration(entry_a, scn.build_tape())
    cfg_b = Configuration(entry_b, scn.build_tape())
    limit_one = RunLimits(max_steps=1, max_support_cells=scn.limits.max_support_cells)
    cap = min(cap, 10**6)
    for step in range(1, cap + 1):
        out_a = run(original, cfg_a, limit_one)
        out_b = run(merged, cfg_b, limit_one)
        cfg_a, cfg_b = out_a.config, out_b.config
        cfg_a.steps = cfg_b.steps = 0
        state_a = alias.get(cfg_a.state, cfg_a.state)
        if state_a != cfg_b.state:
            return step, f"states diverge: {cfg_a.state} vs {cfg_b.state}"
        if cfg_a.tape.head != cfg_b.tape.head:
            return step, f"heads diverge: {cfg_a.tape.head} vs {cfg_b.tape.head}"
        if not cfg_a.tape.content_equal(cfg_b.tape):
            return step, "tapes diverge"
        if out_a.kind != "step_limit" or out_b.kind != "step_limit":
            if out_a.kind != out_b.kind:
                return step, f"outcomes diverge: {out_a.kind} vs {out_b.kind}"
            break
    return None, "divergence beyond co-simulation cap"
