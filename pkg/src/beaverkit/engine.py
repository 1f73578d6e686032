"""Execution engine: budgeted runs, cycle detection, tracing, fingerprints.

Two interchangeable inner loops share one semantics:

* a plain loop executing one transition per iteration, used whenever
  per-step observation is needed (cycle detection, tracing);
* a skipping loop that recognizes self-loop transitions (state maps to
  itself on the symbol under the head) and processes the whole uniform
  run of that symbol in one memchr/memset pass, crediting the exact
  number of steps.

Both produce identical outcomes, step counts, and tapes; the property
suite asserts this on random machines.  The skipping loop sustains well
over 10^7 credited steps per second on the unary-arithmetic tables this
package ships, whose inner loops are long scans.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .machine import (
    EXIT,
    NO_ACTION,
    RESERVED_NAMES,
    Machine,
    compile_machine,
)
from .tape import Configuration, Tape

HALTED = "halted"
STEP_LIMIT = "step_limit"
CYCLE = "cycle"
MEMORY_LIMIT = "memory_limit"
WATCH = "watch"

DEFAULT_MAX_STEPS = 10**8
DEFAULT_MAX_SUPPORT = 1 << 22


@dataclass(frozen=True)
class RunLimits:
    """Budgets for one run.

    `max_support_cells` caps the widest cell interval that has held 1s
    (a monotone high-water measure: erasing does not return headroom);
    the write that would exceed it is not executed and the run reports
    memory_limit with the exact step count.  `cycle_check` fingerprints
    every configuration and forces the per-step loop.
    """

    max_steps: int = DEFAULT_MAX_STEPS
    max_support_cells: int = DEFAULT_MAX_SUPPORT
    cycle_check: bool = False


@dataclass
class RunOutcome:
    """Result of a budgeted run.

    kind is one of: halted, step_limit, cycle, memory_limit, or watch
    (the last only when `watch` states were given).  `halting_state` is
    the name the machine died in: the state with the missing action, or
    the halt/external marker it transitioned into.
    """

    kind: str
    steps: int
    config: Configuration
    halting_state: str | None = None
    first_visit: int | None = None
    period: int | None = None
    watched_state: str | None = None

    @property
    def halted(self) -> bool:
        return self.kind == HALTED


@dataclass
class HaltEvent:
    """A (state, read) lookup with no action: the machine has halted."""

    config: Configuration


def step(machine: Machine, config: Configuration) -> Configuration | HaltEvent:
    """One transition, purely: returns a new Configuration or HaltEvent.

    Convenience for interactive poking and spot checks; the run loops
    below do not build per-step Configurations.
    """
    if config.state not in machine.states:
        return HaltEvent(config)
    act = machine.action(config.state, config.tape.read(config.tape.head))
    if act is None:
        return HaltEvent(config)
    nxt = config.clone()
    nxt.tape.write(nxt.tape.head, act.write)
    nxt.tape.head += act.move
    nxt.state = act.target
    nxt.steps += 1
    return nxt


def run(
    machine: Machine,
    config: Configuration | None = None,
    limits: RunLimits | None = None,
    *,
    watch: tuple[str, ...] | frozenset[str] = (),
    trace=None,
    profile: set | None = None,
) -> RunOutcome:
    """Run `machine` from `config` (blank tape if omitted) under `limits`.

    `watch`: stop with kind="watch" upon entering any of these states.
    `trace(steps, state, head, tape)` is called after every executed
    transition (forces the plain loop).  `profile` is a set collecting
    every (state, symbol) pair actually read.
    """
    limits = limits or RunLimits()
    cm = compile_machine(machine)
    if config is None:
        config = Configuration(machine.start)
    if config.state not in machine.states:
        if config.state not in RESERVED_NAMES:
            raise ValueError(
                f"initial state {config.state!r} is not defined in {machine.name!r}"
            )
        return RunOutcome(HALTED, config.steps, config, halting_state=config.state)
    watch_idx = frozenset(cm.index[w] for w in watch if w in cm.index)
    if limits.cycle_check or trace is not None:
        return _run_plain(cm, config, limits, watch_idx, trace, profile)
    return _run_skipping(cm, config, limits, watch_idx, profile)


def fingerprint(config: Configuration) -> str:
    """Digest of (state, head-relative support); translation invariant."""
    return hashlib.blake2b(
        repr(_fingerprint_key(config.state, config.tape)).encode(), digest_size=16
    ).hexdigest()


def _fingerprint_key(state, tape: Tape):
    lo, hi = tape.support()
    if hi < lo:
        return (state, 0, b"")
    return (state, tape.head - lo, bytes(tape.buf[tape.org + lo : tape.org + hi + 1]))


def _outcome(kind, cm, tape, state_idx, steps, exit_name=None, **kw) -> RunOutcome:
    state = exit_name if exit_name is not None else cm.names[state_idx]
    cfg = Configuration(state, tape, steps)
    halting = state if kind == HALTED else None
    return RunOutcome(kind, steps, cfg, halting_state=halting, **kw)


def _run_plain(cm, config, limits, watch_idx, trace, profile) -> RunOutcome:
    tape = config.tape
    state = cm.index[config.state]
    steps = config.steps
    max_steps = limits.max_steps
    cap = limits.max_support_cells
    write, move, target, exit_name = cm.write, cm.move, cm.target, cm.exit_name
    names = cm.names
    seen: dict = {}
    while steps < max_steps:
        if limits.cycle_check:
            key = _fingerprint_key(state, tape)
            prev = seen.get(key)
            if prev is not None:
                return _outcome(
                    CYCLE, cm, tape, state, steps, first_visit=prev, period=steps - prev
                )
            seen[key] = steps
        sym = tape.read(tape.head)
        j = 2 * state + sym
        if profile is not None:
            profile.add((names[state], sym))
        t = target[j]
        if t == NO_ACTION:
            return _outcome(HALTED, cm, tape, state, steps)
        w = write[j]
        if w and not sym:
            lo, hi = tape.ones_high_water()
            c = tape.head
            if hi >= lo and (max(hi, c) - min(lo, c) + 1) > cap:
                return _outcome(MEMORY_LIMIT, cm, tape, state, steps)
        tape.write(tape.head, w)
        tape.head += move[j]
        steps += 1
        if t == EXIT:
            if trace is not None:
                trace(steps, exit_name[j], tape.head, tape)
            return _outcome(HALTED, cm, tape, state, steps, exit_name=exit_name[j])
        state = t
        if trace is not None:
            trace(steps, names[state], tape.head, tape)
        if state in watch_idx:
            return _outcome(
                WATCH, cm, tape, state, steps, watched_state=names[state]
            )
    return _outcome(STEP_LIMIT, cm, tape, state, steps)


def _run_skipping(cm, config, limits, watch_idx, profile) -> RunOutcome:
    tape = config.tape
    state = cm.index[config.state]
    steps = config.steps
    max_steps = limits.max_steps
    cap = limits.max_support_cells
    write, move, target, exit_names = cm.write, cm.move, cm.target, cm.exit_name
    names = cm.names

    buf = tape.buf
    org = tape.org
    head = tape.head
    lo1, hi1 = tape._lo1, tape._hi1  # over-approximate 1-bounds, in cells

    def sync():
        tape.buf, tape.org, tape.head = buf, org, head
        tape._lo1, tape._hi1 = lo1, hi1

    def grown(cell):
        nonlocal buf, org
        sync()
        tape.grow(cell)
        buf, org = tape.buf, tape.org

    while steps < max_steps:
        p = org + head
        if not 0 <= p < len(buf):
            grown(head)
            p = org + head
        sym = buf[p]
        j = 2 * state + sym
        if profile is not None:
            profile.add((names[state], sym))
        t = target[j]
        if t == state:
            # Self-loop on `sym`: consume the whole uniform run at once.
            m = move[j]
            w = write[j]
            budget = max_steps - steps
            if m > 0:
                q = buf.find(1 - sym, p)
                if q < 0:
                    q = len(buf)
                n = q - p
                if n > budget:
                    n = budget
                if w != sym and n:
                    if w:  # filling 1s rightward extends support
                        c0, c1 = head, head + n - 1
                        n_ok = _fill_allowance(lo1, hi1, c0, c1, cap, rightward=True)
                        if n_ok < n:
                            if n_ok:
                                buf[p : p + n_ok] = b"\x01" * n_ok
                                lo1, hi1 = _merge_bounds(lo1, hi1, c0, c0 + n_ok - 1)
                                head += n_ok
                                steps += n_ok
                            sync()
                            return _outcome(MEMORY_LIMIT, cm, tape, state, steps)
                        buf[p : p + n] = b"\x01" * n
                        lo1, hi1 = _merge_bounds(lo1, hi1, c0, c1)
                    else:
                        buf[p : p + n] = b"\x00" * n
                head += n
                steps += n
                if steps >= max_steps:
                    break
                if p + n >= len(buf):
                    if sym == 0 and w == 0:
                        # gliding right over blank forever: no 1 ahead anywhere
                        head += max_steps - steps
                        steps = max_steps
                        break
                    grown(head)
                continue
            else:
                q = buf.rfind(1 - sym, 0, p + 1)
                n = p - q
                if n > budget:
                    n = budget
                    q = p - n
                if w != sym and n:
                    if w:
                        c1, c0 = head, head - n + 1
                        n_ok = _fill_allowance(lo1, hi1, c1, c0, cap, rightward=False)
                        if n_ok < n:
                            if n_ok:
                                buf[p - n_ok + 1 : p + 1] = b"\x01" * n_ok
                                lo1, hi1 = _merge_bounds(lo1, hi1, c1 - n_ok + 1, c1)
                                head -= n_ok
                                steps += n_ok
                            sync()
                            return _outcome(MEMORY_LIMIT, cm, tape, state, steps)
                        buf[q + 1 : p + 1] = b"\x01" * n
                        lo1, hi1 = _merge_bounds(lo1, hi1, c0, c1)
                    else:
                        buf[q + 1 : p + 1] = b"\x00" * n
                head -= n
                steps += n
                if steps >= max_steps:
                    break
                if q < 0:
                    if sym == 0 and w == 0:
                        head -= max_steps - steps
                        steps = max_steps
                        break
                    grown(head)
                continue
        if t == NO_ACTION:
            sync()
            return _outcome(HALTED, cm, tape, state, steps)
        w = write[j]
        if w and not sym:
            c = head
            if hi1 >= lo1 and (max(hi1, c) - min(lo1, c) + 1) > cap:
                sync()
                return _outcome(MEMORY_LIMIT, cm, tape, state, steps)
            lo1, hi1 = _merge_bounds(lo1, hi1, c, c)
        buf[p] = w
        head += move[j]
        steps += 1
        if t == EXIT:
            sync()
            return _outcome(HALTED, cm, tape, state, steps, exit_name=exit_names[j])
        state = t
        if state in watch_idx:
            sync()
            return _outcome(WATCH, cm, tape, state, steps, watched_state=names[state])
    sync()
    return _outcome(STEP_LIMIT, cm, tape, state, steps)


def _merge_bounds(lo1, hi1, a, b):
    if hi1 < lo1:
        return a, b
    return min(lo1, a), max(hi1, b)


def _fill_allowance(lo1, hi1, start, end, cap, rightward):
    """How many 1s of a uniform fill from `start` toward `end` keep the
    1-extent within `cap`.  Returns the full count when all fit."""
    n = abs(end - start) + 1
    if hi1 < lo1:
        return min(n, cap)
    if rightward:
        # extent = max(hi1, start+k-1) - min(lo1, start) + 1 for k cells
        base_lo = min(lo1, start)
        full_hi = max(hi1, end)
        if full_hi - base_lo + 1 <= cap:
            return n
        k = cap - 1 + base_lo - start + 1  # largest k with start+k-1-base_lo+1 <= cap
        k = min(n, max(0, k))
        while k and max(hi1, start + k - 1) - base_lo + 1 > cap:
            k -= 1
        return k
    base_hi = max(hi1, start)
    full_lo = min(lo1, end)
    if base_hi - full_lo + 1 <= cap:
        return n
    k = cap - 1 - base_hi + start + 1
    k = min(n, max(0, k))
    while k and base_hi - min(lo1, start - k + 1) + 1 > cap:
        k -= 1
    return k
