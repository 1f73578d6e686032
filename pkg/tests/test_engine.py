import pytest
from hypothesis import given, settings, strategies as st

from beaverkit.engine import (
    CYCLE,
    HALTED,
    MEMORY_LIMIT,
    STEP_LIMIT,
    WATCH,
    HaltEvent,
    RunLimits,
    fingerprint,
    run,
    step,
)
from beaverkit.machine import HALT, Action, Machine
from beaverkit.tape import Configuration, Tape


def one_state(write=1, move=1, target="B"):
    return Machine("toy", "A", {"A": (Action(write, move, target), None)})


def test_single_forced_transition():
    m = one_state()
    cfg = step(m, Configuration("A"))
    assert isinstance(cfg, Configuration)
    assert cfg.state == "B" and cfg.tape.head == 1 and cfg.steps == 1
    assert cfg.tape.read(0) == 1
    # B is undefined: the next step is a halt event, configuration unchanged
    ev = step(m, cfg)
    assert isinstance(ev, HaltEvent)
    assert ev.config.steps == 1
    # run() discovers the inevitable halt as soon as the transition is taken
    out = run(m, limits=RunLimits(max_steps=10))
    assert out.kind == HALTED and out.steps == 1 and out.halting_state == "B"


def test_step_is_pure():
    m = one_state()
    cfg = Configuration("A")
    a = step(m, cfg)
    b = step(m, cfg)
    assert cfg.steps == 0 and cfg.tape.read(0) == 0
    assert a.state == b.state and a.steps == b.steps
    assert a.tape.content_equal(b.tape)


def test_determinism():
    m = one_state()
    a = run(m, limits=RunLimits(max_steps=5))
    b = run(m, limits=RunLimits(max_steps=5))
    assert a.kind == b.kind and a.steps == b.steps
    assert a.config.state == b.config.state
    assert a.config.tape.content_equal(b.config.tape)


def test_empty_machine_halt_start():
    m = Machine("empty", HALT, {})
    out = run(m)
    assert out.kind == HALTED and out.steps == 0
    assert out.halting_state == HALT


def test_rejects_unknown_initial_state():
    m = one_state()
    with pytest.raises(ValueError):
        run(m, Configuration("Z"))


def test_perpetual_right_mover_cycles_only_when_asked():
    m = Machine("mover", "A", {"A": (Action(0, 1, "A"), None)})
    out = run(m, limits=RunLimits(max_steps=100))
    assert out.kind == STEP_LIMIT and out.steps == 100
    out = run(m, limits=RunLimits(max_steps=100, cycle_check=True))
    assert out.kind == CYCLE
    assert out.period == 1


def test_halt_into_reserved_marker_counts_the_step():
    m = Machine("h", "A", {"A": (Action(1, 1, HALT), None)})
    out = run(m)
    assert out.kind == HALTED and out.steps == 1
    assert out.halting_state == HALT
    assert out.config.tape.read(0) == 1


def test_watch_stops_on_entry():
    m = Machine(
        "w",
        "A",
        {
            "A": (Action(1, 1, "B"), None),
            "B": (Action(1, 1, "A"), None),
        },
    )
    out = run(m, limits=RunLimits(max_steps=100), watch=("B",))
    assert out.kind == WATCH and out.steps == 1 and out.watched_state == "B"
    # continuing does not instantly re-trigger on the state we stand in
    cfg = out.config
    out2 = run(m, cfg, RunLimits(max_steps=100), watch=("B",))
    assert out2.kind == WATCH and out2.steps == 3


def test_memory_limit_on_unbounded_fill():
    filler = Machine("fill", "A", {"A": (Action(1, 1, "A"), None)})
    out = run(filler, limits=RunLimits(max_steps=10**6, max_support_cells=64))
    assert out.kind == MEMORY_LIMIT
    assert out.steps == 64
    assert out.config.tape.support_size() == 64
    mirror = Machine("fill", "A", {"A": (Action(1, -1, "A"), None)})
    out = run(mirror, limits=RunLimits(max_steps=10**6, max_support_cells=64))
    assert out.kind == MEMORY_LIMIT and out.steps == 64


def test_step_budget_is_exact_mid_scan():
    # a long scan must stop exactly at the budget even inside a skip
    tape = Tape.from_blocks([1000])
    m = Machine("scan", "A", {"A": (None, Action(1, 1, "A"))})
    out = run(m, Configuration("A", tape), RunLimits(max_steps=137))
    assert out.kind == STEP_LIMIT and out.steps == 137
    assert out.config.tape.head == 137


def test_fingerprint_properties():
    a = Configuration("S", Tape())
    b = Configuration("S", Tape())
    assert fingerprint(a) == fingerprint(b)
    c = Configuration("T", Tape())
    assert fingerprint(a) != fingerprint(c)
    # translation invariance: same pattern shifted, head shifted alike
    t1 = Tape.from_blocks([3], start_cell=0)
    t1.head = 1
    t2 = Tape.from_blocks([3], start_cell=40)
    t2.head = 41
    assert fingerprint(Configuration("S", t1)) == fingerprint(Configuration("S", t2))
    t2.head = 42
    assert fingerprint(Configuration("S", t1)) != fingerprint(Configuration("S", t2))


def test_trace_lines_emitted_per_step():
    lines = []
    m = one_state(target="A")  # writes 1, moves right, stays in A
    run(
        m,
        limits=RunLimits(max_steps=3),
        trace=lambda steps, state, head, tape: lines.append((steps, state, head)),
    )
    assert lines == [(1, "A", 1), (2, "A", 2), (3, "A", 3)]


@st.composite
def machines(draw, max_states=4):
    """Random machines: some transitions missing, some to HALT."""
    n = draw(st.integers(1, max_states))
    names = [chr(65 + i) for i in range(n)]
    states = {}
    for name in names:
        acts = []
        for _ in (0, 1):
            if draw(st.booleans()) or name == names[0]:
                target = draw(st.sampled_from(names + [HALT, "ext"]))
                acts.append(
                    Action(draw(st.integers(0, 1)), draw(st.sampled_from([-1, 1])), target)
                )
            else:
                acts.append(None)
        if acts[0] is None and acts[1] is None:
            acts[0] = Action(1, 1, HALT)
        states[name] = (acts[0], acts[1])
    return Machine("rand", names[0], states)


@settings(max_examples=120, deadline=None)
@given(data=st.data())
def test_skipping_loop_matches_plain_loop(data):
    m = data.draw(machines())
    blocks = data.draw(st.lists(st.integers(1, 6), min_size=0, max_size=3))
    budget = data.draw(st.integers(0, 300))
    cap = data.draw(st.one_of(st.just(1 << 22), st.integers(4, 40)))
    tape_a = Tape.from_blocks(blocks) if blocks else Tape()
    tape_b = tape_a.clone()
    limits = RunLimits(max_steps=budget, max_support_cells=cap)
    fast = run(m, Configuration(m.start, tape_a), limits)
    slow = run(
        m,
        Configuration(m.start, tape_b),
        limits,
        trace=lambda *a: None,  # forces the plain loop
    )
    assert fast.kind == slow.kind
    assert fast.steps == slow.steps
    assert fast.config.state == slow.config.state
    assert fast.config.tape.head == slow.config.tape.head
    assert fast.config.tape.content_equal(slow.config.tape)


@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_support_growth_bounded_by_steps(data):
    m = data.draw(machines())
    blocks = data.draw(st.lists(st.integers(1, 5), min_size=0, max_size=3))
    budget = data.draw(st.integers(0, 200))
    tape = Tape.from_blocks(blocks) if blocks else Tape()
    s0 = tape.support_size()
    out = run(m, Configuration(m.start, tape), RunLimits(max_steps=budget))
    assert out.config.tape.support_size() <= s0 + out.steps


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_halting_soundness(data):
    m = data.draw(machines())
    out = run(m, limits=RunLimits(max_steps=200))
    if out.kind == HALTED:
        state = out.config.state
        sym = out.config.tape.read(out.config.tape.head)
        # the machine has no action for where it died
        assert m.action(state, sym) is None


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_cycle_soundness_replay(data):
    m = data.draw(machines())
    out = run(m, limits=RunLimits(max_steps=300, cycle_check=True))
    if out.kind != CYCLE:
        return
    first = run(m, limits=RunLimits(max_steps=out.first_visit))
    fp = fingerprint(first.config)
    first.config.steps = 0
    again = run(m, first.config, RunLimits(max_steps=out.period))
    assert fingerprint(again.config) == fp


def test_memory_cap_respects_existing_support():
    # ten 1s at cells 0..9; filling leftward may add six more before the
    # 16-cell extent cap bites, and the violating write is not executed
    filler = Machine("fill", "A", {"A": (Action(1, -1, "A"), Action(1, -1, "A"))})
    tape = Tape.from_blocks([10])
    tape.head = -1
    out = run(
        filler,
        Configuration("A", tape),
        RunLimits(max_steps=10**6, max_support_cells=16),
    )
    assert out.kind == MEMORY_LIMIT
    assert out.config.tape.support() == (-6, 9)


def test_budget_clamp_inside_erasing_run():
    eraser = Machine("erase", "A", {"A": (None, Action(0, 1, "A"))})
    tape = Tape.from_blocks([50])
    out = run(eraser, Configuration("A", tape), RunLimits(max_steps=20))
    assert out.kind == STEP_LIMIT and out.steps == 20
    assert out.config.tape.blocks() == [30]
    assert out.config.tape.head == 20


def test_glide_left_over_blank_consumes_budget():
    glider = Machine("glide", "A", {"A": (Action(0, -1, "A"), None)})
    out = run(glider, limits=RunLimits(max_steps=10**7))
    assert out.kind == STEP_LIMIT and out.steps == 10**7
    assert out.config.tape.head == -(10**7)
    assert out.config.tape.support_size() == 0


def test_erasure_empties_support():
    eraser = Machine(
        "erase", "A", {"A": (Action(0, 1, HALT), Action(0, 1, "A"))}
    )
    tape = Tape.from_blocks([5])
    out = run(eraser, Configuration("A", tape), RunLimits(max_steps=100))
    assert out.kind == HALTED
    assert out.config.tape.blocks() == []
    assert out.config.tape.support_size() == 0


def test_run_budget_is_cumulative_across_continuations():
    m = one_state(target="A")
    out = run(m, limits=RunLimits(max_steps=5))
    assert out.steps == 5
    out2 = run(m, out.config, RunLimits(max_steps=7))
    assert out2.steps == 7  # two more transitions, not seven


def test_memory_cap_is_high_water_in_both_loops():
    # write a 1, erase it, glide right, write again: the erased cell
    # still counts against the cap, identically in both loops
    m = Machine(
        "hw",
        "A",
        {
            "A": (Action(1, 1, "B"), None),          # mark cell 0
            "B": (Action(0, -1, "C"), None),         # step right cell is 0 -> back
            "C": (None, Action(0, 1, "D")),          # erase the mark
            "D": (Action(0, 1, "D"), Action(1, 1, "D")),  # glide, writing 1s over 1s
        },
    )
    tape_a = Tape.from_blocks([3], start_cell=10)
    tape_b = tape_a.clone()
    limits = RunLimits(max_steps=100, max_support_cells=8)
    fast = run(m, Configuration("A", tape_a), limits)
    slow = run(m, Configuration("A", tape_b), limits, trace=lambda *a: None)
    assert fast.kind == slow.kind
    assert fast.steps == slow.steps
    assert fast.config.tape.head == slow.config.tape.head
