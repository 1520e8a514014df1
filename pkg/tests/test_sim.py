from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN, MINIMAL, SCENARIOS
from tmkit.core import ActionKind, BehavioralModel, DynamicModel, EventInstance, Trace
from tmkit.dsl import Script, Stimulus, parse_model
from tmkit.sim import (
    GuardEvaluationError,
    ScriptError,
    SimConfig,
    Simulator,
    combine_batch,
    detect_events,
    parse_trace,
    run,
    serialize_trace,
    trace_conformance,
)


def nodes_fired(trace):
    return [s.node for s in trace.steps]


def digits(*keys, start=1, gap=10):
    return [Stimulus(start + i * gap, "keypad.key", k) for i, k in enumerate(keys)]


# -- hand-checked runs ------------------------------------------------------


def test_minimal_chain_trace():
    m = parse_model(MINIMAL)
    trace = run(m, Script((Stimulus(1, "panel.create_x"),)))
    assert serialize_trace(trace) == (
        "# trace ticks=3 truncated=false\n"
        "1 panel.create_x create in=[] out=[t1]\n"
        "2 panel.release_x release in=[t1] out=[t1]\n"
        "3 panel.transfer_out transfer_out in=[t1] out=[t1]\n"
    )


def test_empty_script_is_quiescent_at_zero(model):
    trace = run(model, Script())
    assert trace.steps == () and trace.ticks == 0 and not trace.truncated


def test_correct_password_then_stay(model):
    sim = Simulator(model, Script((*digits(1, 2, 3, 4), Stimulus(50, "stay.create_select"))))
    trace = sim.run()
    fired = nodes_fired(trace)
    compare = fired.index("comparison.process_compare")
    assert fired[compare + 1] == "comparison.create_match"
    assert "comparison.create_mismatch" not in fired
    assert sim.stores["comparison.store_access"] is True
    tail = fired[compare:]
    assert tail.count("stay.create_light") == 1
    assert tail.count("beep.create_twice") == 2
    assert "beep.create_once" not in fired


def test_wrong_password_beeps_once_and_zeros(model):
    sim = Simulator(model, Script(tuple(digits(9, 9, 9, 9))))
    trace = sim.run()
    fired = Counter(nodes_fired(trace))
    assert fired["beep.create_once"] == 1
    assert fired["screen.process_reset"] == 4
    assert fired["comparison.create_mismatch"] == 1
    assert sim.stores["comparison.store_access"] is False
    resets = [s for s in trace.steps if s.node == "screen.process_reset"]
    assert {sim.things[s.things_in[0]].payload for s in resets} == {0}


def test_stay_without_access_does_nothing(model):
    trace = run(model, Script((Stimulus(1, "stay.create_select"),)))
    assert nodes_fired(trace) == ["stay.create_select", "stay.process_state"]


def test_password_number_is_concatenated(model):
    sim = Simulator(model, Script(tuple(digits(4, 0, 0, 7))))
    sim.run()
    [number] = [t for t in sim.things.values() if t.type_label == "number"]
    assert number.payload == 4007


def test_count_guard_wraps(model):
    sim = Simulator(model, Script(tuple(digits(1, 2, 3, 4, 1, 2, 3, 4))))
    trace = sim.run()
    assert nodes_fired(trace).count("comparison.process_compare") == 2
    assert sim.counters["keypad.receive_key"] == 0


def test_combine_batch():
    assert combine_batch((1, 2, 3, 4)) == 1234
    assert combine_batch((True, False)) is False
    assert combine_batch((True, True)) is True
    assert combine_batch(("a", 1)) == "a1"
    assert combine_batch((-1, 2)) == "-12"


def test_strict_equality_in_guards():
    src = """
    thimac a { create x -> process x; store v = 1 }
    thimac b { create hit; create miss }
    a.process_x ~> b.create_hit [eq a.store_v]
    a.process_x ~> b.create_miss [ne a.store_v]
    """
    m = parse_model(src)
    fired = nodes_fired(run(m, Script((Stimulus(1, "a.create_x", True),))))
    assert "b.create_miss" in fired and "b.create_hit" not in fired
    fired = nodes_fired(run(m, Script((Stimulus(1, "a.create_x", 1),))))
    assert "b.create_hit" in fired and "b.create_miss" not in fired


def test_guard_errors_and_script_errors():
    m = parse_model("thimac a { create x -> process x; store v }\nthimac b { create y }\na.process_x ~> b.create_y [eq a.store_v]")
    with pytest.raises(GuardEvaluationError):
        run(m, Script((Stimulus(1, "a.create_x"),)))
    with pytest.raises(ScriptError):
        Simulator(m, Script((Stimulus(1, "a.process_x"),)))
    with pytest.raises(ScriptError):
        Simulator(m, Script((Stimulus(1, "a.nowhere"),)))
    with pytest.raises(ValueError):
        SimConfig(max_ticks=0)


def test_truncation(model, scripts):
    trace = run(model, scripts["correct_stay"], SimConfig(max_ticks=3))
    assert trace.truncated and trace.ticks == 3
    assert "truncated=true" in serialize_trace(trace).splitlines()[0]


def test_step_cost_stretches_time():
    m = parse_model(MINIMAL)
    trace = run(m, Script((Stimulus(1, "panel.create_x"),)), SimConfig(step_cost=3))
    assert [s.tick for s in trace.steps] == [1, 4, 7]


# -- invariants -------------------------------------------------------------


def check_conservation(trace):
    born = Counter()
    first_seen = {}
    per_tick = Counter()
    for step in trace.steps:
        if not step.things_in:
            born.update(step.things_out)
        else:
            assert step.things_in == step.things_out, "an action never renames its thing"
        for tid in set(step.things_in) | set(step.things_out):
            per_tick[(step.tick, tid)] += 1
            first_seen.setdefault(tid, step)
    assert all(n == 1 for n in born.values()), "each thing is created exactly once"
    assert all(n == 1 for n in per_tick.values()), "one action per thing per tick"
    for tid, step in first_seen.items():
        # things not born at a create step were injected at a transfer-in node
        assert tid in born or step.kind is ActionKind.TRANSFER_IN


keystrokes = st.lists(
    st.tuples(st.integers(1, 6), st.sampled_from(["keypad.key", "stay.create_select", "away.create_select"]), st.integers(0, 9)),
    max_size=10,
)


@settings(max_examples=40, deadline=None)
@given(keystrokes)
def test_random_scripts_conserve_things_and_are_deterministic(model, presses):
    tick, stimuli = 0, []
    for gap, target, digit in presses:
        tick += gap
        payload = digit if target == "keypad.key" else True
        stimuli.append(Stimulus(tick, target, payload))
    script = Script(tuple(stimuli))
    sim = Simulator(model, script)
    trace = sim.run()
    check_conservation(trace)
    assert serialize_trace(trace) == serialize_trace(run(model, script))
    assert not trace.truncated
    assert sim.step() == []  # a quiescent stop leaves nothing to fire


@pytest.mark.parametrize("name", SCENARIOS)
def test_corpus_scenarios_conserve_and_quiesce(model, scripts, name):
    sim = Simulator(model, scripts[name])
    trace = sim.run()
    check_conservation(trace)
    assert sim.idle() and sim.step() == []


# -- events and conformance -------------------------------------------------


def instances(model, dyn, script):
    return detect_events(run(model, script), dyn)


def test_correct_password_event_order(model, dyn, scripts):
    ids = instances(model, dyn, scripts["correct_stay"]).instance_ids()
    assert ids[:11] == [f"E{i}" for i in range(1, 12)]
    assert {"E15", "E16", "E17", "E18"} <= set(ids[11:])
    assert "E12" not in ids


def test_wrong_password_events(model, dyn, scripts):
    ids = instances(model, dyn, scripts["wrong_password"]).instance_ids()
    assert {"E12", "E13", "E14"} <= set(ids)
    assert ids.index("E12") < ids.index("E13") and ids.index("E12") < ids.index("E14")
    assert "E11" not in ids


def test_readiness_events(model, dyn, scripts):
    ids = instances(model, dyn, scripts["readiness"]).instance_ids()
    assert ids.index("E23") < ids.index("E30") < ids.index("E31")
    assert ids.index("E24") < ids.index("E28") < ids.index("E29")


def test_empty_dynamic_model_finds_nothing(model, scripts):
    trace = instances(model, DynamicModel(model.name), scripts["correct_stay"])
    assert trace.event_instances == ()


def test_event_instances_are_well_formed(model, dyn, scripts):
    for script in scripts.values():
        trace = instances(model, dyn, script)
        ends = [(i.end, dyn.order[i.event]) for i in trace.event_instances]
        assert ends == sorted(ends)
        assert all(i.start <= i.end for i in trace.event_instances)


@pytest.mark.parametrize("name", SCENARIOS)
def test_corpus_traces_conform(model, dyn, beh, scripts, name):
    report = trace_conformance(instances(model, dyn, scripts[name]), beh)
    assert report.conformant, report.to_text()


def test_missing_edge_is_reported(model, dyn, beh, scripts):
    pruned = BehavioralModel(dyn, tuple(e for e in beh.edges if (e.source, e.target) != ("E10", "E11")), beh.initial)
    report = trace_conformance(instances(model, dyn, scripts["correct_stay"]), pruned)
    assert not report.conformant
    assert [(f.rule, f.location) for f in report.findings] == [("NONCONFORMANT", "E10->E11")]


def test_single_instance_is_vacuously_conformant(dyn):
    trace = Trace((), (EventInstance("E5", 1, 1),))
    assert trace_conformance(trace, BehavioralModel(dyn)).conformant


def test_concurrent_instances_share_a_group(dyn):
    beh = BehavioralModel(dyn)
    trace = Trace((), (EventInstance("E14", 1, 4), EventInstance("E16", 2, 4)))
    assert trace_conformance(trace, beh).conformant


# -- golden traces ----------------------------------------------------------


@pytest.mark.parametrize("name", SCENARIOS)
def test_golden_traces(model, dyn, scripts, name):
    text = serialize_trace(instances(model, dyn, scripts[name]))
    assert text == (GOLDEN / f"{name}.tmt").read_text(encoding="utf-8")
    assert serialize_trace(parse_trace(text)) == text


def test_parse_trace_rejects_garbage():
    with pytest.raises(Exception):
        parse_trace("# trace ticks=1 truncated=false\nnot a step\n")


def test_trace_replace_keeps_steps(model, scripts):
    trace = run(model, scripts["wrong_password"])
    assert replace(trace, event_instances=()).steps == trace.steps
    assert ActionKind.CREATE in {s.kind for s in trace.steps}
