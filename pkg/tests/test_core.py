import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmkit.core import (
    ActionKind,
    ActionNode,
    Arc,
    ArcKind,
    BehavioralModel,
    BehaviorEdge,
    DisconnectedRegionError,
    DynamicModel,
    EdgeKind,
    EmptyRegionError,
    Event,
    Guard,
    GuardKind,
    ModelError,
    Region,
    RegionModelMismatchError,
    StaticModel,
    Thimac,
    UnknownNodeError,
    induced_region,
    static_connectivity,
)


def _internal_arcs(model, nodes):
    # oracle: plain enumeration, independent of the region code
    return {a.id for a in model.arcs if a.source in nodes and a.target in nodes}


def test_region_keypad_digit_path(model):
    nodes = {"keypad.create_digit", "keypad.release_digit", "keypad.transfer_out"}
    region = induced_region(model, nodes)
    assert region.node_ids == frozenset(nodes)
    assert region.arc_ids == _internal_arcs(model, nodes)
    assert len(region.arc_ids) == 2


def test_singleton_region():
    model = _two_machine_model()
    region = induced_region(model, {"a.create_x"})
    assert len(region.node_ids) == 1 and not region.arc_ids


def test_disconnected_region_rejected(model):
    with pytest.raises(DisconnectedRegionError):
        induced_region(model, {"beep.create_once", "stay.create_light"})


def test_empty_and_unknown_region(model):
    with pytest.raises(EmptyRegionError):
        induced_region(model, [])
    with pytest.raises(UnknownNodeError):
        induced_region(model, {"nowhere.create_x"})


def test_hand_built_region_must_match_model(model):
    bogus = Region(frozenset({"keypad.create_digit", "keypad.release_digit"}), frozenset())
    with pytest.raises(RegionModelMismatchError):
        static_connectivity(model, bogus, bogus)


def test_connectivity_compare_to_beep_once(model, dyn):
    expected = {
        a.id
        for a in model.arcs
        if a.source == "comparison.process_compare" and a.target == "beep.create_once"
    }
    assert len(expected) == 1
    arc = model.arcs_by_id[next(iter(expected))]
    assert arc.kind is ArcKind.TRIGGER and arc.guard.predicate is GuardKind.NE
    assert static_connectivity(model, dyn.event("E10").region, dyn.event("E14").region) == expected


def test_connectivity_region_to_itself_is_empty(model, dyn):
    for ev in dyn.events:
        assert static_connectivity(model, ev.region, ev.region) == set()


def test_connectivity_unlinked_regions(model, dyn):
    assert static_connectivity(model, dyn.event("E14").region, dyn.event("E21").region) == set()


def test_top_level_thimacs(model):
    names = [th.name for th in model.top_level()]
    assert names == ["screen", "keypad", "stay", "away", "beep", "sensor regions", "comparison process"]


def test_node_order_is_depth_first(model):
    order = list(model.nodes)
    ids = [nid for th in model.root.walk() for nid in th.action_node_ids]
    assert order == ids


def test_hierarchy_is_a_tree(model):
    parent = {}
    for th in model.root.walk():
        for child in th.children:
            assert child.id not in parent, "single-valued parent"
            parent[child.id] = th.id
    for tid in parent:
        seen, cur = set(), tid
        while cur in parent:
            assert cur not in seen
            seen.add(cur)
            cur = parent[cur]
        assert cur == model.root.id


def _two_machine_model():
    a = Thimac("a", "a", (), ("a.create_x", "a.release_x"))
    b = Thimac("b", "b", (), ("b.create_y",))
    root = Thimac("", "m", (a, b))
    nodes = {
        "a.create_x": ActionNode("a.create_x", "a", ActionKind.CREATE, "x"),
        "a.release_x": ActionNode("a.release_x", "a", ActionKind.RELEASE, "x"),
        "b.create_y": ActionNode("b.create_y", "b", ActionKind.CREATE, "y"),
    }
    arcs = (
        Arc("a1", ArcKind.FLOW, "a.create_x", "a.release_x"),
        Arc("a2", ArcKind.TRIGGER, "a.release_x", "b.create_y"),
    )
    return StaticModel("m", root, nodes, arcs)


def test_static_model_rejects_bad_trees():
    a = Thimac("a", "a", (), ("a.create_x",))
    node = ActionNode("a.create_x", "a", ActionKind.CREATE, "x")
    with pytest.raises(ModelError):
        StaticModel("m", Thimac("", "m", (a, a)), {"a.create_x": node}, ())
    with pytest.raises(UnknownNodeError):
        StaticModel("m", Thimac("", "m", (a,)), {"a.create_x": node}, (Arc("a1", ArcKind.FLOW, "a.create_x", "zz"),))
    with pytest.raises(ModelError):
        StaticModel("m", Thimac("", "m", (a,)), {}, ())


def test_guard_and_node_invariants():
    with pytest.raises(ModelError):
        Guard(GuardKind.COUNT, n=0)
    with pytest.raises(ModelError):
        Guard(GuardKind.EQ)
    assert str(Guard(GuardKind.COUNT, n=4)) == "count 4"
    with pytest.raises(ModelError):
        ActionNode("a.release_x", "a", ActionKind.RELEASE, "x", literal=3)
    with pytest.raises(ModelError):
        ActionNode("a.process_x", "a", ActionKind.PROCESS, "x", times=2)


def test_dynamic_and_behavior_invariants():
    model = _two_machine_model()
    ev = Event("E1", "x made", induced_region(model, {"a.create_x"}))
    with pytest.raises(ModelError):
        DynamicModel("m", (ev, ev))
    dyn = DynamicModel("m", (ev,))
    with pytest.raises(ModelError):
        BehavioralModel(dyn, (BehaviorEdge("E1", "E9"),))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_region_induction_idempotent_and_connectivity_partition(model, dyn, data):
    events = dyn.events
    a = data.draw(st.sampled_from(events)).region
    b = data.draw(st.sampled_from(events)).region
    assert induced_region(model, a.node_ids) == a
    ab = static_connectivity(model, a, b)
    ba = static_connectivity(model, b, a)
    shared = a.arc_ids & b.arc_ids
    crossing = {
        arc.id
        for arc in model.arcs
        if arc.id not in shared
        and (
            (arc.source in a.node_ids and arc.target in b.node_ids)
            or (arc.source in b.node_ids and arc.target in a.node_ids)
        )
    }
    assert ab | ba == crossing
    # an arc can land in both directions only when its ends sit in the overlap
    for arc_id in ab & ba:
        arc = model.arcs_by_id[arc_id]
        assert {arc.source, arc.target} <= (a.node_ids & b.node_ids)


def test_edge_kinds():
    assert {k.value for k in EdgeKind} == {"derived", "declared"}
