import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import corpus_text
from tmkit.core import BehaviorEdge, DynamicModel, EdgeKind
from tmkit.dynamics import (
    DeclaredWithoutWhyError,
    UnknownEventError,
    compose_behavioral_model,
    derive_behavior_edges,
    parse_behavior,
    read_behavior_header,
    serialize_behavior,
    view_integration_pairs,
)
from tmkit.validate import validate_behavior


def oracle_edges(model, dyn):
    """Brute force over raw node sets: an arc from A into B that is not inside A∩B."""
    out = []
    for a, b in itertools.permutations(dyn.events, 2):
        shared = a.region.node_ids & b.region.node_ids
        for arc in model.arcs:
            inside_overlap = arc.source in shared and arc.target in shared
            if arc.source in a.region.node_ids and arc.target in b.region.node_ids and not inside_overlap:
                out.append((a.id, b.id))
                break
    return out


def test_derived_edges_match_oracle(model, dyn):
    derived = derive_behavior_edges(model, dyn)
    assert [(e.source, e.target) for e in derived] == oracle_edges(model, dyn)
    assert all(e.kind is EdgeKind.DERIVED and e.source != e.target for e in derived)


def test_corpus_derived_edges_include_narrated_pairs(model, dyn):
    pairs = {(e.source, e.target) for e in derive_behavior_edges(model, dyn)}
    assert {("E9", "E10"), ("E10", "E11"), ("E10", "E12"), ("E12", "E13"), ("E12", "E14")} <= pairs


def test_derived_edges_are_grounded(model, dyn):
    beh = compose_behavioral_model(dyn, derive_behavior_edges(model, dyn))
    assert "BEHAVIOR_UNGROUNDED" not in validate_behavior(model, dyn, beh).rules()


def test_empty_dynamic_model(model):
    assert derive_behavior_edges(model, DynamicModel(model.name)) == []


def test_compose_declared_only(dyn):
    beh = compose_behavioral_model(dyn, declared=[("E2", "E3", "homeowner keys next digit")])
    assert beh.edges == (BehaviorEdge("E2", "E3", EdgeKind.DECLARED, "homeowner keys next digit"),)


def test_compose_derived_wins(dyn):
    beh = compose_behavioral_model(dyn, derived=[("E9", "E10")], declared=[("E9", "E10", "also noted")])
    assert beh.edges == (BehaviorEdge("E9", "E10", EdgeKind.DERIVED),)


def test_compose_rejects_bad_input(dyn):
    with pytest.raises(DeclaredWithoutWhyError):
        compose_behavioral_model(dyn, declared=[("E2", "E3")])
    with pytest.raises(DeclaredWithoutWhyError):
        compose_behavioral_model(dyn, declared=[("E2", "E3", "   ")])
    with pytest.raises(UnknownEventError):
        compose_behavioral_model(dyn, derived=[("E2", "E25")])
    with pytest.raises(UnknownEventError):
        compose_behavioral_model(dyn, initial=["E25"])


def test_compose_is_order_insensitive(model, dyn, declared):
    derived = derive_behavior_edges(model, dyn)
    decl = list(declared.edges) + [BehaviorEdge("E2", "E3", EdgeKind.DECLARED, "a different note")]
    expected = compose_behavioral_model(dyn, derived, decl, declared.initial)
    rng = random.Random(7)
    for _ in range(20):
        d, c = derived[:], decl[:]
        rng.shuffle(d)
        rng.shuffle(c)
        assert compose_behavioral_model(dyn, d, c, declared.initial) == expected


def test_frozen_behavior_is_derived_plus_declared(model, dyn, beh, declared):
    derived = {(e.source, e.target) for e in derive_behavior_edges(model, dyn)}
    documented = {(e.source, e.target) for e in declared.edges}
    assert beh.edge_set() == derived | documented
    assert {(e.source, e.target) for e in beh.edges if e.kind is EdgeKind.DERIVED} == derived
    assert all(e.why for e in beh.edges if e.kind is EdgeKind.DECLARED)
    assert validate_behavior(model, dyn, beh).passes


def test_declared_edges_name_the_homeowner_for_keystrokes(declared):
    keyed = [e for e in declared.edges if (e.source, e.target) in {("E2", "E3"), ("E4", "E5"), ("E6", "E7")}]
    assert len(keyed) == 3
    assert all("homeowner" in e.why for e in keyed)


def test_behavior_file_round_trip(dyn, beh):
    text = corpus_text("safehome.tmb")
    assert serialize_behavior(beh, "safehome.tm", "safehome.tme") == text
    assert read_behavior_header(text) == {"model": "safehome.tm", "events": "safehome.tme"}
    assert parse_behavior(serialize_behavior(beh), dyn) == beh


@pytest.mark.parametrize("n,expected", [(0, 0), (1, 0), (2, 1), (14, 91)])
def test_view_integration_pairs(n, expected):
    assert view_integration_pairs(n) == expected


def test_view_integration_pairs_difference():
    for n in range(1, 101):
        assert view_integration_pairs(n) - view_integration_pairs(n - 1) == n - 1
        assert view_integration_pairs(n) == len(list(itertools.combinations(range(n), 2)))
    with pytest.raises(ValueError):
        view_integration_pairs(-1)


@given(st.integers(1, 10_000))
def test_view_integration_pairs_property(n):
    assert view_integration_pairs(n) - view_integration_pairs(n - 1) == n - 1
