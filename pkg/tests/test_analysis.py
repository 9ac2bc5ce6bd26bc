"""Requirement splitting and task plan construction."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowforge.analysis import (
    StubAnalyzer,
    UnitDraft,
    analyze_requirement,
    split_requirement,
)
from flowforge.errors import AnalyzerViolation, EmptyRequirement
from flowforge.repository import Repository

from conftest import graph, node


def test_step_markers_split():
    plan = analyze_requirement(
        "Step 1: fetch the bill. Step 2: parse the PDF. Step 3: email a summary.")
    assert len(plan.units) == 3
    assert [u.depends_on for u in plan.units] == [(), (1,), (2,)]
    assert "fetch the bill" in plan.units[0].description
    assert "parse the PDF" in plan.units[1].description
    assert "email a summary" in plan.units[2].description


def test_blank_requirement_rejected():
    with pytest.raises(EmptyRequirement):
        analyze_requirement("   ")
    with pytest.raises(EmptyRequirement):
        analyze_requirement("")


def test_single_sentence_single_unit():
    plan = analyze_requirement("Send a daily report")
    assert len(plan.units) == 1
    assert plan.units[0].depends_on == ()
    assert plan.units[0].description == "Send a daily report"


def test_sentence_terminators_split():
    plan = analyze_requirement("Fetch the data. Clean it! Publish the result?")
    assert [u.description for u in plan.units] == [
        "Fetch the data.", "Clean it!", "Publish the result?"]


def test_bullet_lines_split():
    text = "- fetch the invoices\n- extract the totals\n- post to the ledger"
    plan = analyze_requirement(text)
    assert len(plan.units) == 3
    assert plan.units[2].description == "- post to the ledger"


def test_numbered_list_split():
    text = "1. pull the feed\n2. filter the entries\n3. send the digest"
    assert len(split_requirement(text)) == 3


def test_titles_are_first_six_words():
    plan = analyze_requirement(
        "translate every incoming support ticket into english and log it")
    assert plan.units[0].title == "translate every incoming support ticket into"


def test_unit_ids_are_ordinals():
    plan = analyze_requirement("One. Two. Three.")
    assert [u.unit_id for u in plan.units] == [1, 2, 3]


def test_dependency_relation_acyclic():
    plan = analyze_requirement("A. B. C. D.")
    seen = set()
    for u in plan.units:
        assert all(dep in seen for dep in u.depends_on)
        seen.add(u.unit_id)


@settings(max_examples=200)
@given(st.text(min_size=1, max_size=400))
def test_split_preserves_non_whitespace(text):
    pieces = split_requirement(text)
    kept = "".join("".join(p.split()) for p in pieces)
    expected = "".join(text.split())
    assert kept == expected


@settings(max_examples=100)
@given(st.text(min_size=1, max_size=200))
def test_stub_deterministic(text):
    assert split_requirement(text) == split_requirement(text)


def test_analyzer_violation_on_empty_units():
    class EmptyAnalyzer:
        def analyze(self, text, context):
            return [UnitDraft(title="", description="   ")]

    with pytest.raises(AnalyzerViolation):
        analyze_requirement("do something", analyzer=EmptyAnalyzer())


def test_analyzer_violation_on_forward_dependency():
    class ForwardAnalyzer:
        def analyze(self, text, context):
            return [
                UnitDraft(title="a", description="a", depends_on=(2,)),
                UnitDraft(title="b", description="b", depends_on=()),
            ]

    with pytest.raises(AnalyzerViolation):
        analyze_requirement("do something", analyzer=ForwardAnalyzer())


def test_analyzer_may_return_non_chain_dependencies():
    class FanAnalyzer:
        def analyze(self, text, context):
            return [
                UnitDraft(title="root", description="root"),
                UnitDraft(title="left", description="left", depends_on=(1,)),
                UnitDraft(title="right", description="right", depends_on=(1,)),
            ]

    plan = analyze_requirement("whatever", analyzer=FanAnalyzer())
    assert [u.depends_on for u in plan.units] == [(), (1,), (1,)]


def test_context_workflows_recorded(tmp_path):
    repo = Repository(tmp_path / "repo")
    g = graph([node("A")], [], name="Billing",
              description="fetch the bill and email a summary")
    repo.store_workflow(g)
    plan = analyze_requirement("fetch the bill and email a summary", repo=repo)
    assert plan.context_workflow_ids == (g.workflow_id,)


def test_stub_ignores_context():
    stub = StubAnalyzer()
    with_ctx = stub.analyze("a. b.", [("wf", "desc", ("seg",))])
    without_ctx = stub.analyze("a. b.", [])
    assert with_ctx == without_ctx
