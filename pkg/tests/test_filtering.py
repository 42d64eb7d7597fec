from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alice.dataflow import build_dataflow_graph
from alice.errors import EmptyCandidateSet, UnknownOutput
from alice.filtering import rank_and_select, score_instances, structural_filter
from alice.hdl import build_instance_tree, parse_design
from alice.params import FlowParams, SelectPolicy

TWO_OUTPUTS = """
module blk(input [3:0] i, output [3:0] o); assign o = ~i; endmodule
module t(input [3:0] x, output [3:0] o1, output [3:0] o2, output [3:0] o3);
  wire [3:0] a_o, b_o;
  blk A (.i(x), .o(a_o));
  blk B (.i(x), .o(b_o));
  blk C (.i(x), .o(o3));
  assign o1 = a_o;
  assign o2 = a_o ^ b_o;
endmodule
"""


@pytest.fixture(scope="module")
def small():
    design = parse_design(TWO_OUTPUTS, top="t")
    tree = build_instance_tree(design)
    return design, tree, build_dataflow_graph(design, tree)


def test_scores_count_outputs(small):
    _, _, graph = small
    assert score_instances(graph, ["o1", "o2"]) == {"t.A": 2, "t.B": 1, "t.C": 0}


def test_no_outputs_all_zero(small):
    _, _, graph = small
    assert set(score_instances(graph, []).values()) == {0}


def test_unknown_output_propagates(small):
    with pytest.raises(UnknownOutput):
        score_instances(small[2], ["o9"])


@given(st.permutations(["o1", "o2", "o3"]))
def test_scores_permutation_invariant(small, outputs):
    assert score_instances(small[2], outputs) == {"t.A": 2, "t.B": 1, "t.C": 1}


def test_scores_monotone_in_outputs(small):
    graph = small[2]
    sub = rank_and_select(score_instances(graph, ["o1"]))
    full = rank_and_select(score_instances(graph, ["o1", "o2", "o3"]))
    assert sub <= full


def test_toy_gcd_scores(gcd_graph):
    scores = score_instances(gcd_graph, ["result"])
    assert scores.pop("gcd_top.u_status") == 0
    assert set(scores.values()) == {1}


def test_rank_and_select():
    scores = {"A": 2, "B": 1, "C": 0}
    assert rank_and_select(scores, SelectPolicy()) == {"A", "B"}
    assert rank_and_select(scores, SelectPolicy("top_k", 1)) == {"A"}
    assert rank_and_select({"A": 1, "B": 1}, SelectPolicy("top_k", 1)) == {"A", "B"}
    assert rank_and_select(scores, SelectPolicy("top_k", 5)) == {"A", "B"}


def _params(max_io):
    return FlowParams(max_io=max_io, max_efpgas=1)


def test_structural_filter_boundary():
    src = """
    module w66(input [65:0] d); endmodule
    module w64(input [63:0] d); endmodule
    module t(input [65:0] x); w66 big (.d(x)); w64 fit (.d(x[63:0])); endmodule
    """
    design = parse_design(src, top="t")
    tree = build_instance_tree(design)
    assert structural_filter({"t.big", "t.fit"}, design, tree, _params(64)) == {"t.fit"}
    with pytest.raises(EmptyCandidateSet, match="already exceeds the maximum I/O size"):
        structural_filter({"t.big"}, design, tree, _params(64))


def test_structural_filter_keeps_hierarchy(gcd_design, gcd_tree):
    kept = structural_filter({"gcd_top.u_dp", "gcd_top.u_dp.u_sub"}, gcd_design, gcd_tree, _params(40))
    assert kept == {"gcd_top.u_dp", "gcd_top.u_dp.u_sub"}
