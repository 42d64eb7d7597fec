from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alice.clustering import Cluster
from alice.errors import AssignmentOverflow, RedactionError
from alice.fabric import FabricImpl
from alice.hdl import Design, build_instance_tree, emit_verilog, parse_design
from alice.rewriter import GpioAssignment, GpioPin, generate_efpga_wrapper, insertion_point, redact_design
from alice.selection import Solution
from builders import check_redaction

LEAF = "module leaf(input clk, input [7:0] d, output reg [7:0] q); always @(posedge clk) q <= d + 8'd1; endmodule\n"

SINGLE = LEAF + """
module top(input clk, input [7:0] a, output [7:0] y);
  leaf u1 (.clk(clk), .d(a), .q(y));
endmodule
"""

SPLIT = LEAF + """
module ha(input clk, input [7:0] i, output [7:0] o); leaf x (.clk(clk), .d(i), .q(o)); endmodule
module hb(input clk, input [7:0] i, output [7:0] o); leaf y (.clk(clk), .d(i), .q(o)); endmodule
module top(input clk, input [7:0] din, output [7:0] z);
  wire [7:0] m;
  ha a (.clk(clk), .i(din), .o(m));
  hb b (.clk(clk), .i(m), .o(z));
endmodule
"""

SHARED = LEAF + """
module mid(input clk, input [7:0] i, output [7:0] o); leaf l (.clk(clk), .d(i), .q(o)); endmodule
module top(input clk, input [7:0] a, output [7:0] z);
  wire [7:0] m;
  mid m1 (.clk(clk), .i(a), .o(m));
  mid m2 (.clk(clk), .i(m), .o(z));
endmodule
"""


def fabric(members, pins=17, w=2):
    return FabricImpl(Cluster(frozenset(members), pins), w, pins, 16 * w, 1, w * w)


def redact(src, *groups):
    design = parse_design(src, top="top")
    tree = build_instance_tree(design)
    solution = Solution(tuple(fabric(g, pins=17 * len(g), w=2 * len(g)) for g in groups))
    out = redact_design(design, solution, tree)
    check_redaction(design, tree, solution, out)
    return design, tree, out


def test_insertion_point():
    assert insertion_point({"top.a.x", "top.b.y"}) == "top"
    assert insertion_point({"top.a.x", "top.a.y"}) == "top.a"
    assert insertion_point({"top.a.x.p", "top.a.y"}) == "top.a"
    assert insertion_point({"top.u1"}) == "top"
    assert insertion_point(Cluster(frozenset({"top.a.x"}), 0)) == "top.a"
    with pytest.raises(RedactionError):
        insertion_point({"top"})


def _assignment(n_in, n_out):
    return GpioAssignment(
        tuple(GpioPin(f"s{i}", "gpio_in", i) for i in range(n_in)),
        tuple(GpioPin(f"t{i}", "gpio_out", i) for i in range(n_out)),
    )


def test_wrapper_ports():
    stub = generate_efpga_wrapper(fabric({"top.u"}, pins=32, w=4), _assignment(20, 12), fid=3)
    assert stub.name == "efpga_4x4_3"
    assert [(p.name, p.direction, p.width) for p in stub.ports] == [
        ("gpio_in", "input", 20),
        ("gpio_out", "output", 12),
        ("cfg_clk", "input", 1),
        ("cfg_en", "input", 1),
        ("cfg_in", "input", 1),
        ("cfg_out", "output", 1),
    ]
    text = emit_verilog(Design({stub.name: stub}, stub.name))
    assert parse_design(text)[stub.name] == stub


def test_wrapper_overflow():
    with pytest.raises(AssignmentOverflow):
        generate_efpga_wrapper(fabric({"top.u"}, pins=64, w=4), _assignment(40, 25))


def test_single_instance():
    _, _, out = redact(SINGLE, {"top.u1"})
    top = out.design["top"]
    assert [i.name for i in top.instances] == ["alice_efpga_0"]
    assert "leaf" not in out.design.modules
    entry = out.manifest["0"]
    assert entry["module"] == "efpga_2x2_0" and entry["insertion_point"] == "top"
    assert (entry["gpio_in"], entry["gpio_out"]) == (9, 8)
    assert entry["pins"]["top.u1.clk"] == "gpio_in[0]"
    assert entry["pins"]["top.u1.q[7]"] == "gpio_out[7]"
    assert json.loads(out.manifest_json()) == out.manifest
    assert list(out.stub_verilog()) == ["efpga_0_stub.v"]
    assert "efpga_2x2_0" not in out.top_verilog().split("module top")[0]


def test_cross_hierarchy_routing():
    _, _, out = redact(SPLIT, {"top.a.x", "top.b.y"})
    assert out.manifest["0"]["insertion_point"] == "top"
    ha = out.design["ha"]
    routed = [p.name for p in ha.ports if p.name.startswith("alice_r0_")]
    assert sorted(routed) == ["alice_r0_a_x_clk", "alice_r0_a_x_d", "alice_r0_a_x_q"]
    assert ha.instances == ()


def test_shared_definition_is_cloned():
    _, _, out = redact(SHARED, {"top.m1.l"})
    tree = build_instance_tree(out.design)
    assert tree.module_of("top.m1") == "alice_mid_0"
    assert tree.module_of("top.m2") == "mid"
    assert tree.module_of("top.m2.l") == "leaf"
    assert out.manifest["0"]["insertion_point"] == "top.m1"
    # config chain reaches the clone through its own ports
    assert {p.name for p in out.design["alice_mid_0"].ports} >= {"alice_c0_clk", "alice_c0_in", "alice_c0_out"}


def test_two_fabrics_share_the_chain():
    _, _, out = redact(SHARED, {"top.m1.l"}, {"top.m2.l"})
    assert len(out.manifest) == 2
    assert out.design["top"].net("alice_cfg_link1") is not None
    assert "mid" not in out.design.modules and "leaf" not in out.design.modules


def test_config_port_collision():
    src = LEAF + "module top(input clk, input cfg_in, input [7:0] a, output [7:0] y); leaf u1 (.clk(clk), .d(a), .q(y)); endmodule"
    design = parse_design(src, top="top")
    with pytest.raises(RedactionError):
        redact_design(design, Solution((fabric({"top.u1"}),)), build_instance_tree(design))


def test_inout_member_rejected():
    src = "module io(inout p); endmodule\nmodule top(inout q); io u (.p(q)); endmodule"
    design = parse_design(src, top="top")
    with pytest.raises(RedactionError):
        redact_design(design, Solution((fabric({"top.u"}, pins=1),)), build_instance_tree(design))


def test_toy_gcd_solutions(gcd_design, gcd_tree):
    groups = [
        {"gcd_top.u_dp.u_reg_a"},
        {"gcd_top.u_dp.u_reg_a", "gcd_top.u_dp.u_reg_b"},
        {"gcd_top.u_ctrl", "gcd_top.u_dp.u_mux_b"},
        {"gcd_top.u_dp"},
        {"gcd_top.u_status", "gcd_top.u_dp.u_zero"},
    ]
    for g in groups:
        sol = Solution((fabric(g, pins=200, w=13),))
        check_redaction(gcd_design, gcd_tree, sol, redact_design(gcd_design, sol, gcd_tree))


@settings(max_examples=25, deadline=None)
@given(st.sets(st.sampled_from(["top.m1.l", "top.m2.l", "top.m1", "top.m2"]), min_size=1))
def test_redaction_is_deterministic(picked):
    picked = {p for p in picked if not any(p.startswith(q + ".") for q in picked)}
    design = parse_design(SHARED, top="top")
    tree = build_instance_tree(design)
    sol = Solution(tuple(fabric({p}, pins=40, w=3) for p in sorted(picked)))
    first = redact_design(design, sol, tree)
    check_redaction(design, tree, sol, first)
    second = redact_design(design, sol, tree)
    assert first.top_verilog() == second.top_verilog()
    assert first.manifest == second.manifest
