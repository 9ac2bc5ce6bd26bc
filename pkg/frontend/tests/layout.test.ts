// Rendering contract: layered columns, node boxes, arrows, edge cases.

import { describe, expect, it } from "vitest";

import { columnCount, computeLayout } from "../src/layout.js";
import { renderWorkflowGraph } from "../src/graphView.js";
import type { WorkflowGraph } from "../src/types.js";
import { mount } from "./helpers.js";

function node(id: string, role = "function"): WorkflowGraph["nodes"][number] {
  return { node_id: id, name: id, ntype: `t.${id}`, role, inputs: [], outputs: [], raw_config: {} };
}

function graph(nodes: string[], edges: [string, string][]): WorkflowGraph {
  return {
    workflow_id: "w",
    name: "w",
    description: "",
    nodes: nodes.map((n) => node(n)),
    edges: edges.map(([source, target]) => ({ source, target, source_port: 0, target_port: 0 })),
  };
}

describe("layered layout", () => {
  it("lays a diamond out in three columns", () => {
    const diamond = graph(["A", "B", "C", "D"], [["A", "B"], ["A", "C"], ["B", "D"], ["C", "D"]]);
    expect(columnCount(diamond)).toBe(3);
    const positions = computeLayout(diamond);
    expect(positions.get("A")!.layer).toBe(0);
    expect(positions.get("B")!.layer).toBe(1);
    expect(positions.get("C")!.layer).toBe(1);
    expect(positions.get("D")!.layer).toBe(2);
    // same layer stacks vertically in id order
    expect(positions.get("B")!.y).toBeLessThan(positions.get("C")!.y);
  });

  it("collapses cycles onto one column", () => {
    const loop = graph(["A", "B", "C"], [["A", "B"], ["B", "A"], ["B", "C"]]);
    const positions = computeLayout(loop);
    expect(positions.get("A")!.layer).toBe(positions.get("B")!.layer);
    expect(positions.get("C")!.layer).toBe(1);
  });
});

describe("renderWorkflowGraph", () => {
  it("renders two boxes and one arrow for a two-node chain", () => {
    const root = mount();
    renderWorkflowGraph(root, graph(["A", "B"], [["A", "B"]]));
    expect(root.querySelectorAll("g.workflow-node")).toHaveLength(2);
    expect(root.querySelectorAll("line.workflow-edge")).toHaveLength(1);
  });

  it("labels nodes with name and type", () => {
    const root = mount();
    renderWorkflowGraph(root, graph(["A"], []));
    const labels = [...root.querySelectorAll("g.workflow-node text")].map((t) => t.textContent);
    expect(labels).toContain("A");
    expect(labels).toContain("t.A");
  });

  it("shows an empty state for a graph without nodes", () => {
    const root = mount();
    renderWorkflowGraph(root, graph([], []));
    expect(root.querySelector(".empty-state")).not.toBeNull();
    expect(root.querySelector("svg")).toBeNull();
  });

  it("shows an error banner on malformed payloads", () => {
    const root = mount();
    renderWorkflowGraph(root, { nodes: "nope" } as unknown as WorkflowGraph);
    expect(root.querySelector(".error-banner")).not.toBeNull();
  });
});
