// Interactive node-link rendering of a workflow graph into an SVG element.

import { computeLayout, LAYER_WIDTH, ROW_HEIGHT } from "./layout.js";
import type { WorkflowGraph } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_WIDTH = 170;
const NODE_HEIGHT = 56;
const PADDING = 24;

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

export function renderWorkflowGraph(container: HTMLElement, graph: WorkflowGraph | null): void {
  container.textContent = "";
  if (graph === null || !Array.isArray(graph.nodes) || !Array.isArray(graph.edges)) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = "Cannot render workflow: malformed graph payload";
    container.appendChild(banner);
    return;
  }
  if (graph.nodes.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-state";
    empty.textContent = "No nodes: upload or select a workflow to preview it";
    container.appendChild(empty);
    return;
  }

  let positions;
  try {
    positions = computeLayout(graph);
  } catch {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = "Cannot render workflow: layout failed";
    container.appendChild(banner);
    return;
  }

  const maxX = Math.max(...[...positions.values()].map((p) => p.x));
  const maxY = Math.max(...[...positions.values()].map((p) => p.y));
  const svg = svgElement("svg", {
    class: "workflow-canvas",
    viewBox: `0 0 ${maxX + NODE_WIDTH + 2 * PADDING} ${maxY + NODE_HEIGHT + 2 * PADDING}`,
    width: String(Math.min(maxX + NODE_WIDTH + 2 * PADDING, 1100)),
  });

  const defs = svgElement("defs", {});
  const marker = svgElement("marker", {
    id: "arrowhead",
    markerWidth: "8",
    markerHeight: "8",
    refX: "7",
    refY: "3",
    orient: "auto",
  });
  marker.appendChild(svgElement("path", { d: "M0,0 L7,3 L0,6 Z", fill: "#4b5563" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const edge of graph.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    const line = svgElement("line", {
      class: "workflow-edge",
      x1: String(from.x + NODE_WIDTH + PADDING),
      y1: String(from.y + NODE_HEIGHT / 2 + PADDING),
      x2: String(to.x + PADDING),
      y2: String(to.y + NODE_HEIGHT / 2 + PADDING),
      stroke: "#4b5563",
      "stroke-width": "1.5",
      "marker-end": "url(#arrowhead)",
    });
    line.dataset.source = edge.source;
    line.dataset.target = edge.target;
    svg.appendChild(line);
  }

  for (const node of graph.nodes) {
    const pos = positions.get(node.node_id)!;
    const group = svgElement("g", {
      class: `workflow-node role-${node.role}`,
      transform: `translate(${pos.x + PADDING}, ${pos.y + PADDING})`,
    });
    group.dataset.nodeId = node.node_id;
    group.dataset.layer = String(pos.layer);
    group.appendChild(svgElement("rect", {
      width: String(NODE_WIDTH),
      height: String(NODE_HEIGHT),
      rx: "8",
      fill: node.role === "trigger" ? "#ecfdf5" : node.role === "connector" ? "#fef3c7" : "#eff6ff",
      stroke: "#1f2937",
    }));
    const label = svgElement("text", { x: "10", y: "22", class: "node-name" });
    label.textContent = node.name || node.node_id;
    const typeLabel = svgElement("text", { x: "10", y: "42", class: "node-type" });
    typeLabel.setAttribute("fill", "#6b7280");
    typeLabel.setAttribute("font-size", "11");
    typeLabel.textContent = node.ntype;
    group.appendChild(label);
    group.appendChild(typeLabel);

    const title = svgElement("title", {});
    title.textContent = [
      `${node.name} (${node.ntype})`,
      `inputs: ${node.inputs.map((p) => p.name).join(", ") || "none"}`,
      `outputs: ${node.outputs.map((p) => p.name).join(", ") || "none"}`,
    ].join("\n");
    group.appendChild(title);
    svg.appendChild(group);
  }

  container.appendChild(svg);
}

export { LAYER_WIDTH, ROW_HEIGHT };
