// Layered left-to-right layout. Mirrors the server's canvas rule: strongly
// connected components collapse to one supernode, layers are longest-path
// indices, members of a layer stack vertically in node-id order.

import type { WorkflowGraph } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
  layer: number;
}

export const LAYER_WIDTH = 220;
export const ROW_HEIGHT = 96;

function stronglyConnectedComponents(graph: WorkflowGraph): Map<string, number> {
  const ids = graph.nodes.map((n) => n.node_id);
  const adjacency = new Map<string, string[]>(ids.map((id) => [id, []]));
  for (const edge of graph.edges) {
    adjacency.get(edge.source)?.push(edge.target);
  }

  const indexOf = new Map<string, number>();
  const lowlink = new Map<string, number>();
  const onStack = new Set<string>();
  const stack: string[] = [];
  const components: string[][] = [];
  let counter = 0;

  // iterative Tarjan: [node, child cursor]
  for (const root of ids) {
    if (indexOf.has(root)) continue;
    const work: [string, number][] = [[root, 0]];
    while (work.length > 0) {
      const frame = work[work.length - 1];
      const [node, cursor] = frame;
      if (cursor === 0) {
        indexOf.set(node, counter);
        lowlink.set(node, counter);
        counter += 1;
        stack.push(node);
        onStack.add(node);
      }
      const children = adjacency.get(node) ?? [];
      let advanced = false;
      let i = cursor;
      while (i < children.length) {
        const child = children[i];
        i += 1;
        if (!indexOf.has(child)) {
          frame[1] = i;
          work.push([child, 0]);
          advanced = true;
          break;
        }
        if (onStack.has(child)) {
          lowlink.set(node, Math.min(lowlink.get(node)!, indexOf.get(child)!));
        }
      }
      if (advanced) continue;
      work.pop();
      if (lowlink.get(node) === indexOf.get(node)) {
        const component: string[] = [];
        for (;;) {
          const popped = stack.pop()!;
          onStack.delete(popped);
          component.push(popped);
          if (popped === node) break;
        }
        components.push(component.sort());
      }
      if (work.length > 0) {
        const parent = work[work.length - 1][0];
        lowlink.set(parent, Math.min(lowlink.get(parent)!, lowlink.get(node)!));
      }
    }
  }

  components.sort((a, b) => (a[0] < b[0] ? -1 : 1));
  const supernodeOf = new Map<string, number>();
  components.forEach((members, index) => {
    for (const member of members) supernodeOf.set(member, index);
  });
  return supernodeOf;
}

export function layerAssignment(graph: WorkflowGraph): Map<string, number> {
  const supernodeOf = stronglyConnectedComponents(graph);
  const supernodeCount = new Set(supernodeOf.values()).size;
  const predecessors = new Map<number, Set<number>>();
  const successors = new Map<number, Set<number>>();
  for (const edge of graph.edges) {
    const a = supernodeOf.get(edge.source)!;
    const b = supernodeOf.get(edge.target)!;
    if (a === b) continue;
    if (!successors.has(a)) successors.set(a, new Set());
    if (!predecessors.has(b)) predecessors.set(b, new Set());
    successors.get(a)!.add(b);
    predecessors.get(b)!.add(a);
  }

  const indegree = new Map<number, number>();
  for (let s = 0; s < supernodeCount; s += 1) {
    indegree.set(s, predecessors.get(s)?.size ?? 0);
  }
  const ready = [...indegree.entries()].filter(([, d]) => d === 0).map(([s]) => s).sort((a, b) => a - b);
  const layer = new Map<number, number>();
  const order: number[] = [];
  while (ready.length > 0) {
    const current = ready.shift()!;
    order.push(current);
    const preds = predecessors.get(current);
    let value = 0;
    if (preds) {
      for (const p of preds) value = Math.max(value, (layer.get(p) ?? 0) + 1);
    }
    layer.set(current, value);
    for (const next of [...(successors.get(current) ?? [])].sort((a, b) => a - b)) {
      indegree.set(next, indegree.get(next)! - 1);
      if (indegree.get(next) === 0) ready.push(next);
    }
  }

  const result = new Map<string, number>();
  for (const node of graph.nodes) {
    result.set(node.node_id, layer.get(supernodeOf.get(node.node_id)!) ?? 0);
  }
  return result;
}

export function computeLayout(graph: WorkflowGraph): Map<string, NodePosition> {
  const layers = layerAssignment(graph);
  const byLayer = new Map<number, string[]>();
  for (const node of graph.nodes) {
    const l = layers.get(node.node_id)!;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(node.node_id);
  }
  const positions = new Map<string, NodePosition>();
  for (const [l, members] of byLayer) {
    members.sort();
    members.forEach((id, row) => {
      positions.set(id, { x: l * LAYER_WIDTH, y: row * ROW_HEIGHT, layer: l });
    });
  }
  return positions;
}

export function columnCount(graph: WorkflowGraph): number {
  if (graph.nodes.length === 0) return 0;
  return new Set(layerAssignment(graph).values()).size;
}
