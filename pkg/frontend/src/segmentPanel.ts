// Decompose a workflow and curate its segments: edit the graph JSON and the
// function description, dry-run validate on the server, then commit.
//
// Validation is a server round-trip (PUT with validate_only): the console
// never re-implements segment rules. Save stays disabled until the current
// draft text has been validated unchanged.

import { ApiClient, ApiRequestError } from "./api.js";
import { renderWorkflowGraph } from "./graphView.js";
import type { SegmentFile } from "./types.js";

type ValidationState =
  | { kind: "unchecked" }
  | { kind: "valid"; segmentId: string; reminted: boolean }
  | { kind: "invalid"; reason: string };

export class SegmentDraft {
  dirty = false;
  validation: ValidationState = { kind: "unchecked" };

  constructor(
    public segmentId: string,
    public graphJsonText: string,
    public descriptionText: string,
  ) {}

  edit(graphJsonText: string, descriptionText: string): void {
    if (graphJsonText !== this.graphJsonText || descriptionText !== this.descriptionText) {
      this.graphJsonText = graphJsonText;
      this.descriptionText = descriptionText;
      this.dirty = true;
      this.validation = { kind: "unchecked" };
    }
  }

  get saveEnabled(): boolean {
    return this.validation.kind === "valid";
  }
}

export class SegmentPanel {
  readonly root: HTMLElement;
  private readonly list: HTMLElement;
  private readonly summary: HTMLElement;
  readonly drafts = new Map<string, SegmentDraft>();

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.root = container;
    container.innerHTML = `
      <h2>Segment Preview</h2>
      <div class="row">
        <button id="decompose-button" disabled>Decompose</button>
        <span id="decompose-summary" class="status-line"></span>
      </div>
      <div id="segment-list" class="segment-list"></div>
    `;
    this.list = container.querySelector("#segment-list")!;
    this.summary = container.querySelector("#decompose-summary")!;
  }

  get decomposeButton(): HTMLButtonElement {
    return this.root.querySelector("#decompose-button")!;
  }

  bindWorkflow(workflowId: string): void {
    const button = this.decomposeButton;
    button.disabled = false;
    button.onclick = () => void this.decompose(workflowId);
  }

  async decompose(workflowId: string): Promise<void> {
    try {
      const response = await this.api.decompose(workflowId);
      this.summary.textContent =
        `${response.decomposition.segments.length} segments · ` +
        `coverage ${response.report.node_coverage.toFixed(2)} · ` +
        `reconstructible ${response.report.reconstructible}`;
      this.summary.classList.remove("error");
      this.populate(response.decomposition.segments);
    } catch (err) {
      this.summary.textContent =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      this.summary.classList.add("error");
    }
  }

  populate(segments: SegmentFile[]): void {
    this.list.textContent = "";
    this.drafts.clear();
    for (const segment of segments) {
      this.list.appendChild(this.buildEditor(segment));
    }
  }

  private buildEditor(segment: SegmentFile): HTMLElement {
    const draft = new SegmentDraft(
      segment.segment_id,
      JSON.stringify(segment.graph, null, 2),
      segment.description,
    );
    this.drafts.set(segment.segment_id, draft);

    const card = document.createElement("div");
    card.className = "segment-card";
    card.dataset.segmentId = segment.segment_id;
    card.innerHTML = `
      <div class="segment-header">
        <code class="segment-id">${segment.segment_id}</code>
        <span class="segment-name">${segment.name}</span>
      </div>
      <label>Graph structure
        <textarea class="graph-editor" rows="8" spellcheck="false"></textarea>
      </label>
      <label>Function description
        <textarea class="description-editor" rows="2"></textarea>
      </label>
      <div class="row">
        <button class="visualize-button">Visualize Edited Segment</button>
        <button class="save-button" disabled>Save Segment</button>
        <span class="validation-state">unchecked</span>
      </div>
      <div class="segment-canvas"></div>
    `;
    const graphEditor = card.querySelector<HTMLTextAreaElement>(".graph-editor")!;
    const descEditor = card.querySelector<HTMLTextAreaElement>(".description-editor")!;
    const visualize = card.querySelector<HTMLButtonElement>(".visualize-button")!;
    const save = card.querySelector<HTMLButtonElement>(".save-button")!;
    const state = card.querySelector<HTMLElement>(".validation-state")!;
    const canvas = card.querySelector<HTMLElement>(".segment-canvas")!;
    graphEditor.value = draft.graphJsonText;
    descEditor.value = draft.descriptionText;

    const syncDraft = () => {
      draft.edit(graphEditor.value, descEditor.value);
      save.disabled = !draft.saveEnabled;
      state.textContent = draft.validation.kind;
    };
    graphEditor.addEventListener("input", syncDraft);
    descEditor.addEventListener("input", syncDraft);

    visualize.addEventListener("click", () => void this.validateDraft(draft, card));
    save.addEventListener("click", () => void this.saveDraft(draft, card));
    // render the incoming segment topology right away
    renderWorkflowGraph(canvas, {
      workflow_id: segment.segment_id,
      name: segment.name,
      description: segment.description,
      nodes: segment.graph.nodes,
      edges: segment.graph.edges,
    });
    return card;
  }

  async validateDraft(draft: SegmentDraft, card: HTMLElement): Promise<void> {
    const state = card.querySelector<HTMLElement>(".validation-state")!;
    const save = card.querySelector<HTMLButtonElement>(".save-button")!;
    const canvas = card.querySelector<HTMLElement>(".segment-canvas")!;
    let graph: unknown;
    try {
      graph = JSON.parse(draft.graphJsonText);
    } catch (err) {
      draft.validation = { kind: "invalid", reason: `graph JSON does not parse: ${err}` };
      state.textContent = `invalid: ${draft.validation.reason}`;
      save.disabled = true;
      return;
    }
    try {
      const result = await this.api.validateSegment(draft.segmentId, {
        description: draft.descriptionText,
        graph,
      });
      if (result.valid) {
        draft.validation = {
          kind: "valid",
          segmentId: result.segment_id,
          reminted: Boolean(result.reminted),
        };
        state.textContent = result.reminted
          ? `valid (will re-mint to ${result.segment_id})`
          : "valid";
        const parsed = graph as { nodes: never[]; edges: never[] };
        renderWorkflowGraph(canvas, {
          workflow_id: draft.segmentId,
          name: "",
          description: draft.descriptionText,
          nodes: parsed.nodes ?? [],
          edges: parsed.edges ?? [],
        });
      } else {
        draft.validation = { kind: "invalid", reason: result.error ?? "rejected" };
        state.textContent = `invalid: ${draft.validation.reason}`;
      }
    } catch (err) {
      const reason = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      draft.validation = { kind: "invalid", reason };
      state.textContent = `invalid: ${reason}`;
    }
    save.disabled = !draft.saveEnabled;
  }

  async saveDraft(draft: SegmentDraft, card: HTMLElement): Promise<void> {
    if (!draft.saveEnabled) return;
    const state = card.querySelector<HTMLElement>(".validation-state")!;
    try {
      const result = await this.api.saveSegment(draft.segmentId, {
        description: draft.descriptionText,
        graph: JSON.parse(draft.graphJsonText),
      });
      // the server may have re-minted the content-addressed id; re-key the
      // draft and re-render the header with the authoritative value
      this.drafts.delete(draft.segmentId);
      draft.segmentId = result.segment_id;
      draft.dirty = false;
      draft.validation = { kind: "unchecked" };
      this.drafts.set(draft.segmentId, draft);
      card.dataset.segmentId = result.segment_id;
      card.querySelector(".segment-id")!.textContent = result.segment_id;
      state.textContent = result.reminted ? `saved as ${result.segment_id}` : "saved";
      card.querySelector<HTMLButtonElement>(".save-button")!.disabled = true;
    } catch (err) {
      state.textContent =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
    }
  }
}
