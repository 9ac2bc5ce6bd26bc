// Requirement in, workflow out: the Task Plan panel lists analyzed units
// with their resolution badges, the Workflow JSON panel shows the deployable
// document with download and export actions.

import { ApiClient, ApiRequestError, LatestGate } from "./api.js";
import type { ConstructResponse } from "./types.js";

export function deployDocumentText(document: Record<string, unknown>): string {
  // canonical download serialization; must stay byte-stable for a given doc
  return JSON.stringify(document, null, 2);
}

export class ConstructPanel {
  readonly root: HTMLElement;
  private readonly input: HTMLTextAreaElement;
  private readonly inlineError: HTMLElement;
  private readonly planBody: HTMLElement;
  private readonly jsonView: HTMLElement;
  private readonly actions: HTMLElement;
  private readonly gate = new LatestGate();
  lastResponse: ConstructResponse | null = null;
  requestCount = 0;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.root = container;
    container.innerHTML = `
      <h2>Construct Workflow</h2>
      <label>Workflow Requirement
        <textarea id="requirement-input" rows="3"
          placeholder="Describe the workflow to build"></textarea>
      </label>
      <div id="requirement-error" class="status-line error" hidden></div>
      <div class="row">
        <button id="construct-button">Construct Workflow</button>
      </div>
      <h3>Task Plan</h3>
      <table class="task-plan">
        <thead><tr><th>#</th><th>Unit</th><th>Route</th><th>Segment</th></tr></thead>
        <tbody id="task-plan-body"></tbody>
      </table>
      <h3>Workflow JSON</h3>
      <pre id="workflow-json" class="json-view"></pre>
      <div class="row" id="construct-actions" hidden>
        <button id="download-button">Download JSON</button>
        <button id="export-button">Export Workflow to n8n</button>
        <span id="export-status" class="status-line"></span>
      </div>
    `;
    this.input = container.querySelector("#requirement-input")!;
    this.inlineError = container.querySelector("#requirement-error")!;
    this.planBody = container.querySelector("#task-plan-body")!;
    this.jsonView = container.querySelector("#workflow-json")!;
    this.actions = container.querySelector("#construct-actions")!;
    container
      .querySelector("#construct-button")!
      .addEventListener("click", () => void this.constructFlow(this.input.value));
    container
      .querySelector("#download-button")!
      .addEventListener("click", () => this.download());
    container
      .querySelector("#export-button")!
      .addEventListener("click", () => void this.exportToPlatform());
  }

  async constructFlow(requirement: string): Promise<void> {
    this.inlineError.hidden = true;
    if (!requirement.trim()) {
      // no request leaves the browser for an empty requirement
      this.inlineError.textContent = "Enter a requirement first";
      this.inlineError.hidden = false;
      return;
    }
    const ticket = this.gate.next();
    this.requestCount += 1;
    try {
      const response = await this.api.construct(requirement);
      if (!this.gate.isCurrent(ticket)) return; // stale
      this.lastResponse = response;
      this.renderPlan(response);
      this.jsonView.textContent = deployDocumentText(response.deploy_doc.document);
      this.actions.hidden = false;
    } catch (err) {
      if (!this.gate.isCurrent(ticket)) return;
      this.inlineError.textContent =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      this.inlineError.hidden = false;
    }
  }

  private renderPlan(response: ConstructResponse): void {
    this.planBody.textContent = "";
    const byUnit = new Map(response.resolutions.map((r) => [r.unit_id, r]));
    for (const unit of response.plan.units) {
      const resolution = byUnit.get(unit.unit_id);
      const row = document.createElement("tr");
      row.className = "plan-row";
      const badge = resolution
        ? resolution.route === "retrieved"
          ? `retrieved ${(resolution.score ?? 0).toFixed(3)}`
          : "generated"
        : "unresolved";
      row.innerHTML = `
        <td>${unit.unit_id}</td>
        <td>${unit.title}</td>
        <td><span class="route-badge route-${resolution?.route ?? "none"}">${badge}</span></td>
        <td><code>${resolution?.segment_id ?? ""}</code></td>
      `;
      this.planBody.appendChild(row);
    }
  }

  download(): void {
    if (!this.lastResponse) return;
    const text = deployDocumentText(this.lastResponse.deploy_doc.document);
    const blob = new Blob([text], { type: "application/json" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = this.lastResponse.deploy_doc.filename;
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }

  async exportToPlatform(): Promise<void> {
    const status = this.root.querySelector<HTMLElement>("#export-status")!;
    if (!this.lastResponse) return;
    // the service already returned a deploy-ready document; surface its
    // workflow name as confirmation (pushing into a live n8n instance is a
    // documented extension point on the server side)
    const doc = this.lastResponse.deploy_doc;
    status.textContent = `ready for n8n import: ${doc.filename}`;
  }
}
