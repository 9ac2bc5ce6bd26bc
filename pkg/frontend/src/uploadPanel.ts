// Upload workflow files, pick one, and preview it as a node-link graph.

import { ApiClient, ApiRequestError, LatestGate } from "./api.js";
import { renderWorkflowGraph } from "./graphView.js";
import type { WorkflowSummary } from "./types.js";

export class UploadPanel {
  readonly root: HTMLElement;
  private readonly picker: HTMLSelectElement;
  private readonly preview: HTMLElement;
  private readonly status: HTMLElement;
  private readonly previewGate = new LatestGate();
  onWorkflowSelected: (workflowId: string) => void = () => undefined;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.root = container;
    container.innerHTML = `
      <h2>Workflow Repository</h2>
      <div class="row">
        <label class="upload-button">
          Upload Workflow Files
          <input type="file" id="workflow-upload" multiple accept=".json,.yml,.yaml" hidden />
        </label>
        <select id="workflow-picker" aria-label="Stored workflows">
          <option value="">– select a workflow –</option>
        </select>
      </div>
      <div id="upload-status" class="status-line"></div>
      <h3>Workflow Preview</h3>
      <div id="workflow-preview" class="preview-pane"></div>
    `;
    this.picker = container.querySelector("#workflow-picker")!;
    this.preview = container.querySelector("#workflow-preview")!;
    this.status = container.querySelector("#upload-status")!;
    renderWorkflowGraph(this.preview, { workflow_id: "", name: "", description: "", nodes: [], edges: [] });

    const input = container.querySelector<HTMLInputElement>("#workflow-upload")!;
    input.addEventListener("change", () => {
      if (input.files) void this.uploadFiles([...input.files]);
    });
    this.picker.addEventListener("change", () => {
      if (this.picker.value) void this.showWorkflow(this.picker.value);
    });
  }

  async uploadFiles(files: { name: string; text(): Promise<string> }[]): Promise<string[]> {
    const uploaded: string[] = [];
    for (const file of files) {
      try {
        const body = await file.text();
        const result = await this.api.uploadWorkflow(file.name, body);
        uploaded.push(result.workflow_id);
        this.status.textContent = `${file.name}: ${result.status} (${result.node_count} nodes)`;
        this.status.classList.remove("error");
      } catch (err) {
        this.status.textContent =
          err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
        this.status.classList.add("error");
      }
    }
    await this.refreshList();
    if (uploaded.length > 0) {
      this.picker.value = uploaded[uploaded.length - 1];
      await this.showWorkflow(this.picker.value);
    }
    return uploaded;
  }

  async refreshList(): Promise<WorkflowSummary[]> {
    const workflows = await this.api.listWorkflows();
    const selected = this.picker.value;
    this.picker.innerHTML = `<option value="">– select a workflow –</option>`;
    for (const wf of workflows) {
      const option = document.createElement("option");
      option.value = wf.workflow_id;
      option.textContent = `${wf.name} (${wf.node_count} nodes)`;
      this.picker.appendChild(option);
    }
    this.picker.value = selected;
    return workflows;
  }

  async showWorkflow(workflowId: string): Promise<void> {
    const ticket = this.previewGate.next();
    try {
      const graph = await this.api.getWorkflow(workflowId);
      if (!this.previewGate.isCurrent(ticket)) return; // stale response
      renderWorkflowGraph(this.preview, graph);
      this.onWorkflowSelected(workflowId);
    } catch (err) {
      if (!this.previewGate.isCurrent(ticket)) return;
      renderWorkflowGraph(this.preview, null);
      this.status.textContent =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      this.status.classList.add("error");
    }
  }
}
