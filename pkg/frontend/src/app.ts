// Page bootstrap: wires the three panels to one API client.

import { ApiClient } from "./api.js";
import { ConstructPanel } from "./constructPanel.js";
import { SegmentPanel } from "./segmentPanel.js";
import { UploadPanel } from "./uploadPanel.js";

export function mountApp(root: HTMLElement, api: ApiClient): {
  upload: UploadPanel;
  segments: SegmentPanel;
  construct: ConstructPanel;
} {
  root.innerHTML = `
    <header><h1>flowforge console</h1><span id="health-line"></span></header>
    <main>
      <section id="upload-panel" class="panel"></section>
      <section id="segment-panel" class="panel"></section>
      <section id="construct-panel" class="panel"></section>
    </main>
  `;
  const upload = new UploadPanel(root.querySelector("#upload-panel")!, api);
  const segments = new SegmentPanel(root.querySelector("#segment-panel")!, api);
  const construct = new ConstructPanel(root.querySelector("#construct-panel")!, api);
  upload.onWorkflowSelected = (workflowId) => segments.bindWorkflow(workflowId);

  void api
    .health()
    .then((h) => {
      root.querySelector("#health-line")!.textContent =
        `connected · ${h.segment_count} segments`;
    })
    .catch(() => {
      root.querySelector("#health-line")!.textContent = "service unreachable";
    });

  return { upload, segments, construct };
}

declare global {
  interface Window {
    FLOWFORGE_BASE_URL?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!, new ApiClient(window.FLOWFORGE_BASE_URL ?? ""));
}
