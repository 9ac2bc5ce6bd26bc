// Contract: decompose populates the segment editors from the response.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SegmentPanel } from "../src/segmentPanel.js";
import type { DecomposeResponse, UploadResponse } from "../src/types.js";
import { fixture, flushTasks, mount, replayFetch } from "./helpers.js";

const upload = fixture<UploadResponse>("upload_response.json");
const decomposeResponse = fixture<DecomposeResponse>("decompose_response.json");

describe("decompose and list", () => {
  it("populates one editor card per segment (fan-out fixture: three)", async () => {
    const fetchImpl = replayFetch({
      [`POST /workflows/${upload.workflow_id}/decompose`]: { body: decomposeResponse },
    });
    const panel = new SegmentPanel(mount(), new ApiClient("", fetchImpl));
    panel.bindWorkflow(upload.workflow_id);
    panel.decomposeButton.click();
    await flushTasks();

    const cards = panel.root.querySelectorAll(".segment-card");
    expect(decomposeResponse.decomposition.segments).toHaveLength(3);
    expect(cards).toHaveLength(3);

    // editors carry the raw material for curation: graph JSON + description
    const first = cards[0];
    const graphText = first.querySelector<HTMLTextAreaElement>(".graph-editor")!.value;
    const descText = first.querySelector<HTMLTextAreaElement>(".description-editor")!.value;
    expect(JSON.parse(graphText)).toEqual(decomposeResponse.decomposition.segments[0].graph);
    expect(descText).toBe(decomposeResponse.decomposition.segments[0].description);

    const summary = panel.root.querySelector("#decompose-summary")!.textContent!;
    expect(summary).toContain("3 segments");
    expect(summary).toContain("reconstructible true");
  });

  it("surfaces API error codes verbatim", async () => {
    const fetchImpl = replayFetch({
      ["POST /workflows/ffffffffffffffff/decompose"]: {
        status: 404,
        body: fixture("error_not_found.json"),
      },
    });
    const panel = new SegmentPanel(mount(), new ApiClient("", fetchImpl));
    panel.bindWorkflow("ffffffffffffffff");
    panel.decomposeButton.click();
    await flushTasks();
    const summary = panel.root.querySelector("#decompose-summary")!;
    expect(summary.textContent).toContain("NotFound");
    expect(summary.classList.contains("error")).toBe(true);
  });

  it("renders each segment's topology in its card", async () => {
    const fetchImpl = replayFetch({
      [`POST /workflows/${upload.workflow_id}/decompose`]: { body: decomposeResponse },
    });
    const panel = new SegmentPanel(mount(), new ApiClient("", fetchImpl));
    await panel.decompose(upload.workflow_id);
    await flushTasks();
    const canvases = panel.root.querySelectorAll(".segment-canvas");
    expect(canvases).toHaveLength(3);
    for (const [i, canvas] of [...canvases].entries()) {
      const boxes = canvas.querySelectorAll("g.workflow-node");
      expect(boxes).toHaveLength(decomposeResponse.decomposition.segments[i].graph.nodes.length);
    }
  });
});
