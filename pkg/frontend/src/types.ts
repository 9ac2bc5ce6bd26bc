// Payload shapes of the HTTP API. The console holds no business logic:
// everything rendered comes straight from these responses.

export interface ParamSpec {
  name: string;
  ptype: string;
  required: boolean;
}

export interface GraphNode {
  node_id: string;
  name: string;
  ntype: string;
  role: string;
  inputs: ParamSpec[];
  outputs: ParamSpec[];
  raw_config: Record<string, unknown>;
}

export interface GraphEdge {
  source: string;
  target: string;
  source_port: number;
  target_port: number;
}

export interface WorkflowGraph {
  workflow_id: string;
  name: string;
  description: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface WorkflowSummary {
  workflow_id: string;
  name: string;
  description: string;
  node_count: number;
  edge_count: number;
}

export interface UploadResponse {
  workflow_id: string;
  status: "created" | "already_present";
  node_count: number;
  edge_count: number;
}

export interface SegmentFile {
  segment_id: string;
  name: string;
  description: string;
  source_workflow: { id: string; name: string; description: string };
  graph: {
    nodes: GraphNode[];
    edges: GraphEdge[];
    boundary_inputs: ParamSpec[];
    boundary_outputs: ParamSpec[];
  };
  synthetic: boolean;
}

export interface DecomposeResponse {
  decomposition: {
    workflow_id: string;
    segments: SegmentFile[];
    boundary_edges: GraphEdge[];
    node_to_segment: Record<string, string>;
  };
  report: {
    node_coverage: number;
    edge_validity: number;
    reconstructible: boolean;
    misallocated: string[];
  };
  stored_segment_ids: string[];
}

export interface ValidateResponse {
  valid: boolean;
  segment_id: string;
  reminted?: boolean;
  error?: string;
}

export interface SaveResponse {
  segment_id: string;
  reminted: boolean;
}

export interface PlanUnit {
  unit_id: number;
  title: string;
  description: string;
  depends_on: number[];
}

export interface Resolution {
  unit_id: number;
  route: "retrieved" | "generated";
  segment_id: string;
  segment_name: string;
  score: number | null;
  synthetic: boolean;
}

export interface ConstructResponse {
  plan: {
    requirement_text: string;
    units: PlanUnit[];
    context_workflow_ids: string[];
  };
  resolutions: Resolution[];
  graph: WorkflowGraph;
  connectors_inserted: number;
  deploy_doc: {
    filename: string;
    document: Record<string, unknown>;
  };
}

export interface ApiError {
  error: { code: string; message: string };
}

export function isApiError(body: unknown): body is ApiError {
  return (
    typeof body === "object" &&
    body !== null &&
    "error" in body &&
    typeof (body as ApiError).error?.code === "string"
  );
}
