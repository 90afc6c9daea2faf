// Typed client for the tutor's HTTP API.  Shapes here mirror the wire
// format exactly; nothing in the UI touches the server except through
// this module.

export type Mode = "demonstration" | "evaluation";
export type Verdict = "correct" | "incorrect" | "not_executed";

export interface ExerciseSummary {
  id: string;
  title: string;
  modes: Mode[];
}

export interface TraceStepWire {
  index: number;
  line: number;
  iteration: number[];
  env_after: Record<string, number | boolean>;
  next_line: number | null;
}

export interface TraceWire {
  columns: string[];
  terminated: "normal" | "step_limit";
  steps: TraceStepWire[];
}

export interface WorksheetLayoutWire {
  columns: string[];
  // line number (as string key) -> iteration vectors, in execution order
  line_iterations: Record<string, number[][]>;
}

export interface MediaWire {
  video: string | null;
  audio: Record<string, string | null>;
}

export interface DemoPayload {
  id: string;
  title: string;
  mode: "demonstration";
  assumptions: string;
  source: string;
  env: Record<string, number | boolean>;
  columns: string[];
  executable_lines: number[];
  trace: TraceWire;
  layout: WorksheetLayoutWire;
  media: MediaWire;
}

export interface EvalPayload {
  id: string;
  title: string;
  mode: "evaluation";
  assumptions: string;
  source: string;
  env: Record<string, number | boolean>;
  columns: string[];
  executable_lines: number[];
  first_line: number | null;
  max_steps: number;
}

export interface AnswerWire {
  ordinal: number;
  line: number;
  iteration_claimed: number[];
  entries: Record<string, string>;
}

export interface CellResultWire {
  variable: string;
  entered: string;
  expected: string | null;
  verdict: { kind: Verdict; expected_hidden: boolean };
}

export interface StepResultWire {
  index: number;
  truth_line: number | null;
  claimed_line: number | null;
  line_matched: boolean;
  cells: CellResultWire[];
}

export interface ResultWire {
  total_cells: number;
  correct_cells: number;
  path_matched_steps: number;
  truth_steps: number;
  score_percent: number;
  per_step: StepResultWire[];
}

export interface SessionWire {
  session_id: string;
  exercise_id: string;
  revision: number;
  cursor_line: number | null;
  iteration_indicator: number;
  open_entries: Record<string, Record<string, string>>;
  answers: AnswerWire[];
  can_submit: boolean;
  submitted: boolean;
  result?: ResultWire;
}

export interface UndoneWire {
  kind: "enter_line" | "make_loop";
  line: number | null;
  entries: Record<string, string> | null;
  target_line: number | null;
}

export interface SusResponsePayload {
  items: number[];
  mode: "narrated" | "evaluation";
  respondent: {
    academic_program: string;
    first_course: boolean;
    completed_courses: string;
    experience: number;
    comfort: number;
    attitude: number;
    course_attitude: number;
    used_internet: boolean;
    resources: string[];
  };
  tag?: string;
}

// Closed vocabularies for the survey's categorical fields, as the
// server validates them.
export const ACADEMIC_PROGRAMS = [
  "IT", "CS", "IS", "MathPhysSci", "LiberalArts", "BusinessEcon", "FineArts",
] as const;
export const COMPLETED_COURSES = ["0", "1", "2", "3", "4+"] as const;
export const SURVEY_MODES = ["narrated", "evaluation"] as const;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Fired after every successful request; used by tests to audit what the
 * browser ever saw. */
export type ResponseObserver = (path: string, body: unknown) => void;

export class ApiClient {
  onResponse: ResponseObserver | null = null;

  constructor(private readonly baseUrl: string = "") {}

  mediaUrl(ref: string): string {
    return `${this.baseUrl}/media/${ref}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    let decoded: unknown = null;
    try {
      decoded = await response.json();
    } catch {
      // fall through; non-JSON bodies only ever accompany errors
    }
    if (!response.ok) {
      const err = decoded as { code?: string; message?: string } | null;
      throw new ApiError(
        response.status,
        err?.code ?? "UnknownError",
        err?.message ?? `request failed with status ${response.status}`,
      );
    }
    if (this.onResponse) this.onResponse(path, decoded);
    return decoded as T;
  }

  // -- catalogue ----------------------------------------------------------

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/api/health");
  }

  async listExercises(): Promise<ExerciseSummary[]> {
    const body = await this.request<{ exercises: ExerciseSummary[] }>(
      "GET", "/api/exercises");
    return body.exercises;
  }

  demoPayload(exerciseId: string): Promise<DemoPayload> {
    return this.request("GET",
      `/api/exercises/${encodeURIComponent(exerciseId)}?mode=demonstration`);
  }

  evalPayload(exerciseId: string): Promise<EvalPayload> {
    return this.request("GET",
      `/api/exercises/${encodeURIComponent(exerciseId)}?mode=evaluation`);
  }

  // -- demonstration ------------------------------------------------------

  async check(exerciseId: string, line: number, iteration: number[],
              variable: string, entry: string): Promise<Verdict> {
    const body = await this.request<{ verdict: Verdict }>(
      "POST", `/api/exercises/${encodeURIComponent(exerciseId)}/check`,
      { line, iteration, variable, entry });
    return body.verdict;
  }

  async reveal(exerciseId: string, line: number,
               iteration: number[]): Promise<Record<string, string | null>> {
    const body = await this.request<{ values: Record<string, string | null> }>(
      "POST", `/api/exercises/${encodeURIComponent(exerciseId)}/reveal`,
      { line, iteration });
    return body.values;
  }

  // -- evaluation sessions ------------------------------------------------

  createSession(exerciseId: string): Promise<SessionWire> {
    return this.request("POST", "/api/sessions", { exercise_id: exerciseId });
  }

  getSession(sessionId: string): Promise<SessionWire> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  enterLine(sessionId: string, revision: number,
            entries: Record<string, string>): Promise<SessionWire> {
    return this.request("POST", `/api/sessions/${sessionId}/enter-line`,
      { revision, entries });
  }

  undo(sessionId: string, revision: number): Promise<SessionWire & { undone: UndoneWire }> {
    return this.request("POST", `/api/sessions/${sessionId}/undo`, { revision });
  }

  makeLoop(sessionId: string, revision: number,
           targetLine: number): Promise<SessionWire> {
    return this.request("POST", `/api/sessions/${sessionId}/make-loop`,
      { revision, target_line: targetLine });
  }

  canSubmit(sessionId: string): Promise<{ can_submit: boolean; submitted: boolean }> {
    return this.request("GET", `/api/sessions/${sessionId}/can-submit`);
  }

  submit(sessionId: string, revision: number,
         respondentTag?: string): Promise<SessionWire & { receipt: string }> {
    const body: Record<string, unknown> = { revision };
    if (respondentTag) body.respondent_tag = respondentTag;
    return this.request("POST", `/api/sessions/${sessionId}/submit`, body);
  }

  // -- usability survey ---------------------------------------------------

  async questionnaire(): Promise<string[]> {
    const body = await this.request<{ items: string[] }>(
      "GET", "/api/sus/questionnaire");
    return body.items;
  }

  submitSusResponse(payload: SusResponsePayload): Promise<{ score: number; rating: string }> {
    return this.request("POST", "/api/sus/responses", payload);
  }
}
