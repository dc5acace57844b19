// Typed client for the review service. The UI talks to the documented
// endpoints only and never computes statistics itself.

export interface Choice {
  option: string;
  text: string;
}

export interface LintFinding {
  code: string;
  severity: string;
  detail: string;
}

export interface TaskPayload {
  mcqId: string;
  loId: string;
  questionType: string;
  bloom: string;
  source: string;
  stem: string;
  choices: Choice[];
  codeInStem: boolean;
  lints: LintFinding[];
}

export interface Progress {
  totalMcqs: number;
  annotatedByRater: number;
  remainingForRater: number;
  totalAnnotations: number;
}

export interface TaskResponse {
  task: TaskPayload;
  rubric: Record<string, string[]>;
  progress: Progress;
}

export interface AnswerReveal {
  correct: boolean;
  key: string;
  explanation: string;
}

export interface ItemAgreement {
  fleissKappa: number;
  gwetAc1: number;
  nItems: number;
  nAnnotations: number;
}

export interface AgreementResponse {
  items: Record<string, ItemAgreement>;
  nAnnotations?: number;
}

export interface ItemComparison {
  countsA: Record<string, number>;
  countsB: Record<string, number>;
  pValue: number;
  method: string;
}

export interface ComparisonResponse {
  items: Record<string, ItemComparison>;
  poolSizeA?: number;
  poolSizeB?: number;
}

export interface VerdictResponse {
  mcqId: string;
  categories: Record<string, string>;
  resolutionRule: Record<string, string>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, detail);
}

export class Api {
  constructor(readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T | null> {
    const response = await fetch(this.baseUrl + path);
    if (response.status === 204) return null;
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  nextTask(raterId: string): Promise<TaskResponse | null> {
    return this.get<TaskResponse>(`/api/tasks?raterId=${encodeURIComponent(raterId)}`);
  }

  submitAnswer(mcqId: string, raterId: string, option: string): Promise<AnswerReveal> {
    return this.post<AnswerReveal>(`/api/tasks/${encodeURIComponent(mcqId)}/answer`, {
      raterId,
      option,
    });
  }

  submitRubric(
    mcqId: string,
    raterId: string,
    raterRole: string,
    judgments: Record<string, string>,
  ): Promise<Record<string, unknown>> {
    return this.post(`/api/tasks/${encodeURIComponent(mcqId)}/rubric`, {
      raterId,
      raterRole,
      judgments,
    });
  }

  agreement(): Promise<AgreementResponse> {
    return this.get<AgreementResponse>("/api/stats/agreement") as Promise<AgreementResponse>;
  }

  comparison(): Promise<ComparisonResponse> {
    return this.get<ComparisonResponse>("/api/stats/comparison") as Promise<ComparisonResponse>;
  }

  verdict(mcqId: string): Promise<VerdictResponse> {
    return this.get<VerdictResponse>(
      `/api/mcqs/${encodeURIComponent(mcqId)}/verdict`,
    ) as Promise<VerdictResponse>;
  }
}
