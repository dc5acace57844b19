// Annotation session state machine. The rubric phase is reachable only
// after the answer POST has returned; submitting judgments in any other
// phase is a programming error surfaced loudly. The server enforces the
// same protocol (412), so the client block is belt and braces.

import { Api, AnswerReveal, ApiError, TaskResponse } from "./api";

export type Phase = "answering" | "judging" | "done";

export class SessionError extends Error {}

export class UiSession {
  phase: Phase = "answering";
  current: TaskResponse | null = null;
  reveal: AnswerReveal | null = null;
  judgments: Record<string, string> = {};

  constructor(
    readonly api: Api,
    readonly raterId: string,
    readonly raterRole: string,
  ) {}

  get rubricItems(): Record<string, string[]> {
    return this.current?.rubric ?? {};
  }

  async loadNext(): Promise<void> {
    const next = await this.api.nextTask(this.raterId);
    this.reveal = null;
    this.judgments = {};
    if (next === null) {
      this.current = null;
      this.phase = "done";
    } else {
      this.current = next;
      this.phase = "answering";
    }
  }

  async answer(option: string): Promise<AnswerReveal> {
    if (this.phase !== "answering" || !this.current) {
      throw new SessionError(`cannot answer in phase ${this.phase}`);
    }
    this.reveal = await this.api.submitAnswer(this.current.task.mcqId, this.raterId, option);
    this.phase = "judging";
    return this.reveal;
  }

  setJudgment(item: string, category: string): void {
    if (this.phase !== "judging") {
      throw new SessionError("rubric judgments are only accepted after answering");
    }
    const categories = this.rubricItems[item];
    if (!categories || !categories.includes(category)) {
      throw new SessionError(`unknown rubric entry ${item}=${category}`);
    }
    this.judgments[item] = category;
  }

  get missingItems(): string[] {
    return Object.keys(this.rubricItems).filter((item) => !(item in this.judgments));
  }

  async submit(): Promise<void> {
    if (this.phase !== "judging" || !this.current) {
      throw new SessionError("nothing to submit before answering");
    }
    if (this.missingItems.length > 0) {
      throw new SessionError(`missing judgments: ${this.missingItems.join(", ")}`);
    }
    try {
      await this.api.submitRubric(
        this.current.task.mcqId,
        this.raterId,
        this.raterRole,
        this.judgments,
      );
    } catch (error) {
      // A 409 means a previous attempt already landed (e.g. the response to
      // it was lost): the annotation exists, so advancing is the idempotent
      // thing to do.
      if (!(error instanceof ApiError) || error.status !== 409) throw error;
    }
    await this.loadNext();
  }
}
