import { describe, expect, it } from "vitest";

import { Api, ApiError, TaskResponse } from "../src/api";
import { SessionError, UiSession } from "../src/session";

const RUBRIC = {
  sufficient_info: ["pass", "fail"],
  lo_alignment: ["aligned", "related_not_targeting", "unrelated"],
};

function taskResponse(mcqId: string): TaskResponse {
  return {
    task: {
      mcqId,
      loId: "lo-1",
      questionType: "recall",
      bloom: "remember",
      source: "generated",
      stem: "Pick one.",
      choices: [
        { option: "A", text: "a" },
        { option: "B", text: "b" },
        { option: "C", text: "c" },
      ],
      codeInStem: false,
      lints: [],
    },
    rubric: RUBRIC,
    progress: { totalMcqs: 2, annotatedByRater: 0, remainingForRater: 2, totalAnnotations: 0 },
  };
}

interface FakeCalls {
  answers: string[];
  rubrics: Record<string, string>[];
}

function fakeApi(overrides: Partial<Record<string, unknown>> = {}): { api: Api; calls: FakeCalls } {
  const calls: FakeCalls = { answers: [], rubrics: [] };
  const tasks = [taskResponse("m1"), taskResponse("m2"), null];
  let cursor = 0;
  const api = {
    nextTask: async () => tasks[Math.min(cursor++, tasks.length - 1)],
    submitAnswer: async (_mcqId: string, _raterId: string, option: string) => {
      calls.answers.push(option);
      return { correct: option === "A", key: "A", explanation: "because" };
    },
    submitRubric: async (
      _mcqId: string,
      _raterId: string,
      _raterRole: string,
      judgments: Record<string, string>,
    ) => {
      calls.rubrics.push(judgments);
      return {};
    },
    ...overrides,
  } as unknown as Api;
  return { api, calls };
}

function completeJudgments(session: UiSession): void {
  for (const [item, categories] of Object.entries(session.rubricItems)) {
    session.setJudgment(item, categories[0]);
  }
}

describe("UiSession", () => {
  it("walks answering -> judging -> next task -> done", async () => {
    const { api } = fakeApi();
    const session = new UiSession(api, "r", "student");
    await session.loadNext();
    expect(session.phase).toBe("answering");

    const reveal = await session.answer("A");
    expect(reveal.correct).toBe(true);
    expect(session.phase).toBe("judging");

    completeJudgments(session);
    await session.submit();
    expect(session.phase).toBe("answering");
    expect(session.current?.task.mcqId).toBe("m2");

    await session.answer("B");
    completeJudgments(session);
    await session.submit();
    expect(session.phase).toBe("done");
    expect(session.current).toBeNull();
  });

  it("blocks judgments and submission before an answer is recorded", async () => {
    const { api, calls } = fakeApi();
    const session = new UiSession(api, "r", "student");
    await session.loadNext();

    expect(() => session.setJudgment("sufficient_info", "pass")).toThrow(SessionError);
    await expect(session.submit()).rejects.toThrow(SessionError);
    expect(calls.rubrics).toEqual([]);
  });

  it("refuses to submit with missing judgments", async () => {
    const { api, calls } = fakeApi();
    const session = new UiSession(api, "r", "student");
    await session.loadNext();
    await session.answer("A");
    session.setJudgment("sufficient_info", "pass");
    await expect(session.submit()).rejects.toThrow(/missing judgments/);
    expect(calls.rubrics).toEqual([]);
    // entered state is retained for the retry
    expect(session.judgments.sufficient_info).toBe("pass");
  });

  it("rejects unknown rubric categories", async () => {
    const { api } = fakeApi();
    const session = new UiSession(api, "r", "student");
    await session.loadNext();
    await session.answer("A");
    expect(() => session.setJudgment("sufficient_info", "shiny")).toThrow(SessionError);
  });

  it("treats a 409 on submit as already-stored and advances", async () => {
    const { api } = fakeApi({
      submitRubric: async () => {
        throw new ApiError(409, "already annotated");
      },
    });
    const session = new UiSession(api, "r", "student");
    await session.loadNext();
    await session.answer("A");
    completeJudgments(session);
    await session.submit(); // does not throw
    expect(session.current?.task.mcqId).toBe("m2");
  });

  it("surfaces non-409 errors and keeps the session state", async () => {
    const { api } = fakeApi({
      submitRubric: async () => {
        throw new ApiError(412, "answer first");
      },
    });
    const session = new UiSession(api, "r", "student");
    await session.loadNext();
    await session.answer("A");
    completeJudgments(session);
    await expect(session.submit()).rejects.toThrow(/answer first/);
    expect(session.phase).toBe("judging");
    expect(Object.keys(session.judgments).length).toBe(2);
  });
});
