import { afterAll, beforeAll, beforeEach, describe, expect, test, vi } from "vitest";

import { SessionApi } from "../src/api.js";
import { ChatApp } from "../src/app.js";
import {
  CREW_RESULT_TEXT,
  FixtureServer,
  SCENARIO_A_RESPONSE,
  SCENARIO_A_SUGGESTIONS,
} from "./fixture-server.js";

const server = new FixtureServer();

beforeAll(async () => {
  await server.start();
});

afterAll(async () => {
  await server.stop();
});

let app: ChatApp;

beforeEach(async () => {
  server.reset();
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  app = new ChatApp(root, new SessionApi(server.baseUrl));
  await app.start();
});

async function submit(text: string): Promise<void> {
  app.input.value = text;
  await app.submitInstruction();
}

describe("scenario A loop", () => {
  test("renders the crew result and clickable chips matching the API suggestions", async () => {
    await submit("Extract all ingredients of sample.sds");

    const responseBlock = document.querySelector(".message.assistant .response")!;
    expect(responseBlock.textContent).toBe(SCENARIO_A_RESPONSE);
    expect(responseBlock.textContent!.startsWith(CREW_RESULT_TEXT)).toBe(true);

    const chips = [...document.querySelectorAll(".chip")];
    expect(chips.map((chip) => chip.textContent)).toEqual(SCENARIO_A_SUGGESTIONS);
    expect(chips.some((chip) => chip.textContent!.includes("PFAS"))).toBe(true);
    expect(document.querySelector(".badge")!.textContent).toBe("memory");
  });

  test("clicking a chip populates the input without submitting", async () => {
    await submit("Extract all ingredients of sample.sds");
    const requestsBefore = server.requests.length;

    const chip = document.querySelector<HTMLButtonElement>(".chip")!;
    chip.click();

    expect(app.input.value).toBe(SCENARIO_A_SUGGESTIONS[0]);
    // no instruction request went out; the user still has to press send
    expect(server.requests.length).toBe(requestsBefore);
    expect(document.querySelectorAll(".message.user").length).toBe(1);
  });

  test("save renders the returned record id, then the duplicate notice", async () => {
    await submit("Extract all ingredients of sample.sds");

    await app.saveWorkflow();
    expect(app.banner.textContent).toContain("rec-000014");
    expect(app.banner.classList.contains("hidden")).toBe(false);

    await app.saveWorkflow();
    expect(app.banner.textContent).toContain("duplicate");
  });
});

describe("fallback and errors", () => {
  test("fallback turn shows a fallback badge", async () => {
    await submit("What is perfluorooctanoic acid?");
    const badge = document.querySelector(".badge")!;
    expect(badge.textContent).toBe("fallback");
    expect(badge.classList.contains("mode-fallback")).toBe(true);
  });

  test("server failure renders inline and preserves the input", async () => {
    await submit("Extract all ingredients of sample.sds");
    const turnsBefore = document.querySelectorAll(".message.assistant").length;

    await submit("boom");

    expect(document.querySelector(".message.error")!.textContent).toContain("crew exploded");
    expect(document.querySelectorAll(".message.assistant").length).toBe(turnsBefore);
    expect(app.input.value).toBe("boom");
  });

  test("input locks while a turn is in flight", async () => {
    app.input.value = "Extract all ingredients of sample.sds";
    const inflight = app.submitInstruction();
    expect(app.input.disabled).toBe(true);
    expect(app.sendButton.disabled).toBe(true);
    await inflight;
    expect(app.input.disabled).toBe(false);
  });

  test("enter submits, shift+enter stays in the editor", async () => {
    app.input.value = "Extract all ingredients of sample.sds";
    app.input.dispatchEvent(
      new KeyboardEvent("keydown", { key: "Enter", shiftKey: true, cancelable: true }),
    );
    expect(document.querySelectorAll(".message.user").length).toBe(0);

    app.input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", cancelable: true }));
    await vi.waitFor(() =>
      expect(document.querySelectorAll(".message.user").length).toBe(1),
    );
  });
});

describe("save control", () => {
  test("disabled on a fresh session, enabled after the first turn", async () => {
    expect(app.saveButton.disabled).toBe(true);
    await submit("Extract all ingredients of sample.sds");
    expect(app.saveButton.disabled).toBe(false);
  });
});

describe("workflow tree", () => {
  test("fresh session shows the empty state", () => {
    expect(app.tree.textContent).toContain("No steps yet.");
  });

  test("two turns produce two top-level nodes with nested calls indented", async () => {
    await submit("Extract all ingredients of sample.sds");
    await submit("What is perfluorooctanoic acid?");

    const topLevel = app.tree.querySelectorAll(":scope > ul > li");
    expect(topLevel.length).toBe(2);

    const nested = topLevel[0]!.querySelectorAll("ul > li");
    expect(nested.length).toBe(1);
    expect(nested[0]!.textContent).toContain("[call] sds_extract");
    expect(topLevel[1]!.textContent).toContain("[instruction] What is perfluorooctanoic acid?");
  });
});
