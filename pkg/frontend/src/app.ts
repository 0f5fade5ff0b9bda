/**
 * Chat client view: transcript, suggestion chips, save control, and a
 * live view of the growing workflow tree.
 *
 * Suggestions are advisory: clicking a chip only prefills the input
 * box, the user still decides whether to send it. The input is locked
 * while a turn is in flight because the server serializes turns within
 * a session anyway.
 */

import { ApiError, SessionApi, WorkflowStep } from "./api.js";

export class ChatApp {
  readonly input: HTMLTextAreaElement;
  readonly sendButton: HTMLButtonElement;
  readonly saveButton: HTMLButtonElement;
  readonly transcript: HTMLElement;
  readonly tree: HTMLElement;
  readonly banner: HTMLElement;
  readonly title: HTMLElement;

  sessionId: string | null = null;
  turnCount = 0;
  busy = false;

  constructor(
    readonly root: HTMLElement,
    readonly api: SessionApi,
    readonly crewId: string = "chemist",
  ) {
    const doc = root.ownerDocument;
    root.classList.add("wfmem");

    this.title = doc.createElement("header");
    this.title.className = "title";
    this.title.textContent = "Workflow Memory";

    this.transcript = doc.createElement("main");
    this.transcript.className = "transcript";

    this.banner = doc.createElement("div");
    this.banner.className = "banner hidden";

    this.input = doc.createElement("textarea");
    this.input.className = "instruction-input";
    this.input.rows = 2;
    this.input.placeholder = "Type an instruction for the crew";
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        void this.submitInstruction();
      }
    });

    this.sendButton = doc.createElement("button");
    this.sendButton.className = "send";
    this.sendButton.textContent = "Send";
    this.sendButton.addEventListener("click", () => {
      void this.submitInstruction();
    });

    this.saveButton = doc.createElement("button");
    this.saveButton.className = "save";
    this.saveButton.textContent = "Save workflow";
    this.saveButton.disabled = true;
    this.saveButton.addEventListener("click", () => {
      void this.saveWorkflow();
    });

    const controls = doc.createElement("div");
    controls.className = "controls";
    controls.append(this.input, this.sendButton, this.saveButton);

    this.tree = doc.createElement("aside");
    this.tree.className = "workflow-tree";
    this.renderTreePlaceholder();

    const layout = doc.createElement("div");
    layout.className = "layout";
    const chat = doc.createElement("section");
    chat.className = "chat";
    chat.append(this.transcript, this.banner, controls);
    layout.append(chat, this.tree);

    root.append(this.title, layout);
  }

  async start(): Promise<void> {
    const created = await this.api.createSession(this.crewId);
    this.sessionId = created.session_id;
    try {
      const crew = await this.api.getCrew(this.crewId);
      this.title.textContent = `Workflow Memory - ${crew.name}`;
    } catch {
      // a session without a pretty title is still usable
    }
    await this.refreshTree();
  }

  private doc(): Document {
    return this.root.ownerDocument;
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.input.disabled = busy;
    this.sendButton.disabled = busy;
  }

  async submitInstruction(): Promise<void> {
    if (this.busy || this.sessionId === null) {
      return;
    }
    const text = this.input.value.trim();
    if (!text) {
      return;
    }
    this.setBusy(true);
    this.hideBanner();
    try {
      const turn = await this.api.sendInstruction(this.sessionId, text);
      this.renderUserMessage(text);
      this.renderTurn(turn.response, turn.mode, turn.suggestions);
      this.input.value = "";
      this.turnCount += 1;
      this.saveButton.disabled = false;
      await this.refreshTree();
    } catch (error) {
      // the instruction stays in the input box so the user can retry
      this.renderError(describe(error));
    } finally {
      this.setBusy(false);
    }
  }

  async saveWorkflow(): Promise<void> {
    if (this.sessionId === null || this.turnCount === 0) {
      return;
    }
    try {
      const saved = await this.api.saveWorkflow(this.sessionId);
      this.showBanner(
        saved.duplicate
          ? `Already in memory as ${saved.record_id} (duplicate).`
          : `Saved to memory as ${saved.record_id}.`,
        false,
      );
    } catch (error) {
      this.showBanner(describe(error), true);
    }
  }

  async refreshTree(): Promise<void> {
    if (this.sessionId === null) {
      return;
    }
    const workflow = await this.api.getWorkflow(this.sessionId);
    this.tree.replaceChildren();
    const heading = this.doc().createElement("h2");
    heading.textContent = "Workflow so far";
    this.tree.append(heading);
    if (workflow.steps.length === 0) {
      this.renderTreePlaceholder(false);
      return;
    }
    this.tree.append(this.renderSteps(workflow.steps));
  }

  private renderTreePlaceholder(withHeading: boolean = true): void {
    const doc = this.doc();
    if (withHeading) {
      const heading = doc.createElement("h2");
      heading.textContent = "Workflow so far";
      this.tree.append(heading);
    }
    const empty = doc.createElement("p");
    empty.className = "tree-empty";
    empty.textContent = "No steps yet.";
    this.tree.append(empty);
  }

  private renderSteps(steps: WorkflowStep[]): HTMLUListElement {
    const doc = this.doc();
    const list = doc.createElement("ul");
    list.className = "step-list";
    for (const step of steps) {
      const item = doc.createElement("li");
      item.className = `step step-${step.kind}`;
      const label = doc.createElement("span");
      if (step.kind === "function-call") {
        label.textContent = `[call] ${step.name}`;
        label.title = step.output;
      } else {
        label.textContent = `[instruction] ${step.instruction}`;
      }
      item.append(label);
      if (step.sub_steps.length > 0) {
        item.append(this.renderSteps(step.sub_steps));
      }
      list.append(item);
    }
    return list;
  }

  private renderUserMessage(text: string): void {
    const doc = this.doc();
    const bubble = doc.createElement("div");
    bubble.className = "message user";
    bubble.textContent = text;
    this.transcript.append(bubble);
  }

  private renderTurn(response: string, mode: string, suggestions: string[]): void {
    const doc = this.doc();
    const wrapper = doc.createElement("div");
    wrapper.className = "message assistant";

    const badge = doc.createElement("span");
    badge.className = `badge mode-${mode}`;
    badge.textContent = mode;
    wrapper.append(badge);

    const body = doc.createElement("pre");
    body.className = "response";
    body.textContent = response;
    wrapper.append(body);

    if (suggestions.length > 0) {
      const chips = doc.createElement("div");
      chips.className = "chips";
      for (const suggestion of suggestions) {
        const chip = doc.createElement("button");
        chip.className = "chip";
        chip.textContent = suggestion;
        chip.addEventListener("click", () => {
          // prefill only; sending stays a human decision
          this.input.value = suggestion;
          this.input.focus();
        });
        chips.append(chip);
      }
      wrapper.append(chips);
    }
    this.transcript.append(wrapper);
  }

  private renderError(message: string): void {
    const error = this.doc().createElement("div");
    error.className = "message error";
    error.textContent = message;
    this.transcript.append(error);
  }

  private showBanner(message: string, isError: boolean): void {
    this.banner.textContent = message;
    this.banner.className = isError ? "banner error" : "banner";
  }

  private hideBanner(): void {
    this.banner.className = "banner hidden";
    this.banner.textContent = "";
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return error.message;
  }
  if (error instanceof Error) {
    return `Could not reach the server: ${error.message}`;
  }
  return "Something went wrong.";
}
