// Review screen: payload excerpts and latest tags side by side, with the
// refine/accept loop. Rendering always follows a confirmed server snapshot;
// nothing is drawn optimistically.

import { SessionView, SimloopClient } from "./api.js";
import { showError } from "./banner.js";

const EXCERPT_LENGTH = 100;

export class ReviewScreen {
  view: SessionView | null = null;
  lastAction: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    private client: SimloopClient,
    private sessionId: string,
  ) {}

  async mount(): Promise<void> {
    this.view = await this.client.getSession(this.sessionId);
    this.render();
  }

  private track(work: () => Promise<void>): void {
    // on failure the confirmed view is unchanged; keep the user's inputs
    // and surface the error on top
    this.lastAction = work().catch((err) => showError(this.root, err));
  }

  generate(): void {
    this.track(async () => {
      this.view = await this.client.generate(this.sessionId);
      this.render();
    });
  }

  refine(facetsText: string, feedback: string): void {
    // the editor holds the full facet list, so refinement replaces
    this.track(async () => {
      await this.client.review(this.sessionId, "refine", feedback, facetsText, "replace");
      this.view = await this.client.generate(this.sessionId);
      this.render();
    });
  }

  accept(feedback: string): void {
    this.track(async () => {
      this.view = await this.client.review(this.sessionId, "accept", feedback);
      this.render();
    });
  }

  private latestTags(pointId: string): string {
    const rounds = this.view?.rounds ?? [];
    if (!rounds.length) return "-";
    const profile = rounds[rounds.length - 1].profiles.find(
      (p) => p.point_id === pointId,
    );
    return profile ? profile.tags.join(", ") : "-";
  }

  render(): void {
    const view = this.view;
    if (!view) return;
    const accepted = view.state === "accepted";
    const generated = view.state === "generated";

    this.root.innerHTML = "";
    const header = document.createElement("div");
    header.className = "screen-header";
    const title = document.createElement("h2");
    title.textContent = `Session ${view.session_id}`;
    const badge = document.createElement("span");
    badge.className = `badge state-${view.state}`;
    badge.id = "state-badge";
    badge.textContent = view.state;
    header.append(title, badge);

    const interest = document.createElement("p");
    interest.id = "interest-line";
    interest.textContent =
      `Interest v${view.interest.version}: ` +
      (view.interest.facets.join(" and ") || "(no facets)");

    const table = document.createElement("table");
    table.id = "profiles";
    const head = table.createTHead().insertRow();
    for (const caption of ["point", "payload", "latest tags"]) {
      const cell = document.createElement("th");
      cell.textContent = caption;
      head.append(cell);
    }
    const body = table.createTBody();
    for (const pointId of view.point_ids) {
      const row = body.insertRow();
      row.dataset.pointId = pointId;
      row.insertCell().textContent = pointId;
      const payload = view.points[pointId] ?? "";
      row.insertCell().textContent =
        payload.length > EXCERPT_LENGTH
          ? payload.slice(0, EXCERPT_LENGTH) + "…"
          : payload;
      const tagCell = row.insertCell();
      tagCell.className = "tags";
      tagCell.textContent = this.latestTags(pointId);
    }

    const controls = document.createElement("div");
    controls.className = "controls";

    const generateBtn = document.createElement("button");
    generateBtn.id = "generate";
    generateBtn.textContent = "Generate";
    generateBtn.disabled = accepted || generated;
    generateBtn.addEventListener("click", () => this.generate());

    const facetsInput = document.createElement("input");
    facetsInput.id = "facets";
    facetsInput.value = view.interest.facets.join(", ");
    facetsInput.disabled = accepted;

    const feedbackInput = document.createElement("input");
    feedbackInput.id = "feedback";
    feedbackInput.placeholder = "feedback";
    feedbackInput.disabled = accepted;

    const refineBtn = document.createElement("button");
    refineBtn.id = "refine";
    refineBtn.textContent = "Refine + regenerate";
    refineBtn.disabled = !generated;
    refineBtn.addEventListener("click", () =>
      this.refine(facetsInput.value, feedbackInput.value),
    );

    const acceptBtn = document.createElement("button");
    acceptBtn.id = "accept";
    acceptBtn.textContent = "Accept";
    acceptBtn.disabled = !generated;
    acceptBtn.addEventListener("click", () => this.accept(feedbackInput.value));

    controls.append(generateBtn, facetsInput, feedbackInput, refineBtn, acceptBtn);
    this.root.append(header, interest, table, controls);
  }
}

export async function renderReviewScreen(
  root: HTMLElement,
  client: SimloopClient,
  sessionId: string,
): Promise<ReviewScreen> {
  const screen = new ReviewScreen(root, client, sessionId);
  await screen.mount();
  return screen;
}
