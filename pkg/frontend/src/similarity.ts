// Similarity screen: neighbor list with score badges, a threshold slider,
// per-row label buttons and a calibrate action. Every score comes from the
// backend; the only local math is re-badging rows against tau, which keeps
// the slider responsive without re-querying (ordering never depends on tau).

import { NeighborsResponse, SimLabel, SimloopClient } from "./api.js";
import { showError } from "./banner.js";

export class SimilarityScreen {
  data: NeighborsResponse | null = null;
  tau: number | null = null;
  lastAction: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    private client: SimloopClient,
    private pointId: string,
    private sessionId: string,
    private k = 10,
  ) {}

  async mount(): Promise<void> {
    this.data = await this.client.neighbors(this.pointId, this.k);
    this.tau = this.data.threshold;
    this.render();
  }

  private track(work: () => Promise<void>): void {
    this.lastAction = work().catch((err) => showError(this.root, err));
  }

  /** Re-badge all rows against the current tau; purely local. */
  rebadge(): void {
    for (const row of this.root.querySelectorAll<HTMLTableRowElement>("tr[data-score]")) {
      const badge = row.querySelector<HTMLElement>(".badge");
      if (!badge) continue;
      if (this.tau === null) {
        badge.textContent = "-";
        badge.className = "badge";
        continue;
      }
      const similar = Number(row.dataset.score) >= this.tau;
      badge.textContent = similar ? "similar" : "not similar";
      badge.className = `badge ${similar ? "similar" : "not-similar"}`;
    }
    const label = this.root.querySelector<HTMLElement>("#tau-value");
    if (label) {
      label.textContent = this.tau === null ? "unset" : this.tau.toFixed(3);
    }
  }

  sliderMoved(value: number): void {
    this.tau = value;
    this.rebadge();
  }

  sliderCommitted(value: number): void {
    this.track(async () => {
      const result = await this.client.putThreshold(value);
      this.tau = result.tau;
      this.rebadge();
    });
  }

  label(neighborId: string, which: SimLabel): void {
    this.track(async () => {
      const view = await this.client.addLabel(this.sessionId, this.pointId, neighborId, which);
      // reflect only what the server confirmed
      const mark = this.root.querySelector<HTMLElement>(
        `tr[data-neighbor="${neighborId}"] .chosen-label`,
      );
      const stored = view.pair_labels.find(
        (l) =>
          (l.a === this.pointId && l.b === neighborId) ||
          (l.b === this.pointId && l.a === neighborId),
      );
      if (mark && stored) mark.textContent = `labeled: ${stored.label}`;
    });
  }

  calibrate(): void {
    this.track(async () => {
      const result = await this.client.calibrate(this.sessionId);
      this.tau = result.tau;
      const slider = this.root.querySelector<HTMLInputElement>("#tau-slider");
      if (slider) slider.value = String(result.tau);
      const out = this.root.querySelector<HTMLElement>("#calibration-result");
      if (out && result.calibration_stats) {
        out.textContent =
          `calibrated tau=${result.tau.toFixed(4)} ` +
          `J=${result.calibration_stats.j.toFixed(4)}`;
      }
      this.rebadge();
    });
  }

  render(): void {
    const data = this.data;
    if (!data) return;
    this.root.innerHTML = "";

    const title = document.createElement("h2");
    title.textContent = `Neighbors of ${data.point_id}`;

    const sliderRow = document.createElement("div");
    sliderRow.className = "controls";
    const slider = document.createElement("input");
    slider.type = "range";
    slider.id = "tau-slider";
    slider.min = "-1";
    slider.max = "1";
    slider.step = "0.01";
    slider.value = String(this.tau ?? 0);
    slider.addEventListener("input", () => this.sliderMoved(Number(slider.value)));
    slider.addEventListener("change", () => this.sliderCommitted(Number(slider.value)));
    const tauLabel = document.createElement("span");
    tauLabel.id = "tau-value";
    tauLabel.textContent = this.tau === null ? "unset" : this.tau.toFixed(3);
    const calibrateBtn = document.createElement("button");
    calibrateBtn.id = "calibrate";
    calibrateBtn.textContent = "Calibrate";
    calibrateBtn.addEventListener("click", () => this.calibrate());
    const calibration = document.createElement("span");
    calibration.id = "calibration-result";
    sliderRow.append("tau ", slider, tauLabel, calibrateBtn, calibration);

    const table = document.createElement("table");
    table.id = "neighbors";
    const head = table.createTHead().insertRow();
    for (const caption of ["rank", "id", "score", "badge", "label", ""]) {
      const cell = document.createElement("th");
      cell.textContent = caption;
      head.append(cell);
    }
    const body = table.createTBody();
    for (const row of data.neighbors) {
      const tr = body.insertRow();
      tr.dataset.score = String(row.score);
      tr.dataset.neighbor = row.id;
      tr.insertCell().textContent = String(row.rank);
      tr.insertCell().textContent = row.id;
      tr.insertCell().textContent = row.score.toFixed(4);
      const badgeCell = tr.insertCell();
      const badge = document.createElement("span");
      badge.className = "badge";
      badgeCell.append(badge);
      const labelCell = tr.insertCell();
      for (const which of ["similar", "not_similar"] as const) {
        const btn = document.createElement("button");
        btn.className = `label-${which}`;
        btn.textContent = which === "similar" ? "similar" : "not similar";
        btn.addEventListener("click", () => this.label(row.id, which));
        labelCell.append(btn);
      }
      const chosen = tr.insertCell();
      chosen.className = "chosen-label";
    }

    this.root.append(title, sliderRow, table);
    this.rebadge();
  }
}

export async function renderSimilarityScreen(
  root: HTMLElement,
  client: SimloopClient,
  pointId: string,
  sessionId: string,
  k = 10,
): Promise<SimilarityScreen> {
  const screen = new SimilarityScreen(root, client, pointId, sessionId, k);
  await screen.mount();
  return screen;
}
