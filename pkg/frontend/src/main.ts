// Hash-routed single-page console: #/review/<session> and
// #/similarity/<point>/<session>, with a small landing page.

import { SimloopClient } from "./api.js";
import { showError } from "./banner.js";
import { renderReviewScreen } from "./review.js";
import { renderSimilarityScreen } from "./similarity.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8600";
}

async function renderLanding(root: HTMLElement, client: SimloopClient): Promise<void> {
  root.innerHTML = "";
  const title = document.createElement("h2");
  title.textContent = "simloop console";
  const info = document.createElement("p");
  try {
    const health = await client.health();
    info.textContent =
      `project ${health.project_id}: ${health.points} points` +
      (health.dim ? `, dim ${health.dim}` : "");
  } catch (err) {
    showError(root, err);
    info.textContent = "backend not reachable";
  }

  const form = document.createElement("div");
  form.className = "controls stacked";
  const pointsInput = document.createElement("textarea");
  pointsInput.id = "new-points";
  pointsInput.placeholder = "point ids, comma separated";
  const interestInput = document.createElement("input");
  interestInput.id = "new-interest";
  interestInput.placeholder = "interest, e.g. the functionality of the room";
  const createBtn = document.createElement("button");
  createBtn.textContent = "Start session";
  createBtn.addEventListener("click", async () => {
    try {
      const ids = pointsInput.value.split(",").map((s) => s.trim()).filter(Boolean);
      const view = await client.createSession(ids, interestInput.value);
      location.hash = `#/review/${view.session_id}`;
    } catch (err) {
      showError(root, err);
    }
  });

  const openInput = document.createElement("input");
  openInput.id = "open-session";
  openInput.placeholder = "existing session id";
  const openBtn = document.createElement("button");
  openBtn.textContent = "Open review";
  openBtn.addEventListener("click", () => {
    if (openInput.value) location.hash = `#/review/${openInput.value.trim()}`;
  });

  form.append(pointsInput, interestInput, createBtn, openInput, openBtn);
  root.append(title, info, form);
}

export async function route(root: HTMLElement): Promise<void> {
  const client = new SimloopClient(apiBase());
  const parts = location.hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  try {
    if (parts[0] === "review" && parts[1]) {
      const screen = await renderReviewScreen(root, client, parts[1]);
      const nav = document.createElement("p");
      nav.innerHTML = "";
      const hint = document.createElement("span");
      hint.textContent = "open neighbors: ";
      for (const pid of screen.view?.point_ids ?? []) {
        const link = document.createElement("a");
        link.href = `#/similarity/${pid}/${parts[1]}`;
        link.textContent = pid + " ";
        nav.append(link);
      }
      nav.prepend(hint);
      root.append(nav);
    } else if (parts[0] === "similarity" && parts[1] && parts[2]) {
      await renderSimilarityScreen(root, client, parts[1], parts[2]);
    } else {
      await renderLanding(root, client);
    }
  } catch (err) {
    showError(root, err);
  }
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const rerender = () => void route(root);
  window.addEventListener("hashchange", rerender);
  rerender();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
