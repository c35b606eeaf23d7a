// Dismissible error banners carrying the ApiError code.

import { ApiError } from "./api.js";

export function showError(host: HTMLElement, err: unknown): void {
  const banner = document.createElement("div");
  banner.className = "banner";
  const label =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  const text = document.createElement("span");
  text.textContent = label;
  const dismiss = document.createElement("button");
  dismiss.className = "banner-dismiss";
  dismiss.textContent = "×";
  dismiss.addEventListener("click", () => banner.remove());
  banner.append(text, dismiss);
  host.prepend(banner);
}
