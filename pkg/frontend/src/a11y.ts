// Screen-reader plumbing: one polite live region for feed arrivals and
// one assertive region for errors, both visually hidden.

let politeRegion: HTMLElement | null = null;
let assertiveRegion: HTMLElement | null = null;

function makeRegion(doc: Document, live: "polite" | "assertive"): HTMLElement {
  const el = doc.createElement("div");
  el.setAttribute("role", live === "polite" ? "status" : "alert");
  el.setAttribute("aria-live", live);
  el.style.position = "absolute";
  el.style.left = "-9999px";
  el.style.width = "1px";
  el.style.height = "1px";
  el.style.overflow = "hidden";
  doc.body.appendChild(el);
  return el;
}

export function installLiveRegions(doc: Document): void {
  if (!politeRegion) politeRegion = makeRegion(doc, "polite");
  if (!assertiveRegion) assertiveRegion = makeRegion(doc, "assertive");
}

export function resetLiveRegions(): void {
  politeRegion = null;
  assertiveRegion = null;
}

export function announce(text: string): void {
  if (politeRegion) politeRegion.textContent = text;
}

export function announceError(text: string): void {
  if (assertiveRegion) assertiveRegion.textContent = text;
}
