// Recording browser: date/time picker over GET /recordings. An empty
// window renders the gateway's literal "no activity found" message.

import { GatewayClient } from "./api.js";

export class RecordingsView {
  readonly dateInput: HTMLInputElement;
  readonly timeInput: HTMLInputElement;
  readonly windowInput: HTMLInputElement;
  private readonly searchButton: HTMLButtonElement;
  private readonly results: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {
    const doc = root.ownerDocument;
    const makeField = (label: string, type: string, value = ""): HTMLInputElement => {
      const wrap = doc.createElement("label");
      wrap.textContent = label;
      const input = doc.createElement("input");
      input.type = type;
      input.value = value;
      wrap.appendChild(input);
      this.root.appendChild(wrap);
      return input;
    };
    this.dateInput = makeField("Date (UTC)", "date");
    this.timeInput = makeField("Time (UTC)", "time");
    this.windowInput = makeField("Window (minutes)", "number", "60");

    this.searchButton = doc.createElement("button");
    this.searchButton.type = "button";
    this.searchButton.textContent = "Search recordings";
    this.searchButton.addEventListener("click", () => void this.search());

    this.results = doc.createElement("div");
    this.results.className = "recording-results";
    this.results.setAttribute("role", "status");

    root.append(this.searchButton, this.results);
  }

  async search(): Promise<void> {
    const doc = this.root.ownerDocument;
    this.results.textContent = "";
    let page;
    try {
      page = await this.client.recordings(
        this.dateInput.value,
        this.timeInput.value,
        Number(this.windowInput.value) || undefined,
      );
    } catch (err) {
      this.results.textContent = `Search failed: ${err instanceof Error ? err.message : err}`;
      return;
    }
    if (page.message) {
      this.results.textContent = page.message; // "no activity found"
      return;
    }
    const list = doc.createElement("ul");
    for (const segment of page.segments) {
      const li = doc.createElement("li");
      const from = new Date(segment.start_ms).toISOString();
      const to = new Date(segment.end_ms).toISOString();
      const text = doc.createElement("span");
      text.textContent = `${segment.camera}: ${from} to ${to}, ${segment.frame_count} frames`;
      li.appendChild(text);
      if (segment.snapshot) {
        const link = doc.createElement("a");
        link.href = this.client.mediaUrl(segment.snapshot);
        link.textContent = "snapshot";
        li.append(" ", link);
      }
      list.appendChild(li);
    }
    this.results.appendChild(list);
  }
}
