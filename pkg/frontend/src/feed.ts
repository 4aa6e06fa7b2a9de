// Live notification feed: polls GET /events on a 2 s cursor loop,
// renders newest-first, and announces arrivals to screen readers. The
// rendered text is exactly the dispatched message so the image always
// travels with its transcript.

import { GatewayClient, GatewayEvent } from "./api.js";
import { announce } from "./a11y.js";

export const POLL_INTERVAL_MS = 2000;
export const PAGE_SIZE = 50;

export class FeedView {
  private items: GatewayEvent[] = []; // newest first
  private visible = PAGE_SIZE;
  private cursor: number | undefined;
  private timer: ReturnType<typeof setInterval> | undefined;
  private inflight: Promise<void> = Promise.resolve();
  private offline = false;

  private readonly banner: HTMLElement;
  private readonly list: HTMLUListElement;
  private readonly empty: HTMLElement;
  private readonly moreButton: HTMLButtonElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
    private readonly pollMs: number = POLL_INTERVAL_MS,
  ) {
    const doc = root.ownerDocument;
    this.banner = doc.createElement("div");
    this.banner.className = "offline-banner";
    this.banner.setAttribute("role", "alert");
    this.banner.textContent = "Gateway unreachable. Retrying.";
    this.banner.hidden = true;

    this.empty = doc.createElement("p");
    this.empty.className = "feed-empty";
    this.empty.textContent = "No notifications yet.";

    this.list = doc.createElement("ul");
    this.list.className = "feed-list";
    this.list.setAttribute("aria-label", "Notifications, newest first");

    this.moreButton = doc.createElement("button");
    this.moreButton.type = "button";
    this.moreButton.textContent = "Load more";
    this.moreButton.hidden = true;
    this.moreButton.addEventListener("click", () => this.loadMore());

    root.append(this.banner, this.empty, this.list, this.moreButton);
  }

  start(): void {
    this.pollNow();
    this.timer = setInterval(() => this.pollNow(), this.pollMs);
  }

  stop(): void {
    if (this.timer !== undefined) clearInterval(this.timer);
    this.timer = undefined;
  }

  pollNow(): Promise<void> {
    this.inflight = this.inflight.then(() => this.poll());
    return this.inflight;
  }

  /** Test hook: resolves once the in-flight poll has rendered. */
  flush(): Promise<void> {
    return this.inflight;
  }

  loadMore(): void {
    this.visible += PAGE_SIZE;
    this.render();
  }

  private async poll(): Promise<void> {
    let page;
    try {
      page = await this.client.events(this.cursor);
    } catch {
      this.offline = true;
      this.render();
      return;
    }
    const firstLoad = this.cursor === undefined;
    this.offline = false;
    if (page.events.length > 0) {
      this.items = [...page.events, ...this.items];
      this.cursor = Math.max(...page.events.map((e) => e.created_at), this.cursor ?? 0);
      if (!firstLoad) {
        announce(page.events[0].message);
      }
    } else if (firstLoad) {
      this.cursor = page.now;
    }
    this.render();
  }

  private render(): void {
    this.banner.hidden = !this.offline;
    this.empty.hidden = this.items.length > 0;
    this.list.textContent = "";
    const doc = this.root.ownerDocument;
    for (const event of this.items.slice(0, this.visible)) {
      const li = doc.createElement("li");
      li.className = "feed-item";
      if (event.snapshot) {
        const img = doc.createElement("img");
        img.src = this.client.mediaUrl(event.snapshot);
        img.alt = event.message; // transcript accompanies the image
        img.width = 96;
        li.appendChild(img);
      }
      const text = doc.createElement("p");
      text.textContent = event.message;
      const meta = doc.createElement("small");
      meta.textContent = `${event.camera} at ${new Date(event.created_at * 1000).toISOString()}`;
      li.append(text, meta);
      this.list.appendChild(li);
    }
    this.moreButton.hidden = this.items.length <= this.visible;
  }
}
