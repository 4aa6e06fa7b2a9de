import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { installLiveRegions, resetLiveRegions } from "../src/a11y.js";
import { EventsPage, GatewayClient, GatewayEvent } from "../src/api.js";
import { FeedView, PAGE_SIZE, POLL_INTERVAL_MS } from "../src/feed.js";

function makeEvent(id: number, message: string, createdAt: number): GatewayEvent {
  return {
    id,
    camera: "front",
    message,
    snapshot: `snapshots/${id}.png`,
    created_at: createdAt,
    channel: "mms",
    status: "sent",
  };
}

/** Scripted events endpoint honouring the `since` cursor. */
class ScriptedClient extends GatewayClient {
  log: GatewayEvent[] = [];
  failing = false;
  now = 1000;

  override async events(since?: number): Promise<EventsPage> {
    if (this.failing) throw new Error("connection refused");
    const fresh = this.log.filter((e) => since === undefined || e.created_at > since);
    fresh.sort((a, b) => b.created_at - a.created_at);
    return { events: fresh, now: this.now };
  }
}

let root: HTMLElement;
let client: ScriptedClient;
let view: FeedView;

beforeEach(() => {
  vi.useFakeTimers();
  document.body.innerHTML = '<div id="feed"></div>';
  resetLiveRegions();
  installLiveRegions(document);
  root = document.getElementById("feed")!;
  client = new ScriptedClient("", null);
  view = new FeedView(root, client);
});

afterEach(() => {
  view.stop();
  vi.useRealTimers();
});

describe("FeedView", () => {
  it("shows an empty state before any events arrive", async () => {
    view.start();
    await view.flush();
    expect(root.textContent).toContain("No notifications yet.");
    expect(root.querySelectorAll(".feed-item")).toHaveLength(0);
  });

  it("renders a dispatched event within one poll interval", async () => {
    view.start();
    await view.flush();

    client.now = 1010;
    client.log.push(makeEvent(1, "Reza has mustache, beard, gray hair.", 1005));
    vi.advanceTimersByTime(POLL_INTERVAL_MS);
    await view.flush();

    const items = root.querySelectorAll(".feed-item");
    expect(items).toHaveLength(1);
    expect(items[0].textContent).toContain("Reza has mustache, beard, gray hair.");
    // the snapshot image carries the message as its text alternative
    const img = items[0].querySelector("img")!;
    expect(img.alt).toBe("Reza has mustache, beard, gray hair.");
    // screen readers hear the arrival
    expect(document.querySelector('[aria-live="polite"]')!.textContent).toBe(
      "Reza has mustache, beard, gray hair.",
    );
  });

  it("renders newest first across polls", async () => {
    client.log.push(makeEvent(1, "first", 100));
    view.start();
    await view.flush();
    client.log.push(makeEvent(2, "second", 200));
    vi.advanceTimersByTime(POLL_INTERVAL_MS);
    await view.flush();

    const texts = [...root.querySelectorAll(".feed-item p")].map((p) => p.textContent);
    expect(texts).toEqual(["second", "first"]);
  });

  it("caps the list at 50 and reveals more on demand", async () => {
    for (let i = 0; i < 120; i++) {
      client.log.push(makeEvent(i, `event ${i}`, i + 1));
    }
    view.start();
    await view.flush();

    expect(root.querySelectorAll(".feed-item")).toHaveLength(PAGE_SIZE);
    const more = root.querySelector("button")!;
    expect(more.hidden).toBe(false);
    expect(more.textContent).toBe("Load more");

    more.click();
    expect(root.querySelectorAll(".feed-item")).toHaveLength(2 * PAGE_SIZE);
    more.click();
    expect(root.querySelectorAll(".feed-item")).toHaveLength(120);
    expect(more.hidden).toBe(true);
  });

  it("shows an offline banner while the gateway is unreachable", async () => {
    view.start();
    await view.flush();
    const banner = root.querySelector(".offline-banner") as HTMLElement;
    expect(banner.hidden).toBe(true);

    client.failing = true;
    vi.advanceTimersByTime(POLL_INTERVAL_MS);
    await view.flush();
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("Gateway unreachable");

    client.failing = false;
    vi.advanceTimersByTime(POLL_INTERVAL_MS);
    await view.flush();
    expect(banner.hidden).toBe(true);
  });

  it("does not re-render old events on subsequent polls", async () => {
    client.log.push(makeEvent(1, "only once", 50));
    view.start();
    await view.flush();
    vi.advanceTimersByTime(3 * POLL_INTERVAL_MS);
    await view.flush();
    expect(root.querySelectorAll(".feed-item")).toHaveLength(1);
  });
});
