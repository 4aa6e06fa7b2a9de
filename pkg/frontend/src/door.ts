// Door control: shows the gateway's door state, grants or revokes
// access, and counts down to the auto-relock. The gateway is the only
// source of truth; the countdown is display sugar over its snapshot.

import { ApiError, DoorSnapshot, GatewayClient } from "./api.js";
import { announceError } from "./a11y.js";

export const DOOR_POLL_MS = 2000;

export class DoorView {
  private snapshot: DoorSnapshot | null = null;
  private receivedAtMs = 0; // client clock when the snapshot arrived
  private pollTimer: ReturnType<typeof setInterval> | undefined;
  private tickTimer: ReturnType<typeof setInterval> | undefined;
  private inflight: Promise<void> = Promise.resolve();

  private readonly stateLine: HTMLElement;
  private readonly countdown: HTMLElement;
  private readonly toast: HTMLElement;
  private readonly grantButton: HTMLButtonElement;
  private readonly lockButton: HTMLButtonElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
    private readonly pollMs: number = DOOR_POLL_MS,
  ) {
    const doc = root.ownerDocument;
    this.stateLine = doc.createElement("p");
    this.stateLine.className = "door-state";
    this.stateLine.textContent = "Door state unknown.";

    this.countdown = doc.createElement("p");
    this.countdown.className = "door-countdown";
    this.countdown.setAttribute("aria-live", "off");

    this.toast = doc.createElement("div");
    this.toast.className = "door-toast";
    this.toast.setAttribute("role", "alert");
    this.toast.hidden = true;

    this.grantButton = doc.createElement("button");
    this.grantButton.type = "button";
    this.grantButton.textContent = "Grant access";
    this.grantButton.addEventListener("click", () => this.command("open"));

    this.lockButton = doc.createElement("button");
    this.lockButton.type = "button";
    this.lockButton.textContent = "Lock now";
    this.lockButton.addEventListener("click", () => this.command("close"));

    root.append(this.stateLine, this.countdown, this.grantButton, this.lockButton, this.toast);
  }

  start(): void {
    this.pollNow();
    this.pollTimer = setInterval(() => this.pollNow(), this.pollMs);
    this.tickTimer = setInterval(() => this.render(), 1000);
  }

  stop(): void {
    if (this.pollTimer !== undefined) clearInterval(this.pollTimer);
    if (this.tickTimer !== undefined) clearInterval(this.tickTimer);
    this.pollTimer = this.tickTimer = undefined;
  }

  pollNow(): Promise<void> {
    this.inflight = this.inflight.then(() => this.poll());
    return this.inflight;
  }

  flush(): Promise<void> {
    return this.inflight;
  }

  command(cmd: "open" | "close"): Promise<void> {
    this.inflight = this.inflight.then(async () => {
      try {
        this.accept(await this.client.doorCommand(cmd));
        this.toast.hidden = true;
      } catch (err) {
        // fail-secure refusal or auth problem: state stays as-is
        const detail = err instanceof ApiError ? err.detail : String(err);
        this.toast.textContent = detail;
        this.toast.hidden = false;
        announceError(detail);
      }
      this.render();
    });
    return this.inflight;
  }

  private async poll(): Promise<void> {
    try {
      this.accept(await this.client.door());
    } catch {
      this.stateLine.textContent = "Door state unknown.";
      return;
    }
    this.render();
  }

  private accept(snapshot: DoorSnapshot): void {
    this.snapshot = snapshot;
    this.receivedAtMs = Date.now();
  }

  private remainingS(): number {
    if (!this.snapshot || this.snapshot.relock_deadline === null) return 0;
    const serverNow = this.snapshot.now + (Date.now() - this.receivedAtMs) / 1000;
    return Math.max(0, Math.ceil(this.snapshot.relock_deadline - serverNow));
  }

  private render(): void {
    if (!this.snapshot) return;
    const powered = this.snapshot.powered ? "" : " Power is out; lock is engaged.";
    this.stateLine.textContent = `Door is ${this.snapshot.state}.${powered}`;
    if (this.snapshot.state === "unlocked") {
      this.countdown.textContent = `Relocks in ${this.remainingS()} s`;
    } else {
      this.countdown.textContent = "";
    }
  }
}
