import { beforeEach, describe, expect, it } from "vitest";

import { resetLiveRegions } from "../src/a11y.js";
import { GatewayClient } from "../src/api.js";
import { boot } from "../src/main.js";

function accessibleName(el: Element): string {
  const aria = el.getAttribute("aria-label");
  if (aria) return aria;
  if (el instanceof HTMLInputElement) {
    const label = el.closest("label");
    if (label) return label.textContent?.trim() ?? "";
  }
  return el.textContent?.trim() ?? "";
}

describe("keyboard operability", () => {
  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    resetLiveRegions();
    boot(document, new GatewayClient("", null), false);
  });

  it("every interactive element is natively focusable", () => {
    const controls = [...document.querySelectorAll("button, input, select, a[href]")];
    expect(controls.length).toBeGreaterThanOrEqual(10);
    for (const el of controls) {
      // native controls sit in the tab order unless explicitly removed
      expect((el as HTMLElement).tabIndex, el.outerHTML).toBeGreaterThanOrEqual(0);
      expect(el.getAttribute("tabindex")).not.toBe("-1");
    }
  });

  it("every control has an accessible name", () => {
    const controls = [...document.querySelectorAll("button, input, select, a[href]")];
    for (const el of controls) {
      expect(accessibleName(el), el.outerHTML).not.toBe("");
    }
  });

  it("all four views plus emergency are present as labeled sections", () => {
    const headings = [...document.querySelectorAll("section h2")].map((h) => h.textContent);
    expect(headings).toEqual([
      "Notifications",
      "Door",
      "Enroll a person",
      "Recordings",
      "Emergency",
    ]);
    for (const section of document.querySelectorAll("section")) {
      expect(section.getAttribute("aria-labelledby")).toBeTruthy();
    }
  });

  it("the emergency button arms before it fires", () => {
    const buttons = [...document.querySelectorAll("button")];
    const emergency = buttons.find((b) => b.textContent === "Request assistance")!;
    emergency.click();
    expect(emergency.textContent).toBe("Press again to confirm");
  });
});
