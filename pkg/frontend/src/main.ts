// Panel wiring: builds the four views inside #app and starts polling.
// Everything interactive is a native control, so keyboard traversal
// and platform screen readers work without extra key handling.

import { GatewayClient } from "./api.js";
import { announce, installLiveRegions } from "./a11y.js";
import { DoorView } from "./door.js";
import { EnrollView } from "./enroll.js";
import { FeedView } from "./feed.js";
import { RecordingsView } from "./recordings.js";

export interface Panel {
  feed: FeedView;
  door: DoorView;
  enroll: EnrollView;
  recordings: RecordingsView;
}

function section(doc: Document, parent: HTMLElement, title: string): HTMLElement {
  const wrap = doc.createElement("section");
  const heading = doc.createElement("h2");
  heading.textContent = title;
  heading.id = `section-${title.toLowerCase().replace(/[^a-z]+/g, "-")}`;
  wrap.setAttribute("aria-labelledby", heading.id);
  wrap.appendChild(heading);
  parent.appendChild(wrap);
  return wrap;
}

export function boot(doc: Document, client: GatewayClient, start = true): Panel {
  installLiveRegions(doc);
  const app = doc.getElementById("app");
  if (!app) throw new Error("missing #app container");
  app.textContent = "";

  const title = doc.createElement("h1");
  title.textContent = "Safegate panel";
  app.appendChild(title);

  // bearer token for door commands, enrollment and emergency
  const tokenWrap = doc.createElement("label");
  tokenWrap.textContent = "Access token";
  const tokenInput = doc.createElement("input");
  tokenInput.type = "password";
  tokenInput.value = client.token;
  tokenWrap.appendChild(tokenInput);
  const tokenSave = doc.createElement("button");
  tokenSave.type = "button";
  tokenSave.textContent = "Save token";
  tokenSave.addEventListener("click", () => {
    client.setToken(tokenInput.value);
    announce("Access token saved.");
  });
  app.append(tokenWrap, tokenSave);

  const feed = new FeedView(section(doc, app, "Notifications"), client);
  const door = new DoorView(section(doc, app, "Door"), client);
  const enroll = new EnrollView(section(doc, app, "Enroll a person"), client);
  const recordings = new RecordingsView(section(doc, app, "Recordings"), client);

  // two-step emergency control; no modal, stays keyboard-friendly
  const emergencySection = section(doc, app, "Emergency");
  const emergencyButton = doc.createElement("button");
  emergencyButton.type = "button";
  emergencyButton.textContent = "Request assistance";
  let armed = false;
  emergencyButton.addEventListener("click", () => {
    if (!armed) {
      armed = true;
      emergencyButton.textContent = "Press again to confirm";
      return;
    }
    armed = false;
    emergencyButton.textContent = "Request assistance";
    void client
      .emergency("")
      .then(() => announce("Emergency assistance requested."))
      .catch((err) => announce(`Emergency request failed: ${err}`));
  });
  emergencySection.appendChild(emergencyButton);

  if (start) {
    feed.start();
    door.start();
  }
  return { feed, door, enroll, recordings };
}

declare global {
  interface Window {
    safegatePanel?: Panel;
  }
}

// module scripts run before DOMContentLoaded, so this fires exactly
// once in the browser; under tests the event has already passed and
// boot() is called explicitly instead
if (typeof window !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => {
    window.safegatePanel = boot(document, new GatewayClient(""));
  });
}
