// Enrollment wizard: uploads face images to POST /profile and shows
// the gateway's per-image guidance label ("Face in left edge", ...) so
// the resident can retake the rejects.

import { GatewayClient, ProfileImage } from "./api.js";

function toBase64(bytes: Uint8Array): string {
  let binary = "";
  const chunk = 0x8000;
  for (let i = 0; i < bytes.length; i += chunk) {
    binary += String.fromCharCode(...bytes.subarray(i, i + chunk));
  }
  return btoa(binary);
}

export class EnrollView {
  readonly nameInput: HTMLInputElement;
  readonly contactInput: HTMLInputElement;
  readonly fileInput: HTMLInputElement;
  private readonly submitButton: HTMLButtonElement;
  private readonly summary: HTMLElement;
  private readonly labelList: HTMLOListElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {
    const doc = root.ownerDocument;
    const makeField = (label: string, type: string): HTMLInputElement => {
      const wrap = doc.createElement("label");
      wrap.textContent = label;
      const input = doc.createElement("input");
      input.type = type;
      wrap.appendChild(input);
      this.root.appendChild(wrap);
      return input;
    };
    this.nameInput = makeField("Name", "text");
    this.contactInput = makeField("Contact", "text");
    this.fileInput = makeField("Face images (PNG)", "file");
    this.fileInput.multiple = true;
    this.fileInput.accept = "image/png";

    this.submitButton = doc.createElement("button");
    this.submitButton.type = "button";
    this.submitButton.textContent = "Enroll";
    this.submitButton.addEventListener("click", () => void this.submit());

    this.summary = doc.createElement("p");
    this.summary.className = "enroll-summary";
    this.summary.setAttribute("role", "status");

    this.labelList = doc.createElement("ol");
    this.labelList.className = "enroll-labels";
    this.labelList.setAttribute("aria-label", "Per-image guidance");

    root.append(this.submitButton, this.summary, this.labelList);
  }

  async submit(): Promise<void> {
    const name = this.nameInput.value.trim();
    const files = Array.from(this.fileInput.files ?? []);
    if (!name || files.length === 0) {
      this.summary.textContent = "Name and at least one image are required.";
      return;
    }
    const images: ProfileImage[] = [];
    for (const file of files) {
      const buffer = await file.arrayBuffer();
      images.push({ data: toBase64(new Uint8Array(buffer)) });
    }
    this.submitButton.disabled = true;
    try {
      const result = await this.client.enroll(name, this.contactInput.value.trim(), images);
      this.labelList.textContent = "";
      result.guidance.forEach((label, i) => {
        const li = this.root.ownerDocument.createElement("li");
        li.textContent = `Image ${i + 1}: ${label}`;
        this.labelList.appendChild(li);
      });
      if (result.accepted > 0) {
        this.summary.textContent =
          `Enrolled ${name}: ${result.accepted} of ${images.length} images accepted ` +
          `(model v${result.model_version}).`;
      } else {
        this.summary.textContent = "No usable image. Follow the labels below and retake.";
      }
    } catch (err) {
      this.summary.textContent = `Enrollment failed: ${err instanceof Error ? err.message : err}`;
    } finally {
      this.submitButton.disabled = false;
    }
  }
}
