/** Content-script orchestration: extract reviews, request the digest, and
 * inject the accessible accordion. The page is only ever augmented: the
 * script adds nodes next to the native review section and never removes or
 * reorders pre-existing content. On any failure the native page stays
 * untouched apart from an accessible error region. */

import { DigestAccordion, WIDGET_ID, renderAccordion } from "./accordion";
import { fetchDigest } from "./client";
import { extractReviews, xpathNodes } from "./extract";
import { DEFAULT_RULES, DEFAULT_SERVICE_BASE_URL, ExtractionRules } from "./rules";

export const STATUS_ID = "quickcue-status";

export interface ContentConfig {
  serviceBaseUrl: string;
  rules: ExtractionRules;
}

export function defaultConfig(): ContentConfig {
  return { serviceBaseUrl: DEFAULT_SERVICE_BASE_URL, rules: DEFAULT_RULES };
}

export type RunOutcome =
  | { kind: "inert" }
  | { kind: "no-reviews" }
  | { kind: "rendered"; accordion: DigestAccordion }
  | { kind: "error"; message: string }
  | { kind: "aborted" };

// At most one in-flight digest request per page; re-invocation cancels and
// replaces the pending one.
let pending: AbortController | null = null;

function removeById(doc: Document, id: string): void {
  doc.getElementById(id)?.remove();
}

function statusRegion(doc: Document, mount: Element | null): HTMLElement {
  let region = doc.getElementById(STATUS_ID);
  if (!region) {
    region = doc.createElement("div");
    region.id = STATUS_ID;
    if (mount && mount.parentNode && mount.isConnected) {
      mount.insertAdjacentElement("beforebegin", region);
    } else {
      doc.body.appendChild(region);
    }
  }
  return region;
}

function announceBusy(region: HTMLElement): void {
  region.setAttribute("role", "status");
  region.setAttribute("aria-live", "polite");
  region.setAttribute("aria-busy", "true");
  region.textContent = "Loading review digest...";
}

function announceError(region: HTMLElement, message: string): void {
  region.setAttribute("role", "alert");
  region.setAttribute("aria-live", "assertive");
  region.removeAttribute("aria-busy");
  region.textContent = message;
}

export async function run(
  doc: Document,
  config: ContentConfig = defaultConfig(),
  url: string = doc.location?.href ?? "",
): Promise<RunOutcome> {
  const reviewSet = extractReviews(doc, config.rules, url);
  if (reviewSet === null) return { kind: "inert" }; // no URL match: zero DOM mutation

  // Idempotent injection: replace any previous widget/status and cancel the
  // in-flight request before starting over.
  pending?.abort();
  removeById(doc, WIDGET_ID);
  removeById(doc, STATUS_ID);

  const firstContainer = xpathNodes(doc, doc, config.rules.reviewContainerXPath)[0];
  const mount = firstContainer instanceof Element ? firstContainer : null;
  const region = statusRegion(doc, mount);

  if (reviewSet.reviews.length === 0) {
    announceError(region, "No reviews found on this page.");
    return { kind: "no-reviews" };
  }

  announceBusy(region);
  const controller = new AbortController();
  pending = controller;
  try {
    const digest = await fetchDigest(reviewSet, config.serviceBaseUrl, controller.signal);
    const reviewTextById = new Map(reviewSet.reviews.map((r) => [r.id, r.text]));
    region.remove();
    const accordion = renderAccordion(digest, reviewTextById, mount, doc);
    return { kind: "rendered", accordion };
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") {
      return { kind: "aborted" };
    }
    const message = "Review digest unavailable: the digest service could not be reached.";
    announceError(region, message);
    console.warn("quickcue:", error);
    return { kind: "error", message };
  } finally {
    if (pending === controller) pending = null;
  }
}
