/** The three-level digest accordion.
 *
 * Level A: five aspect header buttons (fixed order), each announcing its
 * positive/negative review counts. Level B: per aspect, Positive and
 * Negative summary panels listing the bullets. Level C: the source reviews'
 * original texts.
 *
 * Keyboard contract: TAB / SHIFT+TAB move within the current level and wrap
 * at the ends; ENTER descends one level into the focused branch (focus lands
 * on the first node of the new level); ESCAPE ascends one level, restoring
 * focus to the header that was descended from. ESCAPE at the aspect level is
 * a no-op inside the widget. Other keys pass through to the page.
 *
 * Exactly one branch is open at a time; aria-expanded and hidden are updated
 * in the same transition that moves focus.
 */

import { AspectSectionDoc, DigestDoc, SummaryDoc } from "./types";

export type Level = "aspects" | "summaries" | "reviews";

export interface AccordionState {
  level: Level;
  aspect: number;
  summary: number;
  item: number;
}

export type KeyName = "Tab" | "ShiftTab" | "Enter" | "Escape";

/** Focusable item counts at level C per [aspect][summary]; always >= 1
 * because an empty summary renders a "no information" item. */
export interface AccordionShape {
  itemCounts: number[][];
}

export const INITIAL_STATE: AccordionState = {
  level: "aspects",
  aspect: 0,
  summary: 0,
  item: 0,
};

/** Pure keyboard transition; null means the key is not handled. */
export function transition(
  state: AccordionState,
  key: KeyName,
  shape: AccordionShape,
): AccordionState | null {
  const aspectCount = shape.itemCounts.length;
  switch (state.level) {
    case "aspects":
      switch (key) {
        case "Tab":
          return { ...state, aspect: (state.aspect + 1) % aspectCount };
        case "ShiftTab":
          return { ...state, aspect: (state.aspect + aspectCount - 1) % aspectCount };
        case "Enter":
          return { ...state, level: "summaries", summary: 0 };
        case "Escape":
          return state;
      }
      break;
    case "summaries":
      switch (key) {
        case "Tab":
        case "ShiftTab":
          return { ...state, summary: 1 - state.summary };
        case "Enter":
          return { ...state, level: "reviews", item: 0 };
        case "Escape":
          return { ...state, level: "aspects" };
      }
      break;
    case "reviews": {
      const count = shape.itemCounts[state.aspect]?.[state.summary] ?? 1;
      switch (key) {
        case "Tab":
          return { ...state, item: (state.item + 1) % count };
        case "ShiftTab":
          return { ...state, item: (state.item + count - 1) % count };
        case "Enter":
          return state;
        case "Escape":
          return { ...state, level: "summaries" };
      }
      break;
    }
  }
  return null;
}

export function keyNameOf(event: KeyboardEvent): KeyName | null {
  if (event.key === "Tab") return event.shiftKey ? "ShiftTab" : "Tab";
  if (event.key === "Enter") return "Enter";
  if (event.key === "Escape") return "Escape";
  return null;
}

export const WIDGET_ID = "quickcue-digest";

const POLARITIES = ["positive", "negative"] as const;

function summaryOf(section: AspectSectionDoc, index: number): SummaryDoc {
  return index === 0 ? section.positive : section.negative;
}

export class DigestAccordion {
  readonly root: HTMLElement;
  private state: AccordionState = INITIAL_STATE;
  private readonly shape: AccordionShape;
  private readonly aspectHeaders: HTMLButtonElement[] = [];
  private readonly aspectPanels: HTMLElement[] = [];
  private readonly summaryHeaders: HTMLButtonElement[][] = [];
  private readonly summaryPanels: HTMLElement[][] = [];
  private readonly reviewItems: HTMLElement[][][] = [];
  private focused: HTMLElement | null = null;

  constructor(digest: DigestDoc, reviewTextById: Map<string, string>, doc: Document) {
    this.root = doc.createElement("section");
    this.root.id = WIDGET_ID;
    this.root.setAttribute("role", "region");
    this.root.setAttribute("aria-label", "Review digest by aspect");

    digest.aspects.forEach((section, aspectIndex) => {
      const heading = doc.createElement("h3");
      const header = doc.createElement("button");
      header.type = "button";
      header.id = `${WIDGET_ID}-aspect-${aspectIndex}`;
      header.textContent =
        `${section.aspect}, ${section.positive.source_review_ids.length} positive, ` +
        `${section.negative.source_review_ids.length} negative`;
      header.setAttribute("aria-expanded", "false");
      header.setAttribute("aria-controls", `${WIDGET_ID}-panel-${aspectIndex}`);
      header.tabIndex = aspectIndex === 0 ? 0 : -1;
      heading.appendChild(header);
      this.root.appendChild(heading);

      const panel = doc.createElement("div");
      panel.id = `${WIDGET_ID}-panel-${aspectIndex}`;
      panel.setAttribute("role", "group");
      panel.setAttribute("aria-labelledby", header.id);
      panel.hidden = true;
      this.root.appendChild(panel);

      this.aspectHeaders.push(header);
      this.aspectPanels.push(panel);
      this.summaryHeaders.push([]);
      this.summaryPanels.push([]);
      this.reviewItems.push([]);

      POLARITIES.forEach((polarity, summaryIndex) => {
        const summary = summaryOf(section, summaryIndex);
        const label = summaryIndex === 0 ? "Positive" : "Negative";
        const summaryHeader = doc.createElement("button");
        summaryHeader.type = "button";
        summaryHeader.id = `${WIDGET_ID}-summary-${aspectIndex}-${polarity}`;
        summaryHeader.textContent = summary.bullets.length
          ? `${label}, ${summary.bullets.length} points`
          : `${label}, no information`;
        summaryHeader.setAttribute("aria-expanded", "false");
        summaryHeader.setAttribute(
          "aria-controls",
          `${WIDGET_ID}-content-${aspectIndex}-${polarity}`,
        );
        summaryHeader.tabIndex = -1;
        panel.appendChild(summaryHeader);

        const content = doc.createElement("div");
        content.id = `${WIDGET_ID}-content-${aspectIndex}-${polarity}`;
        content.setAttribute("role", "group");
        content.setAttribute("aria-labelledby", summaryHeader.id);
        content.hidden = true;

        const items: HTMLElement[] = [];
        if (summary.bullets.length) {
          const bulletList = doc.createElement("ul");
          for (const bullet of summary.bullets) {
            const li = doc.createElement("li");
            li.textContent = bullet;
            bulletList.appendChild(li);
          }
          content.appendChild(bulletList);

          const reviewList = doc.createElement("ul");
          reviewList.setAttribute("aria-label", `Source reviews for ${section.aspect}, ${label}`);
          for (const reviewId of summary.source_review_ids) {
            const li = doc.createElement("li");
            li.textContent = reviewTextById.get(reviewId) ?? "(review text unavailable)";
            li.tabIndex = -1;
            reviewList.appendChild(li);
            items.push(li);
          }
          content.appendChild(reviewList);
        } else {
          const empty = doc.createElement("p");
          empty.textContent = `No information about ${section.aspect.toLowerCase()} (${polarity}).`;
          empty.tabIndex = -1;
          content.appendChild(empty);
          items.push(empty);
        }
        panel.appendChild(content);

        this.summaryHeaders[aspectIndex]!.push(summaryHeader);
        this.summaryPanels[aspectIndex]!.push(content);
        this.reviewItems[aspectIndex]!.push(items);
      });
    });

    this.shape = {
      itemCounts: this.reviewItems.map((bySummary) => bySummary.map((items) => items.length)),
    };
    this.focused = this.aspectHeaders[0] ?? null;
    this.root.addEventListener("keydown", (event) => this.onKeydown(event as KeyboardEvent));
  }

  getState(): AccordionState {
    return this.state;
  }

  /** All keyboard-focusable nodes the widget manages. */
  focusableNodes(): HTMLElement[] {
    const nodes: HTMLElement[] = [...this.aspectHeaders];
    this.summaryHeaders.forEach((headers, a) => {
      nodes.push(...headers);
      headers.forEach((_, s) => nodes.push(...this.reviewItems[a]![s]!));
    });
    return nodes;
  }

  nodeFor(state: AccordionState): HTMLElement {
    if (state.level === "aspects") return this.aspectHeaders[state.aspect]!;
    if (state.level === "summaries") return this.summaryHeaders[state.aspect]![state.summary]!;
    return this.reviewItems[state.aspect]![state.summary]![state.item]!;
  }

  private onKeydown(event: KeyboardEvent): void {
    const key = keyNameOf(event);
    if (key === null) return; // unknown keys pass through to the page
    const next = transition(this.state, key, this.shape);
    if (next === null) return;
    event.preventDefault();
    event.stopPropagation();
    this.apply(next);
  }

  /** Apply a state: expand/collapse synchronously, then move focus. */
  apply(next: AccordionState): void {
    const prev = this.state;

    if (prev.level === "reviews" && next.level === "summaries") {
      this.setExpanded(this.summaryHeaders[prev.aspect]![prev.summary]!,
        this.summaryPanels[prev.aspect]![prev.summary]!, false);
    }
    if (prev.level === "summaries" && next.level === "aspects") {
      this.setExpanded(this.aspectHeaders[prev.aspect]!, this.aspectPanels[prev.aspect]!, false);
    }
    if (prev.level === "aspects" && next.level === "summaries") {
      this.setExpanded(this.aspectHeaders[next.aspect]!, this.aspectPanels[next.aspect]!, true);
    }
    if (prev.level === "summaries" && next.level === "reviews") {
      this.setExpanded(this.summaryHeaders[next.aspect]![next.summary]!,
        this.summaryPanels[next.aspect]![next.summary]!, true);
    }

    this.state = next;
    this.setFocus(this.nodeFor(next));
  }

  private setExpanded(header: HTMLElement, panel: HTMLElement, expanded: boolean): void {
    header.setAttribute("aria-expanded", String(expanded));
    panel.hidden = !expanded;
  }

  private setFocus(node: HTMLElement): void {
    if (this.focused && this.focused !== node) this.focused.tabIndex = -1;
    node.tabIndex = 0;
    this.focused = node;
    node.focus();
  }
}

/**
 * Build and inject the accordion. The widget is inserted after mountPoint;
 * with no mount point it is appended to the body with a logged warning.
 */
export function renderAccordion(
  digest: DigestDoc,
  reviewTextById: Map<string, string>,
  mountPoint: Element | null,
  doc: Document,
): DigestAccordion {
  const accordion = new DigestAccordion(digest, reviewTextById, doc);
  if (mountPoint && mountPoint.parentNode && mountPoint.isConnected) {
    mountPoint.insertAdjacentElement("beforebegin", accordion.root);
  } else {
    console.warn("quickcue: mount point missing, appending digest to body");
    doc.body.appendChild(accordion.root);
  }
  return accordion;
}
