/** Review extraction rules: which pages to touch and where the review
 * fields live in the DOM. The bundled defaults target the desktop maps
 * review pane; deployments override them (host page markup changes and the
 * class names are not stable API). */

export interface ExtractionRules {
  /** URL patterns with "*" wildcards; the script stays inert elsewhere. */
  urlPatterns: string[];
  reviewContainerXPath: string;
  /** Field XPaths, relative to one container node. Only text is required. */
  textXPath: string;
  authorXPath?: string;
  dateXPath?: string;
  ratingXPath?: string;
  /** Optional source for the restaurant id; falls back to the page title. */
  restaurantIdXPath?: string;
}

export const DEFAULT_RULES: ExtractionRules = {
  urlPatterns: ["https://www.google.com/maps/*", "https://www.google.*/maps/*"],
  reviewContainerXPath: "//div[@data-review-id][.//span[contains(@class, 'wiI7pd')]]",
  textXPath: ".//span[contains(@class, 'wiI7pd')]",
  authorXPath: ".//div[contains(@class, 'd4r55')]",
  dateXPath: ".//span[contains(@class, 'rsqaWe')]",
  ratingXPath: ".//span[@role='img']/@aria-label",
  restaurantIdXPath: "//h1[contains(@class, 'DUwDvf')]",
};

export const DEFAULT_SERVICE_BASE_URL = "http://localhost:8787";

export function urlMatches(url: string, patterns: string[]): boolean {
  return patterns.some((pattern) => {
    const regex = new RegExp(
      "^" + pattern.split("*").map(escapeRegExp).join(".*") + "$",
    );
    return regex.test(url);
  });
}

function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}
