/** Wire types for the digest service (/v1/digest). */

export interface ReviewDoc {
  id: string;
  text: string;
  rating?: number;
  date?: string;
  author?: string;
}

export interface ReviewSetDoc {
  restaurant_id: string;
  reviews: ReviewDoc[];
}

export interface SummaryDoc {
  bullets: string[];
  source_review_ids: string[];
}

export interface AspectSectionDoc {
  aspect: string;
  positive: SummaryDoc;
  negative: SummaryDoc;
}

export interface DigestDoc {
  restaurant_id: string;
  generated_at: string;
  prompt_version: string;
  aspects: AspectSectionDoc[];
}

/** Fixed aspect presentation order the service guarantees. */
export const ASPECT_ORDER = [
  "Food",
  "Pricing",
  "Customer Service",
  "Hygiene",
  "Ambiance",
] as const;

export class DigestValidationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "DigestValidationError";
  }
}

function isSummary(value: unknown): value is SummaryDoc {
  if (typeof value !== "object" || value === null) return false;
  const summary = value as Record<string, unknown>;
  return (
    Array.isArray(summary.bullets) &&
    summary.bullets.every((b) => typeof b === "string") &&
    Array.isArray(summary.source_review_ids) &&
    summary.source_review_ids.every((s) => typeof s === "string")
  );
}

/** Validate a digest document; throws DigestValidationError on shape trouble. */
export function validateDigest(value: unknown): DigestDoc {
  if (typeof value !== "object" || value === null) {
    throw new DigestValidationError("digest is not an object");
  }
  const doc = value as Record<string, unknown>;
  if (typeof doc.restaurant_id !== "string" || typeof doc.generated_at !== "string") {
    throw new DigestValidationError("digest is missing restaurant_id or generated_at");
  }
  if (!Array.isArray(doc.aspects) || doc.aspects.length !== ASPECT_ORDER.length) {
    throw new DigestValidationError("digest must carry exactly five aspect sections");
  }
  doc.aspects.forEach((section, i) => {
    const s = section as Record<string, unknown>;
    if (s.aspect !== ASPECT_ORDER[i]) {
      throw new DigestValidationError(
        `aspect ${i} is ${String(s.aspect)}, expected ${ASPECT_ORDER[i]}`,
      );
    }
    if (!isSummary(s.positive) || !isSummary(s.negative)) {
      throw new DigestValidationError(`aspect ${ASPECT_ORDER[i]} has malformed summaries`);
    }
  });
  return value as DigestDoc;
}
