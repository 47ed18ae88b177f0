/** HTTP client for the digest service. */

import { DigestDoc, ReviewSetDoc, validateDigest } from "./types";

export class DigestServiceError extends Error {
  readonly status?: number;

  constructor(message: string, status?: number) {
    super(message);
    this.name = "DigestServiceError";
    this.status = status;
  }
}

export async function fetchDigest(
  reviewSet: ReviewSetDoc,
  serviceBaseUrl: string,
  signal?: AbortSignal,
): Promise<DigestDoc> {
  const url = serviceBaseUrl.replace(/\/+$/, "") + "/v1/digest";
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(reviewSet),
      signal,
    });
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") throw error;
    throw new DigestServiceError(`digest service unreachable: ${String(error)}`);
  }
  if (!response.ok) {
    throw new DigestServiceError(
      `digest service returned HTTP ${response.status}`,
      response.status,
    );
  }
  let body: unknown;
  try {
    body = await response.json();
  } catch (error) {
    throw new DigestServiceError(`digest response is not JSON: ${String(error)}`);
  }
  return validateDigest(body);
}
