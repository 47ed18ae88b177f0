import { afterEach, describe, expect, it, vi } from "vitest";

import { DigestServiceError, fetchDigest } from "../src/client";
import { DigestValidationError, validateDigest } from "../src/types";
import { loadFixtureDigest } from "./helpers";

const REVIEW_SET = { restaurant_id: "golden-fork", reviews: [{ id: "r1", text: "ok food" }] };

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("fetchDigest", () => {
  it("posts the review set and returns the validated digest", async () => {
    const digest = loadFixtureDigest();
    const fetchSpy = vi.fn(
      async (url: string, init: RequestInit) =>
        new Response(JSON.stringify(digest), { status: 200 }),
    );
    vi.stubGlobal("fetch", fetchSpy);

    const result = await fetchDigest(REVIEW_SET, "http://localhost:8787/");
    expect(result.restaurant_id).toBe("golden-fork");
    expect(result.aspects).toHaveLength(5);

    const [url, init] = fetchSpy.mock.calls[0]!;
    expect(url).toBe("http://localhost:8787/v1/digest");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual(REVIEW_SET);
  });

  it("raises DigestServiceError with the status on non-200", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("nope", { status: 502 })));
    await expect(fetchDigest(REVIEW_SET, "http://localhost:8787")).rejects.toMatchObject({
      name: "DigestServiceError",
      status: 502,
    });
  });

  it("wraps network failures", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => Promise.reject(new TypeError("offline"))));
    await expect(fetchDigest(REVIEW_SET, "http://localhost:8787")).rejects.toBeInstanceOf(
      DigestServiceError,
    );
  });

  it("rejects malformed digests", async () => {
    const digest = loadFixtureDigest();
    const broken = { ...digest, aspects: digest.aspects.slice(0, 4) };
    vi.stubGlobal("fetch", vi.fn(async () => new Response(JSON.stringify(broken), { status: 200 })));
    await expect(fetchDigest(REVIEW_SET, "http://localhost:8787")).rejects.toBeInstanceOf(
      DigestValidationError,
    );
  });
});

describe("validateDigest", () => {
  it("accepts the fixture digest", () => {
    expect(() => validateDigest(loadFixtureDigest())).not.toThrow();
  });

  it("rejects out-of-order aspects", () => {
    const digest = loadFixtureDigest();
    const swapped = { ...digest, aspects: [...digest.aspects].reverse() };
    expect(() => validateDigest(swapped)).toThrow(DigestValidationError);
  });

  it("rejects non-object bodies", () => {
    expect(() => validateDigest("nope")).toThrow(DigestValidationError);
    expect(() => validateDigest(null)).toThrow(DigestValidationError);
  });
});
