import digestFixture from "./fixtures/digest.json";

import { ExtractionRules } from "../src/rules";
import { DigestDoc } from "../src/types";

export const FIXTURE_URL = "https://maps.example.test/place/golden-fork/reviews";

export const FIXTURE_RULES: ExtractionRules = {
  urlPatterns: ["https://maps.example.test/*"],
  reviewContainerXPath: "//section[@id='reviews']//article[contains(@class, 'review')]",
  textXPath: ".//p[contains(@class, 'text')]",
  authorXPath: ".//span[contains(@class, 'author')]",
  dateXPath: ".//time[contains(@class, 'date')]",
  ratingXPath: ".//span[contains(@class, 'stars')]/@aria-label",
  restaurantIdXPath: "//h1",
};

export const FIXTURE_PAGE = `
<main>
  <h1>The Golden Fork</h1>
  <nav><a href="#reviews">Jump to reviews</a></nav>
  <section id="reviews">
    <h2>Reviews</h2>
    <article class="review">
      <span class="author">Ana</span>
      <time class="date">2026-07-01</time>
      <span class="stars" aria-label="3 stars">★★★</span>
      <p class="text">The food was delicious, but the service was slow.</p>
    </article>
    <article class="review">
      <span class="author">Ben</span>
      <span class="stars" aria-label="4 stars">★★★★</span>
      <p class="text">Pasta was excellent. Chicken was cold.</p>
    </article>
    <article class="review">
      <span class="author">Caro</span>
      <time class="date">2026-06-15</time>
      <p class="text">Prices were reasonable and the restroom was spotless.</p>
    </article>
  </section>
  <footer>Native page footer</footer>
</main>
`;

export function loadFixtureDigest(): DigestDoc {
  return structuredClone(digestFixture) as DigestDoc;
}

export function setUpFixturePage(): void {
  document.body.innerHTML = FIXTURE_PAGE;
}

export const FIXTURE_REVIEW_TEXTS = new Map<string, string>([
  ["r1", "The food was delicious, but the service was slow."],
  ["r2", "The ambiance was warm and inviting, but the pasta lacked seasoning and was undercooked."],
  ["r3", "Pasta was excellent. Chicken was cold."],
  ["r4", "Service was slow and the staff were rude."],
  ["r5", "Prices were reasonable and the restroom was spotless."],
  ["r6", "The burger was tasty! Great value."],
]);
