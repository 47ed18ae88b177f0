import { defaultConfig, run } from "./content";

void run(document, defaultConfig(), location.href);
