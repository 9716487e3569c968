import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    testTimeout: 30_000,
    hookTimeout: 40_000,
    // the e2e spawns one pipeline; keep files sequential
    fileParallelism: false,
  },
});
