import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The integration test spawns the labeling service and waits for its
    // JIT kernel to warm up, which can take a few seconds on a cold cache.
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
