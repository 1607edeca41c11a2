import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // the e2e suite drives the real API; giving the document that origin
    // keeps happy-dom's CORS simulation out of the way
    environmentOptions: {
      happyDOM: { url: "http://127.0.0.1:8906" },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
