import { beforeEach, describe, expect, it } from "vitest";

import { startApp } from "../src/app.js";
import type { AppContext } from "../src/context.js";

type Handler = (init?: RequestInit) => { status: number; body: unknown };

function fakeServer(routes: Record<string, Handler>) {
  const calls: { key: string; body?: unknown }[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^http:\/\/fake/, "").split("?")[0];
    const key = `${method} ${path}`;
    const handler = routes[key];
    calls.push({ key, body: init?.body ? JSON.parse(String(init.body)) : undefined });
    if (!handler) return new Response(JSON.stringify({ code: "NOT_FOUND", message: key }), { status: 404 });
    const result = handler(init);
    return new Response(JSON.stringify(result.body), { status: result.status });
  };
  return { fetchImpl, calls };
}

function loggedInStorage(): Storage {
  window.localStorage.clear();
  window.localStorage.setItem("g2g.session", "tok");
  window.localStorage.setItem(
    "g2g.profile",
    JSON.stringify({ worker_id: "w-me", username: "me", role: "worker", platforms: ["uber"] }),
  );
  return window.localStorage;
}

async function flush(times = 6): Promise<void> {
  for (let i = 0; i < times; i++) await new Promise((r) => setTimeout(r, 5));
}

const ANON_STORY = {
  story_id: "s1",
  display_name: "anonymous",
  story_type: "issue",
  tags: ["safety"],
  title: "rough night",
  body: "details withheld",
  audience: ["workers"],
  created_at: "2024-06-03T12:00:00+00:00",
  platforms: ["uber"],
  edited: false,
  like_count: 2,
  liked_by_viewer: false,
  media: null,
  is_own: false,
  evidence: [],
};

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  window.location.hash = "";
});

describe("feed rendering", () => {
  it("never renders a username for anonymous stories", async () => {
    const server = fakeServer({
      "GET /v1/stories": () => ({ status: 200, body: { items: [ANON_STORY], next_cursor: null } }),
    });
    startApp(document.getElementById("app")!, {
      apiBase: "http://fake",
      storage: loggedInStorage(),
      fetchImpl: server.fetchImpl,
    });
    window.location.hash = "#/feed";
    await flush();
    const html = document.body.innerHTML;
    expect(html).toContain("anonymous");
    expect(html).toContain("rough night");
    // the author's real username must appear nowhere in the document
    expect(html).not.toContain("driver-seven");
    expect(document.querySelector(".display-name")?.textContent).toBe("anonymous");
  });

  it("marks edited stories", async () => {
    const server = fakeServer({
      "GET /v1/stories": () => ({
        status: 200,
        body: { items: [{ ...ANON_STORY, edited: true, display_name: "bea" }], next_cursor: null },
      }),
    });
    startApp(document.getElementById("app")!, {
      apiBase: "http://fake",
      storage: loggedInStorage(),
      fetchImpl: server.fetchImpl,
    });
    await flush();
    expect(document.querySelector(".badge.edited")?.textContent).toBe("edited");
  });
});

describe("share flow", () => {
  function buildShare(routes: Record<string, Handler>) {
    const server = fakeServer(routes);
    const ctx = startApp(document.getElementById("app")!, {
      apiBase: "http://fake",
      storage: loggedInStorage(),
      fetchImpl: server.fetchImpl,
    });
    window.location.hash = "#/share";
    return { server, ctx };
  }

  it("requires an explicit audience selection", async () => {
    const { server } = buildShare({});
    await flush();
    (document.getElementById("story-body") as HTMLTextAreaElement).value = "hello";
    document.querySelector("form.share-form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();
    expect(document.querySelector("#share-errors .field-error")?.textContent).toContain("audience");
    expect(server.calls.filter((c) => c.key.startsWith("POST /v1/stories")).length).toBe(0);
  });

  it("shows the redacted preview before submit and resubmits on confirm", async () => {
    let posts = 0;
    const { server } = buildShare({
      "POST /v1/stories": (init) => {
        posts += 1;
        const body = JSON.parse(String(init?.body));
        if (!body.acknowledge_redaction) {
          return {
            status: 409,
            body: {
              code: "UNACKNOWLEDGED_REDACTION",
              message: "confirm the redacted version",
              preview: { title: "", body: "pickup at [ADDRESS] went fine" },
              findings: [{ kind: "street_address", span: [10, 21] }],
            },
          };
        }
        return { status: 201, body: { story_id: "s9" } };
      },
      "GET /v1/stories": () => ({ status: 200, body: { items: [], next_cursor: null } }),
    });
    await flush();
    (document.getElementById("story-body") as HTMLTextAreaElement).value = "pickup at 123 Main St went fine";
    (document.querySelector('input[name="story-tag"][value="safety"]') as HTMLInputElement).checked = true;
    (document.getElementById("story-audience") as HTMLSelectElement).value = "workers,policymakers";
    document.querySelector("form.share-form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();

    const preview = document.getElementById("redaction-preview")!;
    expect(preview.hidden).toBe(false);
    expect(preview.textContent).toContain("pickup at [ADDRESS] went fine");
    expect(posts).toBe(1); // nothing stored yet

    (document.getElementById("confirm-redaction") as HTMLButtonElement).click();
    await flush();
    const confirmed = server.calls.find(
      (c) => c.key === "POST /v1/stories" && (c.body as { acknowledge_redaction?: boolean }).acknowledge_redaction,
    );
    expect(confirmed).toBeTruthy();
    expect((confirmed!.body as { audience: string[] }).audience).toEqual(["workers", "policymakers"]);
  });

  it("renders field-level validation messages from problem details", async () => {
    buildShare({
      "POST /v1/stories": () => ({
        status: 400,
        body: {
          code: "EMPTY_TAGS",
          message: "at least one tag is required",
          errors: [{ code: "EMPTY_TAGS", field: "tags", message: "at least one tag is required" }],
        },
      }),
    });
    await flush();
    (document.getElementById("story-body") as HTMLTextAreaElement).value = "hello";
    (document.getElementById("story-audience") as HTMLSelectElement).value = "workers";
    document.querySelector("form.share-form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();
    expect(document.querySelector("#share-errors .field-error")?.textContent).toContain("tags");
  });

  it("autosaves the draft and restores it on return", async () => {
    const { ctx } = buildShare({});
    await flush();
    const body = document.getElementById("story-body") as HTMLTextAreaElement;
    body.value = "half-finished thought";
    document.querySelector("form.share-form")!.dispatchEvent(new Event("input", { bubbles: true }));
    await flush();
    window.location.hash = "#/feed";
    await flush();
    window.location.hash = "#/share";
    await flush(10);
    expect((document.getElementById("story-body") as HTMLTextAreaElement).value).toBe("half-finished thought");
    expect(ctx.drafts.load("story")).toMatchObject({ body: "half-finished thought" });
  });
});
