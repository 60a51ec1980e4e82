import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, SESSION_HEADER } from "../src/api.js";
import { makeDocument } from "./fixtures.js";

interface RecordedCall {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: string | undefined;
}

function mockFetch(routes: Record<string, (call: RecordedCall) => Response | object>): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      const call: RecordedCall = {
        url,
        method: init?.method ?? "GET",
        headers: (init?.headers as Record<string, string>) ?? {},
        body: init?.body as string | undefined,
      };
      calls.push(call);
      const key = `${call.method} ${url.split("?")[0]}`;
      const handler = routes[key];
      if (!handler) {
        return new Response(JSON.stringify({ code: "not_found", message: "no route" }), { status: 404 });
      }
      const result = handler(call);
      if (result instanceof Response) {
        return result;
      }
      return new Response(JSON.stringify(result), { status: 200, headers: { "Content-Type": "application/json" } });
    }),
  );
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("login stores the token and later requests carry the header", async () => {
    const calls = mockFetch({
      "POST /api/login": () => ({ token: "tok-1", role: "Engineer", expires_at: "2026-08-09T20:00:00Z" }),
      "GET /api/components": () => [],
    });
    const api = new ApiClient("");
    const response = await api.login("engineer", "engineer-pw");
    expect(response.role).toBe("Engineer");
    await api.getComponents();
    expect(calls[1]!.headers[SESSION_HEADER]).toBe("tok-1");
  });

  it("getLayout exposes the read-only header", async () => {
    mockFetch({
      "GET /api/layout": () =>
        new Response(JSON.stringify(makeDocument()), {
          status: 200,
          headers: { "X-Layout-Read-Only": "true" },
        }),
    });
    const api = new ApiClient("");
    const { document, readOnly } = await api.getLayout();
    expect(readOnly).toBe(true);
    expect(document.role).toBe("Engineer");
  });

  it("putLayout canonicalizes instance order before sending", async () => {
    const calls = mockFetch({
      "PUT /api/layout": () => ({ revision: 2 }),
    });
    const api = new ApiClient("");
    const doc = makeDocument();
    doc.instances = [
      { instance_id: "z-1", component_id: "calendar", placement: { col: 8, row: 0, width: 2, height: 2 }, settings: {} },
      { instance_id: "a-1", component_id: "calendar", placement: { col: 0, row: 0, width: 2, height: 2 }, settings: {} },
    ];
    const revision = await api.putLayout(doc);
    expect(revision).toBe(2);
    const sent = JSON.parse(calls[0]!.body!) as typeof doc;
    expect(sent.instances.map((i) => i.instance_id)).toEqual(["a-1", "z-1"]);
  });

  it("errors carry the wire code, status, and details", async () => {
    mockFetch({
      "PUT /api/layout": () =>
        new Response(
          JSON.stringify({
            code: "revision_conflict",
            message: "expected revision 0 but store holds 2",
            details: { expected: 0, stored: 2 },
          }),
          { status: 409 },
        ),
    });
    const api = new ApiClient("");
    const error = await api.putLayout(makeDocument()).catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(409);
    expect((error as ApiError).code).toBe("revision_conflict");
    expect((error as ApiError).details).toEqual({ expected: 0, stored: 2 });
  });

  it("logout clears the token", async () => {
    mockFetch({
      "POST /api/login": () => ({ token: "tok-2", role: "Engineer", expires_at: "x" }),
      "POST /api/logout": () => new Response(null, { status: 204 }),
    });
    const api = new ApiClient("");
    await api.login("engineer", "engineer-pw");
    await api.logout();
    expect(api.token).toBeNull();
  });

  it("chat polling passes since_seq through", async () => {
    const calls = mockFetch({
      "GET /api/chat": () => [],
    });
    const api = new ApiClient("");
    await api.getChat(41);
    expect(calls[0]!.url).toContain("since_seq=41");
  });

  it("prefixes every path with the configured base url", async () => {
    const calls = mockFetch({
      "GET http://api.example:8080/api/pdm/products": () => [],
    });
    const api = new ApiClient("http://api.example:8080");
    await api.getProducts();
    expect(calls[0]!.url).toBe("http://api.example:8080/api/pdm/products");
  });
});

describe("conflict flow", () => {
  it("409 then reload-and-reapply then save succeeds", async () => {
    // Scripted two-client scenario: our save loses the race, we reload the
    // winner's document, replay our edit, and save with the fresh revision.
    const winnersDoc = makeDocument({ revision: 1, theme: { ...makeDocument().theme, background_color: "#EEEEEE" } });
    let putCount = 0;
    const calls = mockFetch({
      "PUT /api/layout": (call) => {
        putCount += 1;
        if (putCount === 1) {
          return new Response(
            JSON.stringify({ code: "revision_conflict", message: "stale", details: { expected: 0, stored: 1 } }),
            { status: 409 },
          );
        }
        const sent = JSON.parse(call.body!) as { revision: number };
        expect(sent.revision).toBe(1);
        return { revision: 2 };
      },
      "GET /api/layout": () => winnersDoc,
    });

    const { ClientLayoutState } = await import("../src/state.js");
    const { REGISTRY } = await import("./fixtures.js");
    const api = new ApiClient("");
    const state = new ClientLayoutState(makeDocument(), REGISTRY);
    state.apply({ edit: "add_component", component_id: "calendar", placement: null, settings: {} });

    const firstTry = await api.putLayout(state.documentForSave()).catch((e: unknown) => e);
    expect((firstTry as ApiError).status).toBe(409);

    const { document: fresh } = await api.getLayout();
    const outcome = state.reloadAndReapply(fresh);
    expect(outcome.reapplied).toBe(1);
    expect(state.workingDocument.theme.background_color).toBe("#EEEEEE");

    const revision = await api.putLayout(state.documentForSave());
    expect(revision).toBe(2);
    state.markSaved(revision);
    expect(state.dirty).toBe(false);
    expect(calls.filter((c) => c.method === "PUT")).toHaveLength(2);
  });
});
