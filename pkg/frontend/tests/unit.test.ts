/**
 * Unit tests with a scripted fetch: URL construction, state projection, and
 * the one-gesture-one-transformation rule.
 */

import { afterEach, describe, expect, it, vi } from "vitest";

import { Api, ServiceError } from "../src/api.js";
import { App } from "../src/app.js";
import type { FacetSummary } from "../src/types.js";

type Call = { url: string; init?: RequestInit };

function scriptedFetch(script: (call: Call) => unknown) {
  const calls: Call[] = [];
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    const call = { url, init };
    calls.push(call);
    const body = script(call);
    if (body instanceof Response) return body;
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  });
  return calls;
}

function facet(name: string, extra: Partial<FacetSummary> = {}): FacetSummary {
  return {
    name,
    type: "string",
    visible: true,
    order: 0,
    identifier: false,
    derivation: null,
    intervals: null,
    tree: [],
    ...extra,
  };
}

const EMPTY_LOG = { records: [], redo_depth: 0 };

function serviceScript(overrides: Record<string, unknown> = {}) {
  return (call: Call): unknown => {
    const path = call.url.replace(/^http:\/\/[^/]+/, "").split("?")[0];
    if (path in overrides) return overrides[path];
    if (path === "/projects") return [{ name: "hotels", kind: "single-file", log_length: 0 }];
    if (path === "/projects/hotels/open") {
      return {
        session_id: "s1",
        project: { name: "hotels", kind: "single-file" },
        outcomes: [],
        facets: [facet("Location"), facet("Rooms")],
        row_count: 9,
      };
    }
    if (path === "/sessions/s1/log") return EMPTY_LOG;
    if (path === "/sessions/s1/facets/Location/values") {
      return { values: [{ value: "Chania", count: 3 }], missing: 0 };
    }
    if (path === "/sessions/s1/transform") {
      return {
        outcome: { status: "applied", reason: null },
        record: { seq: 1, type: "X", params: {} },
        facets: [facet("Location"), facet("Rooms")],
        row_count: 9,
      };
    }
    throw new Error(`unscripted path: ${path}`);
  };
}

async function settled(): Promise<void> {
  for (let i = 0; i < 20; i++) await Promise.resolve();
}

describe("Api", () => {
  afterEach(() => vi.unstubAllGlobals());

  it("encodes project and facet names in URLs", async () => {
    const calls = scriptedFetch(() => ({ values: [], missing: 0 }));
    const api = new Api("http://x");
    await api.values("sid", "Pets allowed");
    expect(calls[0].url).toBe("http://x/sessions/sid/facets/Pets%20allowed/values");
  });

  it("serializes a row filter into the query string", async () => {
    const calls = scriptedFetch(() => ({ header: [], rows: [], total: 0, offset: 0 }));
    const api = new Api("");
    await api.rows("sid", { conjuncts: [{ facet: "A", op: "=", literal: "x" }] }, 10, 5);
    const url = new URL(calls[0].url, "http://local");
    expect(url.searchParams.get("offset")).toBe("10");
    expect(JSON.parse(url.searchParams.get("filter")!)).toEqual({
      conjuncts: [{ facet: "A", op: "=", literal: "x" }],
    });
  });

  it("raises ServiceError with the service detail", async () => {
    scriptedFetch(() => new Response(JSON.stringify({ detail: "nothing to undo" }), { status: 422 }));
    const api = new Api("");
    await expect(api.undo("sid")).rejects.toThrowError(ServiceError);
    await expect(api.undo("sid")).rejects.toThrow("nothing to undo");
  });
});

describe("App", () => {
  afterEach(() => {
    vi.unstubAllGlobals();
    document.body.innerHTML = "";
  });

  function mount(): App {
    const root = document.createElement("div");
    document.body.appendChild(root);
    return new App(root, new Api(""));
  }

  it("renders the project list, then facets after opening", async () => {
    scriptedFetch(serviceScript());
    const app = mount();
    await app.start();
    const openButton = document.querySelector<HTMLButtonElement>('[data-action="open-hotels"]');
    expect(openButton).not.toBeNull();
    openButton!.click();
    await settled();
    expect(document.querySelector("#facets")).not.toBeNull();
    expect(document.querySelectorAll("#facets li").length).toBe(2);
  });

  it("the add-parent gesture issues exactly one transform call", async () => {
    const calls = scriptedFetch(serviceScript());
    const app = mount();
    await app.start();
    await app.openProject("hotels");
    await app.selectFacet("Location");
    app.render();

    document.querySelector<HTMLButtonElement>('[data-action="term-value-Chania"]')!.click();
    document.querySelector<HTMLButtonElement>('[data-action="menu-add-parent"]')!.click();
    const input = document.querySelector<HTMLInputElement>("#parent-input")!;
    input.value = "Crete";
    document.querySelector<HTMLButtonElement>('[data-action="confirm-add-parent"]')!.click();
    await settled();

    const transforms = calls.filter((c) => c.url.includes("/transform"));
    expect(transforms.length).toBe(1);
    expect(JSON.parse(String(transforms[0].init!.body))).toEqual({
      type: "AddParent",
      params: { facet: "Location", children: ["Chania"], parent: "Crete" },
    });
  });

  it("visibility checkbox posts SetVisibility with the new state", async () => {
    const calls = scriptedFetch(serviceScript());
    const app = mount();
    await app.start();
    await app.openProject("hotels");

    const checkbox = document.querySelector<HTMLInputElement>(
      '[data-facet="Rooms"] input.visibility',
    )!;
    expect(checkbox.checked).toBe(true);
    checkbox.checked = false;
    checkbox.dispatchEvent(new Event("change"));
    await settled();

    const transforms = calls.filter((c) => c.url.includes("/transform"));
    expect(JSON.parse(String(transforms[0].init!.body))).toEqual({
      type: "SetVisibility",
      params: { facet: "Rooms", visible: false },
    });
  });

  it("a 409 from the service surfaces in the banner", async () => {
    scriptedFetch((call) => {
      if (call.url.endsWith("/projects")) {
        return [{ name: "hotels", kind: "single-file", log_length: 0 }];
      }
      return new Response(JSON.stringify({ detail: "locked" }), { status: 409 });
    });
    const app = mount();
    await app.start();
    await app.openProject("hotels");
    const banner = document.querySelector("#banner")!;
    expect(banner.className).toContain("error");
    expect(banner.textContent).toContain("409");
  });

  it("skipped outcomes after refresh render as warnings", async () => {
    scriptedFetch(
      serviceScript({
        "/projects/hotels/refresh": {
          outcomes: [{ status: "skipped", reason: "old value absent" }],
          row_count: 9,
        },
        "/sessions/s1/facets": {
          facets: [facet("Location"), facet("Rooms")],
          identifier_facet: null,
          row_count: 9,
        },
      }),
    );
    const app = mount();
    await app.start();
    await app.openProject("hotels");
    await app.refreshProject();
    const banner = document.querySelector("#banner")!;
    expect(banner.className).toContain("warning");
    expect(banner.textContent).toContain("old value absent");
  });
});
