import { describe, expect, it } from "vitest";

import { ClientLayoutState, UNDO_LIMIT } from "../src/state.js";
import { REGISTRY, instance, makeDocument } from "./fixtures.js";

function freshState() {
  const doc = makeDocument({
    instances: [
      instance("chat-1", "chat", { col: 0, row: 0, width: 4, height: 6 }),
      instance("cal-1", "calendar", { col: 4, row: 0, width: 4, height: 3 }),
    ],
  });
  return new ClientLayoutState(doc, REGISTRY);
}

describe("ClientLayoutState", () => {
  it("starts clean", () => {
    const state = freshState();
    expect(state.dirty).toBe(false);
    expect(state.undoDepth).toBe(0);
  });

  it("dirty exactly when working differs from server", () => {
    const state = freshState();
    const result = state.apply({
      edit: "move_resize",
      instance_id: "cal-1",
      placement: { col: 4, row: 10, width: 4, height: 3 },
    });
    expect(result.ok).toBe(true);
    expect(state.dirty).toBe(true);
    state.undo();
    expect(state.dirty).toBe(false);
  });

  it("rejected edits change nothing", () => {
    const state = freshState();
    const result = state.apply({
      edit: "move_resize",
      instance_id: "cal-1",
      placement: { col: 0, row: 0, width: 4, height: 3 }, // onto the chat
    });
    expect(result.ok).toBe(false);
    expect(state.dirty).toBe(false);
    expect(state.undoDepth).toBe(0);
  });

  it("undo reverses an add", () => {
    const state = freshState();
    state.apply({ edit: "add_component", component_id: "calendar", placement: null, settings: {} });
    expect(state.workingDocument.instances).toHaveLength(3);
    state.undo();
    expect(state.workingDocument.instances).toHaveLength(2);
    expect(state.dirty).toBe(false);
  });

  it("undo restores a removed instance verbatim", () => {
    const state = freshState();
    state.apply({ edit: "remove_component", instance_id: "chat-1" });
    expect(state.workingDocument.instances.map((i) => i.instance_id)).toEqual(["cal-1"]);
    state.undo();
    expect(state.dirty).toBe(false);
  });

  it("undo stack is bounded", () => {
    const state = freshState();
    for (let n = 0; n < UNDO_LIMIT + 10; n += 1) {
      const row = 10 + (n % 2);
      state.apply({ edit: "move_resize", instance_id: "cal-1", placement: { col: 4, row, width: 4, height: 3 } });
    }
    expect(state.undoDepth).toBe(UNDO_LIMIT);
  });

  it("documentForSave carries the server revision and canonical order", () => {
    const state = freshState();
    state.serverDocument.revision = 4;
    state.apply({ edit: "add_component", component_id: "calendar", placement: null, settings: {} });
    const doc = state.documentForSave();
    expect(doc.revision).toBe(4);
    const ids = doc.instances.map((i) => i.instance_id);
    expect(ids).toEqual([...ids].sort());
  });

  it("markSaved adopts the working copy as server truth", () => {
    const state = freshState();
    state.apply({
      edit: "set_theme",
      theme: { ...state.workingDocument.theme, accent_color: "#AA5500" },
    });
    state.markSaved(7);
    expect(state.dirty).toBe(false);
    expect(state.serverDocument.revision).toBe(7);
    expect(state.serverDocument.theme.accent_color).toBe("#AA5500");
    expect(state.undoDepth).toBe(0);
  });

  it("personalizeOwner stamps both documents without dirtying", () => {
    const state = freshState();
    state.personalizeOwner("u-someone");
    expect(state.workingDocument.owner).toBe("u-someone");
    expect(state.dirty).toBe(false);
  });

  describe("reloadAndReapply", () => {
    it("replays compatible local edits onto the fresh document", () => {
      const state = freshState();
      state.apply({
        edit: "move_resize",
        instance_id: "cal-1",
        placement: { col: 4, row: 12, width: 4, height: 3 },
      });
      // fresh server copy: someone else recolored and bumped the revision
      const fresh = makeDocument({
        revision: 3,
        instances: [
          instance("chat-1", "chat", { col: 0, row: 0, width: 4, height: 6 }),
          instance("cal-1", "calendar", { col: 4, row: 0, width: 4, height: 3 }),
        ],
        theme: { ...state.serverDocument.theme, background_color: "#EEEEEE" },
      });
      const outcome = state.reloadAndReapply(fresh);
      expect(outcome).toEqual({ reapplied: 1, skipped: 0 });
      expect(state.serverDocument.revision).toBe(3);
      expect(state.workingDocument.theme.background_color).toBe("#EEEEEE");
      expect(state.workingDocument.instances.find((i) => i.instance_id === "cal-1")!.placement.row).toBe(12);
      expect(state.dirty).toBe(true);
    });

    it("drops edits that no longer apply", () => {
      const state = freshState();
      state.apply({
        edit: "move_resize",
        instance_id: "cal-1",
        placement: { col: 4, row: 12, width: 4, height: 3 },
      });
      // the other client moved chat into exactly those cells
      const fresh = makeDocument({
        revision: 2,
        instances: [
          instance("chat-1", "chat", { col: 4, row: 10, width: 4, height: 6 }),
          instance("cal-1", "calendar", { col: 0, row: 0, width: 4, height: 3 }),
        ],
      });
      const outcome = state.reloadAndReapply(fresh);
      expect(outcome).toEqual({ reapplied: 0, skipped: 1 });
      expect(state.dirty).toBe(false);
    });
  });
});
