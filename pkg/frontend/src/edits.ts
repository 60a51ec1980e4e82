/** Local layout edits: what a gesture produces and how it applies.
 *
 * Edits are applied client-side for instant feedback and kept in a log so
 * they can be replayed after a save conflict ("reload and reapply").
 */

import { ComponentInstance, LayoutDocument, Placement, Theme, Violation, cloneDocument } from "./types.js";
import { Registry, findFreeSlot, validateDocument } from "./validation.js";

export type LayoutEdit =
  | { edit: "add_component"; component_id: string; placement: Placement | null; settings: Record<string, string> }
  | { edit: "remove_component"; instance_id: string }
  | { edit: "move_resize"; instance_id: string; placement: Placement }
  | { edit: "set_theme"; theme: Theme }
  | { edit: "set_setting"; instance_id: string; key: string; value: string | null };

/** Undo entries are edits plus the restore form produced by removals. */
export type UndoEntry = LayoutEdit | { edit: "restore_component"; instance: ComponentInstance };

export type EditResult =
  | { ok: true; doc: LayoutDocument; inverse: UndoEntry }
  | { ok: false; violations: Violation[] };

function nextInstanceId(doc: LayoutDocument, componentId: string): string {
  const used = new Set(doc.instances.map((inst) => inst.instance_id));
  let n = 1;
  while (used.has(`${componentId}-${n}`)) {
    n += 1;
  }
  return `${componentId}-${n}`;
}

function reject(violations: Violation[]): EditResult {
  return { ok: false, violations };
}

/** Apply one edit; returns the new document and the inverse for undo. */
export function applyEdit(doc: LayoutDocument, edit: LayoutEdit, registry: Registry): EditResult {
  const next = cloneDocument(doc);

  switch (edit.edit) {
    case "add_component": {
      const descriptor = registry.get(edit.component_id);
      if (!descriptor) {
        return reject([{ code: "unknown_component", detail: `unknown component ${edit.component_id}`, subject: "" }]);
      }
      const placement =
        edit.placement ?? findFreeSlot(doc, descriptor.default_size.width, descriptor.default_size.height);
      if (!placement) {
        return reject([{ code: "out_of_bounds", detail: "component does not fit the grid", subject: "" }]);
      }
      const instance: ComponentInstance = {
        instance_id: nextInstanceId(doc, edit.component_id),
        component_id: edit.component_id,
        placement,
        settings: { ...edit.settings },
      };
      next.instances.push(instance);
      const violations = validateDocument(next, registry);
      if (violations.length > 0) {
        return reject(violations);
      }
      return { ok: true, doc: next, inverse: { edit: "remove_component", instance_id: instance.instance_id } };
    }

    case "remove_component": {
      const existing = doc.instances.find((inst) => inst.instance_id === edit.instance_id);
      if (!existing) {
        return reject([{ code: "unknown_component", detail: "no such instance", subject: edit.instance_id }]);
      }
      next.instances = next.instances.filter((inst) => inst.instance_id !== edit.instance_id);
      return { ok: true, doc: next, inverse: { edit: "restore_component", instance: existing } };
    }

    case "move_resize": {
      const target = next.instances.find((inst) => inst.instance_id === edit.instance_id);
      if (!target) {
        return reject([{ code: "unknown_component", detail: "no such instance", subject: edit.instance_id }]);
      }
      const before = { ...target.placement };
      target.placement = { ...edit.placement };
      const violations = validateDocument(next, registry);
      if (violations.length > 0) {
        return reject(violations);
      }
      return { ok: true, doc: next, inverse: { edit: "move_resize", instance_id: edit.instance_id, placement: before } };
    }

    case "set_theme": {
      const before = { ...doc.theme };
      next.theme = { ...edit.theme };
      const violations = validateDocument(next, registry);
      if (violations.length > 0) {
        return reject(violations);
      }
      return { ok: true, doc: next, inverse: { edit: "set_theme", theme: before } };
    }

    case "set_setting": {
      const target = next.instances.find((inst) => inst.instance_id === edit.instance_id);
      if (!target) {
        return reject([{ code: "unknown_component", detail: "no such instance", subject: edit.instance_id }]);
      }
      const had = Object.prototype.hasOwnProperty.call(target.settings, edit.key);
      const previous = had ? target.settings[edit.key]! : null;
      if (edit.value === null) {
        delete target.settings[edit.key];
      } else {
        target.settings[edit.key] = edit.value;
      }
      return {
        ok: true,
        doc: next,
        inverse: { edit: "set_setting", instance_id: edit.instance_id, key: edit.key, value: previous },
      };
    }
  }
}

/** Apply an undo entry; restores are unconditional, edits re-validate. */
export function applyUndo(doc: LayoutDocument, entry: UndoEntry, registry: Registry): LayoutDocument {
  if (entry.edit === "restore_component") {
    const next = cloneDocument(doc);
    next.instances.push(entry.instance);
    return next;
  }
  const result = applyEdit(doc, entry, registry);
  return result.ok ? result.doc : doc;
}
