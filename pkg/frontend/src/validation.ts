/** Client-side mirror of the server's validation rule table.
 *
 * The client never sends a document the server would refuse; these rules
 * must stay in lockstep with the table in docs/protocol.md. Violation
 * codes match the server's spelling so 422 responses and local checks
 * highlight instances the same way.
 */

import {
  ALLOWED_FONT_FAMILIES,
  ComponentDescriptor,
  LayoutDocument,
  Placement,
  RoleName,
  Theme,
  Violation,
} from "./types.js";

const COLOR_RE = /^#[0-9A-Fa-f]{6}$/;

export type Registry = Map<string, ComponentDescriptor>;

export function registryFrom(descriptors: ComponentDescriptor[]): Registry {
  return new Map(descriptors.map((d) => [d.component_id, d]));
}

export function placementsIntersect(a: Placement, b: Placement): boolean {
  return a.col < b.col + b.width && b.col < a.col + a.width && a.row < b.row + b.height && b.row < a.row + a.height;
}

export function visibleToRole(descriptor: ComponentDescriptor, role: RoleName, rights: string[]): boolean {
  if (descriptor.required_right !== null && !rights.includes(descriptor.required_right)) {
    return false;
  }
  if (role === "Guest" && !descriptor.guest_visible) {
    return false;
  }
  return true;
}

/** Rights per role; mirrors the server's fixed table. */
export const ROLE_RIGHTS: Record<RoleName, string[]> = {
  Guest: ["ViewPDM"],
  StaffMember: ["ViewPDM", "EditOwnLayout"],
  Engineer: ["ViewPDM", "EditOwnLayout"],
  ProjectManager: ["ViewPDM", "EditOwnLayout"],
  Businessman: ["ViewPDM", "EditOwnLayout"],
  Administrator: ["ViewPDM", "EditOwnLayout", "ViewAuditLog", "ManageUsers"],
};

export function validateTheme(theme: Theme): Violation[] {
  const problems: Violation[] = [];
  if (!COLOR_RE.test(theme.background_color)) {
    problems.push({ code: "bad_theme", detail: "background color must be #RRGGBB", subject: "theme.background_color" });
  }
  if (!COLOR_RE.test(theme.accent_color)) {
    problems.push({ code: "bad_theme", detail: "accent color must be #RRGGBB", subject: "theme.accent_color" });
  }
  if (!(ALLOWED_FONT_FAMILIES as readonly string[]).includes(theme.font_family)) {
    problems.push({ code: "bad_theme", detail: "font family not allowed", subject: "theme.font_family" });
  }
  if (!Number.isInteger(theme.font_size_pt) || theme.font_size_pt < 8 || theme.font_size_pt > 24) {
    problems.push({ code: "bad_theme", detail: "font size must be 8..24", subject: "theme.font_size_pt" });
  }
  return problems;
}

export function validateDocument(doc: LayoutDocument, registry: Registry): Violation[] {
  const violations: Violation[] = [];
  const seenIds = new Set<string>();
  const singletonSeen = new Set<string>();
  const rights = ROLE_RIGHTS[doc.role];

  doc.instances.forEach((inst) => {
    if (seenIds.has(inst.instance_id)) {
      violations.push({
        code: "duplicate_instance_id",
        detail: `instance id ${inst.instance_id} appears more than once`,
        subject: inst.instance_id,
      });
    }
    seenIds.add(inst.instance_id);

    const p = inst.placement;
    if (p.col < 0 || p.row < 0 || p.width < 1 || p.height < 1 || p.col + p.width > doc.grid.columns) {
      violations.push({
        code: "out_of_bounds",
        detail: `placement leaves the ${doc.grid.columns}-column grid`,
        subject: inst.instance_id,
      });
    }

    const descriptor = registry.get(inst.component_id);
    if (!descriptor) {
      violations.push({
        code: "unknown_component",
        detail: `component ${inst.component_id} is not in the registry`,
        subject: inst.instance_id,
      });
      return;
    }

    if (!visibleToRole(descriptor, doc.role, rights)) {
      violations.push({
        code: "role_forbidden",
        detail: `component ${inst.component_id} is not available to ${doc.role}`,
        subject: inst.instance_id,
      });
    }

    if (
      p.width < descriptor.min_size.width ||
      p.width > descriptor.max_size.width ||
      p.height < descriptor.min_size.height ||
      p.height > descriptor.max_size.height
    ) {
      violations.push({
        code: "size_bounds",
        detail: `size ${p.width}x${p.height} outside the bounds of ${inst.component_id}`,
        subject: inst.instance_id,
      });
    }

    if (descriptor.singleton) {
      if (singletonSeen.has(inst.component_id)) {
        violations.push({
          code: "singleton_violation",
          detail: `singleton component ${inst.component_id} placed more than once`,
          subject: inst.instance_id,
        });
      }
      singletonSeen.add(inst.component_id);
    }
  });

  for (let j = 0; j < doc.instances.length; j += 1) {
    for (let i = 0; i < j; i += 1) {
      const a = doc.instances[i]!;
      const b = doc.instances[j]!;
      if (placementsIntersect(a.placement, b.placement)) {
        violations.push({
          code: "overlap",
          detail: `instances ${a.instance_id} and ${b.instance_id} occupy intersecting cells`,
          subject: b.instance_id,
        });
      }
    }
  }

  violations.push(...validateTheme(doc.theme));
  return violations;
}

/** First-fit row-major free slot; rows are unbounded. */
export function findFreeSlot(doc: LayoutDocument, width: number, height: number): Placement | null {
  if (width > doc.grid.columns) {
    return null;
  }
  const taken = doc.instances.map((inst) => inst.placement);
  const lastRow = taken.reduce((acc, p) => Math.max(acc, p.row + p.height), 0);
  for (let row = 0; row <= lastRow; row += 1) {
    for (let col = 0; col <= doc.grid.columns - width; col += 1) {
      const candidate = { col, row, width, height };
      if (!taken.some((p) => placementsIntersect(candidate, p))) {
        return candidate;
      }
    }
  }
  return { col: 0, row: lastRow, width, height };
}
