/** Shared test fixtures: a small catalog and document builders. */

import { ComponentDescriptor, LayoutDocument, Placement, Theme } from "../src/types.js";
import { Registry, registryFrom } from "../src/validation.js";

export const DESCRIPTORS: ComponentDescriptor[] = [
  {
    component_id: "chat",
    display_name: "Chat",
    category: "communication",
    default_size: { width: 4, height: 6 },
    min_size: { width: 3, height: 4 },
    max_size: { width: 6, height: 12 },
    required_right: null,
    singleton: true,
    guest_visible: false,
  },
  {
    component_id: "calendar",
    display_name: "Calendar",
    category: "personal",
    default_size: { width: 4, height: 3 },
    min_size: { width: 2, height: 2 },
    max_size: { width: 6, height: 4 },
    required_right: null,
    singleton: false,
    guest_visible: false,
  },
  {
    component_id: "user-log",
    display_name: "User Log",
    category: "system",
    default_size: { width: 6, height: 4 },
    min_size: { width: 4, height: 3 },
    max_size: { width: 12, height: 10 },
    required_right: "ViewAuditLog",
    singleton: true,
    guest_visible: false,
  },
  {
    component_id: "product-search",
    display_name: "Product Search",
    category: "pdm-operations",
    default_size: { width: 8, height: 4 },
    min_size: { width: 4, height: 2 },
    max_size: { width: 12, height: 12 },
    required_right: null,
    singleton: false,
    guest_visible: true,
  },
];

export const REGISTRY: Registry = registryFrom(DESCRIPTORS);

export const DEFAULT_THEME: Theme = {
  background_color: "#FFFFFF",
  accent_color: "#1F6FEB",
  font_family: "arial",
  font_size_pt: 12,
  background_image: null,
};

export function instance(id: string, componentId: string, placement: Placement, settings: Record<string, string> = {}) {
  return { instance_id: id, component_id: componentId, placement, settings };
}

export function makeDocument(partial: Partial<LayoutDocument> = {}): LayoutDocument {
  return {
    schema_version: 1,
    owner: "u-engineer",
    role: "Engineer",
    revision: 0,
    grid: { columns: 12, row_unit_px: 24 },
    instances: [],
    theme: { ...DEFAULT_THEME },
    ...partial,
  };
}
