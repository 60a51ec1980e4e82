/** Wire shapes shared with the layout API (see docs/protocol.md). */

export type RoleName =
  | "Guest"
  | "StaffMember"
  | "Engineer"
  | "ProjectManager"
  | "Businessman"
  | "Administrator";

export interface GridSpec {
  columns: number;
  row_unit_px: number;
}

export interface Placement {
  col: number;
  row: number;
  width: number;
  height: number;
}

export interface Theme {
  background_color: string;
  accent_color: string;
  font_family: string;
  font_size_pt: number;
  background_image: string | null;
}

export interface ComponentInstance {
  instance_id: string;
  component_id: string;
  placement: Placement;
  settings: Record<string, string>;
}

export interface LayoutDocument {
  schema_version: number;
  owner: string;
  role: RoleName;
  revision: number;
  grid: GridSpec;
  instances: ComponentInstance[];
  theme: Theme;
}

export interface Size {
  width: number;
  height: number;
}

export interface ComponentDescriptor {
  component_id: string;
  display_name: string;
  category: string;
  default_size: Size;
  min_size: Size;
  max_size: Size;
  required_right: string | null;
  singleton: boolean;
  guest_visible: boolean;
}

export interface Violation {
  code: string;
  detail: string;
  subject: string;
}

export interface LoginResponse {
  token: string;
  role: RoleName;
  expires_at: string;
}

export interface UserDetails {
  user_id: string;
  username: string;
  role: RoleName;
  details: Record<string, string>;
}

export interface ChatMessage {
  seq: number;
  timestamp: string;
  from_user_id: string;
  body: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export const ALLOWED_FONT_FAMILIES = [
  "arial",
  "courier-new",
  "georgia",
  "helvetica",
  "tahoma",
  "times-new-roman",
  "verdana",
] as const;

/** Stable stringify with sorted keys: the client-side twin of the
 * server's canonical encoding, used for structural equality checks. */
export function canonicalStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalStringify).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([key, item]) => `${JSON.stringify(key)}:${canonicalStringify(item)}`);
  return `{${entries.join(",")}}`;
}

export function structurallyEqual(a: unknown, b: unknown): boolean {
  return canonicalStringify(a) === canonicalStringify(b);
}

export function cloneDocument(doc: LayoutDocument): LayoutDocument {
  return JSON.parse(JSON.stringify(doc)) as LayoutDocument;
}

/** Instances sorted by instance_id, matching the server's canonical order. */
export function canonicalizeInstances(doc: LayoutDocument): LayoutDocument {
  const copy = cloneDocument(doc);
  copy.instances.sort((a, b) => (a.instance_id < b.instance_id ? -1 : a.instance_id > b.instance_id ? 1 : 0));
  return copy;
}
