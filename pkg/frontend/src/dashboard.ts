/** DOM rendering and gesture wiring for the dashboard.
 *
 * All layout decisions go through the pure modules (grid, edits,
 * validation, state); this file only translates pointer events into edit
 * proposals and paints the result.
 */

import { ApiClient, ApiError } from "./api.js";
import { LayoutEdit } from "./edits.js";
import { CellMetrics, cellAt, metricsFor, proposeMove, proposeResize, rectOf } from "./grid.js";
import { ClientLayoutState } from "./state.js";
import {
  ALLOWED_FONT_FAMILIES,
  ComponentDescriptor,
  ComponentInstance,
  LayoutDocument,
  Theme,
  UserDetails,
  Violation,
} from "./types.js";
import { Registry } from "./validation.js";

const CHAT_POLL_MS = 3000;

interface DragContext {
  instanceId: string;
  mode: "move" | "resize";
  startX: number;
  startY: number;
  origin: { col: number; row: number; width: number; height: number };
  element: HTMLElement;
}

export class Dashboard {
  state: ClientLayoutState | null = null;
  registry: Registry = new Map();
  descriptors: ComponentDescriptor[] = [];
  user: UserDetails | null = null;
  readOnly = true;

  private board: HTMLElement;
  private tray: HTMLElement;
  private banner: HTMLElement;
  private toolbar: HTMLElement;
  private dialog: HTMLElement;
  private metrics: CellMetrics | null = null;
  private drag: DragContext | null = null;
  private highlighted: Set<string> = new Set();
  private chatSeq = 0;
  private chatTimer: number | null = null;

  constructor(
    readonly api: ApiClient,
    readonly root: HTMLElement,
  ) {
    this.root.innerHTML = `
      <header class="topbar">
        <span class="brand">flexpdm</span>
        <span id="whoami" class="whoami"></span>
        <span id="dirty" class="dirty-flag" hidden>unsaved changes</span>
        <span class="spacer"></span>
        <button id="undo" hidden>Undo</button>
        <button id="save" hidden>Save</button>
        <button id="reset" hidden>Reset to default</button>
        <form id="login-form" class="login-form">
          <input id="login-user" placeholder="username" autocomplete="username" />
          <input id="login-pass" type="password" placeholder="password" autocomplete="current-password" />
          <button type="submit">Log in</button>
        </form>
        <button id="logout" hidden>Log out</button>
      </header>
      <div id="banner" class="banner" hidden></div>
      <main class="layout-area">
        <aside id="tray" class="tray"></aside>
        <section id="board" class="board"></section>
      </main>
      <div id="dialog" class="dialog-backdrop" hidden></div>
    `;
    this.board = this.root.querySelector("#board")!;
    this.tray = this.root.querySelector("#tray")!;
    this.banner = this.root.querySelector("#banner")!;
    this.toolbar = this.root.querySelector(".topbar")!;
    this.dialog = this.root.querySelector("#dialog")!;
    this.wireToolbar();
    this.wirePointerHandlers();
  }

  // -- bootstrapping ---------------------------------------------------------

  async start(): Promise<void> {
    const stored = window.sessionStorage.getItem("flexpdm-token");
    if (stored) {
      this.api.token = stored;
    }
    await this.refreshIdentity();
    await this.reloadAll();
  }

  private async refreshIdentity(): Promise<void> {
    this.user = null;
    if (this.api.token) {
      try {
        this.user = await this.api.getUserDetails();
      } catch {
        this.api.token = null;
        window.sessionStorage.removeItem("flexpdm-token");
      }
    }
  }

  async reloadAll(): Promise<void> {
    this.descriptors = await this.api.getComponents();
    this.registry = new Map(this.descriptors.map((d) => [d.component_id, d]));
    const { document: doc, readOnly } = await this.api.getLayout();
    this.readOnly = readOnly;
    this.state = new ClientLayoutState(doc, this.registry);
    if (this.user) {
      this.state.personalizeOwner(this.user.user_id);
    }
    this.render();
    this.restartChatPolling();
  }

  // -- toolbar ---------------------------------------------------------------

  private wireToolbar(): void {
    const loginForm = this.root.querySelector<HTMLFormElement>("#login-form")!;
    loginForm.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.handleLogin();
    });
    this.root.querySelector("#logout")!.addEventListener("click", () => void this.handleLogout());
    this.root.querySelector("#save")!.addEventListener("click", () => void this.save());
    this.root.querySelector("#reset")!.addEventListener("click", () => void this.reset());
    this.root.querySelector("#undo")!.addEventListener("click", () => {
      if (this.state?.undo()) {
        this.render();
      }
    });
  }

  private async handleLogin(): Promise<void> {
    const username = this.root.querySelector<HTMLInputElement>("#login-user")!.value;
    const password = this.root.querySelector<HTMLInputElement>("#login-pass")!.value;
    try {
      await this.api.login(username, password);
      window.sessionStorage.setItem("flexpdm-token", this.api.token!);
      await this.refreshIdentity();
      await this.reloadAll();
    } catch (error) {
      this.showBanner(error instanceof ApiError ? error.message : "login failed");
    }
  }

  private async handleLogout(): Promise<void> {
    try {
      await this.api.logout();
    } finally {
      window.sessionStorage.removeItem("flexpdm-token");
      this.user = null;
      await this.reloadAll();
    }
  }

  // -- save / reset / conflicts ----------------------------------------------

  async save(): Promise<void> {
    if (!this.state || !this.user) {
      return;
    }
    try {
      const revision = await this.api.putLayout(this.state.documentForSave());
      this.state.markSaved(revision);
      this.highlighted.clear();
      this.showBanner(`saved (revision ${revision})`, false);
      this.render();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.showConflictDialog();
      } else if (error instanceof ApiError && error.status === 422) {
        this.highlightViolations(error.details);
        this.showBanner(`save rejected: ${error.message}`);
        this.render();
      } else {
        this.showBanner(error instanceof Error ? error.message : "save failed");
      }
    }
  }

  async reset(): Promise<void> {
    if (!this.user) {
      return;
    }
    await this.api.deleteLayout();
    await this.reloadAll();
    this.showBanner("restored the default layout", false);
  }

  private showConflictDialog(): void {
    this.dialog.hidden = false;
    this.dialog.innerHTML = `
      <div class="dialog">
        <h2>Save conflict</h2>
        <p>Someone saved a newer layout since you loaded. Reload the latest
           version and reapply your changes on top?</p>
        <div class="dialog-buttons">
          <button id="conflict-reapply">Reload &amp; reapply</button>
          <button id="conflict-discard">Discard my changes</button>
        </div>
      </div>
    `;
    this.dialog.querySelector("#conflict-reapply")!.addEventListener("click", () => void this.resolveConflict(true));
    this.dialog.querySelector("#conflict-discard")!.addEventListener("click", () => void this.resolveConflict(false));
  }

  private async resolveConflict(reapply: boolean): Promise<void> {
    this.dialog.hidden = true;
    this.dialog.innerHTML = "";
    const { document: fresh } = await this.api.getLayout();
    if (!this.state) {
      return;
    }
    if (reapply) {
      const outcome = this.state.reloadAndReapply(fresh);
      if (this.user) {
        this.state.personalizeOwner(this.user.user_id);
      }
      const note = outcome.skipped > 0 ? ` (${outcome.skipped} change(s) no longer fit)` : "";
      this.showBanner(`reloaded revision ${fresh.revision}; reapplied ${outcome.reapplied} change(s)${note}`, false);
    } else {
      this.state.adopt(fresh);
      if (this.user) {
        this.state.personalizeOwner(this.user.user_id);
      }
      this.showBanner(`reloaded revision ${fresh.revision}`, false);
    }
    this.render();
  }

  private highlightViolations(details: unknown): void {
    this.highlighted.clear();
    const violations = (details as { violations?: Violation[] } | undefined)?.violations ?? [];
    for (const violation of violations) {
      if (violation.subject) {
        this.highlighted.add(violation.subject);
      }
    }
  }

  // -- edits -------------------------------------------------------------------

  applyEdit(edit: LayoutEdit): boolean {
    if (!this.state || this.readOnly) {
      return false;
    }
    const result = this.state.apply(edit);
    if (!result.ok) {
      this.flashRejection(result.violations);
      return false;
    }
    this.render();
    return true;
  }

  private flashRejection(violations: Violation[]): void {
    const first = violations[0];
    this.showBanner(first ? `not allowed: ${first.detail}` : "not allowed");
    this.board.classList.add("rejected");
    window.setTimeout(() => this.board.classList.remove("rejected"), 350);
  }

  private showBanner(text: string, isError = true): void {
    this.banner.hidden = false;
    this.banner.textContent = text;
    this.banner.classList.toggle("banner-error", isError);
    window.setTimeout(() => {
      this.banner.hidden = true;
    }, 4000);
  }

  // -- rendering -----------------------------------------------------------------

  render(): void {
    if (!this.state) {
      return;
    }
    const doc = this.state.workingDocument;
    this.applyTheme(doc.theme);
    this.renderToolbarState();
    this.renderTray();
    this.renderBoard(doc);
  }

  private renderToolbarState(): void {
    const editing = Boolean(this.user) && !this.readOnly;
    this.toolbar.querySelector<HTMLElement>("#save")!.hidden = !editing;
    this.toolbar.querySelector<HTMLElement>("#reset")!.hidden = !editing;
    this.toolbar.querySelector<HTMLElement>("#undo")!.hidden = !editing;
    this.toolbar.querySelector<HTMLElement>("#login-form")!.hidden = Boolean(this.user);
    this.toolbar.querySelector<HTMLElement>("#logout")!.hidden = !this.user;
    this.toolbar.querySelector<HTMLElement>("#whoami")!.textContent = this.user
      ? `${this.user.username} · ${this.user.role}`
      : "guest · read-only";
    this.toolbar.querySelector<HTMLElement>("#dirty")!.hidden = !(this.state?.dirty ?? false);
  }

  private renderTray(): void {
    this.tray.innerHTML = `<h2>Components</h2>`;
    const editing = Boolean(this.user) && !this.readOnly;
    if (!editing) {
      const note = document.createElement("p");
      note.className = "tray-note";
      note.textContent = "Log in to customize your dashboard.";
      this.tray.appendChild(note);
      return;
    }
    for (const descriptor of this.descriptors) {
      const item = document.createElement("button");
      item.className = "tray-item";
      item.dataset.componentId = descriptor.component_id;
      item.textContent = descriptor.display_name;
      item.title = `${descriptor.category} · default ${descriptor.default_size.width}x${descriptor.default_size.height}`;
      item.addEventListener("click", () => {
        this.applyEdit({ edit: "add_component", component_id: descriptor.component_id, placement: null, settings: {} });
      });
      this.tray.appendChild(item);
    }
  }

  private renderBoard(doc: LayoutDocument): void {
    this.board.innerHTML = "";
    this.metrics = metricsFor(doc.grid, this.board.clientWidth || 960);
    const bottom = doc.instances.reduce((acc, inst) => Math.max(acc, inst.placement.row + inst.placement.height), 8);
    this.board.style.minHeight = `${(bottom + 2) * (this.metrics.rowHeightPx + this.metrics.gapPx)}px`;
    for (const instance of doc.instances) {
      this.board.appendChild(this.renderInstance(instance));
    }
  }

  private renderInstance(instance: ComponentInstance): HTMLElement {
    const descriptor = this.registry.get(instance.component_id);
    const panel = document.createElement("article");
    panel.className = "panel";
    panel.dataset.instanceId = instance.instance_id;
    if (this.highlighted.has(instance.instance_id)) {
      panel.classList.add("invalid");
    }
    const rect = rectOf(instance.placement, this.metrics!);
    panel.style.left = `${rect.left}px`;
    panel.style.top = `${rect.top}px`;
    panel.style.width = `${rect.width}px`;
    panel.style.height = `${rect.height}px`;

    const editing = Boolean(this.user) && !this.readOnly;
    const title = descriptor?.display_name ?? instance.component_id;
    panel.innerHTML = `
      <header class="panel-header" data-drag-handle="true">
        <span>${title}</span>
        ${editing ? `<button class="panel-remove" title="Remove">×</button>` : ""}
      </header>
      <div class="panel-body"></div>
      ${editing ? `<div class="panel-resize" title="Resize"></div>` : ""}
    `;
    panel.querySelector(".panel-remove")?.addEventListener("click", (event) => {
      event.stopPropagation();
      this.applyEdit({ edit: "remove_component", instance_id: instance.instance_id });
    });
    this.renderPanelBody(panel.querySelector(".panel-body")!, instance);
    return panel;
  }

  // -- component bodies ------------------------------------------------------------

  private renderPanelBody(body: HTMLElement, instance: ComponentInstance): void {
    switch (instance.component_id) {
      case "chat":
        this.renderChat(body);
        return;
      case "calendar":
        renderCalendar(body);
        return;
      case "interface-setting":
        this.renderThemeEditor(body);
        return;
      case "user-details":
        this.renderUserDetails(body);
        return;
      case "user-log":
        void this.renderUserLog(body);
        return;
      case "product-search":
        void this.renderProductSearch(body);
        return;
      case "project-list":
        void this.renderProjectList(body);
        return;
      case "document-browser":
        void this.renderDocumentBrowser(body);
        return;
      default:
        body.textContent = instance.component_id;
    }
  }

  private renderChat(body: HTMLElement): void {
    body.innerHTML = `
      <ul class="chat-log"></ul>
      <form class="chat-form">
        <input class="chat-input" placeholder="message the floor" maxlength="2000" />
        <button type="submit">Send</button>
      </form>
    `;
    if (!this.user) {
      body.querySelector<HTMLElement>(".chat-form")!.hidden = true;
    }
    body.querySelector(".chat-form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = body.querySelector<HTMLInputElement>(".chat-input")!;
      const text = input.value.trim();
      if (!text) {
        return;
      }
      void this.api.postChat(text).then(() => {
        input.value = "";
        void this.pollChat();
      });
    });
    void this.pollChat();
  }

  private restartChatPolling(): void {
    if (this.chatTimer !== null) {
      window.clearInterval(this.chatTimer);
      this.chatTimer = null;
    }
    this.chatSeq = 0;
    const hasChat = this.state?.workingDocument.instances.some((i) => i.component_id === "chat") ?? false;
    if (this.user && hasChat) {
      this.chatTimer = window.setInterval(() => void this.pollChat(), CHAT_POLL_MS);
    }
  }

  private async pollChat(): Promise<void> {
    if (!this.user) {
      return;
    }
    const log = this.board.querySelector<HTMLElement>(".chat-log");
    if (!log) {
      return;
    }
    try {
      const messages = await this.api.getChat(this.chatSeq);
      for (const message of messages) {
        this.chatSeq = Math.max(this.chatSeq, message.seq);
        const item = document.createElement("li");
        item.textContent = `${message.from_user_id.replace(/^u-/, "")}: ${message.body}`;
        log.appendChild(item);
      }
      while (log.childElementCount > 50) {
        log.removeChild(log.firstElementChild!);
      }
    } catch {
      // polling errors are non-blocking; the next tick retries
    }
  }

  private renderThemeEditor(body: HTMLElement): void {
    const theme = this.state!.workingDocument.theme;
    const fonts = ALLOWED_FONT_FAMILIES.map(
      (font) => `<option value="${font}" ${font === theme.font_family ? "selected" : ""}>${font}</option>`,
    ).join("");
    body.innerHTML = `
      <form class="theme-form">
        <label>Background <input type="color" name="background_color" value="${theme.background_color}"></label>
        <label>Accent <input type="color" name="accent_color" value="${theme.accent_color}"></label>
        <label>Font <select name="font_family">${fonts}</select></label>
        <label>Size <input type="number" name="font_size_pt" min="8" max="24" value="${theme.font_size_pt}"></label>
        <label>Image <input type="text" name="background_image" placeholder="url or empty" value="${theme.background_image ?? ""}"></label>
        <button type="submit">Apply</button>
      </form>
    `;
    body.querySelector(".theme-form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      const form = event.currentTarget as HTMLFormElement;
      const data = new FormData(form);
      const next: Theme = {
        background_color: String(data.get("background_color")),
        accent_color: String(data.get("accent_color")),
        font_family: String(data.get("font_family")),
        font_size_pt: Number(data.get("font_size_pt")),
        background_image: String(data.get("background_image")) || null,
      };
      this.applyEdit({ edit: "set_theme", theme: next });
    });
  }

  private renderUserDetails(body: HTMLElement): void {
    if (!this.user) {
      body.textContent = "Log in to manage your details.";
      return;
    }
    const details = this.user.details;
    body.innerHTML = `
      <form class="details-form">
        <label>Name <input name="full_name" value="${details.full_name ?? ""}"></label>
        <label>Email <input name="email" value="${details.email ?? ""}"></label>
        <label>Department <input name="department" value="${details.department ?? ""}"></label>
        <button type="submit">Update</button>
      </form>
    `;
    body.querySelector(".details-form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(event.currentTarget as HTMLFormElement);
      void this.api
        .putUserDetails({
          full_name: String(data.get("full_name")),
          email: String(data.get("email")),
          department: String(data.get("department")),
        })
        .then((user) => {
          this.user = user;
          this.showBanner("details updated", false);
        })
        .catch((error: unknown) => {
          this.showBanner(error instanceof Error ? error.message : "update failed");
        });
    });
  }

  private async renderUserLog(body: HTMLElement): Promise<void> {
    try {
      const response = await fetch(`${this.api.baseUrl}/api/audit?limit=50`, {
        headers: this.api.token ? { "X-Flex-Session": this.api.token } : {},
      });
      if (!response.ok) {
        body.textContent = "Audit log unavailable for this role.";
        return;
      }
      const entries = (await response.json()) as Array<{ seq: number; event_type: string; user_id: string; timestamp: string }>;
      body.innerHTML = `<table class="log-table"><tbody>${entries
        .slice(-15)
        .map((e) => `<tr><td>${e.seq}</td><td>${e.event_type}</td><td>${e.user_id}</td></tr>`)
        .join("")}</tbody></table>`;
    } catch {
      body.textContent = "Audit log unavailable.";
    }
  }

  private async renderProductSearch(body: HTMLElement): Promise<void> {
    body.innerHTML = `
      <input class="search-input" placeholder="filter products" />
      <ul class="result-list"></ul>
    `;
    const products = await this.api.getProducts().catch(() => []);
    const list = body.querySelector<HTMLElement>(".result-list")!;
    const paint = (needle: string) => {
      list.innerHTML = products
        .filter((p) => `${p.name} ${p.id}`.toLowerCase().includes(needle.toLowerCase()))
        .map((p) => `<li><strong>${p.id}</strong> ${p.name} <em>rev ${p.revision_label}</em></li>`)
        .join("");
    };
    paint("");
    body.querySelector<HTMLInputElement>(".search-input")!.addEventListener("input", (event) => {
      paint((event.target as HTMLInputElement).value);
    });
  }

  private async renderProjectList(body: HTMLElement): Promise<void> {
    const projects = await this.api.getProjects().catch(() => []);
    body.innerHTML = `<ul class="result-list">${projects
      .map((p) => `<li><strong>${p.id}</strong> ${p.name} <span class="status status-${p.status}">${p.status}</span></li>`)
      .join("")}</ul>`;
  }

  private async renderDocumentBrowser(body: HTMLElement): Promise<void> {
    const products = await this.api.getProducts().catch(() => []);
    body.innerHTML = `<ul class="result-list">${products
      .map((p) => `<li>📄 ${p.name} — specification (rev ${p.revision_label})</li>`)
      .join("")}</ul>`;
  }

  private applyTheme(theme: Theme): void {
    this.root.style.setProperty("--background-color", theme.background_color);
    this.root.style.setProperty("--accent-color", theme.accent_color);
    this.root.style.setProperty("--font-family", theme.font_family.replace(/-/g, " "));
    this.root.style.setProperty("--font-size", `${theme.font_size_pt}pt`);
    this.root.style.setProperty(
      "--background-image",
      theme.background_image ? `url("${theme.background_image}")` : "none",
    );
  }

  // -- drag and drop -----------------------------------------------------------------

  private wirePointerHandlers(): void {
    this.board.addEventListener("pointerdown", (event) => this.onPointerDown(event));
    window.addEventListener("pointermove", (event) => this.onPointerMove(event));
    window.addEventListener("pointerup", (event) => this.onPointerUp(event));
  }

  private onPointerDown(event: PointerEvent): void {
    if (!this.state || this.readOnly || !this.user) {
      return;
    }
    const target = event.target as HTMLElement;
    const panel = target.closest<HTMLElement>(".panel");
    if (!panel) {
      return;
    }
    const instanceId = panel.dataset.instanceId!;
    const instance = this.state.workingDocument.instances.find((i) => i.instance_id === instanceId);
    if (!instance) {
      return;
    }
    let mode: "move" | "resize" | null = null;
    if (target.closest(".panel-resize")) {
      mode = "resize";
    } else if (target.closest("[data-drag-handle]")) {
      mode = "move";
    }
    if (!mode) {
      return;
    }
    event.preventDefault();
    panel.classList.add("dragging");
    this.drag = {
      instanceId,
      mode,
      startX: event.clientX,
      startY: event.clientY,
      origin: { ...instance.placement },
      element: panel,
    };
  }

  private dragProposal(event: PointerEvent) {
    const drag = this.drag!;
    const doc = this.state!.workingDocument;
    const metrics = this.metrics!;
    const stepX = metrics.cellWidthPx + metrics.gapPx;
    const stepY = metrics.rowHeightPx + metrics.gapPx;
    const dxCells = Math.round((event.clientX - drag.startX) / stepX);
    const dyCells = Math.round((event.clientY - drag.startY) / stepY);
    if (drag.mode === "move") {
      return proposeMove(doc.grid, drag.origin, drag.origin.col + dxCells, drag.origin.row + dyCells);
    }
    const descriptor = this.registry.get(
      doc.instances.find((i) => i.instance_id === drag.instanceId)!.component_id,
    )!;
    return proposeResize(doc.grid, descriptor, drag.origin, drag.origin.width + dxCells, drag.origin.height + dyCells);
  }

  private onPointerMove(event: PointerEvent): void {
    if (!this.drag || !this.metrics) {
      return;
    }
    const rect = rectOf(this.dragProposal(event), this.metrics);
    const element = this.drag.element;
    element.style.left = `${rect.left}px`;
    element.style.top = `${rect.top}px`;
    element.style.width = `${rect.width}px`;
    element.style.height = `${rect.height}px`;
  }

  private onPointerUp(event: PointerEvent): void {
    if (!this.drag) {
      return;
    }
    const drag = this.drag;
    this.drag = null;
    drag.element.classList.remove("dragging");
    const placement = this.dragProposal(event);
    const unchanged =
      placement.col === drag.origin.col &&
      placement.row === drag.origin.row &&
      placement.width === drag.origin.width &&
      placement.height === drag.origin.height;
    if (unchanged) {
      this.render();
      return;
    }
    // applyEdit re-renders on success; a rejection repaints the original
    // placement, which is the snap-back cue.
    if (!this.applyEdit({ edit: "move_resize", instance_id: drag.instanceId, placement })) {
      this.render();
    }
  }

  cellFromPoint(xPx: number, yPx: number): { col: number; row: number } | null {
    if (!this.state || !this.metrics) {
      return null;
    }
    return cellAt(this.state.workingDocument.grid, this.metrics, xPx, yPx);
  }
}

/** Display-only month view with today marked. */
export function renderCalendar(body: HTMLElement, today: Date = new Date()): void {
  const year = today.getFullYear();
  const month = today.getMonth();
  const first = new Date(year, month, 1);
  const daysInMonth = new Date(year, month + 1, 0).getDate();
  const startWeekday = (first.getDay() + 6) % 7; // Monday-first
  let cells = "";
  for (let blank = 0; blank < startWeekday; blank += 1) {
    cells += `<td></td>`;
  }
  for (let day = 1; day <= daysInMonth; day += 1) {
    const isToday = day === today.getDate();
    cells += `<td class="${isToday ? "today" : ""}">${day}</td>`;
    if ((startWeekday + day) % 7 === 0) {
      cells += `</tr><tr>`;
    }
  }
  const monthName = today.toLocaleString("en", { month: "long" });
  body.innerHTML = `
    <div class="calendar">
      <div class="calendar-title">${monthName} ${year}</div>
      <table><thead><tr><th>Mo</th><th>Tu</th><th>We</th><th>Th</th><th>Fr</th><th>Sa</th><th>Su</th></tr></thead>
      <tbody><tr>${cells}</tr></tbody></table>
    </div>
  `;
}
