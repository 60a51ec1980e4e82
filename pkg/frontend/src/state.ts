/** Client layout state: the server's document, the locally edited copy,
 * a bounded undo stack, and the edit log used to recover from save
 * conflicts by reloading and reapplying.
 */

import { LayoutDocument, canonicalizeInstances, cloneDocument, structurallyEqual } from "./types.js";
import { EditResult, LayoutEdit, UndoEntry, applyEdit, applyUndo } from "./edits.js";
import { Registry } from "./validation.js";

export const UNDO_LIMIT = 50;

export interface ReapplyOutcome {
  reapplied: number;
  skipped: number;
}

export class ClientLayoutState {
  serverDocument: LayoutDocument;
  workingDocument: LayoutDocument;
  private undoStack: UndoEntry[] = [];
  private editLog: LayoutEdit[] = [];

  constructor(
    document: LayoutDocument,
    readonly registry: Registry,
  ) {
    this.serverDocument = cloneDocument(document);
    this.workingDocument = cloneDocument(document);
  }

  get dirty(): boolean {
    return !structurallyEqual(
      canonicalizeInstances(this.serverDocument),
      canonicalizeInstances(this.workingDocument),
    );
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  /** Stamp the session user as owner ahead of the first save. */
  personalizeOwner(userId: string): void {
    this.serverDocument.owner = userId;
    this.workingDocument.owner = userId;
  }

  apply(edit: LayoutEdit): EditResult {
    const result = applyEdit(this.workingDocument, edit, this.registry);
    if (result.ok) {
      this.workingDocument = result.doc;
      this.editLog.push(edit);
      this.undoStack.push(result.inverse);
      if (this.undoStack.length > UNDO_LIMIT) {
        this.undoStack.shift();
      }
    }
    return result;
  }

  undo(): boolean {
    const entry = this.undoStack.pop();
    if (!entry) {
      return false;
    }
    this.workingDocument = applyUndo(this.workingDocument, entry, this.registry);
    this.editLog.pop();
    return true;
  }

  /** The document to PUT: working copy carrying the server revision. */
  documentForSave(): LayoutDocument {
    const doc = canonicalizeInstances(this.workingDocument);
    doc.revision = this.serverDocument.revision;
    return doc;
  }

  /** After a 200 save: the working copy becomes the server truth. */
  markSaved(revision: number): void {
    this.workingDocument.revision = revision;
    this.serverDocument = cloneDocument(this.workingDocument);
    this.editLog = [];
    this.undoStack = [];
  }

  /** After a GET (initial load or reset): adopt the server document. */
  adopt(document: LayoutDocument): void {
    this.serverDocument = cloneDocument(document);
    this.workingDocument = cloneDocument(document);
    this.editLog = [];
    this.undoStack = [];
  }

  /** Conflict recovery: adopt the fresh server document, then replay the
   * local edits on top of it, dropping any that no longer apply. */
  reloadAndReapply(fresh: LayoutDocument): ReapplyOutcome {
    const pending = this.editLog.slice();
    this.adopt(fresh);
    let reapplied = 0;
    let skipped = 0;
    for (const edit of pending) {
      if (this.apply(edit).ok) {
        reapplied += 1;
      } else {
        skipped += 1;
      }
    }
    return { reapplied, skipped };
  }
}
