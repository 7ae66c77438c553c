// Edit session with optimistic concurrency. Edits stage locally and commit
// through the record-update endpoint carrying the version token the session
// was opened with. A stale token never overwrites silently: the commit
// surfaces a conflict prompt holding both values and the user must choose.

import { RequestFailed, WorkbenchClient } from "./api.js";
import type { SpecimenDoc } from "./types.js";

export interface ConflictField {
  field: string;
  yours: unknown;
  theirs: unknown;
}

export interface ConflictPrompt {
  recordId: string;
  staleVersion: number;
  currentVersion: number;
  fields: ConflictField[];
}

export type CommitResult =
  | { kind: "committed"; record: SpecimenDoc }
  | { kind: "conflict"; prompt: ConflictPrompt }
  | { kind: "noop" };

function readPath(doc: Record<string, unknown>, path: string): unknown {
  let node: unknown = doc;
  for (const part of path.split(".")) {
    if (node === null || typeof node !== "object") return undefined;
    node = (node as Record<string, unknown>)[part];
  }
  return node;
}

export class EditSession {
  readonly recordId: string;
  readonly baseVersion: number;
  private staged: Map<string, unknown> = new Map();

  constructor(recordId: string, baseVersion: number) {
    this.recordId = recordId;
    this.baseVersion = baseVersion;
  }

  stage(fieldPath: string, value: unknown): void {
    this.staged.set(fieldPath, value);
  }

  cancel(): void {
    this.staged.clear();
  }

  get stagedEdits(): Record<string, unknown> {
    return Object.fromEntries(this.staged);
  }

  get dirty(): boolean {
    return this.staged.size > 0;
  }

  async commit(client: WorkbenchClient): Promise<CommitResult> {
    if (!this.dirty) return { kind: "noop" };
    try {
      const record = await client.updateRecord(
        this.recordId, this.stagedEdits, this.baseVersion,
      );
      this.staged.clear();
      return { kind: "committed", record };
    } catch (error) {
      if (error instanceof RequestFailed && error.status === 409) {
        const page = await client.specimenPage(this.recordId);
        const fields: ConflictField[] = [];
        for (const [path, yours] of this.staged) {
          fields.push({
            field: path,
            yours,
            theirs: readPath(page.record, path),
          });
        }
        return {
          kind: "conflict",
          prompt: {
            recordId: this.recordId,
            staleVersion: this.baseVersion,
            currentVersion: page.record.version,
            fields,
          },
        };
      }
      throw error;
    }
  }

  /** Resolve a conflict by re-basing onto the current version ("keep mine")
   *  or dropping the staged edits ("take theirs"). */
  resolve(prompt: ConflictPrompt, choice: "mine" | "theirs"): EditSession {
    const next = new EditSession(this.recordId, prompt.currentVersion);
    if (choice === "mine") {
      for (const field of prompt.fields) next.stage(field.field, field.yours);
    }
    return next;
  }
}
