/**
 * Client-side state: the session (persisted token + profile) and draft
 * buffers that survive mid-gig interruptions. Drafts live in
 * localStorage until submit, then are cleared. Nothing here ever holds
 * another worker's raw data; the client simply never requests it.
 */

import type { Profile } from "./api.js";

const TOKEN_KEY = "g2g.session";
const PROFILE_KEY = "g2g.profile";
const DRAFT_PREFIX = "g2g.draft.";

export type ViewName =
  | "feed"
  | "share"
  | "income"
  | "expense"
  | "trends"
  | "insights"
  | "planner"
  | "tax"
  | "manage"
  | "profile"
  | "login";

export class SessionState {
  constructor(private readonly storage: Storage) {}

  save(token: string, profile: Profile): void {
    this.storage.setItem(TOKEN_KEY, token);
    this.storage.setItem(PROFILE_KEY, JSON.stringify(profile));
  }

  token(): string | null {
    return this.storage.getItem(TOKEN_KEY);
  }

  profile(): Profile | null {
    const raw = this.storage.getItem(PROFILE_KEY);
    return raw ? (JSON.parse(raw) as Profile) : null;
  }

  clear(): void {
    this.storage.removeItem(TOKEN_KEY);
    this.storage.removeItem(PROFILE_KEY);
  }
}

export class DraftStore {
  constructor(private readonly storage: Storage) {}

  save(name: string, draft: object): void {
    this.storage.setItem(DRAFT_PREFIX + name, JSON.stringify(draft));
  }

  load<T = Record<string, unknown>>(name: string): T | null {
    const raw = this.storage.getItem(DRAFT_PREFIX + name);
    if (!raw) return null;
    try {
      return JSON.parse(raw) as T;
    } catch {
      return null;
    }
  }

  clear(name: string): void {
    this.storage.removeItem(DRAFT_PREFIX + name);
  }
}
