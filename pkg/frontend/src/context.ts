import type { ApiClient, Profile } from "./api.js";
import type { DraftStore, SessionState, ViewName } from "./state.js";

export interface AppContext {
  api: ApiClient;
  session: SessionState;
  drafts: DraftStore;
  profile: Profile | null;
  navigate: (view: ViewName) => void;
  notify: (message: string, kind?: "ok" | "error") => void;
}
