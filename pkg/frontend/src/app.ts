/**
 * App shell: session bootstrap, hash routing, navigation, notifications.
 * Views render into #view; the nav collapses to a bottom bar on phones.
 */

import { ApiClient } from "./api.js";
import type { AppContext } from "./context.js";
import { h, clear } from "./dom.js";
import { DraftStore, SessionState, type ViewName } from "./state.js";
import { renderExpense } from "./views/expense.js";
import { renderFeed } from "./views/feed.js";
import { renderIncome } from "./views/income.js";
import { renderInsights } from "./views/insights.js";
import { renderLogin } from "./views/login.js";
import { renderManage } from "./views/manage.js";
import { renderPlanner } from "./views/planner.js";
import { renderProfile } from "./views/profile.js";
import { renderShare } from "./views/share.js";
import { renderTax } from "./views/tax.js";
import { renderTrends } from "./views/trends.js";

const VIEWS: Record<ViewName, (ctx: AppContext, root: HTMLElement) => void> = {
  login: renderLogin,
  feed: renderFeed,
  share: renderShare,
  income: renderIncome,
  expense: renderExpense,
  trends: renderTrends,
  insights: renderInsights,
  planner: renderPlanner,
  tax: renderTax,
  manage: renderManage,
  profile: renderProfile,
};

const NAV: [ViewName, string][] = [
  ["feed", "Stories"],
  ["share", "Share"],
  ["income", "Income"],
  ["expense", "Expense"],
  ["trends", "Trends"],
  ["insights", "Insights"],
  ["planner", "Planner"],
  ["tax", "Tax"],
  ["manage", "My data"],
  ["profile", "Profile"],
];

export interface AppOptions {
  apiBase?: string;
  storage?: Storage;
  fetchImpl?: (input: string, init?: RequestInit) => Promise<Response>;
}

export function startApp(root: HTMLElement, options: AppOptions = {}): AppContext {
  const storage = options.storage ?? window.localStorage;
  const api = new ApiClient(options.apiBase ?? "", options.fetchImpl);
  const session = new SessionState(storage);
  const drafts = new DraftStore(storage);

  const viewRoot = h("main", { id: "view" });
  const toast = h("div", { id: "toast", hidden: true });
  const navButtons = new Map<ViewName, HTMLButtonElement>();

  const ctx: AppContext = {
    api,
    session,
    drafts,
    profile: session.profile(),
    navigate,
    notify(message, kind = "ok") {
      toast.textContent = message;
      toast.className = kind;
      toast.hidden = false;
      setTimeout(() => {
        toast.hidden = true;
      }, 2500);
    },
  };
  api.token = session.token();

  const nav = h(
    "nav",
    { id: "nav" },
    ...NAV.map(([view, label]) => {
      const button = h("button", { "data-view": view, onclick: () => navigate(view) }, label) as HTMLButtonElement;
      navButtons.set(view, button);
      return button;
    }),
  );

  function navigate(view: ViewName): void {
    if (view !== "login" && !api.token) view = "login";
    window.location.hash = `#/${view}`;
    render(view);
  }

  function render(view: ViewName): void {
    ctx.profile = session.profile();
    nav.hidden = view === "login";
    for (const [name, button] of navButtons) button.classList.toggle("active", name === view);
    clear(viewRoot);
    VIEWS[view](ctx, viewRoot);
  }

  function fromHash(): ViewName {
    const name = window.location.hash.replace(/^#\//, "") as ViewName;
    return name in VIEWS ? name : "feed";
  }

  window.addEventListener("hashchange", () => render(api.token ? fromHash() : "login"));

  clear(root);
  root.append(
    h("header", { id: "masthead" }, h("h1", {}, "gig collective"), nav),
    viewRoot,
    toast,
  );
  render(api.token ? fromHash() : "login");
  return ctx;
}
