import type { AppContext } from "../context.js";
import { clear, h } from "../dom.js";

export function renderProfile(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const profile = ctx.profile;
  if (!profile) {
    ctx.navigate("login");
    return;
  }
  root.append(
    h(
      "div",
      { class: "card" },
      h("h2", {}, profile.username),
      h("p", {}, `role: ${profile.role}`),
      h("p", {}, `platforms: ${profile.platforms.join(", ") || "none"}`),
      h("p", { class: "hint" }, "Other members only ever see your username (or 'anonymous'). Your ledger is never visible to anyone but you."),
      h(
        "button",
        {
          class: "danger",
          id: "logout",
          onclick: () => {
            ctx.session.clear();
            ctx.api.token = null;
            ctx.navigate("login");
          },
        },
        "log out",
      ),
    ),
  );
}
