import { ApiError } from "../api.js";
import type { AppContext } from "../context.js";
import { clear, fieldError, h } from "../dom.js";

export function renderLogin(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const errors = h("div");
  const token = h("input", { id: "invite-token", placeholder: "invite token", autocomplete: "off" });
  const username = h("input", { id: "username", placeholder: "choose a username", autocomplete: "off" });

  async function submit(event: Event): Promise<void> {
    event.preventDefault();
    clear(errors);
    try {
      const result = await ctx.api.redeemInvite(token.value.trim(), username.value.trim());
      ctx.api.token = result.session_token;
      ctx.session.save(result.session_token, result.profile);
      ctx.navigate("feed");
    } catch (err) {
      if (err instanceof ApiError) {
        errors.append(fieldError(`${err.problem.code}: ${err.problem.message}`));
      } else {
        errors.append(fieldError("could not reach the server"));
      }
    }
  }

  root.append(
    h(
      "form",
      { class: "card login-form", onsubmit: submit },
      h("h2", {}, "Join the collective"),
      h("p", { class: "hint" }, "Access is invite-only. Your username is the only identity other members see."),
      h("label", { for: "invite-token" }, "Invite token"),
      token,
      h("label", { for: "username" }, "Username"),
      username,
      errors,
      h("button", { type: "submit", class: "primary" }, "Redeem invite"),
    ),
  );
}
