import type { AppContext } from "../context.js";
import { clear, h } from "../dom.js";

export function renderTax(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const output = h("div", {}, h("p", { class: "hint" }, "loading..."));
  root.append(output);

  void (async () => {
    try {
      const info = await ctx.api.taxResources();
      clear(output);
      if (info.next_tax_day) {
        output.append(
          h(
            "div",
            { class: "card tax-banner", id: "next-tax-day" },
            h("strong", {}, `Next tax day: ${info.next_tax_day.date}`),
            h("p", {}, info.next_tax_day.label),
          ),
        );
      }
      const mine = new Set(ctx.profile?.platforms ?? []);
      const relevant = info.resources.filter((r) => !r.platform || mine.has(r.platform));
      output.append(
        h(
          "div",
          { class: "resource-list" },
          ...relevant.map((r) =>
            h(
              "article",
              { class: "card" },
              h("h3", {}, r.title),
              h("p", { class: "hint" }, `${r.audience.replace("_", "-")} workers${r.platform ? ` on ${r.platform}` : ""}`),
              r.body ? h("p", {}, r.body) : null,
              r.url ? h("a", { href: r.url, target: "_blank", rel: "noreferrer" }, "open resource") : null,
            ),
          ),
        ),
      );
    } catch {
      clear(output);
      output.append(h("p", { class: "field-error" }, "could not load tax resources"));
    }
  })();
}
