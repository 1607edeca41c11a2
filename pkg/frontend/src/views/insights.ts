import type { AppContext } from "../context.js";
import { clear, h } from "../dom.js";

const DIMENSIONS = [
  ["hourly_income_rate", "hourly income rate"],
  ["tipping_rate", "tipping rate"],
  ["ratings", "ratings"],
] as const;

const BREAKDOWNS = [
  "platform",
  "age",
  "gender",
  "ethnicity",
  "household_income",
  "education",
  "tenure",
  "work_status",
];

export function renderInsights(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const dimension = h(
    "select",
    { id: "insight-dimension" },
    ...DIMENSIONS.map(([value, label]) => h("option", { value }, label)),
  ) as HTMLSelectElement;
  const breakdown = h(
    "select",
    { id: "insight-breakdown" },
    ...BREAKDOWNS.map((value) => h("option", { value }, value.replace("_", " "))),
  ) as HTMLSelectElement;
  const output = h("div", { id: "insight-output" });

  async function load(): Promise<void> {
    clear(output);
    output.append(h("p", { class: "hint" }, "loading..."));
    try {
      const table = await ctx.api.insights(dimension.value, breakdown.value);
      clear(output);
      const rows = table.cells.map((cell) =>
        cell.suppressed
          ? h(
              "tr",
              { class: "suppressed-row" },
              h("td", {}, cell.cohort_key),
              h("td", { colspan: "2", class: "suppressed" }, `fewer than ${table.k} workers: withheld`),
            )
          : h(
              "tr",
              {},
              h("td", {}, cell.cohort_key),
              h("td", {}, String(cell.count)),
              h("td", {}, cell.value ?? ""),
            ),
      );
      output.append(
        h(
          "table",
          { class: "insight-table" },
          h("thead", {}, h("tr", {}, h("th", {}, breakdown.value), h("th", {}, "workers"), h("th", {}, "mean"))),
          h("tbody", {}, ...rows),
        ),
        table.self_marker !== null
          ? h("p", { id: "self-marker" }, `your own value: ${table.self_marker}`)
          : h("p", { class: "hint" }, "upload income entries to see your own marker here"),
        h("p", { class: "hint" }, `cohorts with fewer than ${table.k} workers are never shown`),
      );
    } catch {
      clear(output);
      output.append(h("p", { class: "field-error" }, "could not load insights"));
    }
  }

  dimension.addEventListener("change", () => void load());
  breakdown.addEventListener("change", () => void load());
  root.append(h("div", { class: "toolbar" }, dimension, breakdown), output);
  void load();
}
