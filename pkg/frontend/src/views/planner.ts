import type { AppContext } from "../context.js";
import { clear, h, money } from "../dom.js";

const WEEKDAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
const HOURS = Array.from({ length: 24 }, (_, i) => i);

export function renderPlanner(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const selected = new Set<string>();
  const summary = h("div", { id: "planner-summary" }, h("p", { class: "hint" }, "toggle the hours you plan to work"));
  const breakdown = h("div", { id: "planner-breakdown" });

  // the projection re-runs on every grid change
  async function refresh(): Promise<void> {
    if (selected.size === 0) {
      clear(summary);
      clear(breakdown);
      summary.append(h("p", { class: "hint" }, "toggle the hours you plan to work"));
      return;
    }
    const slots = [...selected].map((key) => key.split("-").map(Number) as [number, number]);
    try {
      const projection = await ctx.api.planProjection(slots);
      clear(summary);
      const label =
        projection.confidence === "no_history"
          ? "no history yet: projections start at $0 until you upload income"
          : projection.confidence === "sparse_history"
            ? "sparse history: some hours fall back to your overall average"
            : "based on your own history";
      summary.append(
        h("p", { id: "planner-total", class: "stat" }, `expected earnings: ${money(projection.total_expected)}`),
        h("p", { id: "planner-confidence", class: "hint", "data-confidence": projection.confidence }, label),
      );
      clear(breakdown);
      breakdown.append(
        h(
          "ul",
          { class: "slot-list" },
          ...projection.per_slot.map((slot) =>
            h("li", {}, `${WEEKDAYS[slot.weekday]} ${String(slot.hour).padStart(2, "0")}:00 -> ${money(slot.expected)}`),
          ),
        ),
      );
    } catch {
      clear(summary);
      summary.append(h("p", { class: "field-error" }, "could not compute a projection"));
    }
  }

  const grid = h("table", { class: "planner-grid" });
  const head = h("tr", {}, h("th", {}, ""));
  for (const day of WEEKDAYS) head.append(h("th", {}, day));
  grid.append(h("thead", {}, head));
  const tbody = h("tbody");
  for (const hour of HOURS) {
    const row = h("tr", {}, h("th", {}, `${String(hour).padStart(2, "0")}:00`));
    for (let weekday = 0; weekday < 7; weekday++) {
      const key = `${weekday}-${hour}`;
      const cell = h("td", { class: "slot", "data-slot": key, role: "button", "aria-pressed": "false" });
      cell.addEventListener("click", () => {
        if (selected.has(key)) {
          selected.delete(key);
          cell.classList.remove("on");
          cell.setAttribute("aria-pressed", "false");
        } else {
          selected.add(key);
          cell.classList.add("on");
          cell.setAttribute("aria-pressed", "true");
        }
        void refresh();
      });
      row.append(cell);
    }
    tbody.append(row);
  }
  grid.append(tbody);

  root.append(
    h("h2", {}, "Plan upcoming work"),
    summary,
    breakdown,
    h("div", { class: "planner-scroll" }, grid),
  );
}
