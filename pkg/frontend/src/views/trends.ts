import type { TrendsReport } from "../api.js";
import { barChart, dailyCalendar } from "../charts.js";
import type { AppContext } from "../context.js";
import { clear, h, money } from "../dom.js";

function defaultRange(): { from: string; to: string } {
  const to = new Date();
  const from = new Date(to.getTime() - 29 * 24 * 3600 * 1000);
  return { from: from.toISOString().slice(0, 10), to: to.toISOString().slice(0, 10) };
}

function summaryCard(label: string, value: string, id: string): HTMLElement {
  return h("div", { class: "stat" }, h("span", { class: "stat-label" }, label), h("strong", { id }, value));
}

// every number shown here is the API's own string: no client-side math
function renderReport(report: TrendsReport, container: HTMLElement): void {
  clear(container);
  if (report.zero_hours) {
    container.append(h("p", { class: "hint", id: "trends-empty" }, "No work recorded in this range yet. Upload an income entry and your trends appear here."));
  }
  container.append(
    h(
      "div",
      { class: "stat-row" },
      summaryCard("income", money(report.total_income), "trend-income"),
      summaryCard("expenses", money(report.total_expenses), "trend-expenses"),
      summaryCard("net earnings", money(report.net_earnings), "trend-net"),
      summaryCard("hours", report.hours_worked, "trend-hours"),
      summaryCard("hourly rate", money(report.hourly_rate), "trend-rate"),
      summaryCard("paid-time share", report.paid_time_share, "trend-paid-share"),
    ),
  );
  if (!report.zero_hours) {
    container.append(
      h("h3", {}, "earnings by hour of day"),
      barChart(
        report.hourly_profile.map((value, hour) => ({ label: String(hour), value })),
        { title: "hourly profile" },
      ),
      h("h3", {}, "weekly earnings"),
      barChart(
        report.weekly_series.map((w) => ({ label: w.week.slice(5), value: w.income })),
        { title: "weekly series" },
      ),
      h("h3", {}, "daily earnings"),
      dailyCalendar(report.daily_by_month),
    );
  }
}

export function renderTrends(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const range = defaultRange();
  const from = h("input", { type: "date", id: "trends-from", value: range.from }) as HTMLInputElement;
  const to = h("input", { type: "date", id: "trends-to", value: range.to }) as HTMLInputElement;
  const output = h("div", { id: "trends-output" }, h("p", { class: "hint" }, "loading..."));
  let requestSeq = 0;

  async function load(): Promise<void> {
    const seq = ++requestSeq;
    try {
      const report = await ctx.api.trends(from.value, to.value);
      if (seq !== requestSeq) return; // a newer range is already in flight
      renderReport(report, output);
    } catch {
      if (seq !== requestSeq) return;
      clear(output);
      output.append(h("p", { class: "field-error" }, "could not load trends for that range"));
    }
  }

  from.addEventListener("change", () => void load());
  to.addEventListener("change", () => void load());

  root.append(
    h("div", { class: "toolbar" }, h("label", {}, "from ", from), h("label", {}, "to ", to)),
    output,
  );
  void load();
}
