import { ApiError } from "../api.js";
import type { AppContext } from "../context.js";
import { clear, fieldError, h } from "../dom.js";

const WORK_TYPES: Record<string, string[]> = {
  uber: ["trip"],
  rover: ["walk", "drop_in", "house_sit", "boarding", "daycare"],
  upwork: ["fixed_price", "hourly"],
};

export function renderIncome(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const platforms = ctx.profile?.platforms ?? [];
  const saved = ctx.drafts.load<Record<string, string>>("income") ?? {};
  const errors = h("div", { id: "income-errors" });

  const platform = h(
    "select",
    { id: "income-platform" },
    ...platforms.map((p) => h("option", { value: p, selected: saved.platform === p }, p)),
  ) as HTMLSelectElement;

  const workType = h("select", { id: "income-work-type" }) as HTMLSelectElement;
  const platformFields = h("div", { id: "platform-fields" });

  function rebuildPlatformFields(): void {
    const current = platform.value;
    clear(workType as unknown as HTMLElement);
    for (const t of WORK_TYPES[current] ?? []) {
      workType.append(h("option", { value: t, selected: saved.work_type === t }, t.replace("_", " ")));
    }
    clear(platformFields);
    if (current === "uber") {
      platformFields.append(
        labeled("surge_amount", "surge amount ($)", saved),
        labeled("distance_miles", "distance (miles)", saved),
        labeled("unpaid_minutes", "dead time between trips (minutes)", saved),
        labeled("start_time", "start time (HH:MM)", saved, "time"),
      );
    } else if (current === "rover") {
      platformFields.append(
        labeled("travel_minutes", "travel time to client (minutes)", saved),
        labeled("start_time", "start time (HH:MM)", saved, "time"),
      );
    } else if (current === "upwork") {
      const level = h(
        "select",
        { id: "income-experience_level", "data-field": "experience_level" },
        h("option", { value: "" }, "experience level..."),
        ...["entry", "intermediate", "expert"].map((v) =>
          h("option", { value: v, selected: saved.experience_level === v }, v),
        ),
      );
      platformFields.append(h("label", {}, "experience level", level));
    }
  }

  function labeled(name: string, text: string, drafted: Record<string, string>, type = "text"): HTMLElement {
    return h(
      "label",
      {},
      text,
      h("input", { type, "data-field": name, id: `income-${name}`, value: drafted[name] ?? "" }),
    );
  }

  platform.addEventListener("change", rebuildPlatformFields);

  const workDate = h("input", { type: "date", id: "income-date", value: saved.work_date ?? "" }) as HTMLInputElement;
  const duration = h("input", { id: "income-duration", inputmode: "numeric", placeholder: "minutes worked", value: saved.duration_minutes ?? "" }) as HTMLInputElement;
  const amount = h("input", { id: "income-amount", inputmode: "decimal", placeholder: "income amount, e.g. 42.50", value: saved.income_amount ?? "" }) as HTMLInputElement;
  const tips = h("input", { id: "income-tips", inputmode: "decimal", placeholder: "tips included (optional)", value: saved.tips ?? "" }) as HTMLInputElement;
  const fee = h("input", { id: "income-fee", inputmode: "decimal", placeholder: "platform fee (optional)", value: saved.platform_fee ?? "" }) as HTMLInputElement;
  const notes = h("input", { id: "income-notes", placeholder: "notes (optional)", value: saved.notes ?? "" }) as HTMLInputElement;

  function snapshot(): Record<string, string> {
    const out: Record<string, string> = {
      platform: platform.value,
      work_date: workDate.value,
      duration_minutes: duration.value,
      work_type: workType.value,
      income_amount: amount.value,
      tips: tips.value,
      platform_fee: fee.value,
      notes: notes.value,
    };
    for (const el of platformFields.querySelectorAll("[data-field]")) {
      const input = el as HTMLInputElement;
      out[input.dataset.field as string] = input.value;
    }
    return out;
  }

  async function submit(event: Event): Promise<void> {
    event.preventDefault();
    clear(errors);
    const data = snapshot();
    const body: Record<string, unknown> = { platform: data.platform };
    for (const [key, value] of Object.entries(data)) {
      if (key !== "platform" && value !== "" && value !== undefined) body[key] = value;
    }
    if (body.duration_minutes) body.duration_minutes = Number(body.duration_minutes);
    if (body.travel_minutes) body.travel_minutes = Number(body.travel_minutes);
    if (body.unpaid_minutes) body.unpaid_minutes = Number(body.unpaid_minutes);
    if (typeof body.start_time === "string" && body.start_time.length === 5) body.start_time += ":00";
    try {
      await ctx.api.postIncome(body);
      ctx.drafts.clear("income");
      ctx.notify("income recorded");
      ctx.navigate("manage");
    } catch (err) {
      if (err instanceof ApiError) {
        const fields = err.problem.errors ?? [{ code: err.problem.code, field: err.problem.field, message: err.problem.message }];
        for (const f of fields) errors.append(fieldError(`${f.field ?? "form"}: ${f.message || f.code}`));
      } else {
        errors.append(fieldError("could not reach the server"));
      }
    }
  }

  const csvSection = platforms.includes("uber")
    ? buildCsvSection(ctx)
    : h("p", { class: "hint" }, "Bulk CSV upload is available for rideshare trip exports.");

  root.append(
    h(
      "form",
      { class: "card income-form", onsubmit: submit, oninput: () => ctx.drafts.save("income", snapshot()) },
      h("h2", {}, "Record income"),
      h("label", { for: "income-platform" }, "Platform"),
      platform,
      h("label", { for: "income-date" }, "Work date"),
      workDate,
      h("label", { for: "income-duration" }, "Time spent (minutes)"),
      duration,
      h("label", { for: "income-work-type" }, "Work type"),
      workType,
      h("label", { for: "income-amount" }, "Income amount ($)"),
      amount,
      tips,
      fee,
      platformFields,
      notes,
      errors,
      h("button", { type: "submit", class: "primary" }, "Save entry"),
    ),
    csvSection,
  );
  rebuildPlatformFields();
}

function buildCsvSection(ctx: AppContext): HTMLElement {
  const report = h("div", { id: "csv-report" });
  const file = h("input", { type: "file", id: "csv-file", accept: ".csv,text/csv" }) as HTMLInputElement;
  const button = h("button", { class: "secondary" }, "Upload trip CSV");
  button.addEventListener("click", async () => {
    clear(report);
    const chosen = file.files?.[0];
    if (!chosen) {
      report.append(fieldError("choose a CSV file first"));
      return;
    }
    try {
      const result = await ctx.api.uploadTripsCsv(await chosen.text());
      report.append(
        h("p", {}, `accepted ${result.accepted}, duplicates ${result.duplicates}, rejected ${result.rejected.length}`),
        ...result.rejected.map((r) => fieldError(`line ${r.line}: ${r.error}`)),
      );
    } catch (err) {
      report.append(fieldError(err instanceof ApiError ? `${err.problem.code}: ${err.problem.message}` : "upload failed"));
    }
  });
  return h(
    "section",
    { class: "card" },
    h("h3", {}, "Bulk upload (rideshare trips)"),
    h("p", { class: "hint" }, "Upload the trips CSV your platform exports; re-uploading the same file never duplicates entries."),
    file,
    button,
    report,
  );
}
