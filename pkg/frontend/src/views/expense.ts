import { ApiError } from "../api.js";
import type { AppContext } from "../context.js";
import { clear, fieldError, h } from "../dom.js";

export function renderExpense(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const saved = ctx.drafts.load<Record<string, string>>("expense") ?? {};
  const errors = h("div", { id: "expense-errors" });

  const date = h("input", { type: "date", id: "expense-date", value: saved.expense_date ?? "" }) as HTMLInputElement;
  const amount = h("input", { id: "expense-amount", inputmode: "decimal", placeholder: "cost, e.g. 38.50", value: saved.amount ?? "" }) as HTMLInputElement;
  const kind = h(
    "select",
    { id: "expense-type" },
    h("option", { value: "" }, "type (optional)..."),
    ...["fuel", "supplies", "equipment", "fees", "other"].map((v) =>
      h("option", { value: v, selected: saved.expense_type === v }, v),
    ),
  ) as HTMLSelectElement;
  const platform = h(
    "select",
    { id: "expense-platform" },
    h("option", { value: "" }, "platform (optional)..."),
    ...(ctx.profile?.platforms ?? []).map((p) => h("option", { value: p, selected: saved.platform === p }, p)),
  ) as HTMLSelectElement;
  const description = h("input", { id: "expense-description", placeholder: "description (optional)", value: saved.description ?? "" }) as HTMLInputElement;
  const recurring = h("input", { type: "checkbox", id: "expense-recurring", checked: saved.recurring === "true" }) as HTMLInputElement;

  function snapshot(): Record<string, string> {
    return {
      expense_date: date.value,
      amount: amount.value,
      expense_type: kind.value,
      platform: platform.value,
      description: description.value,
      recurring: String(recurring.checked),
    };
  }

  async function submit(event: Event): Promise<void> {
    event.preventDefault();
    clear(errors);
    const data = snapshot();
    const body: Record<string, unknown> = { expense_date: data.expense_date, amount: data.amount };
    if (data.expense_type) body.expense_type = data.expense_type;
    if (data.platform) body.platform = data.platform;
    if (data.description) body.description = data.description;
    body.recurring = recurring.checked;
    try {
      await ctx.api.postExpense(body);
      ctx.drafts.clear("expense");
      ctx.notify("expense recorded");
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

  root.append(
    h(
      "form",
      { class: "card expense-form", onsubmit: submit, oninput: () => ctx.drafts.save("expense", snapshot()) },
      h("h2", {}, "Record an expense"),
      h("label", { for: "expense-date" }, "Date"),
      date,
      h("label", { for: "expense-amount" }, "Amount ($)"),
      amount,
      kind,
      platform,
      description,
      h("label", { class: "checkbox" }, recurring, "recurring expense"),
      errors,
      h("button", { type: "submit", class: "primary" }, "Save expense"),
    ),
  );
}
