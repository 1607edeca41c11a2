import type { AppContext } from "../context.js";
import { clear, h } from "../dom.js";

export function renderManage(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const output = h("div", {}, h("p", { class: "hint" }, "loading your data..."));
  root.append(h("h2", {}, "Your data"), h("p", { class: "hint" }, "Everything you have shared; edit or remove any of it at any time."), output);

  async function load(): Promise<void> {
    try {
      const data = await ctx.api.manageData();
      clear(output);
      output.append(
        section("Stories", data.stories, (item) => storyRow(ctx, item, load)),
        section("Income entries", data.incomes, (item) => incomeRow(ctx, item, load)),
        section("Expenses", data.expenses, (item) => expenseRow(ctx, item, load)),
      );
    } catch {
      clear(output);
      output.append(h("p", { class: "field-error" }, "could not load your data"));
    }
  }

  void load();
}

function section(title: string, items: Record<string, unknown>[], row: (item: Record<string, unknown>) => HTMLElement): HTMLElement {
  return h(
    "section",
    { class: "card manage-section" },
    h("h3", {}, `${title} (${items.length})`),
    items.length ? h("ul", { class: "manage-list" }, ...items.map(row)) : h("p", { class: "hint" }, "nothing here yet"),
  );
}

function storyRow(ctx: AppContext, story: Record<string, unknown>, reload: () => Promise<void>): HTMLElement {
  const title = (story.title as string) || (story.body as string).slice(0, 48);
  const edited = (story.edit_count as number) > 0;
  const original = (story.original_body as string) || (story.original_title as string);
  const editField = h("input", { value: (story.title as string) ?? "" }) as HTMLInputElement;
  const li = h(
    "li",
    { "data-story-id": story.story_id },
    h("strong", {}, title),
    edited ? h("span", { class: "badge edited" }, "edited") : null,
    h("span", { class: "hint" }, ` shared to: ${(story.audience as string[]).join(", ") || "only me"}`),
    original ? h("p", { class: "hint original-text" }, `your original (private): ${original}`) : null,
    h(
      "div",
      { class: "button-row" },
      editField,
      h(
        "button",
        {
          class: "secondary",
          onclick: async () => {
            await ctx.api.updateStory(story.story_id as string, { title: editField.value });
            await reload();
          },
        },
        "rename",
      ),
      h(
        "button",
        {
          class: "danger",
          onclick: async () => {
            await ctx.api.deleteStory(story.story_id as string);
            await reload();
          },
        },
        "delete",
      ),
    ),
  );
  return li;
}

function incomeRow(ctx: AppContext, entry: Record<string, unknown>, reload: () => Promise<void>): HTMLElement {
  return h(
    "li",
    { "data-entry-id": entry.entry_id, class: "income-row" },
    `${entry.work_date} | ${entry.platform} ${entry.work_type} | ${entry.duration_minutes} min | $${entry.income_amount} (${entry.source})`,
    h(
      "button",
      {
        class: "danger",
        onclick: async () => {
          await ctx.api.deleteIncome(entry.entry_id as string);
          await reload();
        },
      },
      "delete",
    ),
  );
}

function expenseRow(ctx: AppContext, entry: Record<string, unknown>, reload: () => Promise<void>): HTMLElement {
  return h(
    "li",
    { "data-entry-id": entry.entry_id },
    `${entry.expense_date} | $${entry.amount}${entry.expense_type ? ` | ${entry.expense_type}` : ""}`,
    h(
      "button",
      {
        class: "danger",
        onclick: async () => {
          await ctx.api.deleteExpense(entry.entry_id as string);
          await reload();
        },
      },
      "delete",
    ),
  );
}
