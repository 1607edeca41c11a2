import { ApiError } from "../api.js";
import type { AppContext } from "../context.js";
import { clear, fieldError, h } from "../dom.js";

const TAGS = [
  "safety",
  "fair_pay",
  "care_giving",
  "stress",
  "technology",
  "other",
  "ratings",
  "work_time",
  "algorithms",
  "discrimination",
];

interface StoryDraftState {
  story_type: string;
  tags: string[];
  title: string;
  body: string;
  display_mode: string;
  audience_choice: string; // "", "private", or comma-joined flags
}

const EMPTY_DRAFT: StoryDraftState = {
  story_type: "strategy",
  tags: [],
  title: "",
  body: "",
  display_mode: "username",
  audience_choice: "",
};

export function renderShare(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const draft: StoryDraftState = { ...EMPTY_DRAFT, ...(ctx.drafts.load<StoryDraftState>("story") ?? {}) };

  const errors = h("div", { id: "share-errors" });
  const preview = h("div", { id: "redaction-preview", hidden: true });
  const title = h("input", { id: "story-title", placeholder: "title (optional)", value: draft.title }) as HTMLInputElement;
  const body = h("textarea", { id: "story-body", rows: "6", placeholder: "what happened, or what works" }) as HTMLTextAreaElement;
  body.value = draft.body;

  const typeRadios = ["strategy", "issue"].map((value) =>
    h(
      "label",
      { class: "radio" },
      h("input", { type: "radio", name: "story-type", value, checked: draft.story_type === value }),
      value,
    ),
  );
  const tagBoxes = TAGS.map((tag) =>
    h(
      "label",
      { class: "checkbox tag-option" },
      h("input", { type: "checkbox", name: "story-tag", value: tag, checked: draft.tags.includes(tag) }),
      tag,
    ),
  );
  const anonBox = h("input", {
    type: "checkbox",
    id: "post-anonymously",
    checked: draft.display_mode === "anonymous",
  }) as HTMLInputElement;

  // the audience picker is mandatory: no default selection
  const audience = h(
    "select",
    { id: "story-audience", required: true },
    h("option", { value: "", disabled: true, selected: draft.audience_choice === "" }, "choose who can see this..."),
    h("option", { value: "private", selected: draft.audience_choice === "private" }, "only me (private)"),
    h("option", { value: "workers", selected: draft.audience_choice === "workers" }, "workers"),
    h(
      "option",
      { value: "workers,policymakers", selected: draft.audience_choice === "workers,policymakers" },
      "workers + policymakers",
    ),
    h(
      "option",
      {
        value: "workers,policymakers,advocates",
        selected: draft.audience_choice === "workers,policymakers,advocates",
      },
      "workers + policymakers + advocates",
    ),
    h("option", { value: "policymakers", selected: draft.audience_choice === "policymakers" }, "policymakers only"),
  ) as HTMLSelectElement;

  function snapshot(): StoryDraftState {
    return {
      story_type: (root.querySelector('input[name="story-type"]:checked') as HTMLInputElement)?.value ?? "strategy",
      tags: [...root.querySelectorAll('input[name="story-tag"]:checked')].map((el) => (el as HTMLInputElement).value),
      title: title.value,
      body: body.value,
      display_mode: anonBox.checked ? "anonymous" : "username",
      audience_choice: audience.value,
    };
  }

  function autosave(): void {
    ctx.drafts.save("story", snapshot());
  }

  async function submit(acknowledge: boolean): Promise<void> {
    clear(errors);
    preview.hidden = true;
    const current = snapshot();
    if (!current.audience_choice) {
      errors.append(fieldError("pick an audience before sharing"));
      return;
    }
    const audienceNames = current.audience_choice === "private" ? [] : current.audience_choice.split(",");
    try {
      await ctx.api.postStory({
        story_type: current.story_type,
        tags: current.tags,
        title: current.title || undefined,
        body: current.body || undefined,
        display_mode: current.display_mode,
        audience: audienceNames,
        acknowledge_redaction: acknowledge,
      });
      ctx.drafts.clear("story");
      ctx.notify("story shared");
      ctx.navigate("feed");
    } catch (err) {
      if (err instanceof ApiError && err.problem.code === "UNACKNOWLEDGED_REDACTION") {
        showPreview(err);
        return;
      }
      if (err instanceof ApiError) {
        const fields = err.problem.errors ?? [{ code: err.problem.code, field: err.problem.field, message: err.problem.message }];
        for (const field of fields) {
          errors.append(fieldError(`${field.field ?? "form"}: ${field.message || field.code}`));
        }
      } else {
        errors.append(fieldError("could not reach the server"));
      }
    }
  }

  function showPreview(err: ApiError): void {
    clear(preview);
    preview.hidden = false;
    const kinds = [...new Set((err.problem.findings ?? []).map((f) => f.kind))].join(", ");
    preview.append(
      h("h3", {}, "Sensitive details found"),
      h("p", { class: "hint" }, `We blur ${kinds || "sensitive info"} before anyone else sees it. This is how your story will read:`),
      ...(err.problem.preview?.title ? [h("p", { class: "preview-title" }, err.problem.preview.title)] : []),
      h("p", { class: "preview-body" }, err.problem.preview?.body ?? ""),
      h(
        "div",
        { class: "button-row" },
        h("button", { class: "primary", id: "confirm-redaction", onclick: () => void submit(true) }, "Share redacted version"),
        h("button", { class: "secondary", onclick: () => { preview.hidden = true; } }, "Keep editing"),
      ),
    );
  }

  const form = h(
    "form",
    {
      class: "card share-form",
      onsubmit: (e: Event) => {
        e.preventDefault();
        void submit(false);
      },
      oninput: autosave,
      onchange: autosave,
    },
    h("h2", {}, "Share a story"),
    h("div", { class: "radio-row" }, ...typeRadios),
    h("label", { for: "story-title" }, "Title"),
    title,
    h("label", { for: "story-body" }, "Story"),
    body,
    h("fieldset", { class: "tag-grid" }, h("legend", {}, "Tags (pick at least one)"), ...tagBoxes),
    h("label", { class: "checkbox" }, anonBox, "post anonymously (your username stays hidden)"),
    h("label", { for: "story-audience" }, "Audience"),
    audience,
    errors,
    preview,
    h("button", { type: "submit", class: "primary" }, "Share"),
  );

  root.append(form);
}
