import type { VisibleStory } from "../api.js";
import type { AppContext } from "../context.js";
import { clear, h } from "../dom.js";
import { toggleLike } from "../optimistic.js";

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

export function storyCard(ctx: AppContext, story: VisibleStory): HTMLElement {
  const likeButton = h(
    "button",
    { class: "like-button" + (story.liked_by_viewer ? " liked" : ""), "data-story": story.story_id },
    `${story.liked_by_viewer ? "liked" : "like"} (${story.like_count})`,
  );
  let state = { count: story.like_count, liked: story.liked_by_viewer };
  likeButton.addEventListener("click", async () => {
    try {
      state = await toggleLike(
        state,
        (next) => {
          likeButton.textContent = `${next.liked ? "liked" : "like"} (${next.count})`;
          likeButton.classList.toggle("liked", next.liked);
        },
        (liking) => (liking ? ctx.api.likeStory(story.story_id) : ctx.api.unlikeStory(story.story_id)),
      );
    } catch {
      ctx.notify("could not update like", "error");
    }
  });
  if (ctx.profile?.role !== "worker") likeButton.disabled = true;

  const evidence = story.evidence.length
    ? h(
        "ul",
        { class: "evidence" },
        ...story.evidence.map((s) =>
          h(
            "li",
            {},
            `attached entry: ${s.work_date}, ${s.duration_minutes} min, $${s.income_amount}` +
              (s.city ? ` (${s.city})` : ""),
          ),
        ),
      )
    : null;

  return h(
    "article",
    { class: "card story-card", "data-story-id": story.story_id },
    h(
      "header",
      { class: "story-head" },
      h("span", { class: "display-name" }, story.display_name),
      h("span", { class: "story-platforms" }, story.platforms.join(", ")),
      h("span", { class: `badge type-${story.story_type}` }, story.story_type),
      story.edited ? h("span", { class: "badge edited" }, "edited") : null,
    ),
    story.title ? h("h3", {}, story.title) : null,
    h("p", { class: "story-body" }, story.body),
    h("div", { class: "tag-row" }, ...story.tags.map((t) => h("span", { class: "tag" }, t))),
    evidence,
    h("footer", { class: "story-foot" }, likeButton, h("span", { class: "audience" }, `shared to: ${story.audience.join(", ") || "only me"}`)),
  );
}

export function renderFeed(ctx: AppContext, root: HTMLElement): void {
  clear(root);
  const list = h("div", { class: "story-list" });
  const status = h("p", { class: "hint" }, "loading stories...");
  const typeFilter = h("select", { id: "filter-type" },
    h("option", { value: "" }, "all types"),
    h("option", { value: "strategy" }, "strategies"),
    h("option", { value: "issue" }, "issues"),
  );
  const platformFilter = h("select", { id: "filter-platform" },
    h("option", { value: "" }, "all platforms"),
    h("option", { value: "uber" }, "uber"),
    h("option", { value: "rover" }, "rover"),
    h("option", { value: "upwork" }, "upwork"),
  );
  const tagFilter = h("select", { id: "filter-tag" },
    h("option", { value: "" }, "all tags"),
    ...TAGS.map((t) => h("option", { value: t }, t)),
  );
  const more = h("button", { class: "secondary", hidden: true }, "load more");
  let cursor: string | null = null;

  async function load(reset: boolean): Promise<void> {
    if (reset) {
      clear(list);
      cursor = null;
    }
    status.textContent = "loading stories...";
    try {
      const page = await ctx.api.listStories({
        type: (typeFilter as HTMLSelectElement).value || undefined,
        platform: (platformFilter as HTMLSelectElement).value || undefined,
        tag: (tagFilter as HTMLSelectElement).value || undefined,
        cursor: cursor ?? undefined,
      });
      for (const story of page.items) list.append(storyCard(ctx, story));
      cursor = page.next_cursor;
      more.hidden = !cursor;
      status.textContent = list.childElementCount ? "" : "no stories match these filters yet";
    } catch {
      status.textContent = "could not load the feed";
    }
  }

  for (const filter of [typeFilter, platformFilter, tagFilter]) {
    filter.addEventListener("change", () => void load(true));
  }
  more.addEventListener("click", () => void load(false));

  root.append(
    h("div", { class: "toolbar" }, typeFilter, platformFilter, tagFilter),
    status,
    list,
    more,
  );
  void load(true);
}
