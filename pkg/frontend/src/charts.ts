/**
 * Chart rendering straight from API strings: values are parsed for
 * geometry only, every displayed number is the server's own text.
 */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Bar {
  label: string;
  value: string; // display text from the API
}

export function barChart(bars: Bar[], opts: { width?: number; height?: number; title?: string } = {}): SVGSVGElement {
  const width = opts.width ?? 640;
  const height = opts.height ?? 160;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "chart");
  svg.setAttribute("role", "img");
  if (opts.title) svg.setAttribute("aria-label", opts.title);
  const numbers = bars.map((b) => Number(b.value));
  const max = Math.max(...numbers, 0.01);
  const slot = width / Math.max(bars.length, 1);
  const barWidth = Math.max(slot - 3, 2);
  bars.forEach((bar, i) => {
    const value = Number(bar.value);
    const barHeight = (value / max) * (height - 28);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(i * slot + 1.5));
    rect.setAttribute("y", String(height - 16 - barHeight));
    rect.setAttribute("width", String(barWidth));
    rect.setAttribute("height", String(Math.max(barHeight, value > 0 ? 1 : 0)));
    rect.setAttribute("class", "chart-bar");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${bar.label}: ${bar.value}`;
    rect.append(title);
    svg.append(rect);
    if (bars.length <= 16 || i % Math.ceil(bars.length / 16) === 0) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(i * slot + slot / 2));
      text.setAttribute("y", String(height - 4));
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("class", "chart-label");
      text.textContent = bar.label;
      svg.append(text);
    }
  });
  return svg;
}

/** Month calendar of daily totals; one cell per day with data. */
export function dailyCalendar(daily: Record<string, string>): HTMLElement {
  const container = document.createElement("div");
  container.className = "daily-grid";
  for (const [day, amount] of Object.entries(daily)) {
    const cell = document.createElement("div");
    cell.className = "daily-cell";
    const date = document.createElement("span");
    date.className = "daily-date";
    date.textContent = day.slice(5);
    const value = document.createElement("span");
    value.className = "daily-value";
    value.textContent = `$${amount}`;
    cell.append(date, value);
    container.append(cell);
  }
  return container;
}
