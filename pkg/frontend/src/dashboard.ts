// Agreement and comparison dashboard. All numbers come from the stats
// endpoints; the UI only formats and draws them.

import { AgreementResponse, Api, ComparisonResponse, ItemComparison } from "./api";

function formatP(p: number): string {
  if (p < 1e-6) return "p < 1e-6";
  if (p < 0.001) return `p = ${p.toExponential(1)}`;
  return `p = ${p.toFixed(3)}`;
}

function proportionBar(counts: Record<string, number>, poolLabel: string): HTMLElement {
  const total = Object.values(counts).reduce((a, b) => a + b, 0);
  const row = document.createElement("div");
  row.className = "bar-row";
  const tag = document.createElement("span");
  tag.className = "bar-tag";
  tag.textContent = poolLabel;
  row.appendChild(tag);
  const bar = document.createElement("div");
  bar.className = "bar";
  for (const [category, count] of Object.entries(counts)) {
    if (total === 0) break;
    const pct = (100 * count) / total;
    const segment = document.createElement("span");
    segment.className = `segment seg-${category}`;
    segment.style.width = `${pct}%`;
    segment.dataset.category = category;
    segment.dataset.pct = pct.toFixed(1);
    segment.title = `${category}: ${count}/${total} (${pct.toFixed(1)}%)`;
    segment.textContent = pct >= 8 ? `${pct.toFixed(1)}%` : "";
    bar.appendChild(segment);
  }
  row.appendChild(bar);
  return row;
}

function agreementTable(agreement: AgreementResponse): HTMLElement {
  const table = document.createElement("table");
  table.className = "agreement";
  table.innerHTML =
    "<thead><tr><th>Rubric item</th><th>Gwet's AC1</th><th>Fleiss kappa</th>" +
    "<th>MCQs</th><th>Ratings</th></tr></thead>";
  const body = document.createElement("tbody");
  for (const [item, stats] of Object.entries(agreement.items)) {
    const row = document.createElement("tr");
    row.dataset.item = item;
    row.innerHTML =
      `<td>${item}</td>` +
      `<td class="ac1">${stats.gwetAc1.toFixed(2)}</td>` +
      `<td class="kappa">${stats.fleissKappa.toFixed(2)}</td>` +
      `<td>${stats.nItems}</td><td>${stats.nAnnotations}</td>`;
    body.appendChild(row);
  }
  table.appendChild(body);
  return table;
}

function comparisonSection(item: string, comparison: ItemComparison): HTMLElement {
  const section = document.createElement("section");
  section.className = "comparison-item";
  section.dataset.item = item;
  const heading = document.createElement("h3");
  heading.textContent = `${item} (${formatP(comparison.pValue)}, ${comparison.method})`;
  section.appendChild(heading);
  section.appendChild(proportionBar(comparison.countsA, "generated"));
  section.appendChild(proportionBar(comparison.countsB, "human"));
  return section;
}

export async function renderDashboard(api: Api, root: HTMLElement): Promise<void> {
  root.innerHTML = "<p class='loading'>Loading statistics…</p>";
  let agreement: AgreementResponse;
  let comparison: ComparisonResponse;
  try {
    [agreement, comparison] = await Promise.all([api.agreement(), api.comparison()]);
  } catch (error) {
    root.innerHTML = `<p class="banner">Could not load statistics: ${String(error)}</p>`;
    return;
  }
  root.innerHTML = "";

  const agreementHeading = document.createElement("h2");
  agreementHeading.textContent = "Inter-rater agreement";
  root.appendChild(agreementHeading);
  if (Object.keys(agreement.items).length === 0) {
    const placeholder = document.createElement("p");
    placeholder.className = "placeholder";
    placeholder.textContent = "No agreement data yet: annotate some questions first.";
    root.appendChild(placeholder);
  } else {
    root.appendChild(agreementTable(agreement));
  }

  const comparisonHeading = document.createElement("h2");
  comparisonHeading.textContent = "Generated vs human";
  root.appendChild(comparisonHeading);
  if (Object.keys(comparison.items).length === 0) {
    const placeholder = document.createElement("p");
    placeholder.className = "placeholder";
    placeholder.textContent = "No comparison yet: both pools need annotated questions.";
    root.appendChild(placeholder);
  } else {
    for (const [item, itemComparison] of Object.entries(comparison.items)) {
      root.appendChild(comparisonSection(item, itemComparison));
    }
  }
}
