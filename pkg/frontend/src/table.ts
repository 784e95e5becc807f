/** Cluster table rendering for the year drill-down, as an HTML string.
 *
 * Selection checkboxes carry data-cluster-id; the controller listens for
 * changes. A pending decision is shown as pending, never as applied.
 */

import type { ClusterRow, DraftDecision } from './types.js';

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderClusterTable(
  rpy: number,
  rows: ClusterRow[],
  selected: Set<string>,
  pending: DraftDecision | null = null,
): string {
  if (rows.length === 0) {
    return `<p class="empty-year">no clusters referenced in ${rpy}</p>`;
  }
  const pendingIds = new Set<string>(
    pending === null
      ? []
      : pending.kind === 'merge'
        ? pending.clusters
        : [pending.cluster],
  );
  const body = rows
    .map((row) => {
      const checked = selected.has(row.cluster_id) ? ' checked' : '';
      const pendingClass = pendingIds.has(row.cluster_id) ? ' pending' : '';
      return (
        `<tr class="cluster-row${pendingClass}" data-cluster-id="${row.cluster_id}">` +
        `<td><input type="checkbox" class="cluster-select" ` +
        `data-cluster-id="${row.cluster_id}" data-rpy="${rpy}"${checked}></td>` +
        `<td class="canonical">${esc(row.canonical)}</td>` +
        `<td class="num">${row.n_cr}</td>` +
        `<td class="num">${row.n_members}</td>` +
        `<td class="num">${row.perc_yr.toFixed(1)}</td>` +
        `<td class="num">${row.perc_all.toFixed(1)}</td>` +
        `<td class="num">${row.n_top10}</td>` +
        `</tr>`
      );
    })
    .join('');
  const pendingNote = pending
    ? `<p class="pending-note">decision pending server confirmation…</p>`
    : '';
  return (
    `<h3>clusters referenced in ${rpy}</h3>${pendingNote}` +
    `<table class="clusters">` +
    `<thead><tr><th></th><th>canonical reference</th><th>n_cr</th>` +
    `<th>variants</th><th>perc_yr</th><th>perc_all</th><th>top10 yrs</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}
