/** Spectrogram rendering: count bars, a deviation line, and optional
 * growth-segment boundaries, emitted as an SVG string.
 *
 * Pure data-to-markup so it can be unit-tested without a browser; the
 * controller owns attaching click handlers via the data-rpy attributes.
 */

import type { SegmentFit, SpectrumPoint } from './types.js';

export interface ChartOptions {
  width?: number;
  height?: number;
  segments?: SegmentFit | null;
  selectedRpy?: number | null;
}

const MARGIN = { top: 12, right: 16, bottom: 28, left: 44 };

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderSpectrogram(
  spectrum: SpectrumPoint[],
  options: ChartOptions = {},
): string {
  if (spectrum.length === 0) {
    return '<div class="no-data">no data — the corpus has no dated cited references</div>';
  }
  const width = options.width ?? 880;
  const height = options.height ?? 300;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const years = spectrum.map((p) => p.rpy);
  const minYear = years[0]!;
  const maxYear = years[years.length - 1]!;
  const span = Math.max(1, maxYear - minYear + 1);
  const maxNcr = Math.max(1, ...spectrum.map((p) => p.ncr));
  const maxAbsDev = Math.max(1e-9, ...spectrum.map((p) => Math.abs(p.deviation)));

  const xOf = (rpy: number): number =>
    MARGIN.left + ((rpy - minYear) / span) * plotW;
  const barW = Math.max(1, (plotW / span) * 0.8);
  const yOfCount = (n: number): number =>
    MARGIN.top + plotH * (1 - n / maxNcr);
  const yOfDev = (d: number): number =>
    MARGIN.top + (plotH / 2) * (1 - d / maxAbsDev);

  const bars = spectrum
    .map((p) => {
      const x = xOf(p.rpy);
      const y = yOfCount(p.ncr);
      const h = MARGIN.top + plotH - y;
      const selected = options.selectedRpy === p.rpy ? ' selected' : '';
      return (
        `<rect class="bar${selected}" data-rpy="${p.rpy}" data-ncr="${p.ncr}" ` +
        `x="${(x - barW / 2).toFixed(1)}" y="${y.toFixed(1)}" ` +
        `width="${barW.toFixed(1)}" height="${h.toFixed(1)}">` +
        `<title>${p.rpy}: ${p.ncr} cited refs (deviation ${p.deviation.toFixed(2)})</title>` +
        `</rect>`
      );
    })
    .join('');

  const devPoints = spectrum
    .map((p) => `${xOf(p.rpy).toFixed(1)},${yOfDev(p.deviation).toFixed(1)}`)
    .join(' ');

  let boundaries = '';
  const fit = options.segments;
  if (fit && fit.segments.length > 0) {
    boundaries = fit.segments
      .slice(1)
      .map((seg) => {
        const x = xOf(seg.start_rpy) - barW / 2 - 1;
        return (
          `<line class="segment-boundary" data-start="${seg.start_rpy}" ` +
          `x1="${x.toFixed(1)}" x2="${x.toFixed(1)}" ` +
          `y1="${MARGIN.top}" y2="${MARGIN.top + plotH}"/>` +
          `<text class="segment-slope" x="${(x + 3).toFixed(1)}" ` +
          `y="${MARGIN.top + 10}">slope ${seg.slope.toFixed(3)}</text>`
        );
      })
      .join('');
  }

  const axis =
    `<line class="axis" x1="${MARGIN.left}" x2="${width - MARGIN.right}" ` +
    `y1="${MARGIN.top + plotH}" y2="${MARGIN.top + plotH}"/>` +
    `<text class="tick" x="${MARGIN.left}" y="${height - 8}">${minYear}</text>` +
    `<text class="tick" x="${width - MARGIN.right - 28}" y="${height - 8}">${maxYear}</text>` +
    `<text class="tick" x="4" y="${MARGIN.top + 10}">${maxNcr}</text>`;

  return (
    `<svg class="spectrogram" viewBox="0 0 ${width} ${height}" ` +
    `role="img" aria-label="${esc('cited references per referenced publication year')}">` +
    `${axis}${bars}` +
    `<polyline class="deviation" fill="none" points="${devPoints}"/>` +
    `${boundaries}</svg>`
  );
}
