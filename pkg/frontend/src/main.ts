/** Browser entry point: bootstraps the controller against the page shell. */

import { ApiClient } from './api.js';
import { bindEvents, SpectroController } from './app.js';
import { fromHash, toHash } from './state.js';

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in page shell`);
  }
  return node;
}

function apiBase(): string {
  const fromWindow = (window as { RPYS_API_BASE?: string }).RPYS_API_BASE;
  const input = document.getElementById('api-base') as HTMLInputElement | null;
  return input?.value || fromWindow || 'http://127.0.0.1:8017';
}

export function boot(): SpectroController {
  const controller = new SpectroController(new ApiClient(apiBase()), {
    chart: el('chart'),
    table: el('table'),
    status: el('status'),
    prompt: el('prompt'),
    toast: el('toast'),
  });
  bindEvents(controller, document.body);

  const upload = el('upload') as HTMLInputElement;
  upload.addEventListener('change', () => {
    const file = upload.files?.[0];
    if (!file) {
      return;
    }
    void file.text().then((content) => controller.loadDataset(content));
  });

  el('merge-button').addEventListener('click', () => {
    void controller.mergeSelected();
  });
  el('split-button').addEventListener('click', () => {
    void (async () => {
      const members = await controller.membersOfSelected();
      if (members.length < 2) {
        return;
      }
      // minimal subset picker: everything but the canonical-first member
      const subset = members
        .slice(1)
        .map((m) => [m.citing_id, m.position] as [string, number]);
      await controller.splitSelected(subset);
    })();
  });
  el('segments-toggle').addEventListener('change', (event) => {
    const checked = (event.target as HTMLInputElement).checked;
    void controller.toggleSegmentsOverlay(checked);
  });

  controller.store.subscribe((state) => {
    const hash = toHash(state);
    if (hash && hash !== window.location.hash) {
      history.replaceState(null, '', hash);
    }
  });
  const linked = fromHash(window.location.hash);
  if (linked.datasetId) {
    controller.store.patch({
      datasetId: linked.datasetId,
      selectedRpy: linked.selectedRpy,
      yearRange: linked.yearRange,
    });
    void controller.refreshSpectrum().then(() => controller.refreshTable());
  }
  controller.renderChart();
  controller.renderTable();
  return controller;
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  boot();
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', () => boot());
}
