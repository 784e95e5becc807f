/** Controller: wires the API client, the view store, and the DOM.
 *
 * Curation flow: a merge/split is POSTed pinned to the snapshot version the
 * UI rendered. On success the spectrum and cluster table are refetched (the
 * server is the single source of truth for counts, nothing is recomputed
 * client-side). On 409 a stale-version prompt offers refetch-and-retry and
 * nothing is retried silently. Network failures toast and change nothing.
 *
 * At most one mutation is in flight; responses are applied in arrival order
 * and anything reflecting an older snapshot than the one rendered is
 * discarded.
 */

import { ApiClient, ApiFailure } from './api.js';
import { renderSpectrogram } from './chart.js';
import { ViewStore } from './state.js';
import { renderClusterTable } from './table.js';
import type {
  ClusterMember,
  ClusterRow,
  DraftDecision,
  SegmentFit,
  SpectrumPoint,
} from './types.js';

export interface ControllerElements {
  chart: HTMLElement;
  table: HTMLElement;
  status: HTMLElement;
  prompt: HTMLElement;
  toast: HTMLElement;
}

export class SpectroController {
  readonly store = new ViewStore();
  private spectrum: SpectrumPoint[] = [];
  private tableRows: ClusterRow[] = [];
  private segments: SegmentFit | null = null;
  private segmentsOverlay = false;
  private mutationInFlight = false;

  constructor(
    private readonly api: ApiClient,
    private readonly el: ControllerElements,
  ) {}

  // -- data loading ---------------------------------------------------

  async loadDataset(content: string, format = 'auto'): Promise<void> {
    const uploaded = await this.api.uploadDataset(content, format);
    this.store.reset(uploaded.dataset_id, uploaded.version);
    this.spectrum = [];
    this.tableRows = [];
    this.segments = null;
    this.setStatus(
      `dataset ${uploaded.dataset_id}: ${uploaded.n_publications} publications, ` +
        `${uploaded.n_refs} cited references (v${uploaded.version})`,
    );
    await this.refreshSpectrum();
  }

  async refreshSpectrum(): Promise<void> {
    const datasetId = this.requireDataset();
    const { yearRange } = this.store.current;
    try {
      const body = await this.api.getSpectrum(datasetId, {
        minRpy: yearRange.min,
        maxRpy: yearRange.max,
      });
      if (this.store.observeVersion(body.version) === 'stale-response') {
        return;
      }
      this.spectrum = body.spectrum;
      if (this.segmentsOverlay) {
        await this.refreshSegments();
      }
    } catch (err) {
      this.showError(err);
      return;
    }
    this.renderChart();
  }

  async refreshTable(): Promise<void> {
    const datasetId = this.requireDataset();
    const rpy = this.store.current.selectedRpy;
    if (rpy === null) {
      this.tableRows = [];
      this.renderTable();
      return;
    }
    try {
      const body = await this.api.getYearClusters(datasetId, rpy);
      if (this.store.observeVersion(body.version) === 'stale-response') {
        return;
      }
      this.tableRows = body.clusters;
    } catch (err) {
      this.showError(err);
      return;
    }
    this.renderTable();
  }

  private async refreshSegments(): Promise<void> {
    const datasetId = this.requireDataset();
    const body = await this.api.getSegments(datasetId);
    if (this.store.observeVersion(body.version) !== 'stale-response') {
      this.segments = body.fit;
    }
  }

  async toggleSegmentsOverlay(on: boolean): Promise<void> {
    this.segmentsOverlay = on;
    if (on) {
      try {
        await this.refreshSegments();
      } catch (err) {
        this.segmentsOverlay = false;
        this.showError(err);
        return;
      }
    } else {
      this.segments = null;
    }
    this.renderChart();
  }

  // -- selection ------------------------------------------------------

  async selectYear(rpy: number): Promise<void> {
    this.store.selectYear(rpy);
    this.renderChart();
    await this.refreshTable();
  }

  toggleCluster(clusterId: string, rpy: number): void {
    this.store.toggleCluster(clusterId, rpy);
    this.renderTable();
  }

  // -- curation -------------------------------------------------------

  async mergeSelected(): Promise<void> {
    const ids = [...this.store.current.selectedClusters];
    if (ids.length < 2) {
      this.setToast('select at least two clusters to merge');
      return;
    }
    await this.submitDecision({ kind: 'merge', clusters: ids.sort() });
  }

  async splitSelected(members: [string, number][]): Promise<void> {
    const ids = [...this.store.current.selectedClusters];
    if (ids.length !== 1 || members.length === 0) {
      this.setToast('select exactly one cluster and a member subset to split');
      return;
    }
    await this.submitDecision({ kind: 'split', cluster: ids[0]!, members });
  }

  async membersOfSelected(): Promise<ClusterMember[]> {
    const ids = [...this.store.current.selectedClusters];
    if (ids.length !== 1) {
      return [];
    }
    const datasetId = this.requireDataset();
    const body = await this.api.getCluster(datasetId, ids[0]!);
    return body.cluster.members;
  }

  private async submitDecision(decision: DraftDecision): Promise<void> {
    if (this.mutationInFlight) {
      this.setToast('a decision is already in flight');
      return;
    }
    const datasetId = this.requireDataset();
    const pinned = this.store.current.snapshotVersion;
    this.store.patch({ pendingDecision: decision });
    this.renderTable();
    this.mutationInFlight = true;
    try {
      const body = await this.api.postDecision(datasetId, decision, pinned);
      this.store.observeVersion(body.version);
      this.store.patch({
        pendingDecision: null,
        selectedClusters: new Set(),
        stalePrompt: null,
      });
      await this.refreshSpectrum();
      await this.refreshTable();
      this.setStatus(`decision applied, snapshot v${body.version}`);
    } catch (err) {
      if (err instanceof ApiFailure && err.isConflict) {
        const detail = (err.detail ?? {}) as { current_version?: number };
        this.store.patch({
          stalePrompt: {
            decision,
            currentVersion: detail.current_version ?? pinned,
          },
        });
        this.renderPrompt();
      } else {
        this.store.patch({ pendingDecision: null });
        this.renderTable();
        this.showError(err);
      }
    } finally {
      this.mutationInFlight = false;
    }
  }

  /** The stale prompt's "refetch and retry": refresh, then re-pin. */
  async retryStaleDecision(): Promise<void> {
    const prompt = this.store.current.stalePrompt;
    if (!prompt) {
      return;
    }
    this.store.patch({ stalePrompt: null, pendingDecision: null });
    this.renderPrompt();
    await this.refreshSpectrum();
    await this.refreshTable();
    await this.submitDecision(prompt.decision);
  }

  dismissStalePrompt(): void {
    this.store.patch({ stalePrompt: null, pendingDecision: null });
    this.renderPrompt();
    this.renderTable();
  }

  // -- rendering ------------------------------------------------------

  renderChart(): void {
    this.el.chart.innerHTML = renderSpectrogram(this.spectrum, {
      segments: this.segmentsOverlay ? this.segments : null,
      selectedRpy: this.store.current.selectedRpy,
    });
  }

  renderTable(): void {
    const { selectedRpy, selectedClusters, pendingDecision } =
      this.store.current;
    if (selectedRpy === null) {
      this.el.table.innerHTML =
        '<p class="hint">click a year in the chart to inspect its clusters</p>';
      return;
    }
    this.el.table.innerHTML = renderClusterTable(
      selectedRpy,
      this.tableRows,
      selectedClusters,
      pendingDecision,
    );
  }

  renderPrompt(): void {
    const prompt = this.store.current.stalePrompt;
    if (!prompt) {
      this.el.prompt.innerHTML = '';
      this.el.prompt.classList.remove('visible');
      return;
    }
    this.el.prompt.classList.add('visible');
    this.el.prompt.innerHTML =
      `<div class="stale-prompt" role="alertdialog">` +
      `<p>another change moved this dataset to v${prompt.currentVersion}; ` +
      `your decision was not applied.</p>` +
      `<button class="retry-stale">refetch and retry</button> ` +
      `<button class="dismiss-stale">discard decision</button></div>`;
  }

  private setStatus(text: string): void {
    this.el.status.textContent = text;
  }

  private setToast(text: string): void {
    this.store.patch({ toast: text });
    this.el.toast.textContent = text;
    this.el.toast.classList.add('visible');
  }

  private showError(err: unknown): void {
    const message =
      err instanceof ApiFailure
        ? `${err.code}: ${err.message}`
        : `request failed: ${String(err)}`;
    this.setToast(message);
  }

  private requireDataset(): string {
    const id = this.store.current.datasetId;
    if (!id) {
      throw new Error('no dataset loaded');
    }
    return id;
  }
}

/** Attach delegated DOM listeners; kept out of the class for testability. */
export function bindEvents(
  controller: SpectroController,
  root: HTMLElement,
): void {
  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const bar = target.closest('.bar');
    if (bar instanceof Element) {
      void controller.selectYear(Number(bar.getAttribute('data-rpy')));
      return;
    }
    if (target.closest('.retry-stale')) {
      void controller.retryStaleDecision();
      return;
    }
    if (target.closest('.dismiss-stale')) {
      controller.dismissStalePrompt();
      return;
    }
  });
  root.addEventListener('change', (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains('cluster-select')) {
      controller.toggleCluster(
        target.getAttribute('data-cluster-id') ?? '',
        Number(target.getAttribute('data-rpy')),
      );
    }
  });
}
