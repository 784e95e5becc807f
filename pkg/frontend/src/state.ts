/** View state: what the UI currently shows and is allowed to show.
 *
 * The store enforces the two hard rules of the curation flow:
 *
 * - snapshot version monotonicity: a response reflecting an older snapshot
 *   than the one already rendered is rejected, never drawn;
 * - selection coherence: selected clusters always belong to the selected
 *   year, otherwise the selection is cleared.
 *
 * Everything the UI draws is reconstructible from (dataset id, ViewState),
 * which is what makes views deep-linkable via the location hash.
 */

import type { DraftDecision } from './types.js';

export interface YearRange {
  min?: number;
  max?: number;
}

export interface ViewState {
  datasetId: string | null;
  snapshotVersion: number;
  yearRange: YearRange;
  selectedRpy: number | null;
  selectedClusters: Set<string>;
  pendingDecision: DraftDecision | null;
  /** Set when a pinned decision hit 409; holds what to retry. */
  stalePrompt: { decision: DraftDecision; currentVersion: number } | null;
  toast: string | null;
}

export type VersionCheck = 'applied' | 'stale-response' | 'newer-snapshot';

export function initialState(): ViewState {
  return {
    datasetId: null,
    snapshotVersion: 0,
    yearRange: {},
    selectedRpy: null,
    selectedClusters: new Set(),
    pendingDecision: null,
    stalePrompt: null,
    toast: null,
  };
}

export class ViewStore {
  private state: ViewState = initialState();
  private listeners = new Set<(s: ViewState) => void>();

  get current(): ViewState {
    return this.state;
  }

  subscribe(listener: (s: ViewState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  patch(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  reset(datasetId: string, version: number): void {
    this.state = { ...initialState(), datasetId, snapshotVersion: version };
    this.emit();
  }

  /**
   * Account for the snapshot version carried by an API response.
   *
   * 'applied': the response matches the rendered snapshot and may be drawn.
   * 'newer-snapshot': the server moved ahead; the response may be drawn and
   * every dependent view must refetch.
   * 'stale-response': the response predates what is already rendered and
   * must be discarded (rendered versions never go backwards).
   */
  observeVersion(version: number): VersionCheck {
    if (version < this.state.snapshotVersion) {
      return 'stale-response';
    }
    if (version > this.state.snapshotVersion) {
      this.patch({ snapshotVersion: version });
      return 'newer-snapshot';
    }
    return 'applied';
  }

  selectYear(rpy: number | null): void {
    this.patch({ selectedRpy: rpy, selectedClusters: new Set() });
  }

  /** Toggle a cluster; a selection from another year context clears first. */
  toggleCluster(clusterId: string, rpyContext: number): void {
    const next = new Set(
      this.state.selectedRpy === rpyContext ? this.state.selectedClusters : [],
    );
    if (next.has(clusterId)) {
      next.delete(clusterId);
    } else {
      next.add(clusterId);
    }
    this.patch({ selectedRpy: rpyContext, selectedClusters: next });
  }

  clearSelection(): void {
    this.patch({ selectedClusters: new Set() });
  }
}

/** Serialize the deep-linkable part of the state into a location hash. */
export function toHash(state: ViewState): string {
  if (!state.datasetId) {
    return '';
  }
  const params = new URLSearchParams({ d: state.datasetId });
  if (state.selectedRpy !== null) {
    params.set('y', String(state.selectedRpy));
  }
  if (state.yearRange.min !== undefined) {
    params.set('from', String(state.yearRange.min));
  }
  if (state.yearRange.max !== undefined) {
    params.set('to', String(state.yearRange.max));
  }
  return `#${params.toString()}`;
}

export function fromHash(hash: string): {
  datasetId: string | null;
  selectedRpy: number | null;
  yearRange: YearRange;
} {
  const params = new URLSearchParams(hash.replace(/^#/, ''));
  const year = params.get('y');
  const from = params.get('from');
  const to = params.get('to');
  return {
    datasetId: params.get('d'),
    selectedRpy: year === null ? null : Number(year),
    yearRange: {
      min: from === null ? undefined : Number(from),
      max: to === null ? undefined : Number(to),
    },
  };
}
