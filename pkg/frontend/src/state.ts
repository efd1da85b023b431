import type {
  CitySummary,
  IterationReport,
  KpiDelta,
  Role,
  ScenarioControls,
} from './types.js';

export interface ViewState {
  cities: CitySummary[];
  city: CitySummary | null;
  role: Role;
  draft: ScenarioControls;
  sessionId: string | null;
  history: IterationReport[];
  lastApplied: ScenarioControls | null;
  inflight: boolean;
  problems: string[];
  apiError: string | null;
  diffSelection: { a: number; b: number } | null;
  diff: KpiDelta | null;
}

export function initialState(): ViewState {
  return {
    cities: [],
    city: null,
    role: 'all',
    draft: { fleet: {}, fare_overrides: {}, tax_rates: {} },
    sessionId: null,
    history: [],
    lastApplied: null,
    inflight: false,
    problems: [],
    apiError: null,
    diffSelection: null,
    diff: null,
  };
}

export function cloneControls(controls: ScenarioControls): ScenarioControls {
  return JSON.parse(JSON.stringify(controls)) as ScenarioControls;
}

export const ROLES: { id: Role; label: string }[] = [
  { id: 'municipality', label: 'Municipality' },
  { id: 'bus', label: 'Bus operator' },
  { id: 'amod', label: 'Robotaxi operator' },
  { id: 'bike', label: 'Bike-share operator' },
  { id: 'all', label: 'All access' },
];

/** Which lever a role may touch: the municipality sets taxes, each
 * operator runs its own fleet and fares, and the all-access tab (for
 * classroom demos) edits everything. */
export function canEdit(role: Role, lever: 'fleet' | 'fare' | 'tax', mode: string): boolean {
  if (role === 'all') return true;
  if (role === 'municipality') return lever === 'tax';
  return lever !== 'tax' && mode === role;
}
