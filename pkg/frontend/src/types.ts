/** Mirrors of the API response shapes. The UI performs no equilibrium
 * math: every rendered number is one of these fields. */

export interface FareScheme {
  kind: 'per_trip' | 'per_mile';
  amount: number;
}

export interface ZoneSummary {
  id: number;
  name: string;
  latitude: number;
  longitude: number;
}

export interface ModeSummary {
  name: string;
  fare: FareScheme;
  taxable: boolean;
}

export interface ScenarioControls {
  fleet: Record<string, number | number[]>;
  fare_overrides: Record<string, FareScheme>;
  tax_rates: Record<string, number>;
}

export interface CitySummary {
  id: string;
  name: string;
  n_zones: number;
  n_populations: number;
  n_modes: number;
  total_travelers: number;
  zones: ZoneSummary[];
  modes: ModeSummary[];
  populations: { name: string; value_of_time_usd_per_hour: number; size: number }[];
  default_controls: ScenarioControls;
  bundled: boolean;
}

export interface KpiBundle {
  avg_travel_time_min: number;
  co2_kg: number;
  revenue: Record<string, number>;
  operating_cost: Record<string, number>;
  tax_revenue: number;
  mode_share: Record<string, number>[];
  riders: Record<string, number>[];
  zone_departures: number[];
}

export interface IterationReport {
  iteration: number;
  controls: ScenarioControls;
  kpis: KpiBundle;
  nash: { verdict: boolean; witnesses: unknown[] };
  stats: {
    objective_usd: number;
    per_zone_iterations: number[];
    wall_time_s: number;
    solver_kind: string;
  };
  timestamp: string;
}

export interface KpiDelta {
  a: number;
  b: number;
  avg_travel_time_min: number;
  co2_kg: number;
  revenue: Record<string, number>;
  operating_cost: Record<string, number>;
  tax_revenue: number;
  mode_share: Record<string, number>[];
}

export interface SessionHistory {
  session_id: string;
  city_name: string;
  iterations: IterationReport[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown;
}

export type Role = 'municipality' | 'bus' | 'amod' | 'bike' | 'all';
