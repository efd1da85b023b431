import type { CitySummary, ScenarioControls } from './types.js';

/** Range limits mirrored from the server's controls schema. The live
 * schema (GET /api/v1/schemas/controls) overrides these bundled values
 * when reachable, so client and server rules cannot drift. */
export interface ControlRanges {
  taxMin: number;
  taxMax: number;
  fleetMin: number;
  fareMin: number;
}

export const DEFAULT_RANGES: ControlRanges = {
  taxMin: 0,
  taxMax: 1,
  fleetMin: 0,
  fareMin: 0,
};

interface SchemaShape {
  properties?: {
    tax_rates?: { additionalProperties?: { minimum?: number; maximum?: number } };
    fleet?: { additionalProperties?: { oneOf?: { minimum?: number }[] } };
    fare_overrides?: {
      additionalProperties?: { properties?: { amount?: { minimum?: number } } };
    };
  };
}

export function rangesFromSchema(schema: unknown): ControlRanges {
  const s = schema as SchemaShape;
  const tax = s.properties?.tax_rates?.additionalProperties;
  const fleet = s.properties?.fleet?.additionalProperties?.oneOf?.[0];
  const fare = s.properties?.fare_overrides?.additionalProperties?.properties?.amount;
  return {
    taxMin: tax?.minimum ?? DEFAULT_RANGES.taxMin,
    taxMax: tax?.maximum ?? DEFAULT_RANGES.taxMax,
    fleetMin: fleet?.minimum ?? DEFAULT_RANGES.fleetMin,
    fareMin: fare?.minimum ?? DEFAULT_RANGES.fareMin,
  };
}

/** Client-side mirror of the server checks; an empty list means the
 * draft may be submitted. */
export function validateControls(
  draft: ScenarioControls,
  city: CitySummary,
  ranges: ControlRanges = DEFAULT_RANGES,
): string[] {
  const problems: string[] = [];
  const modeNames = new Set(city.modes.map((m) => m.name));

  for (const [mode, value] of Object.entries(draft.fleet)) {
    if (mode === 'walking' || !modeNames.has(mode)) {
      problems.push(`fleet: unknown mode "${mode}"`);
      continue;
    }
    const counts = Array.isArray(value) ? value : [value];
    if (Array.isArray(value) && value.length !== city.n_zones) {
      problems.push(`fleet[${mode}]: expected ${city.n_zones} per-zone entries`);
    }
    for (const count of counts) {
      if (!Number.isInteger(count) || count < ranges.fleetMin) {
        problems.push(`fleet[${mode}]: vehicle counts must be integers >= ${ranges.fleetMin}`);
        break;
      }
    }
  }

  for (const [mode, scheme] of Object.entries(draft.fare_overrides)) {
    if (mode === 'walking' || !modeNames.has(mode)) {
      problems.push(`fares: unknown mode "${mode}"`);
      continue;
    }
    if (scheme.kind !== 'per_trip' && scheme.kind !== 'per_mile') {
      problems.push(`fare[${mode}]: kind must be per_trip or per_mile`);
    }
    if (!Number.isFinite(scheme.amount) || scheme.amount < ranges.fareMin) {
      problems.push(`fare[${mode}]: amount must be a number >= ${ranges.fareMin}`);
    }
  }

  for (const [mode, rate] of Object.entries(draft.tax_rates)) {
    if (mode === 'walking' || !modeNames.has(mode)) {
      problems.push(`taxes: unknown mode "${mode}"`);
      continue;
    }
    if (!Number.isFinite(rate) || rate < ranges.taxMin || rate > ranges.taxMax) {
      problems.push(
        `tax_rates[${mode}]: must lie in [${ranges.taxMin}, ${ranges.taxMax}], got ${rate}`,
      );
    }
  }

  return problems;
}
