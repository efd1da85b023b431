import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { CitySummary, IterationReport, KpiDelta } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));
export const FRONTEND_ROOT = join(here, '..');
export const REPO_ROOT = join(FRONTEND_ROOT, '..');

export function loadFixture<T>(name: string): T {
  const path = join(FRONTEND_ROOT, 'fixtures', name);
  return JSON.parse(readFileSync(path, 'utf-8')) as T;
}

export interface SessionFixture {
  iterations: IterationReport[];
  diff: KpiDelta;
}

export function citiesFixture(): CitySummary[] {
  return loadFixture<CitySummary[]>('cities.json');
}

export function bostonFixture(): CitySummary {
  const boston = citiesFixture().find((c) => c.id === 'boston');
  if (!boston) throw new Error('boston missing from cities fixture');
  return boston;
}

/** Mount the real page skeleton into jsdom. */
export function mountPage(): void {
  const html = readFileSync(join(FRONTEND_ROOT, 'index.html'), 'utf-8');
  const body = html.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? '';
  document.body.innerHTML = body;
}
