import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import { citiesFixture, loadFixture, mountPage, SessionFixture } from './helpers.js';

const doubled = loadFixture<SessionFixture>('golden_doubled_buses.json');

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function mockFetch() {
  let iterationCalls = 0;
  const fn = vi.fn(async (input: RequestInfo | URL) => {
    const url = String(input);
    if (url.endsWith('/api/v1/cities')) return jsonResponse(citiesFixture());
    if (url.endsWith('/api/v1/schemas/controls')) {
      return jsonResponse({ properties: {} }); // fall back to bundled ranges
    }
    if (url.endsWith('/api/v1/sessions')) return jsonResponse({ session_id: 's1' }, 201);
    if (url.includes('/iterations')) {
      iterationCalls += 1;
      return jsonResponse(doubled.iterations[Math.min(iterationCalls, 2) - 1]);
    }
    if (url.includes('/diff')) return jsonResponse(doubled.diff);
    throw new Error(`unexpected fetch ${url}`);
  });
  return { fn, countIterations: () => iterationCalls };
}

describe('app wiring', () => {
  let app: App;
  let mock: ReturnType<typeof mockFetch>;

  beforeEach(async () => {
    mountPage();
    mock = mockFetch();
    vi.stubGlobal('fetch', mock.fn);
    app = new App(document, new ApiClient(''));
    await app.init();
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it('lists the bundled cities and prefills the nominal Boston controls', () => {
    const picker = document.querySelector<HTMLSelectElement>('#city-picker')!;
    expect(picker.options.length).toBe(3);
    expect(picker.value).toBe('boston');
    expect(document.querySelector<HTMLInputElement>('#fleet-bus')!.value).toBe('15');
    expect(document.querySelector<HTMLInputElement>('#fleet-amod')!.value).toBe('90');
    expect(document.querySelector<HTMLInputElement>('#tax-amod')!.value).toBe('0.2');
    // bus is not taxable in the bundled dataset, so it gets no tax input
    expect(document.querySelector('#tax-bus')).toBeNull();
  });

  it('renders the zone map and zone table on city selection', () => {
    expect(document.querySelectorAll('#map-panel .map-dot').length).toBe(8);
    expect(document.querySelectorAll('#zone-table tbody tr').length).toBe(8);
  });

  it('blocks invalid tax entry client-side without any request', async () => {
    const tax = document.querySelector<HTMLInputElement>('#tax-amod')!;
    tax.value = '1.5';
    tax.dispatchEvent(new Event('input'));
    const errorBox = document.querySelector<HTMLElement>('#error-box')!;
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toContain('tax_rates[amod]');
    expect(document.querySelector<HTMLButtonElement>('#run-btn')!.disabled).toBe(true);

    const report = await app.run();
    expect(report).toBeNull();
    expect(mock.countIterations()).toBe(0);
  });

  it('run appends an iteration and renders the overview from the response', async () => {
    const report = await app.run();
    expect(report?.iteration).toBe(1);
    const segments = document.querySelectorAll('#overview-panel rect.bar-segment');
    expect(segments.length).toBe(8 * 4);
    const mitBus = document.querySelector<SVGRectElement>(
      '#overview-panel rect[data-zone="MIT"][data-mode="bus"]',
    )!;
    expect(Number(mitBus.dataset.value)).toBe(
      doubled.iterations[0].kpis.mode_share[0].bus,
    );
  });

  it('re-run grows the history by one', async () => {
    await app.run();
    expect(app.state.history.length).toBe(1);
    await app.rerun();
    expect(app.state.history.length).toBe(2);
    const dots = document.querySelectorAll(
      '#metrics-panel svg[data-metric="avg travel time"] circle.line-dot',
    );
    expect(dots.length).toBe(2);
  });

  it('diff view shows the endpoint numbers', async () => {
    await app.run();
    await app.rerun();
    const delta = await app.showDiff(1, 2);
    expect(delta).not.toBeNull();
    const cell = document.querySelector<HTMLElement>(
      '#diff-panel td[data-metric="avg_travel_time_min"]',
    )!;
    expect(Number(cell.dataset.value)).toBe(doubled.diff.avg_travel_time_min);
  });

  it('role tabs gate which controls are editable', () => {
    app.setRole('municipality');
    expect(document.querySelector<HTMLInputElement>('#fleet-bus')!.disabled).toBe(true);
    expect(document.querySelector<HTMLInputElement>('#tax-amod')!.disabled).toBe(false);

    app.setRole('bus');
    expect(document.querySelector<HTMLInputElement>('#fleet-bus')!.disabled).toBe(false);
    expect(document.querySelector<HTMLInputElement>('#fleet-amod')!.disabled).toBe(true);
    expect(document.querySelector<HTMLInputElement>('#tax-amod')!.disabled).toBe(true);

    app.setRole('all');
    expect(document.querySelector<HTMLInputElement>('#fleet-amod')!.disabled).toBe(false);
  });

  it('surfaces server errors inline', async () => {
    mock.fn.mockImplementationOnce(async () =>
      jsonResponse({ code: 'invalid-controls', message: 'nope', details: null }, 422),
    );
    // next POST (session create) fails with the mocked error
    const report = await app.run();
    expect(report).toBeNull();
    const errorBox = document.querySelector<HTMLElement>('#error-box')!;
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toContain('invalid-controls');
  });
});
