import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { beforeEach, describe, expect, it } from 'vitest';

import { renderDiffTable, renderLineCharts, renderStackedBars, ZoneShares } from '../src/charts.js';
import { bostonFixture, loadFixture, REPO_ROOT, SessionFixture } from './helpers.js';

const boston = bostonFixture();
const doubled = loadFixture<SessionFixture>('golden_doubled_buses.json');
const pricier = loadFixture<SessionFixture>('golden_pricier_amod.json');
const modeNames = boston.modes.map((m) => m.name);

function zonesFrom(report: SessionFixture['iterations'][number]): ZoneShares[] {
  return boston.zones.map((zone, i) => ({
    zone: zone.name,
    shares: report.kpis.mode_share[i],
    riders: report.kpis.riders[i],
    departures: report.kpis.zone_departures[i],
  }));
}

describe('stacked mode-share bars', () => {
  let container: HTMLElement;
  beforeEach(() => {
    container = document.createElement('div');
    document.body.replaceChildren(container);
  });

  it('renders one segment per zone/mode with the exact fixture share', () => {
    const report = doubled.iterations[0];
    renderStackedBars(container, zonesFrom(report), modeNames);
    const segments = container.querySelectorAll<SVGRectElement>('rect.bar-segment');
    expect(segments.length).toBe(boston.zones.length * modeNames.length);
    for (const segment of segments) {
      const zoneIdx = boston.zones.findIndex((z) => z.name === segment.dataset.zone);
      const mode = segment.dataset.mode!;
      const expected = report.kpis.mode_share[zoneIdx][mode];
      expect(Number(segment.dataset.value)).toBe(expected);
      expect(Number(segment.dataset.riders)).toBe(report.kpis.riders[zoneIdx][mode]);
    }
  });

  it('tooltips carry rider counts', () => {
    renderStackedBars(container, zonesFrom(doubled.iterations[0]), modeNames);
    const bus0 = container.querySelector('rect[data-zone="MIT"][data-mode="bus"] title');
    expect(bus0?.textContent).toContain('750');
  });

  it('doubling buses doubles the bus share shown for MIT and Harvard', () => {
    for (const zone of ['MIT', 'Harvard']) {
      renderStackedBars(container, zonesFrom(doubled.iterations[0]), modeNames);
      const before = Number(
        container.querySelector<SVGRectElement>(`rect[data-zone="${zone}"][data-mode="bus"]`)!
          .dataset.value,
      );
      renderStackedBars(container, zonesFrom(doubled.iterations[1]), modeNames);
      const after = Number(
        container.querySelector<SVGRectElement>(`rect[data-zone="${zone}"][data-mode="bus"]`)!
          .dataset.value,
      );
      expect(after).toBeCloseTo(2 * before, 9);
    }
  });

  it('pricier robotaxi fixture shows zero amod share in City Hall and Boston Common', () => {
    renderStackedBars(container, zonesFrom(pricier.iterations[1]), modeNames);
    for (const zone of ['City Hall', 'Boston Common']) {
      const segment = container.querySelector<SVGRectElement>(
        `rect[data-zone="${zone}"][data-mode="amod"]`,
      )!;
      expect(Number(segment.dataset.value)).toBe(0);
      expect(segment.getAttribute('width')).toBe('0');
    }
  });

  it('all-walk shares render a single visible segment per zone', () => {
    const zones: ZoneShares[] = [
      {
        zone: 'solo',
        shares: { walking: 1, bus: 0, amod: 0, bike: 0 },
        riders: { walking: 10, bus: 0, amod: 0, bike: 0 },
        departures: 10,
      },
    ];
    renderStackedBars(container, zones, ['walking', 'bus', 'amod', 'bike']);
    const visible = [...container.querySelectorAll<SVGRectElement>('rect.bar-segment')].filter(
      (r) => Number(r.getAttribute('width')) > 0,
    );
    expect(visible.length).toBe(1);
    expect(visible[0].dataset.mode).toBe('walking');
  });

  it('zero-departure zones render an empty-state bar', () => {
    const zones: ZoneShares[] = [
      { zone: 'ghost', shares: {}, riders: {}, departures: 0 },
    ];
    renderStackedBars(container, zones, modeNames);
    expect(container.querySelector('rect.bar-empty')).not.toBeNull();
    expect(container.querySelectorAll('rect.bar-segment').length).toBe(0);
  });

  it('provides a data-table fallback', () => {
    renderStackedBars(container, zonesFrom(doubled.iterations[0]), modeNames);
    const table = container.querySelector('table.data-fallback');
    expect(table).not.toBeNull();
    expect(table!.querySelectorAll('tbody tr').length).toBe(
      boston.zones.length * modeNames.length,
    );
  });
});

describe('metric line charts', () => {
  it('plots one dot per iteration holding the exact KPI value', () => {
    const container = document.createElement('div');
    const values = doubled.iterations.map((r) => r.kpis.avg_travel_time_min);
    renderLineCharts(container, [{ name: 'avg travel time', unit: 'min', values }]);
    const dots = container.querySelectorAll<SVGCircleElement>('circle.line-dot');
    expect(dots.length).toBe(2);
    dots.forEach((dot, i) => {
      expect(Number(dot.dataset.value)).toBe(values[i]);
      expect(Number(dot.dataset.iteration)).toBe(i + 1);
    });
    expect(container.querySelectorAll('polyline.line-path').length).toBe(1);
  });

  it('a single iteration renders a single point and no line', () => {
    const container = document.createElement('div');
    renderLineCharts(container, [{ name: 'co2', values: [doubled.iterations[0].kpis.co2_kg] }]);
    expect(container.querySelectorAll('circle.line-dot').length).toBe(1);
    expect(container.querySelectorAll('polyline').length).toBe(0);
  });

  it('each chart has a table fallback mirroring the values', () => {
    const container = document.createElement('div');
    const values = doubled.iterations.map((r) => r.kpis.revenue.bus);
    renderLineCharts(container, [{ name: 'bus revenue', values }]);
    const cells = [...container.querySelectorAll('tbody td')].map((td) => td.textContent);
    expect(cells).toEqual(['1', String(values[0]), '2', String(values[1])]);
  });
});

describe('diff table', () => {
  it('diff endpoint numbers equal the stored golden-session KPI differences', () => {
    // Cross-surface check: the CLI compare tool and the UI both surface
    // diff_iterations output; the recorded fixture must equal iteration
    // KPI differences from the committed golden session file.
    const golden = JSON.parse(
      readFileSync(
        join(REPO_ROOT, 'src', 'mobeq', 'data', 'golden_boston_session.mobeq'),
        'utf-8',
      ),
    );
    const [k1, k2] = golden.history.map(
      (h: { kpis: Record<string, number> }) => h.kpis,
    );
    expect(doubled.diff.avg_travel_time_min).toBe(
      k2.avg_travel_time_min - k1.avg_travel_time_min,
    );
    expect(doubled.diff.co2_kg).toBe(k2.co2_kg - k1.co2_kg);
    expect(doubled.diff.tax_revenue).toBe(k2.tax_revenue - k1.tax_revenue);
  });

  it('shows the same numbers the diff endpoint returned', () => {
    const container = document.createElement('div');
    const rows = [
      { metric: 'avg_travel_time_min', delta: doubled.diff.avg_travel_time_min },
      { metric: 'co2_kg', delta: doubled.diff.co2_kg },
      { metric: 'revenue[bus]', delta: doubled.diff.revenue.bus },
    ];
    renderDiffTable(container, rows, 'Iteration 2 vs 1');
    for (const { metric, delta } of rows) {
      const cell = container.querySelector<HTMLElement>(`td[data-metric="${metric}"]`)!;
      expect(Number(cell.dataset.value)).toBe(delta);
    }
    // directions from the recorded scenario: time down, CO2 and revenue up
    expect(doubled.diff.avg_travel_time_min).toBeLessThan(0);
    expect(
      container.querySelector('td[data-metric="avg_travel_time_min"]')!.className,
    ).toBe('delta-down');
    expect(container.querySelector('td[data-metric="co2_kg"]')!.className).toBe('delta-up');
  });
});
