/** Hand-rolled SVG charts. Every datum is attached to its element as a
 * data-value attribute holding the raw API number, and each chart gets a
 * plain-table fallback for screen readers, so tests (and users) can read
 * back exactly what the API said. */

const SVG_NS = 'http://www.w3.org/2000/svg';

export const MODE_COLORS: Record<string, string> = {
  walking: '#9aa5b1',
  bus: '#d9822b',
  amod: '#3e7cb1',
  bike: '#57a773',
};

function colorFor(mode: string, index: number): string {
  const fallback = ['#9aa5b1', '#d9822b', '#3e7cb1', '#57a773', '#a05195', '#c44e52'];
  return MODE_COLORS[mode] ?? fallback[index % fallback.length];
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, String(value));
  return el;
}

function fallbackTable(
  caption: string,
  header: string[],
  rows: (string | number)[][],
): HTMLTableElement {
  const table = document.createElement('table');
  table.className = 'visually-hidden data-fallback';
  const cap = document.createElement('caption');
  cap.textContent = caption;
  table.appendChild(cap);
  const thead = table.createTHead().insertRow();
  for (const name of header) {
    const th = document.createElement('th');
    th.textContent = name;
    thead.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const cell of row) {
      const td = tr.insertCell();
      td.textContent = String(cell);
    }
  }
  return table;
}

export interface ZoneShares {
  zone: string;
  shares: Record<string, number>;
  riders: Record<string, number>;
  departures: number;
}

/** One horizontal stacked bar per zone, one segment per mode. */
export function renderStackedBars(
  container: HTMLElement,
  zones: ZoneShares[],
  modeNames: string[],
): void {
  container.replaceChildren();
  const width = 320;
  const barHeight = 22;
  const gap = 8;
  const labelWidth = 110;
  const height = zones.length * (barHeight + gap);
  const svg = svgEl('svg', {
    viewBox: `0 0 ${width + labelWidth} ${height}`,
    role: 'img',
    class: 'stacked-bars',
  });

  const tableRows: (string | number)[][] = [];
  zones.forEach((zone, zi) => {
    const y = zi * (barHeight + gap);
    const label = svgEl('text', {
      x: labelWidth - 6,
      y: y + barHeight * 0.7,
      'text-anchor': 'end',
      class: 'bar-label',
    });
    label.textContent = zone.zone;
    svg.appendChild(label);

    if (zone.departures <= 0) {
      const empty = svgEl('rect', {
        x: labelWidth,
        y,
        width,
        height: barHeight,
        class: 'bar-empty',
        'data-zone': zone.zone,
      });
      svg.appendChild(empty);
      const note = svgEl('text', {
        x: labelWidth + 6,
        y: y + barHeight * 0.7,
        class: 'bar-empty-note',
      });
      note.textContent = 'no departures';
      svg.appendChild(note);
      return;
    }

    let x = labelWidth;
    modeNames.forEach((mode, mi) => {
      const share = zone.shares[mode] ?? 0;
      const riders = zone.riders[mode] ?? 0;
      const w = share * width;
      const rect = svgEl('rect', {
        x,
        y,
        width: w,
        height: barHeight,
        fill: colorFor(mode, mi),
        'data-zone': zone.zone,
        'data-mode': mode,
        'data-value': share,
        'data-riders': riders,
        class: 'bar-segment',
      });
      const title = svgEl('title', {});
      title.textContent = `${zone.zone} — ${mode}: ${riders} travelers (${(share * 100).toFixed(1)}%)`;
      rect.appendChild(title);
      svg.appendChild(rect);
      x += w;
      tableRows.push([zone.zone, mode, share, riders]);
    });
  });

  container.appendChild(svg);
  container.appendChild(
    fallbackTable('Mode share by zone', ['zone', 'mode', 'share', 'travelers'], tableRows),
  );
}

export interface MetricSeries {
  name: string;
  values: number[]; // one per iteration, in order
  unit?: string;
}

/** One small line chart per metric across iterations. */
export function renderLineCharts(container: HTMLElement, series: MetricSeries[]): void {
  container.replaceChildren();
  for (const metric of series) {
    const card = document.createElement('figure');
    card.className = 'metric-card';
    const title = document.createElement('figcaption');
    title.textContent = metric.unit ? `${metric.name} (${metric.unit})` : metric.name;
    card.appendChild(title);

    const width = 260;
    const height = 90;
    const pad = 14;
    const svg = svgEl('svg', {
      viewBox: `0 0 ${width} ${height}`,
      role: 'img',
      class: 'line-chart',
      'data-metric': metric.name,
    });

    const values = metric.values;
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    const xAt = (i: number) =>
      values.length === 1 ? width / 2 : pad + (i * (width - 2 * pad)) / (values.length - 1);
    const yAt = (v: number) => height - pad - ((v - lo) / span) * (height - 2 * pad);

    if (values.length > 1) {
      const points = values.map((v, i) => `${xAt(i)},${yAt(v)}`).join(' ');
      svg.appendChild(svgEl('polyline', { points, class: 'line-path', fill: 'none' }));
    }
    values.forEach((v, i) => {
      const dot = svgEl('circle', {
        cx: xAt(i),
        cy: yAt(v),
        r: 3.5,
        class: 'line-dot',
        'data-metric': metric.name,
        'data-iteration': i + 1,
        'data-value': v,
      });
      const tip = svgEl('title', {});
      tip.textContent = `iteration ${i + 1}: ${v}`;
      dot.appendChild(tip);
      svg.appendChild(dot);
    });

    card.appendChild(svg);
    card.appendChild(
      fallbackTable(
        metric.name,
        ['iteration', 'value'],
        values.map((v, i) => [i + 1, v]),
      ),
    );
    container.appendChild(card);
  }
}

/** Key/value rows for an iteration diff; values carry their raw number. */
export function renderDiffTable(
  container: HTMLElement,
  rows: { metric: string; delta: number }[],
  heading: string,
): void {
  container.replaceChildren();
  const title = document.createElement('h3');
  title.textContent = heading;
  container.appendChild(title);
  const table = document.createElement('table');
  table.className = 'diff-table';
  const head = table.createTHead().insertRow();
  for (const name of ['metric', 'delta']) {
    const th = document.createElement('th');
    th.textContent = name;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const { metric, delta } of rows) {
    const tr = body.insertRow();
    tr.insertCell().textContent = metric;
    const cell = tr.insertCell();
    cell.textContent = delta > 0 ? `+${delta}` : String(delta);
    cell.dataset.metric = metric;
    cell.dataset.value = String(delta);
    cell.className = delta > 0 ? 'delta-up' : delta < 0 ? 'delta-down' : 'delta-flat';
  }
  container.appendChild(table);
}
