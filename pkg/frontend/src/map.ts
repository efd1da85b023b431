import type { ZoneSummary } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

/** Plot zone centroids with labels on a plain grid background. An
 * equirectangular projection is plenty at city scale; no routing, no
 * external tiles. */
export function renderZoneMap(container: HTMLElement, zones: ZoneSummary[]): void {
  container.replaceChildren();
  if (zones.length === 0) return;

  const width = 360;
  const height = 260;
  const pad = 30;

  const midLat = zones.reduce((acc, z) => acc + z.latitude, 0) / zones.length;
  const kx = Math.cos((midLat * Math.PI) / 180);
  const xs = zones.map((z) => z.longitude * kx);
  const ys = zones.map((z) => z.latitude);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = maxX - minX || 1e-6;
  const spanY = maxY - minY || 1e-6;
  const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);

  const px = (z: ZoneSummary) =>
    pad + (z.longitude * kx - minX) * scale + (width - 2 * pad - spanX * scale) / 2;
  const py = (z: ZoneSummary) =>
    height - pad - (z.latitude - minY) * scale - (height - 2 * pad - spanY * scale) / 2;

  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`);
  svg.setAttribute('class', 'zone-map');
  svg.setAttribute('role', 'img');

  const bg = document.createElementNS(SVG_NS, 'rect');
  bg.setAttribute('width', String(width));
  bg.setAttribute('height', String(height));
  bg.setAttribute('class', 'map-bg');
  svg.appendChild(bg);
  for (let gx = pad; gx < width; gx += 40) {
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', String(gx));
    line.setAttribute('y1', '0');
    line.setAttribute('x2', String(gx));
    line.setAttribute('y2', String(height));
    line.setAttribute('class', 'map-grid');
    svg.appendChild(line);
  }
  for (let gy = pad; gy < height; gy += 40) {
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', '0');
    line.setAttribute('y1', String(gy));
    line.setAttribute('x2', String(width));
    line.setAttribute('y2', String(gy));
    line.setAttribute('class', 'map-grid');
    svg.appendChild(line);
  }

  for (const zone of zones) {
    const dot = document.createElementNS(SVG_NS, 'circle');
    dot.setAttribute('cx', String(px(zone)));
    dot.setAttribute('cy', String(py(zone)));
    dot.setAttribute('r', '5');
    dot.setAttribute('class', 'map-dot');
    dot.setAttribute('data-zone', zone.name);
    const tip = document.createElementNS(SVG_NS, 'title');
    tip.textContent = `${zone.name} (${zone.latitude.toFixed(4)}, ${zone.longitude.toFixed(4)})`;
    dot.appendChild(tip);
    svg.appendChild(dot);

    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', String(px(zone) + 8));
    label.setAttribute('y', String(py(zone) + 4));
    label.setAttribute('class', 'map-label');
    label.textContent = zone.name;
    svg.appendChild(label);
  }

  container.appendChild(svg);
}
