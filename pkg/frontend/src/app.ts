import { ApiClient, ApiError } from './api.js';
import { renderDiffTable, renderLineCharts, renderStackedBars, ZoneShares } from './charts.js';
import { renderZoneMap } from './map.js';
import { ROLES, ViewState, canEdit, cloneControls, initialState } from './state.js';
import type { IterationReport, KpiDelta, Role } from './types.js';
import { ControlRanges, DEFAULT_RANGES, rangesFromSchema, validateControls } from './validate.js';

function byId<T extends HTMLElement>(root: ParentNode, id: string): T {
  const el = root.querySelector(`#${id}`);
  if (!el) throw new Error(`missing #${id} in document`);
  return el as T;
}

export class App {
  state: ViewState = initialState();
  private ranges: ControlRanges = DEFAULT_RANGES;

  constructor(
    private root: Document,
    private api: ApiClient,
  ) {}

  async init(): Promise<void> {
    byId<HTMLButtonElement>(this.root, 'run-btn').addEventListener('click', () => void this.run());
    byId<HTMLButtonElement>(this.root, 'rerun-btn').addEventListener('click', () => void this.rerun());
    byId<HTMLButtonElement>(this.root, 'reset-btn').addEventListener('click', () => void this.reset());
    byId<HTMLSelectElement>(this.root, 'city-picker').addEventListener('change', (ev) => {
      void this.selectCity((ev.target as HTMLSelectElement).value);
    });
    byId<HTMLButtonElement>(this.root, 'diff-btn').addEventListener('click', () => void this.showDiff());

    this.state.cities = await this.api.listCities();
    try {
      this.ranges = rangesFromSchema(await this.api.controlsSchema());
    } catch {
      this.ranges = DEFAULT_RANGES; // bundled mirror of the server schema
    }
    const picker = byId<HTMLSelectElement>(this.root, 'city-picker');
    picker.replaceChildren(
      ...this.state.cities.map((c) => {
        const opt = this.root.createElement('option');
        opt.value = c.id;
        opt.textContent = c.name;
        return opt;
      }),
    );
    if (this.state.cities.length > 0) {
      picker.value = this.state.cities[0].id;
      await this.selectCity(this.state.cities[0].id);
    }
  }

  async selectCity(cityId: string): Promise<void> {
    const city = this.state.cities.find((c) => c.id === cityId);
    if (!city) return;
    this.state.city = city;
    this.state.draft = cloneControls(city.default_controls);
    this.state.sessionId = null;
    this.state.history = [];
    this.state.lastApplied = null;
    this.state.diff = null;
    this.state.diffSelection = null;
    this.state.apiError = null;
    this.renderControlsForm();
    this.renderZoneTable();
    renderZoneMap(byId(this.root, 'map-panel'), city.zones);
    this.renderResults();
  }

  setRole(role: Role): void {
    this.state.role = role;
    this.renderControlsForm();
  }

  /** Pull the draft out of the form inputs and validate it. */
  refreshDraft(): void {
    const city = this.state.city;
    if (!city) return;
    const draft = this.state.draft;
    for (const mode of city.modes) {
      if (mode.name === 'walking') continue;
      const fleetInput = this.root.querySelector<HTMLInputElement>(`#fleet-${mode.name}`);
      if (fleetInput && !fleetInput.disabled) {
        draft.fleet[mode.name] = fleetInput.valueAsNumber;
      }
      const fareAmount = this.root.querySelector<HTMLInputElement>(`#fare-${mode.name}`);
      const fareKind = this.root.querySelector<HTMLSelectElement>(`#fare-kind-${mode.name}`);
      if (fareAmount && fareKind && !fareAmount.disabled && fareAmount.dataset.dirty === '1') {
        draft.fare_overrides[mode.name] = {
          kind: fareKind.value as 'per_trip' | 'per_mile',
          amount: fareAmount.valueAsNumber,
        };
      }
      const taxInput = this.root.querySelector<HTMLInputElement>(`#tax-${mode.name}`);
      if (taxInput && !taxInput.disabled) {
        draft.tax_rates[mode.name] = taxInput.valueAsNumber;
      }
    }
    this.state.problems = validateControls(draft, city, this.ranges);
    this.renderProblems();
  }

  private async ensureSession(): Promise<string> {
    if (!this.state.sessionId) {
      this.state.sessionId = await this.api.createSession(this.state.city!.id);
    }
    return this.state.sessionId;
  }

  /** Solve the current draft as the next iteration. */
  async run(): Promise<IterationReport | null> {
    return this.submit(this.state.draft);
  }

  /** Re-solve the most recently applied controls as a new iteration. */
  async rerun(): Promise<IterationReport | null> {
    return this.submit(this.state.lastApplied ?? this.state.draft);
  }

  private async submit(controls: ViewState['draft']): Promise<IterationReport | null> {
    const city = this.state.city;
    if (!city || this.state.inflight) return null;
    this.state.problems = validateControls(controls, city, this.ranges);
    this.renderProblems();
    if (this.state.problems.length > 0) return null; // never send an invalid draft

    this.state.inflight = true;
    this.state.apiError = null;
    this.setBusy(true);
    try {
      const sessionId = await this.ensureSession();
      const report = await this.api.postIteration(sessionId, cloneControls(controls));
      this.state.history.push(report);
      this.state.lastApplied = cloneControls(controls);
      this.renderResults();
      return report;
    } catch (err) {
      this.state.apiError =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      this.renderProblems();
      return null;
    } finally {
      this.state.inflight = false;
      this.setBusy(false);
    }
  }

  async reset(): Promise<void> {
    this.state.sessionId = null;
    this.state.history = [];
    this.state.lastApplied = null;
    this.state.diff = null;
    this.state.diffSelection = null;
    this.renderResults();
  }

  async showDiff(a?: number, b?: number): Promise<KpiDelta | null> {
    const selA = a ?? Number(byId<HTMLSelectElement>(this.root, 'diff-a').value);
    const selB = b ?? Number(byId<HTMLSelectElement>(this.root, 'diff-b').value);
    if (!this.state.sessionId || !selA || !selB) return null;
    try {
      const delta = await this.api.getDiff(this.state.sessionId, selA, selB);
      this.state.diffSelection = { a: selA, b: selB };
      this.state.diff = delta;
      this.renderDiff();
      return delta;
    } catch (err) {
      this.state.apiError =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      this.renderProblems();
      return null;
    }
  }

  private setBusy(busy: boolean): void {
    for (const id of ['run-btn', 'rerun-btn', 'reset-btn', 'diff-btn']) {
      byId<HTMLButtonElement>(this.root, id).disabled = busy;
    }
    for (const input of this.root.querySelectorAll<HTMLInputElement>('#controls-form input, #controls-form select')) {
      if (busy) input.setAttribute('data-was-disabled', input.disabled ? '1' : '0');
      input.disabled = busy ? true : input.getAttribute('data-was-disabled') === '1';
    }
  }

  // ---- rendering ---------------------------------------------------------

  renderControlsForm(): void {
    const city = this.state.city;
    if (!city) return;
    const tabs = byId<HTMLElement>(this.root, 'role-tabs');
    tabs.replaceChildren(
      ...ROLES.map((role) => {
        const btn = this.root.createElement('button');
        btn.textContent = role.label;
        btn.className = role.id === this.state.role ? 'tab active' : 'tab';
        btn.dataset.role = role.id;
        btn.addEventListener('click', () => this.setRole(role.id));
        return btn;
      }),
    );

    const form = byId<HTMLElement>(this.root, 'controls-form');
    form.replaceChildren();
    const draft = this.state.draft;
    for (const mode of city.modes) {
      if (mode.name === 'walking') continue;
      const section = this.root.createElement('fieldset');
      const legend = this.root.createElement('legend');
      legend.textContent = mode.name;
      section.appendChild(legend);

      const fleetValue = draft.fleet[mode.name];
      section.appendChild(
        this.numberField(
          `fleet-${mode.name}`,
          'vehicles per zone',
          Array.isArray(fleetValue) ? fleetValue[0] ?? 0 : fleetValue ?? 0,
          { min: this.ranges.fleetMin, step: 1, disabled: !canEdit(this.state.role, 'fleet', mode.name) },
        ),
      );

      const fare = draft.fare_overrides[mode.name] ?? mode.fare;
      const fareRow = this.root.createElement('div');
      fareRow.className = 'field';
      const kindSelect = this.root.createElement('select');
      kindSelect.id = `fare-kind-${mode.name}`;
      for (const kind of ['per_trip', 'per_mile']) {
        const opt = this.root.createElement('option');
        opt.value = kind;
        opt.textContent = kind === 'per_trip' ? 'USD/trip' : 'USD/mile';
        kindSelect.appendChild(opt);
      }
      kindSelect.value = fare.kind;
      const fareInput = this.root.createElement('input');
      fareInput.type = 'number';
      fareInput.id = `fare-${mode.name}`;
      fareInput.min = String(this.ranges.fareMin);
      fareInput.step = '0.05';
      fareInput.value = String(fare.amount);
      const editableFare = canEdit(this.state.role, 'fare', mode.name);
      fareInput.disabled = !editableFare;
      kindSelect.disabled = !editableFare;
      const markDirty = () => {
        fareInput.dataset.dirty = '1';
        this.refreshDraft();
      };
      fareInput.addEventListener('input', markDirty);
      kindSelect.addEventListener('change', markDirty);
      if (draft.fare_overrides[mode.name]) fareInput.dataset.dirty = '1';
      const fareLabel = this.root.createElement('label');
      fareLabel.htmlFor = fareInput.id;
      fareLabel.textContent = 'fare';
      fareRow.append(fareLabel, fareInput, kindSelect);
      section.appendChild(fareRow);

      if (mode.taxable) {
        section.appendChild(
          this.numberField(
            `tax-${mode.name}`,
            'revenue tax (0-1)',
            draft.tax_rates[mode.name] ?? 0,
            {
              min: this.ranges.taxMin,
              max: this.ranges.taxMax,
              step: 0.05,
              disabled: !canEdit(this.state.role, 'tax', mode.name),
            },
          ),
        );
      }
      form.appendChild(section);
    }
    this.renderProblems();
  }

  private numberField(
    id: string,
    label: string,
    value: number,
    opts: { min?: number; max?: number; step?: number; disabled?: boolean },
  ): HTMLElement {
    const row = this.root.createElement('div');
    row.className = 'field';
    const lab = this.root.createElement('label');
    lab.htmlFor = id;
    lab.textContent = label;
    const input = this.root.createElement('input');
    input.type = 'number';
    input.id = id;
    if (opts.min !== undefined) input.min = String(opts.min);
    if (opts.max !== undefined) input.max = String(opts.max);
    if (opts.step !== undefined) input.step = String(opts.step);
    input.value = String(value);
    input.disabled = opts.disabled ?? false;
    input.addEventListener('input', () => this.refreshDraft());
    row.append(lab, input);
    return row;
  }

  renderProblems(): void {
    const box = byId<HTMLElement>(this.root, 'error-box');
    box.replaceChildren();
    const messages = [...this.state.problems];
    if (this.state.apiError) messages.push(this.state.apiError);
    box.hidden = messages.length === 0;
    for (const message of messages) {
      const item = this.root.createElement('p');
      item.className = 'error';
      item.textContent = message;
      box.appendChild(item);
    }
    byId<HTMLButtonElement>(this.root, 'run-btn').disabled =
      this.state.inflight || this.state.problems.length > 0;
  }

  renderZoneTable(): void {
    const city = this.state.city;
    if (!city) return;
    const container = byId<HTMLElement>(this.root, 'zone-table');
    const table = this.root.createElement('table');
    const head = table.createTHead().insertRow();
    for (const name of ['id', 'zone', 'departures/h']) {
      const th = this.root.createElement('th');
      th.textContent = name;
      head.appendChild(th);
    }
    const latest = this.state.history[this.state.history.length - 1];
    const body = table.createTBody();
    city.zones.forEach((zone, i) => {
      const row = body.insertRow();
      row.insertCell().textContent = String(zone.id);
      row.insertCell().textContent = zone.name;
      row.insertCell().textContent = latest
        ? String(latest.kpis.zone_departures[i])
        : '—';
    });
    container.replaceChildren(table);
  }

  renderResults(): void {
    const city = this.state.city;
    if (!city) return;
    const latest = this.state.history[this.state.history.length - 1];
    const overview = byId<HTMLElement>(this.root, 'overview-panel');
    const modeNames = city.modes.map((m) => m.name);
    if (latest) {
      const zones: ZoneShares[] = city.zones.map((zone, i) => ({
        zone: zone.name,
        shares: latest.kpis.mode_share[i],
        riders: latest.kpis.riders[i],
        departures: latest.kpis.zone_departures[i],
      }));
      renderStackedBars(overview, zones, modeNames);
    } else {
      overview.replaceChildren();
      const hint = this.root.createElement('p');
      hint.className = 'hint';
      hint.textContent = 'Run the simulation to see per-zone mode shares.';
      overview.appendChild(hint);
    }

    const metrics = byId<HTMLElement>(this.root, 'metrics-panel');
    if (this.state.history.length > 0) {
      const hist = this.state.history;
      const series = [
        {
          name: 'avg travel time',
          unit: 'min',
          values: hist.map((r) => r.kpis.avg_travel_time_min),
        },
        { name: 'tax revenue', unit: 'USD', values: hist.map((r) => r.kpis.tax_revenue) },
        { name: 'CO2', unit: 'kg', values: hist.map((r) => r.kpis.co2_kg) },
        ...city.modes
          .filter((m) => m.name !== 'walking')
          .flatMap((m) => [
            {
              name: `${m.name} revenue`,
              unit: 'USD',
              values: hist.map((r) => r.kpis.revenue[m.name]),
            },
            {
              name: `${m.name} operating cost`,
              unit: 'USD',
              values: hist.map((r) => r.kpis.operating_cost[m.name]),
            },
          ]),
      ];
      renderLineCharts(metrics, series);
    } else {
      metrics.replaceChildren();
    }

    const iterations = this.state.history.map((r) => r.iteration);
    for (const id of ['diff-a', 'diff-b']) {
      const select = byId<HTMLSelectElement>(this.root, id);
      const previous = select.value;
      select.replaceChildren(
        ...iterations.map((i) => {
          const opt = this.root.createElement('option');
          opt.value = String(i);
          opt.textContent = `iteration ${i}`;
          return opt;
        }),
      );
      if (iterations.map(String).includes(previous)) select.value = previous;
      else if (iterations.length > 0) {
        select.value = String(id === 'diff-a' ? iterations[0] : iterations[iterations.length - 1]);
      }
    }
    this.renderZoneTable();
    this.renderDiff();
  }

  renderDiff(): void {
    const panel = byId<HTMLElement>(this.root, 'diff-panel');
    const delta = this.state.diff;
    const sel = this.state.diffSelection;
    if (!delta || !sel) {
      panel.replaceChildren();
      return;
    }
    const modeNames = this.state.city?.modes.map((m) => m.name) ?? [];
    const rows = [
      { metric: 'avg_travel_time_min', delta: delta.avg_travel_time_min },
      { metric: 'co2_kg', delta: delta.co2_kg },
      { metric: 'tax_revenue', delta: delta.tax_revenue },
      ...modeNames.map((m) => ({ metric: `revenue[${m}]`, delta: delta.revenue[m] })),
      ...modeNames.map((m) => ({
        metric: `operating_cost[${m}]`,
        delta: delta.operating_cost[m],
      })),
      ...delta.mode_share.flatMap((zone, i) =>
        modeNames
          .filter((m) => zone[m] !== 0)
          .map((m) => ({ metric: `mode_share[zone ${i}][${m}]`, delta: zone[m] })),
      ),
    ];
    renderDiffTable(panel, rows, `Iteration ${sel.b} vs ${sel.a}`);
  }
}
