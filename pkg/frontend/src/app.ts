/** Control-panel application: jog pad, run wizard, progress monitor.
 *
 * Thin client: every displayed number comes straight from an API response.
 * The app object exposes its async actions so tests can drive it without
 * timers or a real browser.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderSweepChart } from "./chart.js";
import { Poller } from "./poller.js";
import type { RunState, ScanForm, SourceInfo } from "./types.js";
import { toRunView } from "./types.js";
import {
  validateRunId,
  validateScan,
  validateSourceConfig,
  totalPositions,
} from "./validate.js";

export interface AppOptions {
  pollIntervalMs?: number;
}

export class App {
  readonly poller: Poller;
  private sources: SourceInfo[] = [];
  private selectedRunId: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    options: AppOptions = {},
  ) {
    this.root.innerHTML = LAYOUT;
    this.poller = new Poller(
      () => this.refresh(),
      (stale) => this.renderStale(stale),
      { intervalMs: options.pollIntervalMs ?? 1000 },
    );
    this.wireJogPad();
    this.wireWizard();
  }

  element<T extends HTMLElement>(selector: string): T {
    const el = this.root.querySelector<T>(selector);
    if (!el) {
      throw new Error(`missing element ${selector}`);
    }
    return el;
  }

  async init(): Promise<void> {
    this.sources = await this.api.sources();
    this.renderSourceSelect();
    await this.refresh();
  }

  /** One polling cycle: status, run list, selected run detail + preview. */
  async refresh(): Promise<void> {
    const status = await this.api.status();
    this.renderPose(status.pose);
    this.renderJogEnabled(status.active_run_id === null);

    const runs = await this.api.runs();
    this.renderRunList(runs);
    if (this.selectedRunId === null && status.active_run_id !== null) {
      this.selectedRunId = status.active_run_id;
    }
    if (this.selectedRunId !== null) {
      const known = runs.find((r) => r.run_id === this.selectedRunId);
      if (known) {
        await this.renderDetail(known);
      }
    }
  }

  selectRun(runId: string): void {
    this.selectedRunId = runId;
  }

  get selected(): string | null {
    return this.selectedRunId;
  }

  // -- jog pad -------------------------------------------------------------

  private wireJogPad(): void {
    for (const button of this.root.querySelectorAll<HTMLButtonElement>("[data-jog]")) {
      button.addEventListener("click", () => {
        const [axis, delta] = button.dataset.jog!.split(":");
        void this.jog(axis as "theta" | "phi" | "rail", Number(delta));
      });
    }
    this.element("#btn-home").addEventListener("click", () => {
      void this.home();
    });
  }

  async jog(axis: "theta" | "phi" | "rail", delta: number): Promise<void> {
    try {
      this.renderPose(await this.api.jog(axis, delta));
      this.flash("");
    } catch (err) {
      this.flash(describe(err));
    }
  }

  async home(): Promise<void> {
    try {
      this.renderPose(await this.api.home());
    } catch (err) {
      this.flash(describe(err));
    }
  }

  private renderJogEnabled(enabled: boolean): void {
    for (const button of this.root.querySelectorAll<HTMLButtonElement>(
      "[data-jog], #btn-home",
    )) {
      button.disabled = !enabled;
    }
    this.element("#jog-note").textContent = enabled
      ? ""
      : "manual control disabled while a run is active";
  }

  private renderPose(pose: { theta: number; phi: number; rail_mm: number; moving: boolean }): void {
    this.element("#pose-theta").textContent = pose.theta.toFixed(2);
    this.element("#pose-phi").textContent = pose.phi.toFixed(2);
    this.element("#pose-rail").textContent = pose.rail_mm.toFixed(2);
    this.element("#pose-moving").textContent = pose.moving ? "moving" : "idle";
  }

  // -- run wizard ----------------------------------------------------------

  private wireWizard(): void {
    this.element("#w-source").addEventListener("change", () => this.renderSourceFields());
    this.element<HTMLFormElement>("#wizard").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitWizard();
    });
  }

  private renderSourceSelect(): void {
    const select = this.element<HTMLSelectElement>("#w-source");
    select.innerHTML = "";
    for (const source of this.sources) {
      const option = document.createElement("option");
      option.value = source.name;
      option.textContent = source.name;
      select.appendChild(option);
    }
    const uwb = this.sources.find((s) => s.name === "sim-uwb");
    if (uwb) {
      select.value = uwb.name;
    }
    this.renderSourceFields();
  }

  private renderSourceFields(): void {
    const select = this.element<HTMLSelectElement>("#w-source");
    const source = this.sources.find((s) => s.name === select.value);
    const container = this.element("#w-source-fields");
    container.innerHTML = "";
    if (!source) {
      return;
    }
    for (const field of source.fields) {
      const row = document.createElement("label");
      row.className = "field";
      const hint = field.required ? "" : ` (default ${field.default})`;
      row.innerHTML =
        `<span>${field.name}${hint}</span>` +
        `<input data-source-field="${field.name}" />` +
        `<em class="field-error" data-field="${field.name}"></em>`;
      container.appendChild(row);
    }
  }

  /** Validate the form; only a fully valid config produces requests. */
  async submitWizard(): Promise<string | null> {
    this.clearFieldErrors();
    const runId = this.element<HTMLInputElement>("#w-run-id").value.trim();
    const scan: ScanForm = {
      theta_step: this.numberField("#w-theta-step"),
      phi_step: this.numberField("#w-phi-step"),
      theta_extent: this.numberField("#w-theta-extent"),
      phi_extent: this.numberField("#w-phi-extent"),
      samples_per_position: this.numberField("#w-samples"),
    };
    const errors = validateScan(scan);
    const runIdError = validateRunId(runId);
    if (runIdError) {
      errors.run_id = runIdError;
    }
    const select = this.element<HTMLSelectElement>("#w-source");
    const source = this.sources.find((s) => s.name === select.value);
    const values: Record<string, string> = {};
    for (const input of this.root.querySelectorAll<HTMLInputElement>("[data-source-field]")) {
      values[input.dataset.sourceField!] = input.value;
    }
    const sourceCheck = validateSourceConfig(source?.fields ?? [], values);
    Object.assign(errors, sourceCheck.errors);

    if (Object.keys(errors).length > 0) {
      this.renderFieldErrors(errors);
      return null; // nothing was sent
    }

    const seedRaw = this.element<HTMLInputElement>("#w-seed").value.trim();
    try {
      await this.api.createRun({
        run_id: runId,
        scan,
        source_name: select.value,
        source_config: sourceCheck.config,
        seed: seedRaw === "" ? Math.floor(Math.random() * 2 ** 31) : Number(seedRaw),
      });
      await this.api.start(runId);
    } catch (err) {
      this.renderFieldErrors({ submit: describe(err) });
      return null;
    }
    this.selectedRunId = runId;
    await this.refresh();
    return runId;
  }

  private numberField(selector: string): number {
    return Number(this.element<HTMLInputElement>(selector).value);
  }

  private clearFieldErrors(): void {
    for (const el of this.root.querySelectorAll(".field-error")) {
      el.textContent = "";
    }
  }

  private renderFieldErrors(errors: Record<string, string>): void {
    for (const [field, message] of Object.entries(errors)) {
      const el = this.root.querySelector(`.field-error[data-field="${field}"]`);
      if (el) {
        el.textContent = message;
      }
    }
  }

  /** Planned position count shown live in the wizard; null hides it. */
  updatePlannedTotal(): number | null {
    const scan: ScanForm = {
      theta_step: this.numberField("#w-theta-step"),
      phi_step: this.numberField("#w-phi-step"),
      theta_extent: this.numberField("#w-theta-extent"),
      phi_extent: this.numberField("#w-phi-extent"),
      samples_per_position: this.numberField("#w-samples"),
    };
    const total = totalPositions(scan);
    this.element("#w-total").textContent = total === null ? "" : `${total} positions`;
    return total;
  }

  // -- run list + detail -----------------------------------------------------

  private renderRunList(runs: RunState[]): void {
    const tbody = this.element("#run-rows");
    tbody.innerHTML = "";
    for (const run of runs) {
      const view = toRunView(run);
      const row = document.createElement("tr");
      row.dataset.runId = run.run_id;
      if (run.run_id === this.selectedRunId) {
        row.className = "selected";
      }
      row.innerHTML =
        `<td>${run.run_id}</td><td class="phase-${run.phase}">${run.phase}</td>` +
        `<td>${run.completed_positions}/${run.total_positions}</td>` +
        `<td>${view.percent.toFixed(0)}%</td>`;
      row.addEventListener("click", () => {
        this.selectRun(run.run_id);
        void this.refresh();
      });
      tbody.appendChild(row);
    }
  }

  private async renderDetail(state: RunState): Promise<void> {
    const view = toRunView(state);
    this.element("#detail-id").textContent = state.run_id;
    this.element("#detail-phase").textContent = state.phase;
    this.element("#detail-phase").className = `phase-${state.phase}`;
    this.element("#detail-progress").textContent =
      `${state.completed_positions}/${state.total_positions}`;
    this.element("#detail-percent").textContent = `${view.percent.toFixed(1)}%`;
    this.element<HTMLElement>("#detail-bar").style.width = `${view.percent}%`;
    this.element("#detail-pose").textContent =
      `θ=${state.current_pose.theta.toFixed(2)}°, ` +
      `φ=${state.current_pose.phi.toFixed(2)}°`;
    this.element("#detail-error").textContent = state.last_error ?? "";

    const startButton = this.element<HTMLButtonElement>("#btn-start");
    startButton.disabled = !(state.phase === "created" || state.phase === "paused");
    startButton.textContent = state.phase === "paused" ? "Resume" : "Start";
    this.element<HTMLButtonElement>("#btn-pause").disabled = state.phase !== "running";
    this.element<HTMLButtonElement>("#btn-abort").disabled = !(
      state.phase === "running" || state.phase === "paused" || state.phase === "created"
    );

    const download = this.element<HTMLAnchorElement>("#download-link");
    const downloadable =
      state.phase === "completed" || state.phase === "aborted" || state.phase === "failed";
    download.href = downloadable ? this.api.archiveUrl(state.run_id) : "#";
    download.classList.toggle("hidden", !downloadable);

    if (state.completed_positions > 0) {
      const preview = await this.api.preview(state.run_id);
      const chart = this.element("#detail-chart");
      chart.innerHTML = "";
      chart.appendChild(renderSweepChart(preview.points, preview.phi));
    }
  }

  async startSelected(): Promise<void> {
    if (this.selectedRunId) {
      await this.api.start(this.selectedRunId);
      await this.refresh();
    }
  }

  async pauseSelected(): Promise<void> {
    if (this.selectedRunId) {
      await this.api.pause(this.selectedRunId);
      await this.refresh();
    }
  }

  async abortSelected(): Promise<void> {
    if (this.selectedRunId) {
      await this.api.abort(this.selectedRunId);
      await this.refresh();
    }
  }

  // -- misc ------------------------------------------------------------------

  private renderStale(stale: boolean): void {
    this.element("#stale-badge").classList.toggle("hidden", !stale);
  }

  private flash(message: string): void {
    this.element("#flash").textContent = message;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.kind}: ${err.message}`;
  }
  return String(err);
}

export function mountApp(root: HTMLElement, api: ApiClient, options?: AppOptions): App {
  const app = new App(root, api, options);
  app.element("#btn-start").addEventListener("click", () => void app.startSelected());
  app.element("#btn-pause").addEventListener("click", () => void app.pauseSelected());
  app.element("#btn-abort").addEventListener("click", () => void app.abortSelected());
  for (const selector of ["#w-theta-step", "#w-phi-step", "#w-theta-extent",
                          "#w-phi-extent", "#w-samples"]) {
    app.element(selector).addEventListener("input", () => app.updatePlannedTotal());
  }
  return app;
}

const LAYOUT = `
<header>
  <h1>scanrig control</h1>
  <span id="stale-badge" class="badge hidden">service unreachable — retrying</span>
</header>
<main>
  <section class="panel" id="panel-pose">
    <h2>Positioner</h2>
    <div class="pose-readout">
      <div>θ <strong id="pose-theta">–</strong>°</div>
      <div>φ <strong id="pose-phi">–</strong>°</div>
      <div>rail <strong id="pose-rail">–</strong> mm</div>
      <div id="pose-moving">idle</div>
    </div>
    <div class="jog-grid">
      <button data-jog="theta:-10">θ −10°</button>
      <button data-jog="theta:-1">θ −1°</button>
      <button data-jog="theta:1">θ +1°</button>
      <button data-jog="theta:10">θ +10°</button>
      <button data-jog="phi:-10">φ −10°</button>
      <button data-jog="phi:-1">φ −1°</button>
      <button data-jog="phi:1">φ +1°</button>
      <button data-jog="phi:10">φ +10°</button>
      <button data-jog="rail:-1">rail −1mm</button>
      <button data-jog="rail:1">rail +1mm</button>
      <button id="btn-home">home</button>
    </div>
    <p id="jog-note" class="note"></p>
    <p id="flash" class="note error"></p>
  </section>

  <section class="panel" id="panel-wizard">
    <h2>New run</h2>
    <form id="wizard">
      <label class="field"><span>run id</span>
        <input id="w-run-id" value="" />
        <em class="field-error" data-field="run_id"></em></label>
      <label class="field"><span>θ step (°)</span>
        <input id="w-theta-step" value="10" />
        <em class="field-error" data-field="theta_step"></em></label>
      <label class="field"><span>φ step (°)</span>
        <input id="w-phi-step" value="10" />
        <em class="field-error" data-field="phi_step"></em></label>
      <label class="field"><span>θ extent (°)</span>
        <input id="w-theta-extent" value="360" />
        <em class="field-error" data-field="theta_extent"></em></label>
      <label class="field"><span>φ extent (°)</span>
        <input id="w-phi-extent" value="180" />
        <em class="field-error" data-field="phi_extent"></em></label>
      <label class="field"><span>samples/position</span>
        <input id="w-samples" value="10" />
        <em class="field-error" data-field="samples_per_position"></em></label>
      <label class="field"><span>seed (blank = random)</span>
        <input id="w-seed" value="" /></label>
      <label class="field"><span>source</span>
        <select id="w-source"></select></label>
      <div id="w-source-fields"></div>
      <div class="wizard-footer">
        <span id="w-total" class="note"></span>
        <em class="field-error" data-field="submit"></em>
        <button type="submit" id="w-submit">create + start</button>
      </div>
    </form>
  </section>

  <section class="panel" id="panel-runs">
    <h2>Runs</h2>
    <table>
      <thead><tr><th>id</th><th>phase</th><th>progress</th><th>%</th></tr></thead>
      <tbody id="run-rows"></tbody>
    </table>
  </section>

  <section class="panel" id="panel-detail">
    <h2>Run <span id="detail-id">–</span></h2>
    <p>
      <span id="detail-phase">–</span>
      <span id="detail-progress">–</span>
      <span id="detail-percent"></span>
      <span id="detail-pose"></span>
    </p>
    <div class="bar"><div id="detail-bar"></div></div>
    <p id="detail-error" class="note error"></p>
    <p>
      <button id="btn-start">Start</button>
      <button id="btn-pause">Pause</button>
      <button id="btn-abort">Abort</button>
      <a id="download-link" class="hidden" href="#" download>download archive</a>
    </p>
    <div id="detail-chart"></div>
  </section>
</main>
`;
