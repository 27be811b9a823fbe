/**
 * Browser shell: wires a bundle file into the player and the renderer.
 *
 * Forward steps play their transition plan keyframe by keyframe on the
 * animation frame clock, then settle on the stored scene, so the screen
 * always ends at the state's canonical positions. Backward steps snap.
 */

import { BundleFormatError, parseBundle, type BundleDoc, type PlanDoc, type SceneDoc } from "./bundle.js";
import { TracePlayer } from "./player.js";
import { frameToSvg, sceneToSvg } from "./svg.js";

export class Viewer {
  private player: TracePlayer | null = null;
  private bundle: BundleDoc | null = null;
  private labels: Record<string, string> = {};
  private playing = false;
  private animationToken = 0;

  private readonly stage: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly status: HTMLElement;
  private readonly prevButton: HTMLButtonElement;
  private readonly nextButton: HTMLButtonElement;
  private readonly playButton: HTMLButtonElement;

  constructor(private readonly root: HTMLElement) {
    root.innerHTML = `
      <div style="font-family: sans-serif; max-width: 1100px; margin: 0 auto;">
        <div style="display: flex; gap: 8px; align-items: center; padding: 8px 0;">
          <input type="file" accept=".json,application/json" data-role="file">
          <button data-role="prev" disabled>&#8592; Prev</button>
          <button data-role="next" disabled>Next &#8594;</button>
          <button data-role="play" disabled>Play</button>
          <span data-role="status" style="margin-left: 8px; color: #444;"></span>
        </div>
        <div data-role="banner" style="display: none; background: #fdd; color: #900;
             border: 1px solid #c99; padding: 6px 10px; margin-bottom: 8px;"></div>
        <div data-role="stage" style="border: 1px solid #ccc;"></div>
      </div>`;
    this.stage = this.query("stage");
    this.banner = this.query("banner");
    this.status = this.query("status");
    this.prevButton = this.query("prev") as HTMLButtonElement;
    this.nextButton = this.query("next") as HTMLButtonElement;
    this.playButton = this.query("play") as HTMLButtonElement;

    const file = this.query("file") as HTMLInputElement;
    file.addEventListener("change", () => {
      const chosen = file.files?.[0];
      if (chosen !== undefined) {
        void chosen.text().then((text) => this.loadText(text));
      }
    });
    this.prevButton.addEventListener("click", () => void this.stepBack());
    this.nextButton.addEventListener("click", () => void this.stepForward());
    this.playButton.addEventListener("click", () => void this.togglePlay());
  }

  private query(role: string): HTMLElement {
    const found = this.root.querySelector(`[data-role="${role}"]`);
    if (found === null) {
      throw new Error(`viewer markup is missing ${role}`);
    }
    return found as HTMLElement;
  }

  loadText(text: string): void {
    this.playing = false;
    this.animationToken += 1;
    try {
      this.bundle = parseBundle(text);
    } catch (exc) {
      this.bundle = null;
      this.player = null;
      this.showError(
        exc instanceof BundleFormatError ? exc.message : `could not load bundle: ${String(exc)}`
      );
      this.refreshControls();
      return;
    }
    this.hideError();
    this.player = new TracePlayer(this.bundle);
    this.labels = {};
    for (const scene of this.bundle.scenes) {
      for (const node of scene.nodes) {
        this.labels[node.atom] = node.label;
      }
    }
    this.renderScene(this.player.scene);
    this.refreshControls();
  }

  private showError(message: string): void {
    this.banner.textContent = message;
    this.banner.style.display = "block";
    this.stage.innerHTML = "";
    this.status.textContent = "";
  }

  private hideError(): void {
    this.banner.style.display = "none";
    this.banner.textContent = "";
  }

  private renderScene(scene: SceneDoc): void {
    this.stage.innerHTML = sceneToSvg(scene, this.bundle?.assets ?? {});
  }

  private refreshControls(): void {
    const player = this.player;
    if (player === null) {
      this.prevButton.disabled = true;
      this.nextButton.disabled = true;
      this.playButton.disabled = true;
      return;
    }
    this.prevButton.disabled = player.atStart;
    this.nextButton.disabled = player.atEnd;
    this.playButton.disabled = player.atEnd && !this.playing;
    this.playButton.textContent = this.playing ? "Pause" : "Play";
    const position = `${player.index + 1}/${player.length}`;
    const label = player.stateLabel.replaceAll("$", "");
    this.status.textContent = player.atEnd
      ? `${label} (${position}, end of trace)`
      : `${label} (${position})`;
  }

  private async stepForward(): Promise<void> {
    const player = this.player;
    if (player === null) return;
    const result = player.step(1);
    if (result === null) return;
    if (result.plan !== null) {
      await this.playPlan(result.plan, result.scene);
    } else {
      this.renderScene(result.scene);
    }
    this.refreshControls();
  }

  private stepBack(): Promise<void> {
    const player = this.player;
    if (player !== null) {
      const result = player.step(-1);
      if (result !== null) {
        this.renderScene(result.scene);
        this.refreshControls();
      }
    }
    return Promise.resolve();
  }

  private async togglePlay(): Promise<void> {
    if (this.playing) {
      this.playing = false;
      this.refreshControls();
      return;
    }
    this.playing = true;
    this.refreshControls();
    const player = this.player;
    while (this.playing && player !== null && !player.atEnd) {
      await this.stepForward();
    }
    this.playing = false;
    this.refreshControls();
  }

  /** Render the plan's keyframes on the frame clock, then the scene. */
  private playPlan(plan: PlanDoc, landing: SceneDoc): Promise<void> {
    const token = ++this.animationToken;
    const duration = Number.parseFloat(plan.durationMs);
    const frames = plan.keyframes;
    if (frames.length === 0 || !(duration > 0)) {
      this.renderScene(landing);
      return Promise.resolve();
    }
    const assets = this.bundle?.assets ?? {};
    const canvas = landing.canvas;
    return new Promise((resolve) => {
      const started = performance.now();
      const tick = () => {
        if (token !== this.animationToken) {
          resolve();
          return;
        }
        const elapsed = performance.now() - started;
        let current = frames[0];
        for (const frame of frames) {
          if (Number.parseFloat(frame.tMs) <= elapsed) {
            current = frame;
          }
        }
        if (current !== undefined) {
          this.stage.innerHTML = frameToSvg(canvas, current, assets, this.labels);
        }
        if (elapsed >= duration) {
          this.renderScene(landing);
          resolve();
          return;
        }
        requestAnimationFrame(tick);
      };
      requestAnimationFrame(tick);
    });
  }
}

export function mountViewer(root: HTMLElement): Viewer {
  return new Viewer(root);
}
