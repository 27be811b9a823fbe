/**
 * Stepping through a trace bundle, independent of any DOM.
 *
 * The player owns the position in the trace. A forward step hands out
 * the transition plan to play and the scene to land on; the landing
 * scene is always the stored document itself, so whatever a plan's last
 * keyframe interpolated to, the state finishes at its canonical
 * positions. A backward step hands out no plan and snaps.
 */

import type { BundleDoc, PlanDoc, SceneDoc } from "./bundle.js";

export interface StepResult {
  index: number;
  scene: SceneDoc;
  stateLabel: string;
  /** Plan to play before settling on the scene; null means snap. */
  plan: PlanDoc | null;
}

export class TracePlayer {
  private position = 0;

  constructor(private readonly bundle: BundleDoc) {}

  get index(): number {
    return this.position;
  }

  get length(): number {
    return this.bundle.scenes.length;
  }

  get scene(): SceneDoc {
    const scene = this.bundle.scenes[this.position];
    if (scene === undefined) {
      throw new Error(`no scene at index ${this.position}`);
    }
    return scene;
  }

  get stateLabel(): string {
    return this.bundle.states[this.position] ?? "";
  }

  get atStart(): boolean {
    return this.position === 0;
  }

  get atEnd(): boolean {
    return this.position === this.length - 1;
  }

  /** Move one state forward or back; null when already at the edge. */
  step(delta: 1 | -1): StepResult | null {
    const target = this.position + delta;
    if (target < 0 || target >= this.length) {
      return null;
    }
    const plan = delta === 1 ? this.bundle.plans[this.position] ?? null : null;
    this.position = target;
    return {
      index: target,
      scene: this.scene,
      stateLabel: this.stateLabel,
      plan,
    };
  }

  /** Jump to an absolute state without a plan. */
  seek(index: number): StepResult {
    if (!Number.isInteger(index) || index < 0 || index >= this.length) {
      throw new RangeError(`state index ${index} out of range 0..${this.length - 1}`);
    }
    this.position = index;
    return {
      index,
      scene: this.scene,
      stateLabel: this.stateLabel,
      plan: null,
    };
  }
}
