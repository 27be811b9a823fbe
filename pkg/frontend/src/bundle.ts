/**
 * Trace bundle documents and their canonical serialization.
 *
 * A bundle is the single interface to the layout engine: everything the
 * viewer shows comes out of one JSON file. Coordinates, sizes, opacities
 * and times are fixed-point strings with two decimals; canonicalJson
 * reproduces the producer's byte format (sorted keys, no whitespace,
 * trailing newline) so a parse/serialize round trip is the identity.
 */

export const BUNDLE_VERSION = "1";

export interface CanvasDoc {
  x: string;
  y: string;
  width: string;
  height: string;
}

export interface SceneNodeDoc {
  atom: string;
  label: string;
  sig: string;
  x: string;
  y: string;
  width: string;
  height: string;
  shape: string;
  manager: string;
  background?: string;
  img?: string;
  marks?: string[];
}

export interface SceneEdgeDoc {
  field: string;
  src: string;
  dst: string;
  x1: string;
  y1: string;
  x2: string;
  y2: string;
}

export interface SceneDoc {
  canvas: CanvasDoc;
  nodes: SceneNodeDoc[];
  edges: SceneEdgeDoc[];
  stateLabel?: string;
}

export interface NodeStateDoc {
  x: string;
  y: string;
  width: string;
  height: string;
  opacity: string;
  shape: string;
  background?: string;
  img?: string;
}

export interface EdgeStateDoc {
  x1: string;
  y1: string;
  x2: string;
  y2: string;
  opacity: string;
}

export interface KeyframeDoc {
  tMs: string;
  nodes: Record<string, NodeStateDoc>;
  edges: Record<string, EdgeStateDoc>;
}

export interface PlanDoc {
  manager: string;
  durationMs: string;
  fps: string;
  keyframes: KeyframeDoc[];
}

export interface BundleDoc {
  version: string;
  states: string[];
  scenes: SceneDoc[];
  plans: PlanDoc[];
  assets: Record<string, string>;
  missingAssets: string[];
}

export class BundleFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BundleFormatError";
  }
}

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

export function parseBundle(text: string): BundleDoc {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (exc) {
    throw new BundleFormatError(`bundle is not valid JSON: ${(exc as Error).message}`);
  }
  if (!isObject(doc)) {
    throw new BundleFormatError("bundle root must be an object");
  }
  if (doc.version !== BUNDLE_VERSION) {
    throw new BundleFormatError(
      `unsupported bundle version ${JSON.stringify(doc.version)}, expected "${BUNDLE_VERSION}"`
    );
  }
  const scenes = doc.scenes;
  const plans = doc.plans;
  const states = doc.states;
  if (!Array.isArray(scenes) || !Array.isArray(plans) || !Array.isArray(states)) {
    throw new BundleFormatError("bundle needs states, scenes and plans arrays");
  }
  if (scenes.length === 0) {
    throw new BundleFormatError("bundle contains no scenes");
  }
  if (states.length !== scenes.length) {
    throw new BundleFormatError(
      `bundle has ${states.length} states for ${scenes.length} scenes`
    );
  }
  if (plans.length !== scenes.length - 1) {
    throw new BundleFormatError(
      `bundle has ${plans.length} plans for ${scenes.length} scenes`
    );
  }
  return doc as unknown as BundleDoc;
}

function writeCanonical(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(writeCanonical).join(",") + "]";
  }
  const entries = Object.keys(value as Record<string, unknown>).sort();
  const body = entries.map(
    (key) => JSON.stringify(key) + ":" + writeCanonical((value as Record<string, unknown>)[key])
  );
  return "{" + body.join(",") + "}";
}

export function canonicalJson(value: unknown): string {
  return writeCanonical(value) + "\n";
}
