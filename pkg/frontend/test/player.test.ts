import { readFileSync } from "node:fs";

import { beforeEach, describe, expect, it } from "vitest";

import { canonicalJson, parseBundle, type BundleDoc } from "../src/bundle.js";
import { TracePlayer } from "../src/player.js";

const FIXTURE = new URL("./fixtures/rail.bundle.json", import.meta.url);

const text = readFileSync(FIXTURE, "utf-8");

let bundle: BundleDoc;
let player: TracePlayer;

beforeEach(() => {
  bundle = parseBundle(text);
  player = new TracePlayer(bundle);
});

/** Serialize a document the way the producer does, as raw bytes. */
function bytes(doc: unknown): Buffer {
  return Buffer.from(canonicalJson(doc), "utf-8");
}

describe("stepping", () => {
  it("starts on the first state", () => {
    expect(player.index).toBe(0);
    expect(player.stateLabel).toBe("State$0");
    expect(player.atStart).toBe(true);
    expect(player.atEnd).toBe(false);
  });

  it("lands byte-equal on the stored next scene", () => {
    const result = player.step(1);
    expect(result).not.toBeNull();
    // compare against an independent parse of the same bundle
    const fresh = parseBundle(text);
    expect(bytes(player.scene).equals(bytes(fresh.scenes[1]))).toBe(true);
    expect(result?.stateLabel).toBe("State$1");
  });

  it("hands out the forward transition plan", () => {
    const result = player.step(1);
    expect(result?.plan?.manager).toBe("Animation");
    expect(result?.plan?.keyframes).toHaveLength(31);
  });

  it("finishes its plan exactly where the scene is", () => {
    const result = player.step(1);
    const last = result?.plan?.keyframes.at(-1);
    expect(last).toBeDefined();
    for (const node of player.scene.nodes) {
      expect(last?.nodes[node.atom]?.x).toBe(node.x);
      expect(last?.nodes[node.atom]?.y).toBe(node.y);
    }
  });

  it("round-trips a step forward and back", () => {
    player.step(1);
    const back = player.step(-1);
    expect(back?.plan).toBeNull();
    const fresh = parseBundle(text);
    expect(bytes(player.scene).equals(bytes(fresh.scenes[0]))).toBe(true);
    expect(player.stateLabel).toBe("State$0");
  });

  it("clamps at both ends of the trace", () => {
    expect(player.step(-1)).toBeNull();
    expect(player.index).toBe(0);
    player.step(1);
    expect(player.atEnd).toBe(true);
    expect(player.step(1)).toBeNull();
    expect(player.index).toBe(1);
  });

  it("steps backward without a plan even mid-trace", () => {
    player.step(1);
    const back = player.step(-1);
    expect(back?.plan).toBeNull();
    expect(back?.index).toBe(0);
  });
});

describe("seeking", () => {
  it("jumps straight to a state", () => {
    const result = player.seek(1);
    expect(result.plan).toBeNull();
    expect(player.stateLabel).toBe("State$1");
    expect(player.atEnd).toBe(true);
  });

  it("rejects indices outside the trace", () => {
    expect(() => player.seek(2)).toThrow(RangeError);
    expect(() => player.seek(-1)).toThrow(RangeError);
    expect(() => player.seek(0.5)).toThrow(RangeError);
  });
});
