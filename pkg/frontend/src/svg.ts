/**
 * Pure string SVG rendering for scene and keyframe documents.
 *
 * Keeping the renderer free of DOM calls makes it testable in node and
 * trivially usable in the browser via innerHTML. It mirrors the visual
 * language of the engine's own SVG export: edges under nodes, arrow
 * markers, images as data URIs, a placeholder for missing images.
 */

import type {
  CanvasDoc,
  KeyframeDoc,
  SceneDoc,
  SceneNodeDoc,
  NodeStateDoc,
} from "./bundle.js";

const IMAGE_MIME: Record<string, string> = {
  png: "image/png",
  jpg: "image/jpeg",
  jpeg: "image/jpeg",
  gif: "image/gif",
  svg: "image/svg+xml",
};

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function num(value: string): number {
  const parsed = Number.parseFloat(value);
  return Number.isFinite(parsed) ? parsed : 0;
}

function dataUri(name: string, base64: string): string {
  const ext = name.split(".").pop()?.toLowerCase() ?? "";
  const mime = IMAGE_MIME[ext] ?? "application/octet-stream";
  return `data:${mime};base64,${base64}`;
}

interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
  shape: string;
  background?: string;
  img?: string;
}

function shapeMarkup(box: Box, fill: string): string {
  const x0 = box.x - box.width / 2;
  const y0 = box.y - box.height / 2;
  const style = `fill="${esc(fill)}" stroke="#333333"`;
  if (box.shape === "ellipse") {
    return `<ellipse cx="${box.x}" cy="${box.y}" rx="${box.width / 2}" ry="${box.height / 2}" ${style}/>`;
  }
  if (box.shape === "triangle") {
    const points = `${box.x},${y0} ${x0 + box.width},${y0 + box.height} ${x0},${y0 + box.height}`;
    return `<polygon points="${points}" ${style}/>`;
  }
  if (box.shape === "parallelogram") {
    const slant = Math.min(box.width / 4, box.height);
    const points =
      `${x0 + slant},${y0} ${x0 + box.width},${y0} ` +
      `${x0 + box.width - slant},${y0 + box.height} ${x0},${y0 + box.height}`;
    return `<polygon points="${points}" ${style}/>`;
  }
  return `<rect x="${x0}" y="${y0}" width="${box.width}" height="${box.height}" rx="2" ${style}/>`;
}

function boxMarkup(box: Box, assets: Record<string, string>, out: string[]): void {
  if (box.img !== undefined) {
    const content = assets[box.img];
    if (content === undefined) {
      out.push(`<!-- missing image ${esc(box.img)} -->`);
      out.push(shapeMarkup(box, "#eeeeee"));
    } else {
      const x0 = box.x - box.width / 2;
      const y0 = box.y - box.height / 2;
      out.push(
        `<image x="${x0}" y="${y0}" width="${box.width}" height="${box.height}" ` +
          `href="${dataUri(box.img, content)}"/>`
      );
    }
  } else {
    out.push(shapeMarkup(box, box.background ?? "#dddddd"));
  }
}

function openSvg(canvas: CanvasDoc, out: string[]): void {
  const x = num(canvas.x);
  const y = num(canvas.y);
  const w = num(canvas.width);
  const h = num(canvas.height);
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" version="1.1" ` +
      `width="${w}" height="${h}" viewBox="${x} ${y} ${w} ${h}">`
  );
  out.push(
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" fill="#444444"/></marker></defs>'
  );
  out.push(`<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="#fcfcfc"/>`);
}

function nodeBox(node: SceneNodeDoc): Box {
  return {
    x: num(node.x),
    y: num(node.y),
    width: num(node.width),
    height: num(node.height),
    shape: node.shape,
    ...(node.background !== undefined ? { background: node.background } : {}),
    ...(node.img !== undefined ? { img: node.img } : {}),
  };
}

function caption(node: SceneNodeDoc): string {
  let text = node.label;
  if (node.marks !== undefined && node.marks.length > 0) {
    const shortened = node.marks.map((mark) => mark.split("/").pop() ?? mark);
    text += ` [${shortened.join(", ")}]`;
  }
  return text;
}

export function sceneToSvg(scene: SceneDoc, assets: Record<string, string> = {}): string {
  const out: string[] = [];
  openSvg(scene.canvas, out);
  if (scene.stateLabel !== undefined) {
    const x = num(scene.canvas.x) + 8;
    const y = num(scene.canvas.y) + 16;
    out.push(
      `<text x="${x}" y="${y}" font-family="sans-serif" font-size="12" ` +
        `fill="#666666">${esc(scene.stateLabel.replaceAll("$", ""))}</text>`
    );
  }
  for (const edge of scene.edges) {
    const x1 = num(edge.x1);
    const y1 = num(edge.y1);
    const x2 = num(edge.x2);
    const y2 = num(edge.y2);
    out.push(
      `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" ` +
        'stroke="#444444" stroke-width="1.2" marker-end="url(#arrow)"/>'
    );
    const label = edge.field.split("/").pop() ?? edge.field;
    out.push(
      `<text x="${(x1 + x2) / 2}" y="${(y1 + y2) / 2 - 3}" font-family="sans-serif" ` +
        `font-size="10" fill="#555555" text-anchor="middle">${esc(label)}</text>`
    );
  }
  for (const node of scene.nodes) {
    const box = nodeBox(node);
    boxMarkup(box, assets, out);
    out.push(
      `<text x="${box.x}" y="${box.y + box.height / 2 + 11}" font-family="sans-serif" ` +
        `font-size="10" fill="#333333" text-anchor="middle">${esc(caption(node))}</text>`
    );
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}

function frameNodeBox(state: NodeStateDoc): Box {
  return {
    x: num(state.x),
    y: num(state.y),
    width: num(state.width),
    height: num(state.height),
    shape: state.shape,
    ...(state.background !== undefined ? { background: state.background } : {}),
    ...(state.img !== undefined ? { img: state.img } : {}),
  };
}

export function frameToSvg(
  canvas: CanvasDoc,
  frame: KeyframeDoc,
  assets: Record<string, string> = {},
  labels: Record<string, string> = {}
): string {
  const out: string[] = [];
  openSvg(canvas, out);
  for (const key of Object.keys(frame.edges).sort()) {
    const state = frame.edges[key];
    if (state === undefined) continue;
    out.push(
      `<g opacity="${num(state.opacity)}">` +
        `<line x1="${num(state.x1)}" y1="${num(state.y1)}" x2="${num(state.x2)}" y2="${num(state.y2)}" ` +
        'stroke="#444444" stroke-width="1.2" marker-end="url(#arrow)"/></g>'
    );
  }
  for (const atom of Object.keys(frame.nodes).sort()) {
    const state = frame.nodes[atom];
    if (state === undefined) continue;
    const box = frameNodeBox(state);
    const inner: string[] = [];
    boxMarkup(box, assets, inner);
    const label = labels[atom] ?? atom.replaceAll("$", "");
    inner.push(
      `<text x="${box.x}" y="${box.y + box.height / 2 + 11}" font-family="sans-serif" ` +
        `font-size="10" fill="#333333" text-anchor="middle">${esc(label)}</text>`
    );
    out.push(`<g opacity="${num(state.opacity)}">` + inner.join("") + "</g>");
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}
