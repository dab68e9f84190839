// Minimal PNG backend: rasterizes the frame and series polylines onto an
// RGBA buffer and encodes it with zlib. Text labels are SVG-only; PNG
// output carries the plot geometry.

import { deflateSync } from "node:zlib";

import { Figure } from "./figure.js";

const PALETTE: Array<[number, number, number]> = [
  [31, 119, 180], [214, 39, 40], [44, 160, 44], [148, 103, 189],
  [255, 127, 14], [140, 86, 75],
];
const W = 640;
const H = 440;
const M = { left: 70, right: 20, top: 36, bottom: 48 };

class Raster {
  data: Uint8Array;

  constructor(public w: number, public h: number) {
    this.data = new Uint8Array(w * h * 4).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]) {
    if (x < 0 || y < 0 || x >= this.w || y >= this.h) return;
    const o = (y * this.w + x) * 4;
    this.data[o] = rgb[0];
    this.data[o + 1] = rgb[1];
    this.data[o + 2] = rgb[2];
    this.data[o + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number]) {
    // Bresenham with a 2px brush
    let [xa, ya] = [Math.round(x0), Math.round(y0)];
    const [xb, yb] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, rgb);
      this.set(xa + 1, ya, rgb);
      this.set(xa, ya + 1, rgb);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }
}

const CRC_TABLE = (() => {
  const t = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    t[n] = c >>> 0;
  }
  return t;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const b of buf) c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const dv = new DataView(out.buffer);
  dv.setUint32(0, payload.length);
  out.set(Buffer.from(type, "ascii"), 4);
  out.set(payload, 8);
  dv.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

function encodePng(img: Raster): Buffer {
  const sig = Uint8Array.from([137, 80, 78, 71, 13, 10, 26, 10]);
  const ihdr = new Uint8Array(13);
  const dv = new DataView(ihdr.buffer);
  dv.setUint32(0, img.w);
  dv.setUint32(4, img.h);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const raw = new Uint8Array(img.h * (img.w * 4 + 1));
  for (let y = 0; y < img.h; y++) {
    raw[y * (img.w * 4 + 1)] = 0; // filter none
    raw.set(img.data.subarray(y * img.w * 4, (y + 1) * img.w * 4),
            y * (img.w * 4 + 1) + 1);
  }
  return Buffer.concat([
    sig,
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export function renderPng(fig: Figure): Buffer {
  const [x0, x1] = fig.xRange;
  let [y0, y1] = fig.yRange;
  if (y0 === y1) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const plotW = W - M.left - M.right;
  const plotH = H - M.top - M.bottom;
  const ty = (v: number) => (fig.logY ? Math.log10(v) : v);
  const sx = (v: number) => M.left + ((v - x0) / (x1 - x0 || 1)) * plotW;
  const sy = (v: number) =>
    M.top + plotH - ((ty(v) - ty(y0)) / (ty(y1) - ty(y0) || 1)) * plotH;

  const img = new Raster(W, H);
  const frame: [number, number, number] = [51, 51, 51];
  img.line(M.left, M.top, M.left + plotW, M.top, frame);
  img.line(M.left, M.top + plotH, M.left + plotW, M.top + plotH, frame);
  img.line(M.left, M.top, M.left, M.top + plotH, frame);
  img.line(M.left + plotW, M.top, M.left + plotW, M.top + plotH, frame);
  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    for (let k = 1; k < s.x.length; k++) {
      img.line(sx(s.x[k - 1]), sy(s.y[k - 1]), sx(s.x[k]), sy(s.y[k]), color);
    }
  });
  return encodePng(img);
}
