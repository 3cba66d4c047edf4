// Minimal line-plot math: series are mapped into an SVG path string by a
// shared pair of scales.  Rendering proper stays in main.ts; everything here
// is pure and unit-testable.

export interface Scales {
  x: (i: number) => number;
  y: (v: number) => number;
  yMin: number;
  yMax: number;
}

export interface PlotBox {
  width: number;
  height: number;
  pad: number;
}

export function makeScales(
  seriesList: number[][],
  box: PlotBox,
  xCount?: number,
  fixed?: { yMin?: number; yMax?: number },
): Scales {
  const finite = seriesList.flat().filter(Number.isFinite);
  let yMin = fixed?.yMin ?? Math.min(...(finite.length ? finite : [0]));
  let yMax = fixed?.yMax ?? Math.max(...(finite.length ? finite : [1]));
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const n = Math.max(2, xCount ?? Math.max(...seriesList.map((s) => s.length), 2));
  const usableW = box.width - 2 * box.pad;
  const usableH = box.height - 2 * box.pad;
  return {
    x: (i) => box.pad + (i / (n - 1)) * usableW,
    y: (v) => box.pad + (1 - (v - yMin) / (yMax - yMin)) * usableH,
    yMin,
    yMax,
  };
}

export function buildPath(values: number[], scales: Scales): string {
  const parts: string[] = [];
  values.forEach((v, i) => {
    if (!Number.isFinite(v)) return;
    const cmd = parts.length === 0 ? "M" : "L";
    parts.push(`${cmd}${scales.x(i).toFixed(2)},${scales.y(v).toFixed(2)}`);
  });
  return parts.join(" ");
}
