// DOM wiring for the decision console.  One session per tab; the server is
// the source of truth and the view only moves on its responses.

import { ServerRejection, createSession, getBaselines, getState, submitDecision } from "./api";
import { buildPath, makeScales } from "./plot";
import { markerForDelta, projectSegment } from "./segment";
import {
  SessionView,
  applyBaselines,
  applyRejection,
  applyServerState,
  clampDelta,
  initialView,
  sliderRange,
} from "./state";

const SVG_NS = "http://www.w3.org/2000/svg";
const base = location.origin.startsWith("http") ? location.origin : "http://127.0.0.1:8000";

let view: SessionView = initialView;
let projectionAxes: [number, number] = [0, 1];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function svgChild(parent: SVGElement, tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  parent.appendChild(node);
  return node;
}

function renderStatus() {
  el("step").textContent = String(view.step);
  el("status").textContent = view.status;
  el("y-now").textContent = view.y === null ? "-" : view.y.toFixed(6);
  const fLast = view.fHistory[view.fHistory.length - 1];
  el("f-now").textContent = fLast === undefined ? "-" : fLast.toFixed(4);
  const banner = el("error");
  if (view.error) {
    let detail = view.error;
    if (view.rejectedSet && view.rejectedSet.kind === "segment") {
      detail += `  (segment: center ${view.rejectedSet.center.map((x) => x.toFixed(3)).join(", ")}; gamma ${view.rejectedSet.gamma.toFixed(5)})`;
    }
    banner.textContent = detail;
    banner.hidden = false;
  } else {
    banner.hidden = true;
  }
  const notice = el("baseline-notice");
  notice.textContent = view.baselineWarning ?? "";
  notice.hidden = view.baselineWarning === null;
}

function renderSlider() {
  const slider = el<HTMLInputElement>("delta-slider");
  const range = sliderRange(view.segment);
  slider.disabled = range.disabled || view.status !== "awaiting_decision";
  slider.min = String(range.min);
  slider.max = String(range.max);
  slider.step = range.disabled ? "1" : String((range.max - range.min) / 200);
  slider.value = String(view.sliderDelta);
  el("delta-value").textContent = range.disabled
    ? "point set: no freedom"
    : view.sliderDelta.toExponential(4);
  el<HTMLButtonElement>("submit").disabled = view.status !== "awaiting_decision";
}

function renderSegment() {
  const svg = el<HTMLElement>("segment-plot") as unknown as SVGElement;
  svg.replaceChildren();
  if (!view.segment) return;
  const viewport = { width: 360, height: 220, pad: 30 };
  const proj = projectSegment(view.segment, projectionAxes, viewport);
  if (proj.degenerate) {
    svgChild(svg, "circle", {
      cx: String(proj.center.x),
      cy: String(proj.center.y),
      r: "5",
      fill: "#245",
    });
    return;
  }
  svgChild(svg, "line", {
    x1: String(proj.lo.x),
    y1: String(proj.lo.y),
    x2: String(proj.hi.x),
    y2: String(proj.hi.y),
    stroke: "#245",
    "stroke-width": "3",
  });
  for (const p of [proj.lo, proj.hi]) {
    svgChild(svg, "circle", { cx: String(p.x), cy: String(p.y), r: "4", fill: "#245" });
  }
  svgChild(svg, "circle", {
    cx: String(proj.center.x),
    cy: String(proj.center.y),
    r: "5",
    fill: "#f80",
  });
  const marker = markerForDelta(proj, view.sliderDelta, view.segment.gamma);
  svgChild(svg, "circle", {
    cx: String(marker.x),
    cy: String(marker.y),
    r: "6",
    fill: "none",
    stroke: "#d22",
    "stroke-width": "2",
  });
  el("axes-label").textContent = `coordinates u${projectionAxes[0] + 1} / u${projectionAxes[1] + 1}`;
}

function renderOutputPlot() {
  const svg = el<HTMLElement>("y-plot") as unknown as SVGElement;
  svg.replaceChildren();
  const box = { width: 460, height: 180, pad: 24 };
  const band = view.deltaRho;
  const scales = makeScales([view.yHistory, [-band * 1.5, band * 1.5]], box);
  // budget band
  svgChild(svg, "rect", {
    x: String(box.pad),
    y: String(scales.y(band)),
    width: String(box.width - 2 * box.pad),
    height: String(Math.abs(scales.y(-band) - scales.y(band))),
    fill: "#9ec5e6",
    opacity: "0.35",
  });
  svgChild(svg, "path", {
    d: buildPath(view.yHistory, scales),
    fill: "none",
    stroke: "#123",
    "stroke-width": "1.5",
  });
}

function renderCostPlot() {
  const svg = el<HTMLElement>("f-plot") as unknown as SVGElement;
  svg.replaceChildren();
  const box = { width: 460, height: 180, pad: 24 };
  const overlays: { label: string; key: string; color: string; dash: string }[] = [
    { label: "strong control", key: "2", color: "#333", dash: "6,3" },
    { label: "fixed set", key: "3", color: "#c22", dash: "2,3" },
    { label: "learned set", key: "4", color: "#16c", dash: "" },
  ];
  const seriesList = [view.fHistory];
  if (view.baselines) {
    for (const o of overlays) {
      const f = view.baselines.cases[o.key]?.f ?? [];
      seriesList.push(f.slice(0, Math.max(view.fHistory.length, 120)));
    }
  }
  const scales = makeScales(seriesList, box, Math.max(view.fHistory.length, 120));
  if (view.baselines) {
    for (const o of overlays) {
      const f = view.baselines.cases[o.key]?.f ?? [];
      svgChild(svg, "path", {
        d: buildPath(f.slice(0, Math.max(view.fHistory.length, 120)), scales),
        fill: "none",
        stroke: o.color,
        "stroke-dasharray": o.dash,
        "stroke-width": "1",
      });
    }
  }
  svgChild(svg, "path", {
    d: buildPath(view.fHistory, scales),
    fill: "none",
    stroke: "#070",
    "stroke-width": "2",
  });
}

function render() {
  renderStatus();
  renderSlider();
  renderSegment();
  renderOutputPlot();
  renderCostPlot();
}

async function submit() {
  if (!view.sessionId || !view.segment) return;
  const delta = clampDelta(view.sliderDelta, view.segment.gamma);
  try {
    const state = await submitDecision(base, view.sessionId, { t: view.step, delta });
    view = applyServerState(view, state);
  } catch (err) {
    if (err instanceof ServerRejection) {
      view = applyRejection(view, err.message, err.set);
    } else {
      view = applyRejection(view, String(err), null);
    }
  }
  render();
}

async function loadBaselines() {
  if (!view.sessionId) return;
  try {
    const payload = await getBaselines(base, view.sessionId);
    view = applyBaselines(view, payload);
  } catch (err) {
    view = applyBaselines(view, null, `overlay hidden: ${String(err)}`);
  }
  render();
}

async function boot() {
  const resumeId = location.hash.replace(/^#/, "");
  try {
    const state = resumeId
      ? await getState(base, resumeId)
      : await createSession(base, {});
    location.hash = state.id;
    view = applyServerState(view, state);
  } catch (err) {
    view = applyRejection(view, `cannot reach session service: ${String(err)}`, null);
  }
  render();

  el<HTMLInputElement>("delta-slider").addEventListener("input", (ev) => {
    const raw = Number((ev.target as HTMLInputElement).value);
    view = { ...view, sliderDelta: view.segment ? clampDelta(raw, view.segment.gamma) : 0 };
    render();
  });
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  el<HTMLButtonElement>("nominal").addEventListener("click", () => {
    view = { ...view, sliderDelta: 0 };
    render();
    void submit();
  });
  el<HTMLButtonElement>("show-baselines").addEventListener("click", () => void loadBaselines());
  el<HTMLSelectElement>("axes-select").addEventListener("change", (ev) => {
    const pair = (ev.target as HTMLSelectElement).value.split(",").map(Number);
    projectionAxes = [pair[0] ?? 0, pair[1] ?? 1];
    render();
  });
}

window.addEventListener("load", () => void boot());
