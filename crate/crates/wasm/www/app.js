// Static driver for the three wasm operations. No framework, no state
// beyond the form fields; every plot is a pure function of its inputs.

import init, {
  simulate_paths_json,
  limit_study_json,
  stable_curve_json,
} from "../pkg/rcar_wasm.js";

const PALETTE = [
  "#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed",
  "#0891b2", "#be185d", "#4d7c0f", "#b45309", "#1d4ed8",
];

// --- tiny canvas plotting kit -------------------------------------------

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return {
    ctx,
    left: 70,
    right: canvas.width - 20,
    top: 20,
    bottom: canvas.height - 48,
  };
}

function scales(fr, xMin, xMax, yMin, yMax) {
  if (yMin === yMax) { yMin -= 1; yMax += 1; }
  const sx = (x) => fr.left + ((x - xMin) / (xMax - xMin)) * (fr.right - fr.left);
  const sy = (y) => fr.bottom - ((y - yMin) / (yMax - yMin)) * (fr.bottom - fr.top);
  return { sx, sy, xMin, xMax, yMin, yMax };
}

function axes(fr, sc) {
  const { ctx } = fr;
  ctx.strokeStyle = "#d6dbe4";
  ctx.fillStyle = "#49536a";
  ctx.lineWidth = 1;
  ctx.font = "20px system-ui";
  const xTicks = 8, yTicks = 5;
  for (let i = 0; i <= xTicks; i++) {
    const x = sc.xMin + ((sc.xMax - sc.xMin) * i) / xTicks;
    const px = sc.sx(x);
    ctx.beginPath(); ctx.moveTo(px, fr.top); ctx.lineTo(px, fr.bottom); ctx.stroke();
    ctx.textAlign = "center";
    ctx.fillText(fmtTick(x), px, fr.bottom + 28);
  }
  for (let i = 0; i <= yTicks; i++) {
    const y = sc.yMin + ((sc.yMax - sc.yMin) * i) / yTicks;
    const py = sc.sy(y);
    ctx.beginPath(); ctx.moveTo(fr.left, py); ctx.lineTo(fr.right, py); ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(fmtTick(y), fr.left - 8, py + 6);
  }
  ctx.strokeStyle = "#9aa3b2";
  ctx.strokeRect(fr.left, fr.top, fr.right - fr.left, fr.bottom - fr.top);
}

function fmtTick(v) {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e5 || a < 1e-3)) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function polyline(fr, sc, xs, ys, color, width = 2.5) {
  const { ctx } = fr;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(ys[i])) { pen = false; continue; }
    const px = sc.sx(xs[i]), py = sc.sy(ys[i]);
    if (pen) ctx.lineTo(px, py); else { ctx.moveTo(px, py); pen = true; }
  }
  ctx.stroke();
}

function bars(fr, sc, bins, color) {
  const { ctx } = fr;
  ctx.fillStyle = color;
  for (const b of bins) {
    const x0 = sc.sx(b.lo), x1 = sc.sx(b.hi), y = sc.sy(b.density);
    ctx.fillRect(x0, y, Math.max(x1 - x0 - 1, 1), fr.bottom - y);
  }
}

function quantile(sorted, q) {
  const i = Math.min(sorted.length - 1, Math.max(0, Math.floor(q * sorted.length)));
  return sorted[i];
}

function note(id, text, isError = false) {
  const el = document.getElementById(id);
  el.textContent = text;
  el.classList.toggle("error", isError);
}

function fields(form) {
  const data = {};
  for (const el of form.elements) if (el.name) data[el.name] = el.value;
  return data;
}

// --- panels ---------------------------------------------------------------

function drawPaths() {
  const f = fields(document.getElementById("paths-form"));
  const out = JSON.parse(simulate_paths_json(
    Number(f.a), f.innov, Number(f.steps), Number(f.paths), BigInt(f.seed)));
  const canvas = document.getElementById("paths-canvas");
  const fr = frame(canvas);

  // clip the y-range to the pooled central 98% so one wild path
  // cannot flatten the rest
  const pooled = out.paths.flatMap((p) => p.normalized).sort((a, b) => a - b);
  const yLo = Math.min(quantile(pooled, 0.01), 0);
  const yHi = Math.max(quantile(pooled, 0.99), 1);
  const sc = scales(fr, 1, out.steps, yLo, yHi);
  axes(fr, sc);

  const ks = Array.from({ length: out.steps }, (_, i) => i + 1);
  out.paths.forEach((p, i) =>
    polyline(fr, sc, ks, p.normalized, PALETTE[i % PALETTE.length], 1.8));

  note("paths-note",
    `${out.paths.length} paths, a=${out.a}, ${out.innov}; y-axis clipped to the pooled 1–99% range.`);
}

function drawLimit() {
  const f = fields(document.getElementById("limit-form"));
  const out = JSON.parse(limit_study_json(
    Number(f.a), f.innov, Number(f.k), Number(f.draws), BigInt(f.seed), 160));
  const canvas = document.getElementById("limit-canvas");
  const fr = frame(canvas);

  const xMin = out.bins[0].lo, xMax = out.bins[out.bins.length - 1].hi;
  const yMax = Math.max(
    ...out.bins.map((b) => b.density),
    ...out.curve.map((p) => p.pdf),
  );
  const sc = scales(fr, xMin, xMax, 0, yMax * 1.05);
  axes(fr, sc);
  bars(fr, sc, out.bins, "rgba(37, 99, 235, 0.35)");
  if (out.curve.length) {
    polyline(fr, sc, out.curve.map((p) => p.x), out.curve.map((p) => p.pdf), "#dc2626");
  }

  if (out.prediction) {
    const p = out.prediction;
    note("limit-note",
      `predicted S(α=${p.alpha.toFixed(4)}, β=${p.beta}, σ=${p.sigma.toFixed(4)}, ` +
      `μ=${p.mu}) drawn in red; ${out.clipped} extreme draws outside the plotted range.`);
  } else {
    note("limit-note",
      `no stable prediction: ${out.prediction_note} — showing the histogram alone ` +
      `(${out.clipped} extreme draws clipped).`);
  }
}

function drawStable() {
  const f = fields(document.getElementById("stable-form"));
  const out = JSON.parse(stable_curve_json(
    Number(f.alpha), Number(f.beta), Number(f.sigma), Number(f.mu),
    Number(f.from), Number(f.to), 401));
  const canvas = document.getElementById("stable-canvas");
  const fr = frame(canvas);

  const pdfMax = Math.max(...out.pdf);
  const sc = scales(fr, out.x[0], out.x[out.x.length - 1], 0, Math.max(pdfMax, 1) * 1.05);
  axes(fr, sc);
  polyline(fr, sc, out.x, out.pdf, "#dc2626");
  polyline(fr, sc, out.x, out.cdf, "#2563eb");
  note("stable-note", "red: density (pdf); blue: distribution function (cdf).");
}

// --- wiring ---------------------------------------------------------------

function bind(formId, noteId, handler) {
  document.getElementById(formId).addEventListener("submit", (ev) => {
    ev.preventDefault();
    try {
      handler();
    } catch (e) {
      note(noteId, String(e), true);
    }
  });
}

await init();
bind("paths-form", "paths-note", drawPaths);
bind("limit-form", "limit-note", drawLimit);
bind("stable-form", "stable-note", drawStable);
drawPaths();
drawLimit();
drawStable();
