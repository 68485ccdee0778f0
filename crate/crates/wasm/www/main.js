import init, { phase_grid, loss_curve, husimi_pair } from "./pkg/fockloss_wasm.js";

const $ = (id) => document.getElementById(id);

function status(id, text, ok = true) {
  const el = $(id);
  el.textContent = text;
  el.classList.toggle("fail", !ok);
}

// Diverging map: blue for negative, white at 0, red for positive.
function colour(v, scale) {
  const x = Math.max(-1, Math.min(1, v / scale));
  const a = Math.round(255 * (1 - Math.abs(x)));
  return x >= 0 ? [255, a, a] : [a, a, 255];
}

function drawGrid() {
  $("g-t-val").textContent = Number($("g-t").value).toFixed(2);
  let g;
  try {
    g = phase_grid($("g-state").value, Number($("g-t").value), Number($("g-s").value), Number($("g-points").value));
  } catch (e) {
    status("g-status", String(e), false);
    return;
  }
  const n = g.points, vals = g.values, canvas = $("g-canvas"), ctx = canvas.getContext("2d");
  const scale = Math.max(Math.abs(g.min), Math.abs(g.max)) || 1;
  const img = ctx.createImageData(n, n);
  // values are row-major in (x, y); draw y upwards
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const [r, gr, b] = colour(vals[i * n + j], scale);
      const k = 4 * ((n - 1 - j) * n + i);
      img.data.set([r, gr, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  status("g-status",
    `half width ${g.half_width.toFixed(2)}  min ${g.min.toExponential(3)}  max ${g.max.toExponential(3)}  sum ${g.normalization.toFixed(6)}`,
    g.min >= -1e-9 || Number($("g-s").value) > -1);
  g.free();
}

function plot(canvas, xs, series, yRange) {
  const ctx = canvas.getContext("2d"), w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => Array.from(s.ys).filter(Number.isFinite));
  let [lo, hi] = yRange ?? [Math.min(...finite), Math.max(...finite)];
  if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + (w - 2 * pad) * (x - x0) / (x1 - x0);
  const py = (y) => h - pad - (h - 2 * pad) * (y - lo) / (hi - lo);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  if (lo < 0 && hi > 0) {
    ctx.beginPath(); ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0)); ctx.stroke();
  }
  ctx.fillStyle = "#000";
  ctx.fillText(hi.toPrecision(3), 2, pad);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);
  ctx.fillText(String(x0), pad, h - 10);
  ctx.fillText(x1.toFixed(2), w - pad - 20, h - 10);
  series.forEach((s, k) => {
    ctx.strokeStyle = s.colour;
    ctx.beginPath();
    let started = false;
    xs.forEach((x, i) => {
      const y = s.ys[i];
      if (!Number.isFinite(y)) { started = false; return; }
      if (started) ctx.lineTo(px(x), py(y)); else ctx.moveTo(px(x), py(y));
      started = true;
    });
    ctx.stroke();
    ctx.fillStyle = s.colour;
    ctx.fillText(s.label, w - pad - 120, pad + 14 * (k + 1));
  });
}

function drawCurve() {
  let c;
  try {
    c = loss_curve($("c-state").value, 201);
  } catch (e) {
    status("c-status", String(e), false);
    return;
  }
  const t = c.t, p = c.purity, c2 = c.c_squared;
  plot($("c-canvas"), t, [
    { ys: p, colour: "#c00", label: "purity Tr rho_T^2" },
    { ys: c2, colour: "#06c", label: "C^2(rho_T)" },
  ]);
  let pMin = Infinity, tMin = 0;
  p.forEach((v, i) => { if (v < pMin) { pMin = v; tMin = t[i]; } });
  status("c-status", `purity minimum ${pMin.toFixed(6)} at T = ${tMin.toFixed(3)}  C^2 at T=1: ${c2[c2.length - 1].toFixed(6)}`);
  c.free();
}

function drawPair() {
  let s;
  try {
    s = husimi_pair(Number($("h-v1").value), Number($("h-v2").value), 25, 121);
  } catch (e) {
    status("h-status", String(e), false);
    return;
  }
  plot($("h-canvas"), s.t, [
    { ys: s.integral, colour: "#c00", label: "numerical integral" },
    { ys: s.exact, colour: "#06c", label: "closed form" },
  ]);
  const maxErr = Math.max(...s.integral.map((v, i) => Math.abs(v - s.exact[i])));
  status("h-status",
    `${s.all_nonpositive ? "PASS: integral <= 0 at every T" : "FAIL: integral > 0 somewhere"}  max |num - exact| ${maxErr.toExponential(2)}`,
    s.all_nonpositive);
  s.free();
}

await init();
["g-state", "g-t", "g-s", "g-points"].forEach((id) => $(id).addEventListener("input", drawGrid));
$("c-run").addEventListener("click", drawCurve);
$("h-run").addEventListener("click", drawPair);
drawGrid();
drawCurve();
drawPair();
