import init, { entropyCurve, frontierCurve, entangledMap } from "./pkg/sepfront_web.js";

const num = (id) => Number(document.getElementById(id).value);

function axes(ctx, w, h, pad, xr, yr, xlabel, ylabel, logX) {
  const sx = (v) => {
    const f = logX ? (Math.log(v) - Math.log(xr[0])) / (Math.log(xr[1]) - Math.log(xr[0])) : (v - xr[0]) / (xr[1] - xr[0]);
    return pad + f * (w - 2 * pad);
  };
  const sy = (v) => h - pad - ((v - yr[0]) / (yr[1] - yr[0])) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#333";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(xlabel, w / 2 - 10, h - 8);
  ctx.fillText(ylabel, 4, pad - 8);
  ctx.fillText(xr[0].toPrecision(2), pad, h - pad + 12);
  ctx.fillText(xr[1].toPrecision(3), w - pad - 20, h - pad + 12);
  ctx.fillText(yr[0].toPrecision(3), 2, h - pad);
  ctx.fillText(yr[1].toPrecision(3), 2, pad + 8);
  if (yr[0] < 0 && yr[1] > 0) {
    ctx.strokeStyle = "#aaa";
    ctx.beginPath();
    ctx.moveTo(pad, sy(0));
    ctx.lineTo(w - pad, sy(0));
    ctx.stroke();
  }
  return { sx, sy };
}

function polyline(ctx, pts, sx, sy, colour) {
  ctx.strokeStyle = colour;
  ctx.lineWidth = 2;
  ctx.beginPath();
  let pen = false;
  for (const [a, b] of pts) {
    if (!Number.isFinite(b)) { pen = false; continue; }
    if (pen) ctx.lineTo(sx(a), sy(b)); else ctx.moveTo(sx(a), sy(b));
    pen = true;
  }
  ctx.stroke();
  ctx.lineWidth = 1;
}

function pairs(flat) {
  const out = [];
  for (let i = 0; i < flat.length; i += 2) out.push([flat[i], flat[i + 1]]);
  return out;
}

function guarded(statusId, fn) {
  const status = document.getElementById(statusId);
  return () => {
    status.textContent = "";
    try { fn(); } catch (e) { status.textContent = String(e.message ?? e); }
  };
}

function drawCurve() {
  const pts = pairs(entropyCurve(num("cx"), num("cy"), num("t"), num("alpha"), 0.1, 100, 120));
  const ys = pts.map((p) => p[1]);
  const lo = Math.min(0, ...ys), hi = Math.max(0, ...ys);
  const canvas = document.getElementById("curve");
  const ctx = canvas.getContext("2d");
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, 34, [0.1, 100], [lo, hi || 1], "q (log)", "S_q(A|B)", true);
  polyline(ctx, pts, sx, sy, "#1f5fbf");
}

function drawFrontier() {
  const pts = pairs(frontierCurve(num("t"), num("alpha"), num("fn")));
  const canvas = document.getElementById("frontier");
  const ctx = canvas.getContext("2d");
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, 34, [0, 1], [0, 1], "x", "y", false);
  polyline(ctx, [[0, 1], [1, 0]], sx, sy, "#bbb");
  polyline(ctx, pts, sx, sy, "#c0392b");
  if (pts.every((p) => !Number.isFinite(p[1]))) {
    document.getElementById("frontier-status").textContent = "no entangled region at this temperature";
  }
}

function drawMap() {
  const n = num("mn");
  const cells = entangledMap(num("t"), num("alpha"), n);
  const canvas = document.getElementById("map");
  const ctx = canvas.getContext("2d");
  const colours = ["#e8eef7", "#c0392b", "#ffffff"];
  const side = canvas.width / n;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      ctx.fillStyle = colours[cells[j * n + i]];
      ctx.fillRect(i * side, canvas.height - (j + 1) * side, Math.ceil(side), Math.ceil(side));
    }
  }
}

await init();
document.getElementById("curve-go").addEventListener("click", guarded("curve-status", drawCurve));
document.getElementById("frontier-go").addEventListener("click", guarded("frontier-status", drawFrontier));
document.getElementById("map-go").addEventListener("click", guarded("map-status", drawMap));
guarded("curve-status", drawCurve)();
guarded("frontier-status", drawFrontier)();
guarded("map-status", drawMap)();
