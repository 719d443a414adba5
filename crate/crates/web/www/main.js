import init, { perturbation, sod, jet } from "./pkg/statjet_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function plot(canvas, xs, series, ymin, ymax) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
  const py = (y) => h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(ymax.toPrecision(3), 2, pad + 4);
  ctx.fillText(ymin.toPrecision(3), 2, h - pad + 4);
  ctx.fillText(x0.toString(), pad, h - pad + 14);
  ctx.fillText(x1.toString(), w - pad - 10, h - pad + 14);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.ys.forEach((y, k) => (k ? ctx.lineTo(px(xs[k]), py(y)) : ctx.moveTo(px(xs[k]), py(y))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function guarded(msgId, f) {
  return () => {
    const msg = $(msgId);
    msg.className = "";
    msg.textContent = "running...";
    setTimeout(() => {
      const t0 = performance.now();
      try {
        f();
        msg.textContent = `${((performance.now() - t0) / 1000).toFixed(2)} s`;
      } catch (e) {
        msg.className = "err";
        msg.textContent = e.message || String(e);
      }
    }, 10);
  };
}

function runPerturbation() {
  const n = 201, shown = num("p-shown");
  const d = perturbation(BigInt(num("p-seed")), num("p-samples"), shown, n);
  const row = (r) => Array.from(d.subarray(r * n, (r + 1) * n));
  const [ybar, mean, std] = [row(0), row(1), row(2)];
  const colors = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
  const series = [
    { ys: mean, color: "#000" },
    { ys: mean.map((m, k) => m + std[k]), color: "#000", dash: [4, 4] },
    { ys: mean.map((m, k) => m - std[k]), color: "#000", dash: [4, 4] },
  ];
  for (let p = 0; p < shown; p++) series.push({ ys: row(3 + p), color: colors[p % colors.length] });
  plot($("p-canvas"), ybar, series, 4.0, 6.0);
}

function runSod() {
  const nx = num("s-nx");
  const rho = Array.from(sod(nx, $("s-lim").value));
  const xs = rho.map((_, i) => (i + 0.5) / nx);
  plot($("s-canvas"), xs, [{ ys: rho, color: "#1f77b4" }], 0, 1.05);
}

function runJet() {
  const nx = num("j-nx"), ny = nx / 5;
  const px = jet(nx, num("j-t"), num("j-a"), BigInt(num("j-seed")));
  const canvas = $("j-canvas");
  canvas.width = nx;
  canvas.height = ny;
  const shown = Math.max(nx, 750);
  canvas.style.width = `${shown}px`;
  canvas.style.height = `${shown / 5}px`;
  canvas.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(px), nx, ny), 0, 0);
}

await init();
$("p-go").onclick = guarded("p-msg", runPerturbation);
$("s-go").onclick = guarded("s-msg", runSod);
$("j-go").onclick = guarded("j-msg", runJet);
$("p-go").click();
