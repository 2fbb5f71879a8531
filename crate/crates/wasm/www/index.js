import init, { simulate, updateCurve, successBoundCurve } from "./pkg/mdl_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function readForm(id) {
  const box = document.getElementById(id);
  const values = {};
  for (const input of box.querySelectorAll("input")) values[input.name] = Number(input.value);
  return { box, values, canvas: box.querySelector("canvas"), status: box.querySelector(".status") };
}

// Draws series [{points: [[x, y], ...], color, dashed}] with linear axes.
function plot(canvas, series, { xLabel, yLabel, yMin, yMax, xLog = false }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, R = 15, T = 15, B = 40;
  ctx.clearRect(0, 0, W, H);
  const fx = xLog ? Math.log10 : (v) => v;
  const xs = series.flatMap((s) => s.points.map((p) => fx(p[0])));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = yMin ?? Math.min(...ys), y1 = yMax ?? Math.max(...ys);
  const sx = (v) => L + ((fx(v) - x0) / (x1 - x0 || 1)) * (W - L - R);
  const sy = (v) => H - B - ((v - y0) / (y1 - y0 || 1)) * (H - T - B);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(L, T);
  ctx.lineTo(L, H - B);
  ctx.lineTo(W - R, H - B);
  ctx.stroke();
  for (let k = 0; k <= 4; k++) {
    const yv = y0 + ((y1 - y0) * k) / 4;
    ctx.fillText(Number(yv.toPrecision(3)).toString(), 4, sy(yv) + 4);
    const xv = x0 + ((x1 - x0) * k) / 4;
    const label = xLog ? "1e" + Math.round(xv) : Number(xv.toPrecision(3)).toString();
    ctx.fillText(label, L + ((xv - x0) / (x1 - x0 || 1)) * (W - L - R) - 10, H - B + 16);
  }
  ctx.fillText(xLabel, W / 2, H - 6);
  ctx.save();
  ctx.translate(12, H / 2 + 30);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function guarded(id, body) {
  const form = readForm(id);
  form.box.querySelector("button").addEventListener("click", () => {
    const f = readForm(id);
    f.status.classList.remove("error");
    try {
      f.status.textContent = body(f.values, f.canvas);
    } catch (e) {
      f.status.classList.add("error");
      f.status.textContent = String(e);
    }
  });
}

function runSimulation(v, canvas) {
  const out = JSON.parse(simulate(v.n, v.lambda, v.rounds, v.trials, v.seed));
  const agents = 2 * out.n;
  const series = out.trials.map((counts, t) => ({
    points: counts.map((z, r) => [r, z / agents]),
    color: COLORS[t % COLORS.length],
  }));
  plot(canvas, series, { xLabel: "round", yLabel: "fraction of zeros", yMin: 0, yMax: 1 });
  const tally = {};
  for (const k of out.final_kinds) tally[k] = (tally[k] || 0) + 1;
  return `final states after ${out.rounds} rounds: ` + Object.entries(tally).map(([k, c]) => `${k} ${c}`).join(", ");
}

function runUpdate(v, canvas) {
  const pts = JSON.parse(updateCurve(v.n, v.lambda, v.alphaMax, 60));
  plot(
    canvas,
    [
      { points: pts.map((p) => [p.alpha, p.exact_own_zero]), color: COLORS[0] },
      { points: pts.map((p) => [p.alpha, p.exact_own_one]), color: COLORS[1] },
      { points: pts.map((p) => [p.alpha, p.lower_bound]), color: COLORS[2], dashed: true },
    ],
    { xLabel: "alpha = (zeros - n) / sqrt(n)", yLabel: "P(adopt 0)" },
  );
  const last = pts[pts.length - 1];
  return (
    "blue: exact, own opinion 0; red: exact, own opinion 1; green dashed: 1/2 + C0/n^(1/4)\n" +
    `at alpha = ${last.alpha}: exact ${last.exact_own_zero.toFixed(6)} vs bound ${last.lower_bound.toFixed(6)}`
  );
}

function runBound(v, canvas) {
  const pts = JSON.parse(successBoundCurve(v.alpha, v.lambda, v.lo, v.hi, 80));
  plot(canvas, [{ points: pts.map((p) => [p.n, p.clamped]), color: COLORS[3] }], {
    xLabel: "n",
    yLabel: "bound",
    yMin: 0,
    yMax: 1,
    xLog: true,
  });
  const half = pts.findIndex((p) => p.clamped >= 0.5);
  return half < 0 ? "bound stays below 1/2 on this range" : `bound reaches 1/2 near n = ${pts[half].n.toExponential(2)}`;
}

await init();
guarded("sim", runSimulation);
guarded("update", runUpdate);
guarded("bound", runBound);
