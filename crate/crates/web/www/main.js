import init, { trace_trial, scaling_curve, ramsey_fringe } from "./pkg/qpe_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function protocol() {
  return {
    adaptive: $("scheme").value === "adaptive",
    k: num("k"), m: num("m"), f: num("f"),
    fa: num("fa"), fi: num("fi"),
    t2: num("t2") > 0 ? num("t2") : Infinity,
    seed: num("seed"),
  };
}

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40.5, 10.5, w - 50, h - 40);
}

function polyline(ctx, pts, color, dash = []) {
  ctx.beginPath();
  ctx.setLineDash(dash);
  ctx.strokeStyle = color;
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
  ctx.setLineDash([]);
}

function report(id, err) {
  $(id).textContent = String(err.message ?? err);
  $(id).className = "out err";
}

let trace = null;

function drawPosterior() {
  const c = $("posterior"), ctx = c.getContext("2d");
  const w = c.width, h = c.height;
  axes(ctx, w, h);
  if (!trace) return;
  const step = num("step");
  const d = trace.density(step);
  const top = Math.max(...d, 1 / (2 * Math.PI)) * 1.05;
  const x = (phi) => 40 + (phi / (2 * Math.PI)) * (w - 50);
  const y = (v) => h - 30 - (v / top) * (h - 40);
  polyline(ctx, Array.from(d, (v, i) => [x((2 * Math.PI * i) / d.length), y(v)]), "#1f5fbf");
  ctx.fillStyle = "#c00";
  ctx.fillRect(x(trace.phi_true()) - 1, 10, 2, h - 40);
  const est = trace.estimate(step);
  if (!Number.isNaN(est)) polyline(ctx, [[x(est), 10], [x(est), h - 30]], "#090", [4, 3]);
  ctx.fillStyle = "#333";
  ctx.fillText("0", 36, h - 14);
  ctx.fillText("2π", w - 20, h - 14);
  $("trace-out").className = "out";
  $("trace-out").textContent =
    `click ${step}/${trace.steps()}  true phase ${trace.phi_true().toFixed(5)}  ` +
    `estimate ${Number.isNaN(est) ? "-" : est.toFixed(5)}  sharpness ${trace.sharpness(step).toFixed(6)}`;
}

function runTrace() {
  const p = protocol();
  try {
    trace = trace_trial(p.adaptive, p.k, p.m, p.f, p.fa, p.fi, p.t2, p.seed, num("trial"), 1024);
    $("step").max = trace.steps();
    $("step").value = trace.steps();
    drawPosterior();
  } catch (e) {
    report("trace-out", e);
  }
}

function runScaling() {
  const p = protocol();
  const c = $("scaling"), ctx = c.getContext("2d");
  const w = c.width, h = c.height;
  let rows;
  try {
    rows = scaling_curve(p.adaptive, p.k, p.m, p.f, p.fa, p.fi, p.t2, num("trials"), p.seed);
  } catch (e) {
    return report("scale-out", e);
  }
  const pts = [];
  const lines = ["K     T       V_H           V_H*T"];
  for (let i = 0; i < rows.length; i += 5) {
    const [k, t, vh, prod] = rows.slice(i, i + 5);
    lines.push(`${String(k).padEnd(5)} ${String(t).padEnd(7)} ${vh.toExponential(4).padEnd(13)} ${prod.toExponential(4)}`);
    if (Number.isFinite(prod) && prod > 0) pts.push([Math.log10(t), Math.log10(prod)]);
  }
  $("scale-out").className = "out";
  $("scale-out").textContent = lines.join("\n");
  axes(ctx, w, h);
  if (pts.length < 2) return;
  const xs = pts.map((q) => q[0]), ys = pts.map((q) => q[1]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys, ys[0] - (x1 - x0)) - 0.1, Math.max(...ys) + 0.1];
  const X = (v) => 40 + ((v - x0) / (x1 - x0 || 1)) * (w - 50);
  const Y = (v) => h - 30 - ((v - y0) / (y1 - y0)) * (h - 40);
  polyline(ctx, [[X(x0), Y(ys[0])], [X(x1), Y(ys[0])]], "#000", [6, 4]);
  polyline(ctx, [[X(x0), Y(ys[0])], [X(x1), Y(ys[0] - (x1 - x0))]], "#000");
  polyline(ctx, pts.map(([a, b]) => [X(a), Y(b)]), "#c00");
  ctx.fillStyle = "#333";
  ctx.fillText("log10 T", w - 60, h - 14);
  ctx.fillText("log10 V_H T", 44, 22);
}

function runFringe() {
  const c = $("ramsey"), ctx = c.getContext("2d");
  const w = c.width, h = c.height;
  axes(ctx, w, h);
  let flat;
  try {
    flat = ramsey_fringe(num("field"), num("ft1"), num("ft2"), num("ftmax"), 600);
  } catch (e) {
    ctx.fillStyle = "#b00";
    ctx.fillText(String(e.message ?? e), 50, 30);
    return;
  }
  const tmax = num("ftmax");
  const pts = [];
  for (let i = 0; i < flat.length; i += 2) {
    pts.push([40 + (flat[i] / tmax) * (w - 50), h - 30 - flat[i + 1] * (h - 40)]);
  }
  polyline(ctx, pts, "#1f5fbf");
}

await init();
$("trace").onclick = runTrace;
$("step").oninput = drawPosterior;
$("scale").onclick = runScaling;
$("fringe").onclick = runFringe;
runTrace();
runFringe();
