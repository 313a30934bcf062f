import init, { derating_curve, fit_temperature_trend, solve_garver } from "./pkg/tep_web.js";

const $ = (id) => document.getElementById(id);

function show(el, fn) {
  try {
    el.classList.remove("error");
    el.textContent = fn();
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e.message ?? e);
  }
}

function drawCurve(points) {
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const t0 = points[0].t_f, t1 = points[points.length - 1].t_f;
  const lo = Math.min(...points.map((p) => p.eta));
  const x = (t) => pad + ((t - t0) / (t1 - t0 || 1)) * (w - 2 * pad);
  const y = (e) => h - pad - ((e - lo) / (1 - lo || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(`${t0} F`, pad, h - 10);
  ctx.fillText(`${t1} F`, w - pad - 30, h - 10);
  ctx.fillText("1.000", 2, pad + 4);
  ctx.fillText(lo.toFixed(3), 2, h - pad);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  points.forEach((p, i) => (i ? ctx.lineTo(x(p.t_f), y(p.eta)) : ctx.moveTo(x(p.t_f), y(p.eta))));
  ctx.stroke();
}

function plot() {
  show($("curve-out"), () => {
    const points = JSON.parse(derating_curve(+$("t-base").value, +$("t-max").value, 31));
    drawCurve(points);
    const last = points[points.length - 1];
    return `eta at ${last.t_f} F: ${last.eta.toFixed(4)}`;
  });
}

function fit() {
  show($("fit-out"), () => fit_temperature_trend($("csv").value, +$("k").value, +$("base-year").value));
}

function solve() {
  show($("solve-out"), () => {
    const r = JSON.parse(solve_garver($("code").value, +$("g-low").value, +$("g-high").value, $("vis").checked));
    return [
      `scenario      ${r.scenario}`,
      `status        ${r.status}`,
      `eta           ${r.etas.map((e) => e.toFixed(4)).join(", ")}`,
      `built         ${r.built.join(" ") || "-"}`,
      `new lines     $${r.new_line_cost}`,
      `reconductor   $${r.cap_exp_cost}`,
      `generation    $${r.gen_cost}`,
      `total         $${r.total_cost}`,
      `nodes         ${r.nodes}`,
    ].join("\n");
  });
}

await init();
$("curve-btn").addEventListener("click", plot);
$("fit-btn").addEventListener("click", fit);
$("solve-btn").addEventListener("click", solve);
plot();
