import init, { sweep_curves, equilibrium_at, compare_table } from "./pkg/iot_pricing_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = { push: "#1f5fa8", pull: "#c0392b", hybrid: "#2e8b3a" };
const SAMPLES = 601;

let picked = 3;
let curves = null;

function market() {
  return {
    d: Number($("d").value),
    dMax: Number($("dmax").value),
    lambda: Number($("lambda").value),
    stop: Math.max(1, Number($("stop").value)),
  };
}

function series(quantity) {
  const rows = curves.rows;
  const out = {};
  for (const m of ["push", "pull", "hybrid"]) out[m] = rows.map((r) => r[quantity][m]);
  if (quantity === "u_wsp") {
    out.push_worst = rows.map((r) => r.push_wsp_worst);
    out.push_best = rows.map((r) => r.push_wsp_best);
  } else if (quantity === "u_csp") {
    out.push_worst = rows.map((r) => r.push_csp_worst);
    out.push_best = rows.map((r) => r.push_csp_best);
  }
  return out;
}

function draw() {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = { l: 60, r: 15, t: 15, b: 35 };
  ctx.clearRect(0, 0, width, height);

  const xs = curves.ba1;
  const data = series($("quantity").value);
  const yMax = Math.max(...Object.values(data).flat()) * 1.05 || 1;
  const xMax = xs[xs.length - 1];
  const px = (x) => pad.l + (x / xMax) * (width - pad.l - pad.r);
  const py = (y) => height - pad.b - (y / yMax) * (height - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, height - pad.b);
  ctx.lineTo(width - pad.r, height - pad.b);
  ctx.stroke();
  for (let i = 0; i <= 5; i++) {
    const x = (xMax * i) / 5;
    const y = (yMax * i) / 5;
    ctx.fillText(x.toPrecision(3), px(x) - 10, height - pad.b + 14);
    ctx.fillText(y.toPrecision(3), 5, py(y) + 4);
  }
  ctx.fillText("b·a1", width - 40, height - 5);

  ctx.setLineDash([3, 4]);
  ctx.strokeStyle = "#bbb";
  for (const t of curves.thresholds.entries) {
    if (t.value > xMax) continue;
    ctx.beginPath();
    ctx.moveTo(px(t.value), pad.t);
    ctx.lineTo(px(t.value), height - pad.b);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  if (data.push_worst) {
    ctx.fillStyle = "rgba(31, 95, 168, 0.15)";
    ctx.beginPath();
    xs.forEach((x, i) => ctx.lineTo(px(x), py(data.push_best[i])));
    for (let i = xs.length - 1; i >= 0; i--) ctx.lineTo(px(xs[i]), py(data.push_worst[i]));
    ctx.fill();
  }
  for (const m of ["push", "pull", "hybrid"]) {
    ctx.strokeStyle = COLORS[m];
    ctx.lineWidth = 2;
    ctx.beginPath();
    xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(data[m][i])) : ctx.moveTo(px(x), py(data[m][i]))));
    ctx.stroke();
  }
  ctx.lineWidth = 1;

  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.moveTo(px(picked), pad.t);
  ctx.lineTo(px(picked), height - pad.b);
  ctx.stroke();

  canvas.onclick = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) * (width / rect.width) - pad.l) / (width - pad.l - pad.r);
    picked = Math.min(xMax, Math.max(0, x * xMax));
    draw();
    showPoint();
  };

  const band = data.push_worst ? " (band: push equilibrium set)" : "";
  $("legend").innerHTML =
    Object.entries(COLORS).map(([m, c]) => `<span style="color:${c}">&#9632; ${m}</span>`).join("") +
    `<span>dashed: ${curves.thresholds.entries.map((t) => `${t.name} ${t.value.toPrecision(4)}`).join(", ")}</span>${band}`;
}

function fmt(x) {
  return x === null || x === undefined ? "-" : Number(x.toPrecision(6)).toString();
}

function showPoint() {
  const { d, dMax, lambda } = market();
  try {
    const r = JSON.parse(equilibrium_at($("model").value, d, dMax, picked, lambda));
    const o = r.outcome;
    const v = r.verification;
    const verdict = v.passed ? "passes" : "FAILS";
    $("point").innerHTML =
      `b·a1 = ${fmt(o.ad_rev)}  regime ${o.regime}${o.unique ? "" : " (equilibrium set)"}\n` +
      `p_i = ${fmt(o.prices.p_i)}  w = ${fmt(o.prices.w)}  c = ${fmt(o.prices.c)}  demand = ${fmt(o.payoffs.demand)}\n` +
      `u_iotsp = ${fmt(o.payoffs.u_iotsp)}  u_wsp = ${fmt(o.payoffs.u_wsp)}  u_csp = ${fmt(o.payoffs.u_csp)}\n` +
      `oracle: <span class="${v.passed ? "pass" : "fail"}">${verdict}</span>, max relative gain ${v.max_gain.toExponential(2)}`;
  } catch (e) {
    $("point").textContent = String(e);
  }
}

function showTable() {
  const { d, dMax, lambda } = market();
  try {
    const t = JSON.parse(compare_table(d, dMax, Number($("low").value), Number($("high").value), lambda)).table1;
    const rows = t.rows
      .map((r) => `<tr><td>${r.entity}</td><td>${r.low}</td><td>${r.high}</td><td>${r.high_candidates.join(", ")}</td></tr>`)
      .join("");
    $("table").innerHTML =
      `<table><tr><th>entity</th><th>low R</th><th>high R</th><th>high R, any push selection</th></tr>${rows}</table>`;
  } catch (e) {
    $("table").textContent = String(e);
  }
}

function refresh() {
  for (const out of document.querySelectorAll("output")) out.value = $(out.htmlFor.value).value;
  const { d, dMax, lambda, stop } = market();
  try {
    curves = JSON.parse(sweep_curves(d, dMax, stop, SAMPLES, lambda));
  } catch (e) {
    $("legend").textContent = String(e);
    return;
  }
  picked = Math.min(picked, stop);
  draw();
  showPoint();
  showTable();
}

await init();
for (const id of ["d", "dmax", "lambda", "stop", "quantity"]) $(id).addEventListener("input", refresh);
$("model").addEventListener("change", showPoint);
for (const id of ["low", "high"]) $(id).addEventListener("input", showTable);
refresh();
