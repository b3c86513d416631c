import init, { simulate, rate_table, identity_grid } from "./pkg/polariton_web.js";

const $ = (id) => document.getElementById(id);
const RATE_KEYS = ["gamma_a", "gamma_e", "gamma_phi", "Gamma_a", "Gamma_e"];
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function rates() {
  return Object.fromEntries(RATE_KEYS.map((k) => [k, Number($(k).value)]));
}

function showError(e) {
  $("error").textContent = e ? String(e) : "";
}

function drawTrajectories() {
  const request = {
    n: Number($("n").value),
    topology: $("topology").value,
    rates: rates(),
    t_end: Number($("t_end").value),
    n_steps: 400,
  };
  const data = JSON.parse(simulate(JSON.stringify(request)));
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const pad = 40;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const tMax = data.t[data.t.length - 1];
  const yMax = Math.max(...data.corrected.concat(data.dp).flatMap((s) => s.abs), 1e-12);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText("0", pad - 12, pad + h + 4);
  ctx.fillText(yMax.toFixed(3), 2, pad + 4);
  ctx.fillText(`t = ${tMax}`, pad + w - 40, pad + h + 16);
  const x = (t) => pad + (t / tMax) * w;
  const y = (v) => pad + h - (v / yMax) * h;
  for (const [variant, dash] of [["corrected", []], ["dp", [6, 4]]]) {
    data[variant].forEach((series, k) => {
      ctx.beginPath();
      ctx.setLineDash(dash);
      ctx.strokeStyle = COLORS[k];
      series.abs.forEach((v, i) => (i ? ctx.lineTo(x(data.t[i]), y(v)) : ctx.moveTo(x(data.t[i]), y(v))));
      ctx.stroke();
    });
  }
  ctx.setLineDash([]);
  $("legend").innerHTML = data.corrected
    .map((s, k) => `<span style="color:${COLORS[k]}">&#9632; ${s.label.replace(/</g, "&lt;")}</span>`)
    .join(" &nbsp; ");
}

function fillRateTable() {
  const request = { n: Number($("n").value), topology: $("topology").value, rates: rates() };
  const entries = JSON.parse(rate_table(JSON.stringify(request)));
  const fmt = (v) => (v === 0 ? "0" : v.toExponential(4));
  $("rates").tBodies[0].innerHTML = entries
    .map((e) => {
      const cls = Math.abs(e.corrected - e.dp) > 1e-12 ? ' class="diff"' : "";
      return `<tr${cls}><td>${e.row}</td><td>${e.target}</td><td>${e.source}</td><td>${fmt(e.corrected)}</td><td>${fmt(
        e.dp,
      )}</td><td>${fmt(e.closed_form_corrected)}</td><td>${fmt(e.closed_form_dp)}</td></tr>`;
    })
    .join("");
}

function drawHeatmap() {
  const n = Number($("grid_n").value);
  const grid = JSON.parse(identity_grid(n));
  const canvas = $("heatmap");
  const ctx = canvas.getContext("2d");
  const k = n - 1;
  const cell = canvas.width / k;
  const scale = 1 / (2 * n);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  grid.values.forEach((row, i) =>
    row.forEach((v, j) => {
      const a = Math.min(1, Math.abs(v) / scale);
      ctx.fillStyle = v < 0 ? `rgba(33,102,172,${a})` : `rgba(178,24,43,${a})`;
      ctx.fillRect(j * cell, i * cell, cell, cell);
    }),
  );
  $("grid_dev").textContent = `max deviation from -1/(2N) rule: ${grid.max_deviation.toExponential(1)}`;
}

function refresh() {
  try {
    for (const key of RATE_KEYS) $(key).nextElementSibling.value = $(key).value;
    drawTrajectories();
    fillRateTable();
    showError(null);
  } catch (e) {
    showError(e);
  }
}

function refreshGrid() {
  try {
    $("grid_n").nextElementSibling.value = $("grid_n").value;
    drawHeatmap();
  } catch (e) {
    showError(e);
  }
}

await init();
for (const id of [...RATE_KEYS, "n", "topology", "t_end"]) $(id).addEventListener("input", refresh);
$("grid_n").addEventListener("input", refreshGrid);
refresh();
refreshGrid();
