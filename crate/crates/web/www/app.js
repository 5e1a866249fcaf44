import init, { score, weights, simulate } from "./pkg/uscore_web.js";

const $ = (id) => document.getElementById(id);

function errorText(e) {
  try { return JSON.parse(e).error; } catch { return String(e); }
}

function table(el, header, rows, rowClass = () => "") {
  el.innerHTML = "";
  const head = el.insertRow();
  for (const h of header) head.appendChild(Object.assign(document.createElement("th"), { textContent: h }));
  rows.forEach((r, i) => {
    const tr = el.insertRow();
    tr.className = rowClass(i);
    for (const c of r) tr.insertCell().textContent = c;
  });
}

// slider is log10(w), so 0..3 covers weights 1..1000
function updateWeights() {
  const w = 10 ** Number($("w").value);
  $("w-label").textContent = `w = ${w.toFixed(2)}`;
  const v = JSON.parse(weights(w));
  const rows = [...v.rows].sort((a, b) => a.rank - b.rank);
  table(
    $("weights"),
    ["Rank", "Algorithm", "10-D", "20-D", "Total", "Unweighted rank"],
    rows.map((r) => [r.rank, r.algorithm, r.base, r.weighted, r.total.toFixed(1), r.unweighted_rank]),
    (i) => (rows[i].rank !== rows[i].unweighted_rank ? "moved" : ""),
  );
  const c = v.crossovers.map((x) => `${x.weight.toFixed(2)} (${x.first} ↔ ${x.second})`).join(", ");
  $("crossovers").textContent = `Crossovers: ${c}. Ranks are fixed above w = ${v.freeze_weight.toFixed(2)}.`;
}

function runScore() {
  const out = $("score-out");
  try {
    const r = JSON.parse(score($("csv").value, $("config").value));
    const t = document.createElement("table");
    const order = r.ranks.map((rank, j) => [rank, j]).sort((a, b) => a[0] - b[0]).map(([, j]) => j);
    table(
      t,
      ["Rank", "Algorithm", ...r.groups, "Total"],
      order.map((j) => [r.ranks[j] + (r.tied[j] ? "=" : ""), r.algorithms[j], ...r.subtotals[j], r.totals[j]]),
    );
    out.replaceChildren(t);
  } catch (e) {
    out.replaceChildren(Object.assign(document.createElement("p"), { className: "error", textContent: errorText(e) }));
  }
}

function plot(points) {
  const cv = $("plot");
  const g = cv.getContext("2d");
  const [W, H, pad] = [cv.width, cv.height, 40];
  const ymax = Math.max(0.05, ...points.map((p) => Math.max(p.miss_uscore, p.miss_dominance)));
  const x = (s) => pad + (s / points[points.length - 1].s) * (W - 2 * pad);
  const y = (v) => H - pad - (v / ymax) * (H - 2 * pad);
  g.clearRect(0, 0, W, H);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  g.fillStyle = "#444";
  g.font = "12px sans-serif";
  g.fillText("separation s", W / 2 - 30, H - 8);
  g.fillText(`miss rate (max ${ymax.toFixed(3)})`, 4, pad - 10);
  for (const [key, color] of [["miss_uscore", "#1f5fbf"], ["miss_dominance", "#c0392b"], ["tie_rate", "#888"]]) {
    g.strokeStyle = color;
    g.beginPath();
    points.forEach((p, i) => (i ? g.lineTo(x(p.s), y(p[key])) : g.moveTo(x(p.s), y(p[key]))));
    g.stroke();
  }
  [["U-score", "#1f5fbf"], ["dominance", "#c0392b"], ["U tie", "#888"]].forEach(([label, color], i) => {
    g.fillStyle = color;
    g.fillText(label, W - pad - 80, pad + 16 + 16 * i);
  });
}

function runSimulation() {
  $("sim-status").textContent = "running…";
  // let the status paint before the blocking call
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const v = JSON.parse(simulate(Number($("n").value), Number($("runs").value), Number($("seed").value)));
      plot(v.curve.points);
      const ms = (performance.now() - t0).toFixed(0);
      $("sim-status").textContent = `${ms} ms` + (v.tie_free ? ", ties impossible for this n" : "");
    } catch (e) {
      $("sim-status").textContent = errorText(e);
    }
  }, 10);
}

await init();
$("w").addEventListener("input", updateWeights);
$("score").addEventListener("click", runScore);
$("simulate").addEventListener("click", runSimulation);
updateWeights();
runScore();
runSimulation();
