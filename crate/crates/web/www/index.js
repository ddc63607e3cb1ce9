import init, { Demo, metric_names } from "./pkg/skinseg_web.js";

const SCALE = 2;
const $ = (id) => document.getElementById(id);

let demo = null;
let selected = null;
let overlay = null;

function paint(canvas, rgba, w, h) {
  canvas.width = w;
  canvas.height = h;
  canvas.style.width = `${w * SCALE}px`;
  canvas.style.height = `${h * SCALE}px`;
  canvas.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function fmt(v, digits = 4) {
  if (Number.isNaN(v)) return "undefined";
  if (!Number.isFinite(v)) return "inf";
  return v.toFixed(digits);
}

function settings() {
  return {
    metric: $("metric").value,
    slack: Number($("slack").value),
    window: Number($("window").value),
    quant: Number($("quant").value),
  };
}

function rebuildScene() {
  demo?.free();
  demo = new Demo(Number($("seed").value) >>> 0, Number($("jitter").value));
  paint($("scene"), demo.scene_rgba(), demo.width(), demo.height());
  paint($("truth"), demo.truth_rgba(), demo.width(), demo.height());
  refresh();
}

function refresh() {
  const s = settings();
  $("jitter-v").textContent = $("jitter").value;
  $("slack-v").textContent = s.slack.toFixed(2);
  try {
    const r = demo.run(s.metric, s.slack, s.window, s.quant);
    overlay = r.overlay();
    paint($("overlay"), overlay, demo.width(), demo.height());
    const [tp, tn, fp, fn] = r.counts();
    const t = Array.from(r.thresholds(), (v) => fmt(v)).join(", ");
    $("metrics").textContent =
      `rate ${fmt(r.rate(), 2)}%  sensitivity ${fmt(r.sensitivity())}  specificity ${fmt(r.specificity())}  ` +
      `tp ${tp}  tn ${tn}  fp ${fp}  fn ${fn}  thresholds [${t}]`;
    r.free();
    $("status").textContent = "";
    drawSweep(s);
    if (selected) inspect(...selected);
  } catch (e) {
    $("status").textContent = String(e.message ?? e);
  }
}

function inspect(x, y) {
  selected = [x, y];
  const info = demo.inspect(x, y);
  const [x0, y0, w, h] = info.bounds();
  paint($("overlay"), overlay, demo.width(), demo.height());
  const ctx = $("overlay").getContext("2d");
  ctx.strokeStyle = "#ff0";
  ctx.strokeRect(x0 + 0.5, y0 + 0.5, w - 1, h - 1);

  const names = metric_names();
  const label = info.label();
  let html = `<p>window (${x0}, ${y0}) ${w}x${h}: <b>${label < 0 ? "non-skin" : info.class_name(label)}</b></p>`;
  html += "<table><tr><th>class</th><th>threshold</th>";
  for (const n of names) html += `<th>${n}</th>`;
  html += "</tr>";
  const current = settings().metric;
  const centroids = [];
  for (let k = 0; k < info.class_count(); k++) {
    centroids.push(info.centroid(k));
    html += `<tr><td>${info.class_name(k)}</td><td>${fmt(info.threshold(k))}</td>`;
    info.distances(k).forEach((d, i) => {
      const active = names[i] === current;
      const cls = active && d <= info.threshold(k) ? "pass" : "";
      html += `<td class="${cls}">${active ? "<u>" : ""}${fmt(d)}${active ? "</u>" : ""}</td>`;
    });
    html += "</tr>";
  }
  $("inspect").innerHTML = html + "</table>";
  drawHistogram(info.feature(), centroids);
  info.free();
}

function drawHistogram(feature, centroids) {
  const c = $("hist");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const n = feature.length;
  const bw = c.width / n;
  const top = Math.max(...feature, ...centroids.flatMap((v) => Array.from(v)), 1e-9);
  const y = (v) => c.height - 10 - (v / top) * (c.height - 20);
  const channel = ["#d33", "#3a3", "#33d"];
  feature.forEach((v, i) => {
    ctx.fillStyle = channel[Math.floor((i * 3) / n)];
    ctx.fillRect(i * bw + 1, y(v), bw - 2, c.height - 10 - y(v));
  });
  const lines = ["#f0c", "#0bd"];
  centroids.forEach((cv, k) => {
    ctx.strokeStyle = lines[k % lines.length];
    ctx.beginPath();
    cv.forEach((v, i) => ctx[i ? "lineTo" : "moveTo"](i * bw + bw / 2, y(v)));
    ctx.stroke();
  });
}

function drawSweep(s) {
  const steps = 51;
  const min = Number($("slack").min);
  const max = Number($("slack").max);
  const pts = demo.sweep(s.metric, s.window, s.quant, min, max, steps);
  const c = $("sweep");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const x = (v) => 30 + ((v - min) / (max - min)) * (c.width - 40);
  const y = (v) => c.height - 20 - v * (c.height - 30);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(30, 10, c.width - 40, c.height - 30);
  ctx.fillStyle = "#555";
  ctx.fillText(min.toFixed(1), 25, c.height - 5);
  ctx.fillText(max.toFixed(1), c.width - 25, c.height - 5);
  ctx.fillText("1", 15, 14);
  ctx.fillText("0", 15, c.height - 18);
  const series = [
    [1, 0.01, "#000"],
    [2, 1, "#c0392b"],
    [3, 1, "#2471a3"],
  ];
  for (const [col, scale, color] of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    let pen = false;
    for (let i = 0; i < steps; i++) {
      const v = pts[i * 4 + col];
      if (Number.isNaN(v)) { pen = false; continue; }
      ctx[pen ? "lineTo" : "moveTo"](x(pts[i * 4]), y(v * scale));
      pen = true;
    }
    ctx.stroke();
  }
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(x(s.slack), 10);
  ctx.lineTo(x(s.slack), c.height - 20);
  ctx.stroke();
  ctx.setLineDash([]);
}

await init();
for (const name of metric_names()) {
  const opt = document.createElement("option");
  opt.textContent = name;
  $("metric").append(opt);
}
for (const id of ["seed", "jitter"]) $(id).addEventListener("change", rebuildScene);
$("jitter").addEventListener("input", () => ($("jitter-v").textContent = $("jitter").value));
for (const id of ["metric", "window", "quant"]) $(id).addEventListener("change", refresh);
$("slack").addEventListener("input", refresh);
$("overlay").addEventListener("click", (e) => {
  try {
    inspect(Math.floor(e.offsetX / SCALE), Math.floor(e.offsetY / SCALE));
  } catch (err) {
    $("status").textContent = String(err.message ?? err);
  }
});
rebuildScene();
