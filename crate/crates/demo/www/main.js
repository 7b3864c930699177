// Build the module first: wasm-pack build crates/demo --target web --out-dir www/pkg
import init, { polygon_cone, search_support, analyze_matrix, example_text } from "./pkg/selfdual_demo.js";

const $ = (id) => document.getElementById(id);

function drawSlice(canvas, polygons) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const points = polygons.flatMap((p) => p.points);
  const extent = Math.max(1e-9, ...points.map(([x, y]) => Math.max(Math.abs(x), Math.abs(y))));
  const scale = (0.45 * Math.min(width, height)) / extent;
  const at = ([x, y]) => [width / 2 + scale * x, height / 2 - scale * y];
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.moveTo(width / 2, 0);
  ctx.lineTo(width / 2, height);
  ctx.stroke();
  for (const { points: pts, color, closed } of polygons) {
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    pts.forEach((p, i) => (i === 0 ? ctx.moveTo(...at(p)) : ctx.lineTo(...at(p))));
    if (closed) ctx.closePath();
    ctx.stroke();
    for (const p of pts) {
      const [x, y] = at(p);
      ctx.beginPath();
      ctx.arc(x, y, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

// Rays (x, y, z) with z > 0 meet the plane z = 1 at (x/z, y/z); sort by angle to draw the polygon.
function slice(rays) {
  return rays
    .map(([x, y, z]) => [x / z, y / z])
    .sort((a, b) => Math.atan2(a[1], a[0]) - Math.atan2(b[1], b[0]));
}

function fmt(v) {
  return JSON.stringify(v, (_, x) => (typeof x === "number" ? Number(x.toPrecision(6)) : x), 2);
}

function updatePolygon() {
  const k = Number($("k").value);
  const h = Number($("height").value);
  $("height-value").textContent = h.toFixed(3);
  const r = JSON.parse(polygon_cone(k, h));
  if (r.error) {
    $("polygon-out").textContent = r.error;
    return;
  }
  drawSlice($("polygon"), [
    { points: slice(r.rays), color: "#1f77b4", closed: true },
    { points: slice(r.dual_rays), color: "#ff7f0e", closed: true },
  ]);
  $("polygon-out").textContent = fmt({
    self_dual: r.self_dual,
    euclidean_self_dual: r.euclidean_self_dual,
    self_dual_height: r.self_dual_height,
    psd_scaling: r.psd_scaling,
  });
}

function loadSupport() {
  const name = $("support-example").value;
  $("support").value = example_text(name);
  $("rank").value = name.startsWith("pentagon") || name.startsWith("four") ? 3 : 4;
}

function runSearch() {
  const started = performance.now();
  const r = JSON.parse(search_support($("support").value, Number($("rank").value), BigInt($("seed").value)));
  const ms = (performance.now() - started).toFixed(0);
  if (r.error) {
    $("search-out").textContent = r.error;
    return;
  }
  const gens = r.generators ?? [];
  // Generators are (1, w); in dimension 3 the points w form the realized polygon.
  if (gens.length > 0 && gens[0].length === 3) {
    drawSlice($("realization"), [{ points: slice(gens.map(([z, x, y]) => [x, y, z])), color: "#2ca02c", closed: true }]);
  } else {
    drawSlice($("realization"), []);
  }
  $("search-out").textContent = `${ms} ms\n` + fmt({ ...r, gram: undefined });
}

function runAnalysis() {
  const r = JSON.parse(analyze_matrix($("matrix").value));
  if (r.error) {
    $("analyze-out").textContent = r.error;
    return;
  }
  $("analyze-out").textContent = fmt({
    dnn: r.dnn.value,
    rank: r.rank,
    extreme: r.extreme.value,
    intersection_dim: r.extremality?.intersection_dim,
    irreducible: r.irreducible,
    slack_conditions: r.psd_slack.slack_check.passed,
    certified_psd_slack: r.psd_slack.certified.value,
    withheld: r.psd_slack.withheld,
    verdicts: r.psd_slack.verdicts && {
      dnn_extreme: r.psd_slack.verdicts.dnn_extreme,
      cp_member: r.psd_slack.verdicts.cp_member,
      cpsd_member: r.psd_slack.verdicts.cpsd_member,
    },
    dnn5: r.dnn5?.class,
  });
}

await init();
$("status").textContent = "";
$("k").addEventListener("input", updatePolygon);
$("height").addEventListener("input", updatePolygon);
$("snap").addEventListener("click", () => {
  const r = JSON.parse(polygon_cone(Number($("k").value), 1));
  if (r.self_dual_height) {
    $("height").value = r.self_dual_height;
    updatePolygon();
  }
});
$("support-example").addEventListener("change", loadSupport);
$("search").addEventListener("click", runSearch);
$("matrix-example").addEventListener("change", () => ($("matrix").value = example_text($("matrix-example").value)));
$("analyze").addEventListener("click", runAnalysis);
loadSupport();
$("matrix").value = example_text($("matrix-example").value);
updatePolygon();
