import init, { search, transect, puzzle } from "./pkg/infoplan_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, fn) {
  const out = $(id);
  out.classList.remove("error");
  try {
    return fn();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
    return null;
  }
}

let run = null;

function drawSearch() {
  if (!run) return;
  const k = Number($("s-step").value);
  const canvas = $("s-canvas");
  const ctx = canvas.getContext("2d");
  const size = Math.floor(Math.min(canvas.width / run.width, canvas.height / run.height));
  const step = run.steps[k];
  const searched = new Set(step.searched);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let r = 0; r < run.height; r++) {
    for (let c = 0; c < run.width; c++) {
      const cell = r * run.width + c + 1;
      ctx.fillStyle = searched.has(cell) ? "#9cc3e6" : "#f2f2f2";
      ctx.fillRect(c * size, r * size, size - 1, size - 1);
    }
  }
  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 2;
  ctx.beginPath();
  run.steps.slice(0, k + 1).forEach((s, i) => {
    const x = (s.col + 0.5) * size;
    const y = (s.row + 0.5) * size;
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  ctx.fillStyle = "#c33";
  ctx.beginPath();
  ctx.arc((step.col + 0.5) * size, (step.row + 0.5) * size, size / 4, 0, 2 * Math.PI);
  ctx.fill();
  const u = run.steps.map((s) => s.coverage);
  $("s-out").textContent =
    `${run.policy}: ${run.completed ? run.measurements + " sweeps" : "step cap reached"}` +
    ` (${run.percentage.toFixed(1)}% of cells)\n` +
    `sweep ${k}: coverage ${step.coverage}, ${step.cumulative.toFixed(3)} bits so far\n` +
    `u_k: ${u.join(" ")}`;
}

function runSearch() {
  const view = show("s-out", () =>
    JSON.parse(search(num("s-width"), num("s-height"), num("s-start"), $("s-policy").value === "rollout")),
  );
  if (!view) return;
  run = view;
  $("s-step").max = String(run.steps.length - 1);
  $("s-step").value = "0";
  drawSearch();
}

function runTransect() {
  const res = 8;
  const view = show("t-out", () =>
    JSON.parse(
      transect(num("t-width"), num("t-height"), num("t-length"), num("t-noise"), num("t-horizon"), 0,
        num("t-slip"), BigInt(num("t-seed")), res),
    ),
  );
  if (!view) return;
  const canvas = $("t-canvas");
  const ctx = canvas.getContext("2d");
  const px = Math.floor(Math.min(canvas.width / view.field_cols, canvas.height / view.field_rows));
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let r = 0; r < view.field_rows; r++) {
    for (let c = 0; c < view.field_cols; c++) {
      const v = view.field[r * view.field_cols + c];
      const shade = Math.round(255 * (1 - v));
      ctx.fillStyle = `rgb(${shade}, ${shade}, 255)`;
      ctx.fillRect(c * px, r * px, px, px);
    }
  }
  const at = (p) => [(p.x * res + 0.5) * px, (p.y * res + 0.5) * px];
  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 2;
  ctx.beginPath();
  view.path.forEach((p, i) => {
    const [x, y] = at(p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  ctx.fillStyle = "#000";
  for (const p of view.path) {
    const [x, y] = at(p);
    ctx.fillRect(x - 2, y - 2, 4, 4);
  }
  const rows = view.path.map(
    (p) => `${p.k}\twaypoint ${p.waypoint}${p.intended !== p.waypoint ? " (aimed " + p.intended + ")" : ""}` +
      `\t${p.entropy.toFixed(4)} bits`,
  );
  $("t-out").textContent =
    rows.join("\n") +
    `\ntotal ${view.total_entropy.toFixed(6)} bits, joint ${view.joint_entropy?.toFixed(6) ?? "n/a"} bits`;
}

function runPuzzle() {
  const view = show("p-out", () => JSON.parse(puzzle($("p-kind").value, num("p-n"))));
  if (!view) return;
  const what = view.kind === "weighing" ? "weighings" : "questions";
  const first = view.kind === "weighing" ? "balls on the pans first" : "subinterval sizes to ask first";
  $("p-out").textContent =
    `${view.stages} ${what} resolve ${view.value_bits.toFixed(4)} bits\n` +
    `optimal ${first}: ${view.first_choices.join(", ")}`;
}

await init();
$("s-run").addEventListener("click", runSearch);
$("s-step").addEventListener("input", drawSearch);
$("t-run").addEventListener("click", runTransect);
$("p-run").addEventListener("click", runPuzzle);
runSearch();
runTransect();
runPuzzle();
