import init, { solveProfile, diskMesh, FlowSession } from "./pkg/soliton_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
let running = null;

function status(text) {
  $("status").textContent = text;
}

// Draws polylines given as [xs, ys] pairs, scaled to fit the canvas.
function plot(curves, xLabel, yLabel) {
  const xs = curves.flatMap(([x]) => Array.from(x));
  const ys = curves.flatMap(([, y]) => Array.from(y));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const pad = 36;
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 2 * pad);
  const sy = (y) => canvas.height - pad - ((y - y0) / (y1 - y0 || 1)) * (canvas.height - 2 * pad);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(`${xLabel} ∈ [${x0.toFixed(2)}, ${x1.toFixed(2)}]`, pad, canvas.height - 10);
  ctx.fillText(`${yLabel} ∈ [${y0.toFixed(2)}, ${y1.toFixed(2)}]`, pad, 20);
  const colours = ["#1f5fa8", "#c0392b", "#27ae60"];
  curves.forEach(([x, y], k) => {
    ctx.strokeStyle = colours[k % colours.length];
    ctx.beginPath();
    for (let i = 0; i < x.length; i++) {
      const [px, py] = [sx(x[i]), sy(y[i])];
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    }
    ctx.stroke();
  });
}

function profile() {
  return solveProfile(num("k"), num("n"), num("c"), num("eps"), num("rmax"));
}

function showProfile() {
  const p = profile();
  plot([[p.r(), p.t()]], "r", "t");
  status(`${p.label()}: ${p.r().length} samples, verified: ${p.verified()}`);
  $("report").textContent = p.report();
}

// Top view of the mesh in the disk chart, vertices shaded by height.
function showMesh() {
  const p = profile();
  const m = diskMesh(p, 48);
  const v = m.vertices();
  const heights = [];
  for (let i = 0; i < v.length; i += 3) heights.push(v[i]);
  const [h0, h1] = [Math.min(...heights), Math.max(...heights)];
  const radius = Math.min(canvas.width, canvas.height) / 2 - 10;
  const [cx, cy] = [canvas.width / 2, canvas.height / 2];
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.arc(cx, cy, radius, 0, 2 * Math.PI);
  ctx.stroke();
  const scale = num("k") < 0 ? radius * Math.sqrt(-num("k")) : radius / num("rmax");
  for (let i = 0; i < v.length; i += 3) {
    const shade = Math.round(220 * (1 - (v[i] - h0) / (h1 - h0 || 1)));
    ctx.fillStyle = `rgb(${shade}, ${shade}, 255)`;
    ctx.fillRect(cx + v[i + 1] * scale - 1, cy - v[i + 2] * scale - 1, 2, 2);
  }
  status(`${p.label()}: ${v.length / 3} vertices, ${m.faces().length / 3} triangles, χ = ${m.eulerCharacteristic()}`);
  $("report").textContent = "";
}

function startFlow() {
  stopFlow();
  const radius = Math.max(num("rmax"), 2);
  const session = new FlowSession(num("k"), num("n"), num("c"), radius, 201, num("amp"), num("width"), num("centre"));
  const history = [[], []];
  const frame = () => {
    const tau = session.step(25);
    history[0].push(tau);
    history[1].push(session.functional());
    plot([[session.r(), session.u()]], "r", "u − cτ");
    status(`τ = ${tau.toFixed(4)}  F = ${session.functional().toExponential(8)}  D = ${session.defect().toExponential(3)}`);
    const n = history[1].length;
    if (n > 1) {
      const rises = history[1].slice(1).filter((f, i) => f > history[1][i]).length;
      $("report").textContent = `F samples: ${n}, increases: ${rises}`;
    }
    if (tau < 2) running = requestAnimationFrame(frame);
  };
  running = requestAnimationFrame(frame);
}

function stopFlow() {
  if (running !== null) cancelAnimationFrame(running);
  running = null;
}

function guard(f) {
  return () => {
    try {
      f();
    } catch (e) {
      stopFlow();
      status(`error: ${e.message ?? e}`);
    }
  };
}

await init();
$("solve").onclick = guard(showProfile);
$("mesh").onclick = guard(showMesh);
$("start").onclick = guard(startFlow);
$("stop").onclick = stopFlow;
guard(showProfile)();
