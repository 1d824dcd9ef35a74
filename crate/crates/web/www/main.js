import init, { score_texts, decompose, gradient_curve } from "./pkg/cultnov_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (v) => (v === null || v === undefined ? "n/a" : Number(v).toFixed(4));
const COLORS = {
  newness: "#7a7a7a",
  uniqueness: "#1f5fa8",
  difference: "#2f9e44",
  new_surprise: "#b5462b",
  divergent_surprise: "#8e44ad",
};

function table(rows, head) {
  const th = head.map((h) => `<th>${h}</th>`).join("");
  const body = rows.map((r) => `<tr>${r.map((c) => `<td${typeof c === "number" ? ' class="num"' : ""}>${typeof c === "number" ? fmt(c) : c}</td>`).join("")}</tr>`);
  return `<table><tr>${th}</tr>${body.join("")}</table>`;
}

function guarded(out, f) {
  try {
    out.innerHTML = f();
  } catch (e) {
    out.innerHTML = `<p class="error">${e.message ?? e}</p>`;
  }
}

function runScore() {
  guarded($("score-out"), () => {
    const kb = $("kb").value.split(/\n\s*\n/).map((t) => t.trim()).filter(Boolean);
    const r = JSON.parse(score_texts(JSON.stringify(kb), $("variation").value, Number($("lambda1").value), Number($("window").value)));
    const rows = Object.entries(r.scores).concat(Object.entries(r.controls));
    return table(rows, ["measure", "value"]) + `<p>${r.kb_docs} knowledge-base texts, newness threshold ${fmt(r.epsilon_newness)} bits</p>`;
  });
}

function runDecompose() {
  guarded($("decompose-out"), () => {
    const r = JSON.parse(decompose($("text-a").value, $("text-b").value, 15));
    const rows = r.terms.map((t) => [`<span class="${t.side}">${t.lemma}</span>`, t.side === "both" ? "both" : `text ${t.side}`, t.bits]);
    return `<p>divergence ${fmt(r.jsd)} bits</p>` + table(rows, ["word", "more frequent in", "bits"]);
  });
}

function plot(points) {
  const c = $("plot");
  const g = c.getContext("2d");
  const pad = 40;
  const w = c.width - 2 * pad;
  const h = c.height - 2 * pad;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#444";
  g.font = "12px system-ui";
  g.fillText("planted distance", pad + w / 2 - 45, c.height - 10);
  g.fillText("0", pad - 12, pad + h + 4);
  g.fillText("1", pad - 12, pad + 4);
  Object.entries(COLORS).forEach(([name, color], k) => {
    g.strokeStyle = color;
    g.beginPath();
    points.forEach((p, i) => {
      const x = pad + p.distance * w;
      const y = pad + h - p.scores[name] * h;
      i === 0 ? g.moveTo(x, y) : g.lineTo(x, y);
    });
    g.stroke();
    g.fillStyle = color;
    g.fillText(name, pad + 8 + k * 150, pad - 10);
  });
}

function runGradient() {
  guarded($("gradient-out"), () => {
    const r = JSON.parse(gradient_curve(Number($("cultures").value), BigInt($("seed").value)));
    plot(r.points);
    return table(r.correlations, ["metric", "Pearson r with distance"]);
  });
}

await init();
$("score").onclick = runScore;
$("decompose").onclick = runDecompose;
$("gradient").onclick = runGradient;
runScore();
runDecompose();
runGradient();
