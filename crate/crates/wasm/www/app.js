import init, { analyze, eigencone, power_sequence } from "./pkg/tropicore_wasm.js";

const EXAMPLES = {
  ex1: `0.1206,0,0,0,0
0.5895,0.2904,1,0.8797,0.4253
0.2262,0.6171,0.3439,1,0.3127
0.3846,0.2653,0.5841,0.2607,1
0.5830,1,0.1078,0.5944,0.1788`,
  ex2: `0,1,0,0
1,0,0,0
0.6718,0.2240,0.5805,0.1868
0.6951,0.6678,0.4753,0.3735`,
};

const $ = (id) => document.getElementById(id);
const output = $("output");

function show(text, isError = false) {
  output.textContent = text;
  output.className = isError ? "error" : "";
}

function guarded(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      show(String(e), true);
    }
  };
}

const matrix = () => $("matrix").value;
const algebra = () => $("algebra").value;

function runAnalyze() {
  const report = JSON.parse(analyze(matrix(), algebra()));
  const orbits = report.core.orbits.map((o) => `ρ=${o.rho} σ=${o.sigma}`).join(", ");
  $("summary").textContent =
    `spectrum [${report.spectrum.join(", ")}], σ_Λ = ${report.periods.sigma_lambda}, ` +
    `${report.core.census} extremals` + (orbits ? ` in orbits ${orbits}` : "");
  show(JSON.stringify(report, null, 2));
}

function runEigencone() {
  const k = Number($("power").value);
  const rhoText = $("rho").value.trim();
  const rho = rhoText === "" ? undefined : Number(rhoText);
  show(JSON.stringify(JSON.parse(eigencone(matrix(), algebra(), k, rho)), null, 2));
}

function table(rows) {
  const t = document.createElement("table");
  t.className = "power";
  for (const row of rows) {
    const tr = t.insertRow();
    for (const x of row) tr.insertCell().textContent = x.toPrecision(4);
  }
  return t;
}

function runPowers() {
  const seq = JSON.parse(power_sequence(matrix(), algebra(), Number($("count").value)));
  const box = $("powers");
  box.replaceChildren();
  for (const p of seq.powers) {
    const fig = document.createElement("figure");
    fig.style.display = "inline-block";
    const cap = document.createElement("figcaption");
    cap.textContent = `(A/${seq.scale.toPrecision(4)})^${p.k}`;
    fig.append(cap, table(p.rows));
    box.append(fig);
  }
  show("");
}

await init();
$("matrix").value = EXAMPLES.ex1;
$("load-ex1").onclick = () => ($("matrix").value = EXAMPLES.ex1);
$("load-ex2").onclick = () => ($("matrix").value = EXAMPLES.ex2);
$("run-analyze").onclick = guarded(runAnalyze);
$("run-eigencone").onclick = guarded(runEigencone);
$("run-powers").onclick = guarded(runPowers);
