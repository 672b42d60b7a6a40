import init, { errorCurves, convergence, recurrence } from './pkg/rknq_demo.js';

const FLOOR = 1e-18;

// Log-scale y, linear or log x. Zero and non-finite values are dropped.
function plot(canvas, series, { logX = false, markers = [] } = {}) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext('2d');
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);

  const pts = series.map(s => s.x.map((x, i) => [x, s.y[i]])
    .filter(([x, y]) => Number.isFinite(y) && y > FLOOR && (!logX || x > 0)));
  const all = pts.flat();
  if (all.length === 0) return;
  const fx = logX ? Math.log10 : v => v;
  let [x0, x1] = [Math.min(...all.map(p => fx(p[0]))), Math.max(...all.map(p => fx(p[0])))];
  let y0 = Math.floor(Math.min(...all.map(p => Math.log10(p[1]))));
  let y1 = Math.ceil(Math.max(...all.map(p => Math.log10(p[1]))));
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;

  const pad = { l: 56, r: 12, t: 10, b: 28 };
  const sx = v => pad.l + (fx(v) - x0) / (x1 - x0) * (w - pad.l - pad.r);
  const sy = v => h - pad.b - (Math.log10(v) - y0) / (y1 - y0) * (h - pad.t - pad.b);

  ctx.font = '11px system-ui';
  ctx.fillStyle = '#555';
  ctx.strokeStyle = '#e4e4e4';
  for (let e = y0; e <= y1; e++) {
    const y = sy(10 ** e);
    ctx.beginPath(); ctx.moveTo(pad.l, y); ctx.lineTo(w - pad.r, y); ctx.stroke();
    ctx.fillText(`1e${e}`, 4, y + 4);
  }
  for (let k = 0; k <= 5; k++) {
    const v = x0 + (x1 - x0) * k / 5;
    const label = logX ? (10 ** v).toPrecision(2) : v.toPrecision(3);
    ctx.fillText(label, pad.l + (v - x0) / (x1 - x0) * (w - pad.l - pad.r) - 10, h - 8);
  }

  for (const m of markers) {
    ctx.strokeStyle = '#2a2';
    ctx.beginPath(); ctx.moveTo(sx(m), h - pad.b); ctx.lineTo(sx(m), h - pad.b - 8); ctx.stroke();
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.beginPath();
    pts[k].forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
    if (s.dots) pts[k].forEach(([x, y]) => ctx.fillRect(sx(x) - 2, sy(y) - 2, 4, 4));
  });
  if (Number.isFinite(series.level)) {
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = '#000';
    ctx.beginPath(); ctx.moveTo(pad.l, sy(series.level)); ctx.lineTo(w - pad.r, sy(series.level)); ctx.stroke();
    ctx.setLineDash([]);
  }
}

const max = a => a.reduce((m, v) => Math.max(m, v), 0);
const fmt = v => v.toExponential(2);

function wire(id, action) {
  const root = document.getElementById(id);
  const field = name => root.querySelector(`[name=${name}]`).value;
  const out = root.querySelector('.out');
  const go = () => {
    out.classList.remove('error');
    try {
      out.textContent = action(field, root.querySelector('canvas'));
    } catch (e) {
      out.classList.add('error');
      out.textContent = e.message ?? String(e);
    }
  };
  root.querySelector('button').addEventListener('click', go);
  go();
}

await init();

wire('curves', (f, canvas) => {
  const r = JSON.parse(errorCurves(f('problem'), +f('tolLocal'), +f('tolGlobal'), +f('xEnd')));
  const series = [
    { x: r.local.x, y: r.local.err_true, color: '#c33' },
    { x: r.quenched.x, y: r.quenched_est, color: '#999' },
    { x: r.quenched.x, y: r.quenched.err_true, color: '#36c' },
  ];
  series.level = r.tol_global;
  plot(canvas, series, { markers: r.quench_x });
  return `${r.norm} norm. RKN45 max ${fmt(max(r.local.err_true))} in ${r.local_steps} steps; ` +
    `RKN45Q10 max ${fmt(max(r.quenched.err_true))} in ${r.quenched_steps} steps with ${r.quench_x.length} quench${r.quench_x.length === 1 ? '' : 'es'}.`;
});

wire('convergence', (f, canvas) => {
  const r = JSON.parse(convergence(f('problem'), f('method'), +f('h0'), +f('halvings'), +f('xEnd')));
  plot(canvas, [{ x: r.rows.map(p => p.h), y: r.rows.map(p => p.error), color: '#36c', dots: true }], { logX: true });
  const orders = r.rows.filter(p => p.order !== null).map(p => p.order.toFixed(2));
  return `${r.method}: observed orders ${orders.join(', ') || 'n/a (errors at rounding level)'}.`;
});

wire('recurrence', (f, canvas) => {
  const r = JSON.parse(recurrence(f('method'), +f('h'), +f('xEnd')));
  plot(canvas, [
    { x: r.x, y: r.delta, color: '#c33' },
    { x: r.x, y: r.eps, color: '#36c' },
    { x: r.x, y: r.residual, color: '#999' },
  ]);
  return `${r.method}, h = ${r.h}: max |global error| ${fmt(max(r.delta))}, max residual ${fmt(max(r.residual))}.`;
});
