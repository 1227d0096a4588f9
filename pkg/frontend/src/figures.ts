import { Table, column } from "./csv.js";
import { Style } from "./style.js";
import { Scene, extent, frame, ramp } from "./svg.js";

/**
 * Figure renderers. Each is a pure function of already-parsed tables
 * and the style: same inputs, same SVG bytes. File access lives in
 * render.ts; nothing here touches the clock or a RNG.
 */

function band(
  scene: Scene,
  xs: (v: number) => number,
  ys: (v: number) => number,
  x: number[],
  lo: number[],
  hi: number[],
  color: string,
  opacity: number
) {
  const upper: Array<[number, number]> = x.map((v, i) => [xs(v), ys(hi[i])]);
  const lower: Array<[number, number]> = x.map((v, i) => [xs(v), ys(lo[i])]);
  scene.polygon(upper.concat(lower.reverse()), color, opacity);
}

function legend(scene: Scene, entries: Array<[string, string]>) {
  const st = scene.style;
  const x0 = st.width - st.margin.right - 150;
  let y = st.margin.top + 14;
  for (const [label, color] of entries) {
    scene.line(x0, y - 4, x0 + 22, y - 4, color, 2);
    scene.text(x0 + 28, y, label, "start");
    y += 16;
  }
}

/** Closed-form density curve over the Monte Carlo histogram, ±3 s.e. */
export function chernoffFigure(
  density: Table,
  hist: Table,
  style: Style,
  title: string
): string {
  const t = column(density, "t");
  const f = column(density, "density");
  const se = column(density, "std_error");
  const centers = column(hist, "center");
  const h = column(hist, "density");

  const scene = new Scene(style);
  const yMax = Math.max(...f.map((v, i) => v + 3 * se[i]), ...h);
  const { xs, ys } = frame(style, extent(t), [0, yMax * 1.05]);

  const barW = centers.length > 1 ? xs(centers[1]) - xs(centers[0]) : 8;
  for (let i = 0; i < centers.length; i++) {
    const px = xs(centers[i]) - barW / 2;
    scene.rect(px, ys(h[i]), barW, ys(0) - ys(h[i]), style.barColor, style.barOpacity);
  }
  band(
    scene,
    xs,
    ys,
    t,
    f.map((v, i) => Math.max(v - 3 * se[i], 0)),
    f.map((v, i) => v + 3 * se[i]),
    style.bandColor,
    style.bandOpacity
  );
  scene.path(
    t.map((v, i) => [xs(v), ys(Math.max(f[i], 0))]),
    style.lineColor,
    style.lineWidth
  );
  scene.axes(xs, ys, "t", "density");
  scene.title(title);
  legend(scene, [
    ["closed form", style.lineColor],
    ["MC histogram", style.barColor],
  ]);
  return scene.render();
}

/** Jump kernel magnitude as a heatmap over (rho_minus, rho_plus). */
export function kernelFigure(table: Table, style: Style): string {
  const rm = column(table, "rho_minus");
  const rp = column(table, "rho_plus");
  const n = column(table, "n");

  const rmVals = [...new Set(rm)].sort((a, b) => a - b);
  const rpVals = [...new Set(rp)].sort((a, b) => a - b);
  const rmIndex = new Map(rmVals.map((v, i) => [v, i]));
  const rpIndex = new Map(rpVals.map((v, i) => [v, i]));

  const scene = new Scene(style);
  const { xs, ys } = frame(
    style,
    extent(rmVals, 1 / Math.max(rmVals.length - 1, 1)),
    extent(rpVals, 1 / Math.max(rpVals.length - 1, 1))
  );
  const cw = rmVals.length > 1 ? xs(rmVals[1]) - xs(rmVals[0]) : 10;
  const ch = rpVals.length > 1 ? ys(rpVals[0]) - ys(rpVals[1]) : 10;
  const nMax = Math.max(...n.filter(Number.isFinite), 0) || 1;

  for (let i = 0; i < n.length; i++) {
    if (!Number.isFinite(n[i])) continue;
    const px = xs(rmVals[rmIndex.get(rm[i])!]) - cw / 2;
    const py = ys(rpVals[rpIndex.get(rp[i])!]) - ch / 2;
    scene.rect(px, py, cw, ch, ramp(style.heatmapLow, style.heatmapHigh, n[i] / nMax));
  }
  scene.axes(xs, ys, "rho_minus", "rho_plus");
  scene.title("jump kernel n(rho_minus, rho_plus)");
  return scene.render();
}

/** Direct-solve profile over the generator-simulated one, with jump markers. */
export function profileFigure(
  direct: Table,
  generator: Table,
  jumps: Table,
  style: Style
): string {
  const xd = column(direct, "x");
  const rd = column(direct, "rho");
  const xg = column(generator, "x");
  const rg = column(generator, "rho");
  const xj = column(jumps, "x");
  const before = column(jumps, "rho_before");
  const after = column(jumps, "rho_after");

  const scene = new Scene(style);
  const { xs, ys } = frame(style, extent(xd.concat(xg)), extent(rd.concat(rg), 0.05));

  scene.path(xd.map((v, i) => [xs(v), ys(rd[i])]), style.lineColor, style.lineWidth);
  scene.path(xg.map((v, i) => [xs(v), ys(rg[i])]), style.overlayColor, style.lineWidth);
  for (let i = 0; i < xj.length; i++) {
    const px = xs(xj[i]);
    scene.line(px, ys(before[i]), px, ys(after[i]), style.markerColor, 1);
    scene.circle(px, ys(after[i]), style.markerRadius, style.markerColor);
  }
  scene.axes(xs, ys, "x", "rho");
  scene.title("profile: direct solve vs generator simulation");
  legend(scene, [
    ["direct", style.lineColor],
    ["generator", style.overlayColor],
    ["jumps", style.markerColor],
  ]);
  return scene.render();
}

/** Airy identity: measured left side with ±3 s.e. against the series. */
export function airyFigure(identity: Table, style: Style): string {
  const t = column(identity, "t");
  const lhs = column(identity, "lhs");
  const rhs = column(identity, "rhs");
  const se = column(identity, "lhs_std_error");

  const scene = new Scene(style);
  const lo = lhs.map((v, i) => v - 3 * se[i]);
  const hi = lhs.map((v, i) => v + 3 * se[i]);
  const { xs, ys } = frame(style, extent(t), extent(lo.concat(hi).concat(rhs), 0.05));

  band(scene, xs, ys, t, lo, hi, style.bandColor, style.bandOpacity);
  scene.path(t.map((v, i) => [xs(v), ys(lhs[i])]), style.lineColor, style.lineWidth);
  scene.path(
    t.map((v, i) => [xs(v), ys(rhs[i])]),
    style.overlayColor,
    style.lineWidth,
    "5,3"
  );
  scene.axes(xs, ys, "t", "value");
  scene.title("spectral identity: measured vs series");
  legend(scene, [
    ["measured", style.lineColor],
    ["series", style.overlayColor],
  ]);
  return scene.render();
}

/** Shock count against refinement level for both path families. */
export function shocksFigure(census: Table, censusLevy: Table, style: Style): string {
  const scene = new Scene(style);
  const levels = column(census, "level").concat(column(censusLevy, "level"));
  const counts = column(census, "count").concat(column(censusLevy, "count"));
  const { xs, ys } = frame(style, extent(levels, 0.05), [
    0,
    Math.max(...counts, 1) * 1.1,
  ]);

  for (const [table, color] of [
    [census, style.lineColor],
    [censusLevy, style.overlayColor],
  ] as Array<[Table, string]>) {
    const lv = column(table, "level");
    const ct = column(table, "count");
    scene.path(lv.map((v, i) => [xs(v), ys(ct[i])]), color, style.lineWidth);
    for (let i = 0; i < lv.length; i++) {
      scene.circle(xs(lv[i]), ys(ct[i]), 2.5, color);
    }
  }
  scene.axes(xs, ys, "refinement level", "mean shock count");
  scene.title("shock count under grid refinement");
  legend(scene, [
    ["diffusive", style.lineColor],
    ["with jumps", style.overlayColor],
  ]);
  return scene.render();
}
