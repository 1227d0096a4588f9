import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { loadTable } from "./csv.js";
import { Style, DEFAULT_STYLE } from "./style.js";
import {
  airyFigure,
  chernoffFigure,
  kernelFigure,
  profileFigure,
  shocksFigure,
} from "./figures.js";

/**
 * Figure registry and the batch entry point. Each figure declares the
 * report files and columns it consumes; render() loads them from a
 * report directory and writes one SVG per requested figure.
 */

type FigureFn = (dir: string, style: Style) => string;

export const FIGURES: Record<string, FigureFn> = {
  chernoff: (dir, style) =>
    chernoffFigure(
      loadTable(dir, "chernoff_density.csv", ["t", "density", "std_error"]),
      loadTable(dir, "chernoff_mc_hist.csv", ["center", "density", "std_error"]),
      style,
      "generalized Chernoff density, quadratic drift"
    ),
  "chernoff-quartic": (dir, style) =>
    chernoffFigure(
      loadTable(dir, "chernoff_quartic_density.csv", ["t", "density", "std_error"]),
      loadTable(dir, "chernoff_quartic_mc_hist.csv", ["center", "density", "std_error"]),
      style,
      "generalized Chernoff density, quartic drift"
    ),
  kernel: (dir, style) =>
    kernelFigure(loadTable(dir, "kernel_table.csv", ["rho_minus", "rho_plus", "n"]), style),
  profile: (dir, style) =>
    profileFigure(
      loadTable(dir, "profile_direct.csv", ["x", "rho"]),
      loadTable(dir, "profile_generator.csv", ["x", "rho"]),
      loadTable(dir, "profile_jumps.csv", ["x", "rho_before", "rho_after"]),
      style
    ),
  airy: (dir, style) =>
    airyFigure(
      loadTable(dir, "airy_identity.csv", ["t", "lhs", "rhs", "lhs_std_error"]),
      style
    ),
  shocks: (dir, style) =>
    shocksFigure(
      loadTable(dir, "shocks_census.csv", ["level", "count"]),
      loadTable(dir, "shocks_census_levy.csv", ["level", "count"]),
      style
    ),
};

export const DEFAULT_FIGURES = Object.keys(FIGURES);

export interface RenderOptions {
  style?: Style;
  outDir?: string;
}

/** Render figureSet from reportDir's CSVs; returns the written paths. */
export function render(
  reportDir: string,
  figureSet: string[] = DEFAULT_FIGURES,
  options: RenderOptions = {}
): string[] {
  for (const name of figureSet) {
    if (!(name in FIGURES)) {
      throw new Error(
        `unknown figure "${name}" (known: ${DEFAULT_FIGURES.join(", ")})`
      );
    }
  }
  const style = options.style ?? DEFAULT_STYLE;
  const outDir = options.outDir ?? join(reportDir, "figures");
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const name of figureSet) {
    const svg = FIGURES[name](reportDir, style);
    const path = join(outDir, `${name}.svg`);
    writeFileSync(path, svg);
    written.push(path);
  }
  return written;
}
