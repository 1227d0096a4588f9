export { MissingColumnError, loadTable, parseTable, column } from "./csv.js";
export type { Table, Row } from "./csv.js";
export { loadStyle, DEFAULT_STYLE } from "./style.js";
export type { Style } from "./style.js";
export {
  chernoffFigure,
  kernelFigure,
  profileFigure,
  airyFigure,
  shocksFigure,
} from "./figures.js";
export { render, FIGURES, DEFAULT_FIGURES } from "./render.js";
