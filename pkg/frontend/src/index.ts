export { parseTrace, TRACE_HEADER } from "./trace.js";
export type { Manifest, Trace, TraceRow } from "./trace.js";
export { buildFigure, REL_ERR_FLOOR } from "./figure.js";
export type { Figure, FigureSpec, Series, XAxis, YAxis } from "./figure.js";
export { renderSvg } from "./svg.js";
export { renderPng } from "./png.js";
