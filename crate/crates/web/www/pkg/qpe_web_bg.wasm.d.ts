/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_trialtrace_free: (a: number, b: number) => void;
export const ramsey_fringe: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const scaling_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const trace_trial: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const trialtrace_density: (a: number, b: number) => [number, number];
export const trialtrace_estimate: (a: number, b: number) => number;
export const trialtrace_phi_true: (a: number) => number;
export const trialtrace_points: (a: number) => number;
export const trialtrace_sharpness: (a: number, b: number) => number;
export const trialtrace_steps: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
