/* tslint:disable */
/* eslint-disable */

/**
 * Posterior densities after every click of one trial.
 */
export class TrialTrace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Density on `points` equispaced phases after click `step` (1-based;
     * 0 is the flat prior).
     */
    density(step: number): Float64Array;
    estimate(step: number): number;
    phi_true(): number;
    points(): number;
    sharpness(step: number): number;
    steps(): number;
}

export function ramsey_fringe(field: number, t1: number, t2: number, t_max: number, samples: number): Float64Array;

export function scaling_curve(adaptive: boolean, max_exponent: number, clicks: number, growth: number, f_a: number, f_i: number, t2_over_tau: number, trials: number, seed: number): Float64Array;

export function trace_trial(adaptive: boolean, max_exponent: number, clicks: number, growth: number, f_a: number, f_i: number, t2_over_tau: number, seed: number, trial: number, points: number): TrialTrace;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_trialtrace_free: (a: number, b: number) => void;
    readonly ramsey_fringe: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly scaling_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly trace_trial: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly trialtrace_density: (a: number, b: number) => [number, number];
    readonly trialtrace_estimate: (a: number, b: number) => number;
    readonly trialtrace_phi_true: (a: number) => number;
    readonly trialtrace_points: (a: number) => number;
    readonly trialtrace_sharpness: (a: number, b: number) => number;
    readonly trialtrace_steps: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
