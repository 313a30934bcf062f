/* tslint:disable */
/* eslint-disable */

/**
 * Capacity multiplier of a Drake conductor from `t_base_f` up to `t_max_f`,
 * sampled at `steps` evenly spaced temperatures.
 */
export function derating_curve(t_base_f: number, t_max_f: number, steps: number): string;

/**
 * Trend report for a `STATION,DATE,TMAX` CSV in °F.
 */
export function fit_temperature_trend(csv_text: string, k: number, base_year: number): string;

/**
 * Solves the built-in Garver case for a scenario code such as `L,H`.
 */
export function solve_garver(code: string, gamma_low: number, gamma_high: number, enable_vis: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly derating_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly fit_temperature_trend: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly solve_garver: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
