/* tslint:disable */
/* eslint-disable */

export class Solution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    loss_history(): Float64Array;
    /**
     * `[x, y, z, u_ref, u_pred, ...]` at every test point.
     */
    points(): Float64Array;
    readonly l2_error: number;
}

/**
 * Points on `surface` as `[x, y, z, nx, ny, nz, H, ...]`. `me_iters = 0`
 * gives plain random points; parametric surfaces always give a grid.
 */
export function sample_points(surface: string, count: number, seed: bigint, me_iters: number): Float64Array;

/**
 * Trains one network on a manufactured problem and evaluates it on the test
 * points. `problem` is `"example1"` or `"example2"`.
 */
export function solve(problem: string, surface: string, test_count: number, train_count: number, width: number, hidden: number, max_iters: number, seed: bigint): Solution;

/**
 * Registered surface names, comma separated.
 */
export function surface_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_solution_free: (a: number, b: number) => void;
    readonly sample_points: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number, number];
    readonly solution_l2_error: (a: number) => number;
    readonly solution_loss_history: (a: number) => [number, number];
    readonly solution_points: (a: number) => [number, number];
    readonly solve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: bigint) => [number, number, number];
    readonly surface_names: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
