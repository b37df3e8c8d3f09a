/* tslint:disable */
/* eslint-disable */

/**
 * Full analysis plus drawing geometry for the box.
 */
export function analyze(economy_json: string): string;

/**
 * Tests whether some coalition blocks the allocation in which the first
 * cohort holds the aggregate amounts `(good0, good1)` (fraction strings)
 * and the second cohort holds the rest.
 */
export function block(economy_json: string, good0: string, good1: string): string;

/**
 * Certificate that the core holds a non-competitive allocation, or the
 * reason none could be built.
 */
export function certify(economy_json: string): string;

/**
 * Economy document for a named preset: `e0`, `e1` or `competitive_core`.
 */
export function preset(name: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze: (a: number, b: number) => [number, number];
    readonly block: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly certify: (a: number, b: number) => [number, number];
    readonly preset: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
