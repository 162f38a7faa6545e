/* tslint:disable */
/* eslint-disable */

/**
 * Sizes, fixed objects and the outcome of each pipeline stage.
 */
export function mn_summary(seed: number, max_base: number, max_fiber: number): string;

/**
 * The total category of a random spec: one column per base object, fiber
 * elements stacked by rank, Hasse edges inside fibers and the least lift of
 * each base morphism between them. Objects fixed by the fiber-top monad are
 * ringed, objects fixed by the fiber-bottom comonad are shaded.
 */
export function render_total_svg(seed: number, max_base: number, max_fiber: number): string;

/**
 * Transport across the relabeled opposite of the seeded instance
 * (`mode = "relabel-opposite"`) or across the built-in powerset duality
 * (`mode = "powerset-duality-demo"`, seed ignored).
 */
export function transport_summary(seed: number, max_base: number, max_fiber: number, mode: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly mn_summary: (a: number, b: number, c: number) => [number, number, number, number];
    readonly render_total_svg: (a: number, b: number, c: number) => [number, number, number, number];
    readonly transport_summary: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
