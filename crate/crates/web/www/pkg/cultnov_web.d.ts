/* tslint:disable */
/* eslint-disable */

/**
 * Equal-weight divergence between two texts and its `top` largest word
 * contributions, each attributed to the text where the word is more frequent.
 */
export function decompose(text_a: string, text_b: string, top: number): string;

/**
 * Scores of synthetic cultures placed at planted distances from one
 * knowledge base.
 */
export function gradient_curve(cultures: number, seed: bigint): string;

/**
 * Scores `variation` against the knowledge base `kb_json`, a JSON array of
 * texts. `lambda1` weights appearance (disappearance gets the remainder).
 */
export function score_texts(kb_json: string, variation: string, lambda1: number, window: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly decompose: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly gradient_curve: (a: number, b: bigint) => [number, number, number, number];
    readonly score_texts: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
