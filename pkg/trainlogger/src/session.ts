/**
 * Logging session for one training run.
 *
 * Appends one JSON line per logged score in the exact wire format the
 * evaluation engine ingests:
 *
 *   {"algorithm":..,"run":..,"epoch":..,"dataset":..,"split":..,"metric":..,"value":..}
 *
 * Lines are buffered and flushed in whole-line batches (and on close), so
 * a crash mid-session leaves a prefix of complete, valid lines. Bad values
 * fail fast at the call site instead of surfacing later at ingest.
 */

import fs from "node:fs";
import path from "node:path";

export type Split = "val" | "test";

export interface SessionOptions {
  /** Output file; created (with parent directories) on first flush. */
  path: string;
  algorithm: string;
  /** 1-based index of this training run. */
  run: number;
  /** Flush after this many buffered lines (default 64). */
  flushEvery?: number;
}

export class LogSession {
  readonly path: string;
  readonly algorithm: string;
  readonly run: number;
  private readonly flushEvery: number;
  private buffer: string[] = [];
  private closed = false;
  private dirReady = false;

  constructor(options: SessionOptions) {
    if (!Number.isInteger(options.run) || options.run < 1) {
      throw new RangeError(`run must be an integer >= 1, got ${options.run}`);
    }
    if (options.algorithm.length === 0) {
      throw new RangeError("algorithm name must be non-empty");
    }
    const flushEvery = options.flushEvery ?? 64;
    if (!Number.isInteger(flushEvery) || flushEvery < 1) {
      throw new RangeError(`flushEvery must be an integer >= 1, got ${flushEvery}`);
    }
    this.path = options.path;
    this.algorithm = options.algorithm;
    this.run = options.run;
    this.flushEvery = flushEvery;
  }

  /** Buffer one score observation; validates eagerly, throws on bad input. */
  logEpoch(epoch: number, dataset: string, split: Split, metric: string, value: number): void {
    if (this.closed) {
      throw new Error("session is closed");
    }
    if (!Number.isInteger(epoch) || epoch < 1) {
      throw new RangeError(`epoch must be an integer >= 1, got ${epoch}`);
    }
    if (split !== "val" && split !== "test") {
      throw new RangeError(`split must be "val" or "test", got ${String(split)}`);
    }
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new RangeError(`value must be a finite number, got ${value}`);
    }
    if (dataset.length === 0 || metric.length === 0) {
      throw new RangeError("dataset and metric must be non-empty");
    }
    this.buffer.push(
      JSON.stringify({
        algorithm: this.algorithm,
        run: this.run,
        epoch,
        dataset,
        split,
        metric,
        value,
      }),
    );
    if (this.buffer.length >= this.flushEvery) {
      this.flush();
    }
  }

  /** Append all buffered lines as one chunk of complete lines. */
  flush(): void {
    if (this.buffer.length === 0) {
      return;
    }
    if (!this.dirReady) {
      fs.mkdirSync(path.dirname(this.path), { recursive: true });
      this.dirReady = true;
    }
    fs.appendFileSync(this.path, this.buffer.join("\n") + "\n", "utf-8");
    this.buffer = [];
  }

  /** Flush remaining lines and refuse further logging. */
  close(): void {
    if (this.closed) {
      return;
    }
    this.flush();
    this.closed = true;
  }

  get isClosed(): boolean {
    return this.closed;
  }

  /** Lines accepted so far but not yet written. */
  get pending(): number {
    return this.buffer.length;
  }
}
