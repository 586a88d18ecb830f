import type { ApiClient } from "./api.js";
import { ApiRequestError } from "./api.js";
import type {
  Annotation,
  Detection,
  DetectionClass,
  DetectionFile,
  InferenceReport,
  SolveResponse,
} from "./types.js";
import { SUPPORT_CLASSES } from "./types.js";

export interface DetectionEdit {
  class?: DetectionClass;
  cx?: number;
  cy?: number;
  w?: number;
  h?: number;
}

export interface SessionView {
  loaded: boolean;
  imageUrl: string | null;
  detections: Detection[];
  annotations: Annotation[];
  report: InferenceReport | null;
  /** detection indices flagged for human review by the last inference */
  reviewIndices: Set<number>;
  dirty: boolean;
  /** diagrams may only be shown when this is true (stale-data guard) */
  chartsVisible: boolean;
  solve: SolveResponse | null;
  /** exact response body of the last solve, for byte-identical export */
  rawSolve: string | null;
  error: string | null;
  busy: boolean;
}

const END_EPS = 1e-6;

/** Horizontal anchors of a structural detection (dloads span two). */
function anchors(d: Detection): number[] {
  const [cx, , w] = d.bbox;
  return d.class === "dload" ? [cx - w / 2, cx + w / 2] : [cx];
}

function axisRange(detections: Detection[]): [number, number] {
  const xs = detections.flatMap(anchors);
  return [Math.min(...xs), Math.max(...xs)];
}

/** A fixed support is only legal at the leftmost or rightmost anchor. */
export function fixedSupportsAtEnds(detections: Detection[]): boolean {
  if (detections.length === 0) return true;
  const [lo, hi] = axisRange(detections);
  return detections
    .filter((d) => d.class === "fixed")
    .every((d) => Math.abs(d.bbox[0] - lo) < END_EPS || Math.abs(d.bbox[0] - hi) < END_EPS);
}

/**
 * Map the report's element references ("point_loads[0]", "supports[1]", ...)
 * back to detection indices.  Inference orders each category by its position
 * along the axis, which is monotone in the anchor x, so sorting detections
 * of the matching classes by anchor reproduces the numbering.
 */
export function reviewDetectionIndices(detections: Detection[], refs: string[]): Set<number> {
  const byCategory = new Map<string, number[]>();
  const categoryOf = (klass: DetectionClass): string =>
    klass === "pload" ? "point_loads"
    : klass === "dload" ? "distributed_loads"
    : klass === "moment" ? "moments"
    : "supports";
  detections.forEach((d, index) => {
    const category = categoryOf(d.class);
    const bucket = byCategory.get(category) ?? [];
    bucket.push(index);
    byCategory.set(category, bucket);
  });
  for (const bucket of byCategory.values()) {
    bucket.sort((a, b) => {
      const da = detections[a]!, db = detections[b]!;
      const ax = anchors(da), bx = anchors(db);
      return ax[0]! - bx[0]! || (ax[1] ?? 0) - (bx[1] ?? 0);
    });
  }
  const out = new Set<number>();
  for (const ref of refs) {
    const match = /^(\w+)\[(\d+)\]$/.exec(ref);
    if (!match) continue;
    const bucket = byCategory.get(match[1]!);
    const index = bucket?.[Number(match[2]!)];
    if (index !== undefined) out.add(index);
  }
  return out;
}

/**
 * The correction loop: an editable detection set, the report inferred from
 * it, and at most one solution derived from that report.
 *
 * Invariants maintained here:
 *  - any edit sets `dirty`, clears the solution, and hides the charts until
 *    a re-infer followed by a successful solve;
 *  - at most one request is in flight; responses to superseded requests are
 *    discarded (the token check).
 */
export class Session {
  private imageUrl: string | null = null;
  private detections: DetectionFile | null = null;
  private report: InferenceReport | null = null;
  private solveResponse: SolveResponse | null = null;
  private rawSolve: string | null = null;
  private dirty = false;
  private error: string | null = null;
  private busy = false;
  private token = 0;

  constructor(private readonly api: ApiClient,
              private readonly onChange: () => void = () => {}) {}

  view(): SessionView {
    const detections = this.detections?.detections ?? [];
    return {
      loaded: this.detections !== null,
      imageUrl: this.imageUrl,
      detections,
      annotations: this.detections?.annotations ?? [],
      report: this.report,
      reviewIndices: this.report
        ? reviewDetectionIndices(detections, this.report.needs_review)
        : new Set(),
      dirty: this.dirty,
      chartsVisible: this.solveResponse !== null && !this.dirty,
      solve: this.solveResponse,
      rawSolve: this.rawSolve,
      error: this.error,
      busy: this.busy,
    };
  }

  /** Parse the detections file; inference runs separately via reinfer(). */
  loadSession(imageUrl: string | null, detectionsText: string): boolean {
    this.token += 1;
    this.error = null;
    this.report = null;
    this.clearSolution();
    try {
      const parsed = JSON.parse(detectionsText) as DetectionFile;
      if (!parsed || !Array.isArray(parsed.detections)) {
        throw new Error("file has no detections array");
      }
      parsed.annotations = parsed.annotations ?? [];
      this.detections = parsed;
      this.imageUrl = imageUrl;
      this.dirty = true; // nothing inferred yet
      return true;
    } catch (err) {
      this.detections = null;
      this.error = `cannot load detections: ${(err as Error).message}`;
      return false;
    } finally {
      this.onChange();
    }
  }

  /** Apply a class/box edit; geometric rules are checked before applying. */
  editDetection(index: number, change: DetectionEdit): boolean {
    if (!this.detections) return false;
    const current = this.detections.detections[index];
    if (!current) return false;
    const [cx, cy, w, h] = current.bbox;
    const edited: Detection = {
      class: change.class ?? current.class,
      bbox: [change.cx ?? cx, change.cy ?? cy, change.w ?? w, change.h ?? h],
      confidence: current.confidence,
    };
    const candidate = this.detections.detections.slice();
    candidate[index] = edited;
    if (!fixedSupportsAtEnds(candidate)) {
      this.error = "fixed_not_at_end: a fixed support must sit at a beam end";
      this.onChange();
      return false;
    }
    this.detections.detections[index] = edited;
    this.markEdited();
    return true;
  }

  editAnnotation(index: number, text: string): boolean {
    if (!this.detections || !this.detections.annotations[index]) return false;
    this.detections.annotations[index] = {
      ...this.detections.annotations[index]!,
      text,
    };
    this.markEdited();
    return true;
  }

  /** Pin a magnitude to a load by writing an annotation onto its box. */
  setLoadMagnitude(detectionIndex: number, value: number): boolean {
    if (!this.detections) return false;
    const detection = this.detections.detections[detectionIndex];
    if (!detection) return false;
    const force = this.report?.spec.units?.force ?? "kN";
    const length = this.report?.spec.units?.length ?? "m";
    const unit = detection.class === "dload" ? `${force}/${length}`
      : detection.class === "moment" ? `${force}·${length}`
      : force;
    const [cx, cy] = detection.bbox;
    const text = `${value} ${unit}`;
    const existing = this.detections.annotations.findIndex(
      (a) => a.bbox[0] === cx && a.bbox[1] === cy);
    if (existing >= 0) {
      this.detections.annotations[existing] = {
        ...this.detections.annotations[existing]!,
        text,
      };
    } else {
      this.detections.annotations.push({ bbox: [cx, cy, 0.05, 0.03], text });
    }
    this.markEdited();
    return true;
  }

  async reinfer(): Promise<boolean> {
    if (!this.detections) return false;
    const token = this.beginRequest();
    try {
      const report = await this.api.infer(this.detections);
      if (!this.commit(token)) return false;
      this.report = report;
      this.dirty = false;
      this.error = report.warnings.find((w) => w.startsWith("fatal:")) ?? null;
      return this.error === null;
    } catch (err) {
      if (!this.commit(token)) return false;
      this.report = null;
      this.error = describe(err);
      return false;
    } finally {
      this.onChange();
    }
  }

  /** pre: a current (not dirty) report; otherwise the call is refused. */
  async solve(samples = 600): Promise<boolean> {
    if (!this.report || this.dirty) {
      this.error = "re-run inference before solving";
      this.onChange();
      return false;
    }
    const token = this.beginRequest();
    try {
      const { parsed, raw } = await this.api.solveRaw(this.report.spec, samples);
      if (!this.commit(token)) return false;
      this.solveResponse = parsed;
      this.rawSolve = raw;
      this.error = null;
      return true;
    } catch (err) {
      if (!this.commit(token)) return false;
      this.clearSolution();
      this.error = describe(err);
      return false;
    } finally {
      this.onChange();
    }
  }

  private markEdited(): void {
    this.token += 1; // invalidate in-flight responses
    this.dirty = true;
    this.clearSolution();
    this.error = null;
    this.onChange();
  }

  private clearSolution(): void {
    this.solveResponse = null;
    this.rawSolve = null;
  }

  private beginRequest(): number {
    this.token += 1;
    this.busy = true;
    return this.token;
  }

  /** False when the session moved on while the request was in flight. */
  private commit(token: number): boolean {
    if (token !== this.token) return false;
    this.busy = false;
    return true;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiRequestError) {
    return err.fieldPath ? `${err.code} at ${err.fieldPath}: ${err.message}`
      : `${err.code}: ${err.message}`;
  }
  return (err as Error).message ?? String(err);
}
