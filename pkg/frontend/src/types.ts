/** Wire types for the solver service.  The UI never recomputes any of these
 * numbers; everything displayed comes out of one of these payloads. */

export type DetectionClass = "pload" | "dload" | "fixed" | "roller" | "simple" | "moment";

export const SUPPORT_CLASSES: DetectionClass[] = ["fixed", "roller", "simple"];

/** Normalized YOLO-style box: center + size, origin top-left, y down. */
export type BBox = [cx: number, cy: number, w: number, h: number];

export interface Detection {
  class: DetectionClass;
  bbox: BBox;
  confidence: number;
}

export interface Annotation {
  bbox: BBox;
  text: string;
}

export interface DetectionFile {
  image: { width: number; height: number };
  detections: Detection[];
  annotations: Annotation[];
}

export interface BeamSpec {
  length: number;
  units?: { length: string; force: string };
  supports: { kind: string; position: number }[];
  point_loads?: { magnitude: number; position: number }[];
  distributed_loads?: { start: number; end: number;
                        start_intensity: number; end_intensity: number }[];
  moments?: { magnitude: number; position: number }[];
  section?: { youngs_modulus?: number; second_moment?: number };
}

export interface InferenceReport {
  spec: BeamSpec;
  warnings: string[];
  needs_review: string[];
}

export interface CriticalPoint {
  x: number;
  value: number;
  tag: "max" | "min" | "zero" | "jump";
}

export interface Series {
  kind: "shear" | "moment" | "deflection";
  unit: string;
  points: [number, number][];
  critical: CriticalPoint[];
}

export interface SolveResponse {
  solution: {
    reactions: { support: number; force: number; moment?: number }[];
    constants: { c1: number; c2: number };
    ei: number;
    ei_normalized: boolean;
  };
  series: { shear: Series; moment: Series; deflection: Series };
}

export interface ApiError {
  status: number;
  code: string;
  detail: string;
  field_path?: string;
}
