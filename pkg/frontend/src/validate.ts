/** Client-side run-form validation, mirroring the service's config rules.
 *
 * Catches bad configs before any request is sent: step sizes must be
 * positive multiples of 0.01 deg that divide their extents, sample counts
 * must be positive integers, run ids filesystem-safe, and required source
 * fields present with usable values.
 */

import type { ScanForm, SourceField } from "./types.js";

const RUN_ID = /^[A-Za-z0-9][A-Za-z0-9._-]*$/;

const toCentideg = (deg: number): number | null => {
  const c = Math.round(deg * 100);
  return Math.abs(deg * 100 - c) > 1e-6 ? null : c;
};

export interface FieldErrors {
  [field: string]: string;
}

export function validateRunId(runId: string): string | null {
  if (!RUN_ID.test(runId)) {
    return "use letters, digits, dot, dash or underscore";
  }
  return null;
}

export function validateScan(scan: ScanForm): FieldErrors {
  const errors: FieldErrors = {};
  const check = (field: string, step: number, extentField: string, extent: number) => {
    if (!(step > 0)) {
      errors[field] = "must be positive";
      return;
    }
    const stepC = toCentideg(step);
    if (stepC === null) {
      errors[field] = "must be a multiple of 0.01°";
      return;
    }
    if (!(extent > 0) || extent > 360 || toCentideg(extent) === null) {
      errors[extentField] = "must lie in (0, 360] at 0.01° resolution";
      return;
    }
    if (toCentideg(extent)! % stepC !== 0) {
      errors[field] = `must divide the ${extent}° extent`;
    }
  };
  check("theta_step", scan.theta_step, "theta_extent", scan.theta_extent);
  check("phi_step", scan.phi_step, "phi_extent", scan.phi_extent);
  if (!Number.isInteger(scan.samples_per_position) || scan.samples_per_position < 1) {
    errors.samples_per_position = "must be a positive integer";
  }
  return errors;
}

export function validateSourceConfig(
  fields: SourceField[],
  values: Record<string, string>,
): { errors: FieldErrors; config: Record<string, number | string> } {
  const errors: FieldErrors = {};
  const config: Record<string, number | string> = {};
  for (const field of fields) {
    const raw = (values[field.name] ?? "").trim();
    if (raw === "") {
      if (field.required) {
        errors[field.name] = "required";
      }
      continue; // omitted: the service applies the default
    }
    if (field.type === "str") {
      config[field.name] = raw;
      continue;
    }
    const value = Number(raw);
    if (!Number.isFinite(value)) {
      errors[field.name] = "must be a number";
    } else if (field.type === "int" && !Number.isInteger(value)) {
      errors[field.name] = "must be an integer";
    } else {
      config[field.name] = value;
    }
  }
  return { errors, config };
}

export function totalPositions(scan: ScanForm): number | null {
  if (Object.keys(validateScan(scan)).length > 0) {
    return null;
  }
  const columns = Math.round((scan.theta_extent * 100) / (scan.theta_step * 100));
  const levels = Math.round((scan.phi_extent * 100) / (scan.phi_step * 100)) + 1;
  return columns * levels;
}
