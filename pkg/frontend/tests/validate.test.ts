import { describe, expect, it } from "vitest";

import type { ScanForm } from "../src/types.js";
import {
  totalPositions,
  validateRunId,
  validateScan,
  validateSourceConfig,
} from "../src/validate.js";

const scan = (overrides: Partial<ScanForm> = {}): ScanForm => ({
  theta_step: 10,
  phi_step: 10,
  theta_extent: 360,
  phi_extent: 180,
  samples_per_position: 10,
  ...overrides,
});

describe("validateScan", () => {
  it("accepts the default 10/10 grid", () => {
    expect(validateScan(scan())).toEqual({});
  });

  it("rejects a phi step that does not divide the extent", () => {
    const errors = validateScan(scan({ phi_step: 7 }));
    expect(errors.phi_step).toMatch(/divide/);
  });

  it("rejects a theta step that does not divide the extent", () => {
    expect(validateScan(scan({ theta_step: 7 }))).toHaveProperty("theta_step");
  });

  it("rejects non-positive steps", () => {
    expect(validateScan(scan({ theta_step: 0 }))).toHaveProperty("theta_step");
    expect(validateScan(scan({ phi_step: -5 }))).toHaveProperty("phi_step");
  });

  it("rejects steps finer than the positioner resolution", () => {
    expect(validateScan(scan({ theta_step: 0.005 }))).toHaveProperty("theta_step");
  });

  it("accepts fractional steps on the centidegree grid", () => {
    expect(validateScan(scan({ theta_step: 2.5, phi_step: 2.5 }))).toEqual({});
  });

  it("rejects out-of-range extents", () => {
    expect(validateScan(scan({ phi_extent: 400 }))).toHaveProperty("phi_extent");
    expect(validateScan(scan({ theta_extent: 0 }))).toHaveProperty("theta_extent");
  });

  it("rejects fractional or non-positive sample counts", () => {
    expect(validateScan(scan({ samples_per_position: 0 }))).toHaveProperty(
      "samples_per_position",
    );
    expect(validateScan(scan({ samples_per_position: 2.5 }))).toHaveProperty(
      "samples_per_position",
    );
  });
});

describe("validateRunId", () => {
  it("accepts simple ids", () => {
    expect(validateRunId("desk-50cm_1.a")).toBeNull();
  });

  it("rejects path-ish ids", () => {
    expect(validateRunId("../evil")).not.toBeNull();
    expect(validateRunId("")).not.toBeNull();
    expect(validateRunId("a b")).not.toBeNull();
  });
});

describe("validateSourceConfig", () => {
  const fields = [
    { name: "true_distance_cm", type: "float", required: true, default: null },
    { name: "seed", type: "int", required: false, default: 0 },
    { name: "label", type: "str", required: false, default: "" },
  ] as const;

  it("requires required fields", () => {
    const { errors } = validateSourceConfig([...fields], {});
    expect(errors.true_distance_cm).toBe("required");
  });

  it("coerces numbers and passes strings through", () => {
    const { errors, config } = validateSourceConfig([...fields], {
      true_distance_cm: "50.5",
      seed: "7",
      label: "bench",
    });
    expect(errors).toEqual({});
    expect(config).toEqual({ true_distance_cm: 50.5, seed: 7, label: "bench" });
  });

  it("omits blank optional fields so service defaults apply", () => {
    const { config } = validateSourceConfig([...fields], {
      true_distance_cm: "50",
      seed: "",
    });
    expect(config).toEqual({ true_distance_cm: 50 });
  });

  it("rejects non-numeric and non-integer values", () => {
    const { errors } = validateSourceConfig([...fields], {
      true_distance_cm: "far",
      seed: "1.5",
    });
    expect(errors.true_distance_cm).toMatch(/number/);
    expect(errors.seed).toMatch(/integer/);
  });
});

describe("totalPositions", () => {
  it("computes the serpentine position count", () => {
    expect(totalPositions(scan())).toBe(684); // 36 columns x 19 levels
    expect(totalPositions(scan({ theta_step: 90, phi_step: 90 }))).toBe(12);
  });

  it("is null for invalid grids", () => {
    expect(totalPositions(scan({ phi_step: 7 }))).toBeNull();
  });
});
