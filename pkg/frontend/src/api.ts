/** Typed client for the dose-finding service. All dose-finding math lives
 * server-side; this module only moves JSON. */

import type {
  CohortResponse,
  DesignParams,
  MtdResult,
  ScenarioRecord,
  SimulationJob,
  TableResponse,
  TrialView,
  WhatIfResponse,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class Client {
  constructor(public base: string = "") {}

  health(): Promise<{ status: string }> {
    return request(this.base, "/api/health");
  }

  designTable(
    params: Omit<Partial<DesignParams>, "variant"> & {
      p_T: number;
      variant?: "mtpi" | "mtpi2" | "both";
    },
  ): Promise<TableResponse> {
    return request(this.base, "/api/designs/table", {
      method: "POST",
      body: JSON.stringify(params),
    });
  }

  createTrial(
    params: Partial<DesignParams> & { p_T: number },
    numDoses: number,
  ): Promise<{ id: string; starting_dose: number; version: number; trial: TrialView }> {
    return request(this.base, "/api/trials", {
      method: "POST",
      body: JSON.stringify({ params, num_doses: numDoses }),
    });
  }

  getTrial(id: string): Promise<TrialView> {
    return request(this.base, `/api/trials/${id}`);
  }

  postCohort(
    id: string,
    dltCount: number,
    cohortN: number,
    expectedVersion: number,
  ): Promise<CohortResponse> {
    return request(this.base, `/api/trials/${id}/cohorts`, {
      method: "POST",
      body: JSON.stringify({
        dlt_count: dltCount,
        cohort_n: cohortN,
        expected_version: expectedVersion,
      }),
    });
  }

  whatIf(id: string, dltCount: number, cohortN: number): Promise<WhatIfResponse> {
    return request(this.base, `/api/trials/${id}/whatif`, {
      method: "POST",
      body: JSON.stringify({ dlt_count: dltCount, cohort_n: cohortN }),
    });
  }

  finalize(
    id: string,
    expectedVersion: number,
  ): Promise<{ mtd_result: MtdResult; status: string; version: number; trial: TrialView }> {
    return request(this.base, `/api/trials/${id}/finalize`, {
      method: "POST",
      body: JSON.stringify({ expected_version: expectedVersion }),
    });
  }

  submitSimulation(body: {
    scenarios: ScenarioRecord[];
    n_trials: number;
    seed: number;
    designs: string[];
  }): Promise<{ id: string; status: string }> {
    return request(this.base, "/api/simulations", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSimulation(id: string): Promise<SimulationJob> {
    return request(this.base, `/api/simulations/${id}`);
  }

  /** Poll a simulation job until it settles. */
  async waitForSimulation(id: string, intervalMs = 250, timeoutMs = 120000): Promise<SimulationJob> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getSimulation(id);
      if (job.status === "done" || job.status === "failed") return job;
      if (Date.now() > deadline) throw new Error(`simulation ${id} timed out`);
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
