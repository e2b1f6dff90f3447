/** Thin fetch wrappers around the two service endpoints. */

import type { AnalyzeResponse, ModelInfo } from "./types.js";

export async function fetchModelInfo(base = ""): Promise<ModelInfo> {
  const response = await fetch(`${base}/api/model`);
  if (!response.ok) {
    throw new Error(`model info request failed: ${response.status}`);
  }
  return response.json();
}

export async function analyzeSentence(
  sentence: string,
  k?: number,
  signal?: AbortSignal,
  base = "",
): Promise<AnalyzeResponse> {
  const response = await fetch(`${base}/api/analyze`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(k === undefined ? { sentence } : { sentence, k }),
    signal,
  });
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      /* non-JSON error body; keep the status code */
    }
    throw new Error(detail);
  }
  return response.json();
}
