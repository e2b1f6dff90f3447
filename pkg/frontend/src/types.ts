/** Shapes of the JSON payloads served by the analysis API. */

export interface BarData {
  token: string;
  id: number;
  p: number;
  tag: string;
  color: string; // #rrggbb
}

export interface EncodingData {
  kind: string;
  timestep: number;
  bars: BarData[];
  dominant_color: string;
  dominance: number;
  swatch: string;
}

export interface KindHint {
  key: string;
  name: string;
  layer: number | null;
  label: string;
  column: number;
  train_ppl: number | null;
  test_ppl: number | null;
}

export interface LegendEntry {
  tag: string;
  color: string;
}

export interface ModelInfo {
  vocab_size: number;
  hidden_size: number;
  num_layers: number;
  k_bars: number;
  k_dominance: number;
  kinds: KindHint[];
  legend: LegendEntry[];
  default_tag: string;
}

export interface AnalyzeResponse {
  sentence: string;
  tokens: string[];
  k_bars: number;
  k_dominance: number;
  layout_hints: KindHint[];
  grid: EncodingData[][];
  outputs: EncodingData[];
}
