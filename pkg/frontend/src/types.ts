/** Wire types mirroring the service's JSON responses (croprisk-api/1). */

export interface Meta {
  api_schema: string;
  version: string;
  manifest_hash?: string;
  seed?: number | null;
  scenarios?: string[];
  years?: number[];
  trial_cap?: number;
}

export interface HistogramData {
  edges: number[];
  counts: number[];
  total: number;
}

export interface AggregateRow {
  scenario: string;
  year: number;
  unit_mean_yield_change: number;
  unit_loss_probability: number;
  avg_covered_loss_severity: number | null;
}

export interface OutcomeRow {
  scenario: string;
  geohash4: string;
  year: number;
  claims_rate: number;
  mean_severity_given_claim: number | null;
  mean_yield_change: number;
  n_trials: number;
  p_value: number | null;
  significant: boolean | null;
  acres: number;
}

export interface NeighborhoodRow extends OutcomeRow {
  lat: number | null;
  lon: number | null;
  climate: Record<string, number>;
}

export interface NeighborhoodsResponse {
  scenario: string;
  year: number | null;
  rows: NeighborhoodRow[];
  counterfactual_scenario?: string;
  counterfactual_rows?: NeighborhoodRow[];
}

export interface SimulateRequest {
  scenario: string;
  trials: number;
  seed: number;
  coverage_pct: number;
  year?: number;
  precision?: number;
}

export interface SimulateResponse {
  request: SimulateRequest;
  treatment: string;
  counterfactual: string;
  aggregates: AggregateRow[];
  outcomes: OutcomeRow[];
  pct_acreage_significant: number;
  p_threshold: number;
  n_tests: number;
  histograms: Record<string, Record<string, HistogramData>>;
}

export interface LossVerdict {
  threshold: number;
  claim: boolean;
  loss: number;
  severity: number;
  history_std?: number;
}

export interface ClaimsEntry {
  y: number;
  y_expected: number;
  percent: LossVerdict;
  stddev: LossVerdict | null;
  index?: number;
}

export interface ClaimsResponse {
  final: ClaimsEntry;
  per_year: ClaimsEntry[];
  c_pct: number;
  c_sigma: number;
  window: number;
}

export interface LeaderboardRow {
  rank: number;
  layers: number[];
  dropout: number;
  l2: number;
  dropped_attribute: string | null;
  mae_mean_val: number;
  mae_std_val: number;
  n_parameters: number;
  status: string;
}

export interface SweepSurfaceResponse {
  rows: LeaderboardRow[];
  total: number;
}

export interface RatesResponse {
  model: string;
  coverage_pct: number;
  acres: number;
  volatility: number;
  premium_per_acre: number;
  total_premium: number;
  subsidy_pct: number;
  subsidy_amount: number;
  producer_premium: number;
}
