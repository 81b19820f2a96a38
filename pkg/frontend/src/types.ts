export type Point = Record<string, number | string>;

export interface VariableDef {
  name: string;
  kind?: "continuous" | "categorical";
  bounds?: [number, number];
  categories?: string[];
  transform?: "log" | "none";
  unit?: string;
}

export interface SpaceDef {
  variables: VariableDef[];
}

export interface ObservationRow {
  point: Point;
  size: number;
  feasible: boolean;
}

export interface CampaignView {
  id: string;
  created_at: number;
  target: number;
  strategy: string;
  tolerance: number;
  seed: number;
  space: SpaceDef;
  iteration: number;
  observations: ObservationRow[];
  pending_points: Point[];
  pending_suggestion: Point[];
  regret: number | null;
  regret_series: (number | null)[];
  stopped: boolean;
  stopped_reason: string | null;
  n_events: number;
}

export interface CampaignSummary {
  id: string;
  target: number;
  strategy: string;
  iteration: number;
  n_observations: number;
  stopped: boolean;
}

export interface GameFinal {
  player_auc: number;
  shadow_auc: number;
  player_regret: number | null;
  shadow_regret: number | null;
}

export interface GameView {
  id: string;
  target: number;
  q: number;
  iteration: number;
  iteration_limit: number;
  done: boolean;
  start_observations: ObservationRow[];
  player_history: ObservationRow[];
  player_regrets: (number | null)[];
  shadow_regrets: (number | null)[];
  space: SpaceDef;
  final?: GameFinal;
}

export interface SubmitResult {
  revealed: ObservationRow[];
  iteration: number;
  player_regret: number | null;
  shadow_regret: number | null;
  done: boolean;
  final?: GameFinal;
}
