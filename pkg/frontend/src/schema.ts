/** Column names of the experiment-runner CSV this pipeline consumes. */

export const GROUP_COLUMNS = ["graph_size", "p", "method", "cost_mode", "directed"] as const;

export const METRIC_COLUMNS = [
  "Number of Evaluations",
  "Sample Error",
  "Expectation Error",
  "Classical Comparison",
  "Expectation Improvement",
  "Infeasible Sample Fraction",
] as const;

export const TIMING_COLUMNS = [
  "time_build_cost_s",
  "time_build_mixer_s",
  "time_evolve_mean_s",
  "time_total_s",
] as const;

export const ERROR_COLUMN = "error";

export const NUMERIC_COLUMNS = [...METRIC_COLUMNS, ...TIMING_COLUMNS] as const;

export type GroupColumn = (typeof GROUP_COLUMNS)[number];
export type NumericColumn = (typeof NUMERIC_COLUMNS)[number];

export interface GroupKey {
  graph_size: number;
  p: number;
  method: string;
  cost_mode: string;
  directed: string;
}

export interface AggregateRow {
  key: GroupKey;
  trials: number;
  excluded: number;
  mean: Record<NumericColumn, number>;
  std: Record<NumericColumn, number>;
}

/** Columns of the tail table emitted by `graphsim tail --csv`. */
export const TAIL_COLUMNS = ["V", "factorial", "q", "states", "difference", "ratio"] as const;
