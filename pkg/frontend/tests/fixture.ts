import { ERROR_COLUMN, GROUP_COLUMNS, NUMERIC_COLUMNS } from "../src/schema.js";

const OTHER_CONFIG = [
  "deformation",
  "budget_scaling",
  "max_evaluations",
  "sample_count",
  "rng",
  "master_seed",
  "trial_id",
  "best_parameters",
  "termination_reason",
];

export const HEADER = [...GROUP_COLUMNS, ...OTHER_CONFIG, ...NUMERIC_COLUMNS, ERROR_COLUMN].join(",");

function row(
  graphSize: number,
  p: number,
  trialId: number,
  metrics: number[],
  error = "",
): string {
  const cells = [
    String(graphSize),
    String(p),
    "nelder_mead",
    "edge_difference",
    "true",
    "add_remove",
    "200",
    String(200 * p * graphSize),
    String(graphSize * graphSize),
    "philox",
    "42",
    String(trialId),
    "0.5;1.5",
    "f_tol",
    ...(error ? NUMERIC_COLUMNS.map(() => "") : metrics.map(String)),
    error,
  ];
  return cells.join(",");
}

// Two groups: three V=3 p=1 trials, then two scored V=4 p=2 trials plus one
// failed trial that the aggregation must exclude and count.
// Metric order: evaluations, sample err, expectation err, classical cmp,
// improvement, infeasible fraction, then the four timing columns.
export const SIX_ROW_FIXTURE = [
  HEADER,
  row(3, 1, 0, [10, 1, 0.5, -1, 2, 0.1, 0.01, 0.02, 0.001, 1]),
  row(3, 1, 1, [20, 1, 0.25, -2, 4, 0.2, 0.01, 0.02, 0.001, 2]),
  row(3, 1, 2, [30, 1, 0.75, -3, 6, 0.3, 0.01, 0.02, 0.001, 3]),
  row(4, 2, 0, [100, 2, 0.5, -4, 1, 0.4, 0.05, 0.08, 0.002, 5]),
  row(4, 2, 1, [200, 4, 0.7, -6, 3, 0.6, 0.05, 0.08, 0.002, 7]),
  row(4, 2, 2, [], "RuntimeError: synthetic crash"),
].join("\n");

// Hand-computed statistics for the fixture (population standard deviation).
export const EXPECTED_GROUP_A = {
  trials: 3,
  excluded: 0,
  evalMean: 20,
  evalStd: Math.sqrt(200 / 3),
  sampleErrMean: 1,
  sampleErrStd: 0,
  expectationErrMean: 0.5,
  expectationErrStd: Math.sqrt(0.125 / 3),
  comparisonMean: -2,
  improvementMean: 4,
  infeasibleMean: 0.2,
  totalTimeMean: 2,
};

export const EXPECTED_GROUP_B = {
  trials: 2,
  excluded: 1,
  evalMean: 150,
  evalStd: 50,
  sampleErrMean: 3,
  comparisonMean: -5,
};

export const TAIL_FIXTURE = [
  "V,factorial,q,states,difference,ratio",
  "2,2,1,2,0,0",
  "3,6,3,8,2,0.33333333333333331",
  "4,24,5,32,8,0.33333333333333331",
  "5,120,7,128,8,0.066666666666666666",
  "6,720,10,1024,304,0.42222222222222222",
].join("\n");
