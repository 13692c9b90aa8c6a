pub const MAN_PAGE: &str = "\
DESCRIPTION
    tailind simulates panels of p studentized statistics T_i = n^{1/2} mean/sd,
    one per row of an n-column panel whose rows are dependent across i, and
    measures how level exceedences T_i > t behave: tail probabilities, block
    hit probabilities, exceedence clusters and the error rates of multiple
    testing rules. Every run writes plot-ready tables and a manifest.json with
    the effective configuration and a SHA-256 digest of every output.

SUBCOMMANDS
    calibrate     alpha = (1 - rho_max)/4, gamma = 1 + alpha, the threshold regime
                  t_min = (1 + eta)(2 log p / gamma)^{1/2}, the moving-average level,
                  and phi(t) = exp(-t^2/4) + p exp(-gamma t^2/2). No simulation.
    paper-table   Single-test level at P(T > t) = 1/p0 (Student t, n - 1 df) and
                  P(any exceedence) = 1 - (1 - q)^p for each p. No simulation.
    tails         Single and pairwise tail probabilities of R at the level s,
                  with standard errors and exponents -log P / (s^2/2).
    coupling      Large-block hit probabilities, dependent vs independent, the
                  bound 1 - sum |pi - pi'| and its shared-uniform realization.
    cluster       Per-replicate exceedences at t, block counts, within-kappa
                  clusters and the distance of the count law from Binomial(p, q).
    mtc           Benjamini-Hochberg, step-down FWER and single-threshold rules
                  on simulated panels; realized FWER and FDR.
    validate      Regime diagnostics (log p / n, rho < 1, weights, kappa <= log p
                  for moving averages). Always exits 0.
    replay        Re-run the configuration stored in a manifest and compare every
                  output digest.

OPTIONS
    --config PATH       configuration file; flags override it
    --p N, --n N        tests and group size (1e6 and 10_000 forms accepted)
    --kappa K           dependence range
    --rho-max R         largest lag correlation; flat correlation for gaussian-kdep
    --model M           iid | gaussian-kdep | moving-average
    --law L             standard-normal | standardized-pareto |
                        standardized-rademacher | two-point-with-atom
    --eta E             regime slack (default 0.05)
    --level X           explicit level: t for cluster and mtc, s for tails and coupling
    --reps N            Monte Carlo replicates (default 1000)
    --seed S            master seed (default 0)
    --jobs J            worker threads; outputs do not depend on it
    --out DIR           output directory (default tailind-<subcommand>)
    --format csv|json   table format (default csv)
    --set S.K=V         any configuration key, e.g. --set mtc.q=0.05

CONFIGURATION
    One key per line, `key = value`, grouped in [sections]; `#` starts a comment.
    [run]         kind reps jobs out format
    [panel]       p n sizes model kappa rho law tail_exponent delta offsets
                  weights weight_bounds seed replicate
    [level]       t eta rho_max variant (standard | moving-average) ma_constant
    [calibrate]   p (list) n
    [paper-table] p (list) n p0 rho_max
    [tails]       s rows (one-based list) pairs (one-based i:j list)
    [coupling]    s ell se_cap draws
    [cluster]     ell marginal (exact | student-t | normal)
    [mtc]         q a t marginal beta k
    [validate]    log_p_ratio (default 0.25)
    Row numbers in rows, pairs and offsets (row:value) are one-based.

ENVIRONMENT
    TAILIND_JOBS  default worker count when --jobs and [run] jobs are absent;
                  otherwise all available cores.

FILES
    <out>/<table>.csv   first line `# schema: tailind.<table>/1`, then a header
    <out>/<table>.json  {\"schema\": ..., \"columns\": [...], \"rows\": [...]}
    <out>/manifest.json schema tailind.manifest/1: config, version, seed,
                        timings and sha256 of every output

EXIT STATUS
    0  success
    1  I/O or other failure
    2  invalid configuration or usage; messages name `config:LINE` or
       `command line`
    3  a Monte Carlo guard refused to run (too few replicates); the guard is named
    4  replay found a digest mismatch

EXAMPLES
    tailind paper-table
    tailind calibrate --rho-max 0.1 --p 1e6
    tailind cluster --p 1e4 --n 200 --model gaussian-kdep --kappa 5 --rho-max 0.1 \\
        --reps 1e4 --seed 7 --out runs/cluster
    tailind mtc --config mtc.conf --set mtc.q=0.05
    tailind replay runs/cluster/manifest.json
";
