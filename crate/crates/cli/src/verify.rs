//! Named verification bundles: self-contained re-checks of the library's
//! headline behaviors, runnable from the command line with adjustable bounds.

use clap::{Args, ValueEnum};
use num::integer::gcd;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use chipfire::chip::{can_fire, fire_legal, Configuration, FiringVector};
use chipfire::enumerate::{self, binomial};
use chipfire::reach::{self, Limits};
use chipfire::{Graph, Int, IntConfiguration};

use crate::{load_graph, CliResult, Failure};

#[derive(Args)]
pub struct VerifyArgs {
    /// Which bundle to run
    #[arg(value_enum)]
    bundle: Bundle,
    /// Largest cycle size for the cycle-family bundles
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Largest chip total to test
    #[arg(long, default_value_t = 20)]
    cmax: u64,
    /// Trial count for the randomized bundles
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Seed for the randomized bundles
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Graph for the blocks bundle
    #[arg(long, default_value = "complete:4")]
    graph: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bundle {
    /// Triangle debt-reachable counts match the two-branch quadratic formula
    TriangleDebt,
    /// Triangle legally-reachable counts: debt count, minus 2 when 3 | c
    TriangleReachable,
    /// On an n-cycle every chip total splits into exactly n blocks
    CycleBlocks,
    /// On an n-cycle the labels of c·e_i are pairwise distinct iff gcd(c,n)=1
    CycleGcdLabels,
    /// On an n-cycle with gcd(c,n)=1 the debt count is binom(c+n-1,n-1)/n
    CycleDebtBinomial,
    /// On an n-cycle the debt count minus binom(c+n-1,n-1)/n depends only
    /// on c mod n once c >= n
    CycleDebtOffset,
    /// most_fired lands on the same stuck point under random firing orders
    GreedyOrder,
    /// Debt-reachable pairs become legally reachable after granting every
    /// vertex deg(v) extra chips
    DegreeShift,
    /// Block counts are nondecreasing in c and never exceed the
    /// spanning-tree count
    Blocks,
}

struct Check {
    label: String,
    pass: bool,
    detail: Option<String>,
}

impl Check {
    fn pass(label: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            pass: true,
            detail: None,
        }
    }

    fn fail(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            pass: false,
            detail: Some(detail.into()),
        }
    }

    fn from_first_failure(label: impl Into<String>, failure: Option<String>) -> Self {
        match failure {
            None => Check::pass(label),
            Some(detail) => Check::fail(label, detail),
        }
    }
}

pub fn cmd_verify(args: VerifyArgs, limits: &Limits) -> CliResult<()> {
    let checks = match args.bundle {
        Bundle::TriangleDebt => triangle_debt(&args, limits)?,
        Bundle::TriangleReachable => triangle_reachable(&args, limits)?,
        Bundle::CycleBlocks => cycle_blocks(&args, limits)?,
        Bundle::CycleGcdLabels => cycle_gcd_labels(&args)?,
        Bundle::CycleDebtBinomial => cycle_debt_binomial(&args, limits)?,
        Bundle::CycleDebtOffset => cycle_debt_offset(&args, limits)?,
        Bundle::GreedyOrder => greedy_order(&args)?,
        Bundle::DegreeShift => degree_shift(&args)?,
        Bundle::Blocks => blocks(&args, limits)?,
    };
    let mut failures = 0usize;
    for check in &checks {
        if check.pass {
            println!("ok - {}", check.label);
        } else {
            failures += 1;
            match &check.detail {
                Some(detail) => println!("FAILED - {}: {detail}", check.label),
                None => println!("FAILED - {}", check.label),
            }
        }
    }
    if failures == 0 {
        println!("{} check(s) passed", checks.len());
        Ok(())
    } else {
        Err(Failure::verification(format!(
            "{failures} of {} check(s) failed",
            checks.len()
        )))
    }
}

/// Debt-reachable count from (c,0,0) on the triangle:
/// (c^2+3c+6)/6 when 3 | c, else (c^2+3c+2)/6.
fn triangle_debt_formula(c: u64) -> Int {
    let c = Int::from(c);
    let numerator = c.clone() * c.clone() + Int::from(3) * c.clone()
        + if (c % 3) == Int::from(0) {
            Int::from(6)
        } else {
            Int::from(2)
        };
    numerator / Int::from(6)
}

fn concentrated(g: &Graph, c: u64) -> IntConfiguration {
    Configuration::concentrated(g.vertex_count(), 0, Int::from(c)).expect("vertex 0 exists")
}

fn triangle_debt(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let g = Graph::cycle(3)?;
    let mut first_failure = None;
    for c in 0..=args.cmax {
        let counted = enumerate::count_debt_reachable::<Int>(&g, &concentrated(&g, c), limits)?;
        let expected = triangle_debt_formula(c);
        if counted != expected {
            first_failure = Some(format!("c={c}: counted {counted}, formula gives {expected}"));
            break;
        }
    }
    Ok(vec![Check::from_first_failure(
        format!(
            "triangle debt counts match the branch formulas for c in 0..={}",
            args.cmax
        ),
        first_failure,
    )])
}

fn triangle_reachable(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let g = Graph::cycle(3)?;
    let mut first_failure = None;
    for c in 1..=args.cmax {
        let counted = enumerate::count_reachable::<Int>(&g, &concentrated(&g, c), limits)?;
        let gap = if c % 3 == 0 { 2 } else { 0 };
        let expected = triangle_debt_formula(c) - Int::from(gap);
        if counted != expected {
            first_failure = Some(format!("c={c}: counted {counted}, expected {expected}"));
            break;
        }
    }
    Ok(vec![Check::from_first_failure(
        format!(
            "triangle reachable counts equal debt counts minus 2·[3|c] for c in 1..={}",
            args.cmax
        ),
        first_failure,
    )])
}

fn cycle_sizes(args: &VerifyArgs) -> CliResult<std::ops::RangeInclusive<usize>> {
    if args.n < 3 {
        return Err(Failure::usage(format!(
            "cycle bundles need --n >= 3, got {}",
            args.n
        )));
    }
    Ok(3..=args.n)
}

fn cycle_blocks(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in cycle_sizes(args)? {
        let g = Graph::cycle(n)?;
        let mut first_failure = None;
        for c in 1..=args.cmax {
            let partition = reach::block_partition::<Int>(&g, c, limits)?;
            if partition.block_count() != n {
                first_failure = Some(format!(
                    "c={c}: {} blocks, expected {n}",
                    partition.block_count()
                ));
                break;
            }
        }
        checks.push(Check::from_first_failure(
            format!(
                "{n}-cycle: every total c in 1..={} splits into exactly {n} blocks",
                args.cmax
            ),
            first_failure,
        ));
    }
    Ok(checks)
}

fn cycle_gcd_labels(args: &VerifyArgs) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in cycle_sizes(args)? {
        let g = Graph::cycle(n)?;
        let mut first_failure = None;
        for c in 1..=args.cmax {
            let labels: Vec<_> = (0..n)
                .map(|v| {
                    let config =
                        Configuration::concentrated(n, v, Int::from(c)).expect("vertex in range");
                    reach::residue_label(&g, &config)
                })
                .collect();
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            let all_distinct = sorted.len() == n;
            let coprime = gcd(c, n as u64) == 1;
            if all_distinct != coprime {
                first_failure = Some(format!(
                    "c={c}: {} distinct labels among {n} vertices, gcd(c,n)={}",
                    sorted.len(),
                    gcd(c, n as u64)
                ));
                break;
            }
        }
        checks.push(Check::from_first_failure(
            format!(
                "{n}-cycle: labels of c·e_i pairwise distinct iff gcd(c,{n})=1, c in 1..={}",
                args.cmax
            ),
            first_failure,
        ));
    }
    Ok(checks)
}

fn cycle_debt_binomial(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in cycle_sizes(args)? {
        let g = Graph::cycle(n)?;
        let mut first_failure = None;
        for c in (1..=args.cmax).filter(|&c| gcd(c, n as u64) == 1) {
            let counted = enumerate::count_debt_reachable::<Int>(&g, &concentrated(&g, c), limits)?;
            // Integer form of count = binom(c+n-1, n-1)/n.
            let scaled = counted.clone() * Int::from(n);
            let expected: Int = binomial(c + n as u64 - 1, n as u64 - 1);
            if scaled != expected {
                first_failure = Some(format!(
                    "c={c}: {n}·count = {scaled}, binom(c+n-1,n-1) = {expected}"
                ));
                break;
            }
        }
        checks.push(Check::from_first_failure(
            format!(
                "{n}-cycle: debt count·{n} = binom(c+{n}-1,{n}-1) when gcd(c,{n})=1, c in 1..={}",
                args.cmax
            ),
            first_failure,
        ));
    }
    Ok(checks)
}

fn cycle_debt_offset(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in cycle_sizes(args)? {
        let g = Graph::cycle(n)?;
        let mut first_failure = None;
        // Integer form: n·count − binom(c+n−1, n−1) must depend only on
        // c mod n once c >= n.
        let mut offsets: Vec<Option<Int>> = vec![None; n];
        for c in n as u64..=args.cmax {
            let counted = enumerate::count_debt_reachable::<Int>(&g, &concentrated(&g, c), limits)?;
            let offset = counted * Int::from(n) - binomial::<Int>(c + n as u64 - 1, n as u64 - 1);
            let slot = &mut offsets[(c % n as u64) as usize];
            match slot {
                None => *slot = Some(offset),
                Some(seen) => {
                    if *seen != offset {
                        first_failure = Some(format!(
                            "c={c}: offset {offset} differs from {seen} seen earlier in the same residue class"
                        ));
                        break;
                    }
                }
            }
        }
        checks.push(Check::from_first_failure(
            format!(
                "{n}-cycle: n·count − binom(c+n-1,n-1) depends only on c mod {n} for c in {n}..={}",
                args.cmax
            ),
            first_failure,
        ));
    }
    Ok(checks)
}

fn random_graph_pool() -> Vec<Graph> {
    vec![
        Graph::cycle(4).expect("valid family size"),
        Graph::path(4).expect("valid family size"),
        Graph::complete(4).expect("valid family size"),
        Graph::cycle(5).expect("valid family size"),
    ]
}

/// Replays the greedy loop firing a uniformly random eligible vertex each
/// step, using only single legal fires.
fn most_fired_random_order(
    g: &Graph,
    from: &IntConfiguration,
    budget: &[u64],
    rng: &mut ChaCha8Rng,
) -> (IntConfiguration, Vec<u64>) {
    let mut config = from.clone();
    let mut remaining = budget.to_vec();
    loop {
        let eligible: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| remaining[v] > 0 && can_fire(g, &config, v))
            .collect();
        if eligible.is_empty() {
            return (config, remaining);
        }
        let v = eligible[rng.gen_range(0..eligible.len())];
        config = fire_legal(g, &config, v).expect("eligible vertex can fire");
        remaining[v] -= 1;
    }
}

fn greedy_order(args: &VerifyArgs) -> CliResult<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let pool = random_graph_pool();
    let mut first_failure = None;
    'trials: for trial in 0..args.trials {
        let g = &pool[rng.gen_range(0..pool.len())];
        let n = g.vertex_count();
        let chips: Vec<Int> = (0..n).map(|_| Int::from(rng.gen_range(0..10))).collect();
        let budget: Vec<u64> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let from = Configuration::new(chips).expect("nonnegative entries");
        let budget_vector = FiringVector::new(budget.iter().map(|&b| Int::from(b)).collect());
        let reference = reach::most_fired(g, &from, &budget_vector);
        for _ in 0..10 {
            let (config, remaining) = most_fired_random_order(g, &from, &budget, &mut rng);
            let remaining_vector =
                FiringVector::new(remaining.iter().map(|&b| Int::from(b)).collect());
            if config != reference.configuration || remaining_vector != reference.remaining {
                first_failure = Some(format!(
                    "trial {trial}: random order reached {config} with {remaining_vector} left, deterministic order {} with {} left",
                    reference.configuration, reference.remaining
                ));
                break 'trials;
            }
        }
    }
    Ok(vec![Check::from_first_failure(
        format!(
            "stuck point is independent of firing order across {} random trials × 10 replays",
            args.trials
        ),
        first_failure,
    )])
}

fn degree_shift(args: &VerifyArgs) -> CliResult<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let pool = random_graph_pool();
    let mut first_failure = None;
    let mut checked = 0;
    while checked < args.trials {
        let g = &pool[rng.gen_range(0..pool.len())];
        let n = g.vertex_count();
        let total: u64 = rng.gen_range(0..8);
        let from = random_composition(n, total, &mut rng);
        let to = random_composition(n, total, &mut rng);
        if reach::debt_reachability_vector(g, &from, &to).is_none() {
            continue;
        }
        let shift = |base: &IntConfiguration| {
            Configuration::new(
                base.chips()
                    .iter()
                    .enumerate()
                    .map(|(v, chips)| chips.clone() + Int::from(g.degree(v) as u64))
                    .collect(),
            )
            .expect("nonnegative entries")
        };
        if !reach::is_reachable(g, &shift(&from), &shift(&to)) {
            first_failure = Some(format!(
                "{from} and {to} are debt-equivalent but the degree-shifted pair is not legally reachable"
            ));
            break;
        }
        checked += 1;
    }
    Ok(vec![Check::from_first_failure(
        format!(
            "{} debt-reachable pairs stay reachable after granting every vertex deg(v) chips",
            args.trials
        ),
        first_failure,
    )])
}

fn random_composition(n: usize, total: u64, rng: &mut ChaCha8Rng) -> IntConfiguration {
    let mut chips = vec![0u64; n];
    for _ in 0..total {
        chips[rng.gen_range(0..n)] += 1;
    }
    Configuration::new(chips.into_iter().map(Int::from).collect()).expect("nonnegative entries")
}

fn blocks(args: &VerifyArgs, limits: &Limits) -> CliResult<Vec<Check>> {
    let g = load_graph(&args.graph)?;
    let kappa = g.spanning_tree_count::<Int>();
    let mut previous = 0usize;
    let mut monotone_failure = None;
    let mut bound_failure = None;
    let mut size_failure = None;
    for c in 0..=args.cmax {
        let partition = reach::block_partition::<Int>(&g, c, limits)?;
        let count = partition.block_count();
        if count < previous && monotone_failure.is_none() {
            monotone_failure = Some(format!("b_{c} = {count} < b_{} = {previous}", c - 1));
        }
        if Int::from(count) > kappa && bound_failure.is_none() {
            bound_failure = Some(format!("b_{c} = {count} exceeds {kappa}"));
        }
        let total: Int = Int::from(partition.configuration_count());
        let expected: Int = enumerate::composition_count(g.vertex_count(), c);
        if total != expected && size_failure.is_none() {
            size_failure = Some(format!(
                "c={c}: block sizes sum to {total}, not {expected}"
            ));
        }
        previous = count;
    }
    Ok(vec![
        Check::from_first_failure(
            format!(
                "{}: block count is nondecreasing for c in 0..={}",
                args.graph, args.cmax
            ),
            monotone_failure,
        ),
        Check::from_first_failure(
            format!(
                "{}: block count never exceeds the spanning-tree count {kappa}",
                args.graph
            ),
            bound_failure,
        ),
        Check::from_first_failure(
            format!("{}: block sizes sum to the configuration count", args.graph),
            size_failure,
        ),
    ])
}
