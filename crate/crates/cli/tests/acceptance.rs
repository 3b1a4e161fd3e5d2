//! Acceptance suite. Each criterion prints one PASS or FAIL line with its
//! measured worst case and wall time; the process exits nonzero if any fails.

use std::fmt::Write as _;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use measure_fourier::expansion::{deviation_identity, deviation_with_coefficients};
use measure_fourier::region::default_zeta;
use measure_fourier::{
    bessel_gap, cauchy_schwarz_gap, corollary_check, gram_schmidt, integrate, mean_square_deviation,
    parse_field, parseval_residual, partitioned_parseval, product_criterion_check, sign_partition,
    CellSeeds, Expansion, IntegratorSettings, OrthogonalFamily, Region, ScalarField, Verdict,
    Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const UNIT_TOL: f64 = 1e-9;
const DISK_TOL: f64 = 1e-3;
const MONOMIAL_TOL: f64 = 1e-9;
const ANCHOR_TOL: f64 = 1e-6;
const LINEAR_PARTITION_TOL: f64 = 1e-6;
const ABS_PARTITION_TOL: f64 = 1e-6;
const PRODUCT_PARTITION_TOL: f64 = 1e-3;
const COMONOTONE_MARGIN: f64 = 0.08;
const PERTURBATION: f64 = 0.01;

// Instance counts.
const CS_INSTANCES: usize = 100;
const BESSEL_INSTANCES: usize = 50;
const PARSEVAL_INSTANCES: usize = 20;
const COROLLARY_INSTANCES: usize = 50;
const OPTIMALITY_INSTANCES: usize = 20;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "integrator oracles", budget: secs(10), run: integrator_oracles },
        Criterion { id: 2, name: "cauchy-schwarz gap", budget: secs(60), run: cauchy_schwarz },
        Criterion { id: 3, name: "bessel/deviation identity", budget: secs(60), run: bessel_identity },
        Criterion { id: 4, name: "closed-form deviation anchor", budget: secs(5), run: deviation_anchor },
        Criterion { id: 5, name: "parseval exactness", budget: secs(60), run: parseval_exactness },
        Criterion { id: 6, name: "partitioned parseval", budget: secs(30), run: partitioned },
        Criterion { id: 7, name: "product criterion", budget: secs(120), run: product_criterion },
        Criterion { id: 8, name: "coefficient optimality", budget: secs(60), run: optimality },
        Criterion { id: 9, name: "determinism", budget: None, run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("over budget of {} s", b.as_secs())),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {}: {} ({:.2} s) {detail}", c.id, c.name, took.as_secs_f64());
        failed += usize::from(outcome.is_err());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn settings() -> IntegratorSettings {
    IntegratorSettings::default()
}

fn field(src: &str, dim: usize) -> ScalarField {
    parse_field(src, dim).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn floored(src: &str, dim: usize, floor: f64) -> ScalarField {
    field(src, dim).with_floor(floor).unwrap()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn expansion(f: &ScalarField, seeds: &[ScalarField], region: &Region) -> Result<Expansion, String> {
    let s = settings();
    let w = Weight::reciprocal(f).map_err(|e| e.to_string())?;
    let fam = gram_schmidt(seeds, &w, region, &s).map_err(|e| e.to_string())?;
    Expansion::new(f, fam, &s).map_err(|e| e.to_string())
}

fn family(f: &ScalarField, seeds: &[ScalarField], region: &Region) -> Result<OrthogonalFamily, String> {
    let w = Weight::reciprocal(f).map_err(|e| e.to_string())?;
    gram_schmidt(seeds, &w, region, &settings()).map_err(|e| e.to_string())
}

fn coord(rng: &mut ChaCha8Rng, dim: usize) -> usize {
    rng.gen_range(1..=dim)
}

/// A positive field on the unit box with a known floor: constant part plus
/// nonnegative terms.
fn random_positive(rng: &mut ChaCha8Rng, dim: usize) -> (ScalarField, String) {
    let a = rng.gen_range(0.2..1.5);
    let mut src = format!("{a}");
    for _ in 0..rng.gen_range(1..=3) {
        let c = rng.gen_range(0.0..1.0);
        let i = coord(rng, dim);
        let term = match rng.gen_range(0..4) {
            0 => format!("{c}*x{i}"),
            1 => format!("{c}*x{i}^2"),
            2 => format!("{c}*(1 + sin({}*x{i}))", rng.gen_range(0.5..4.0)),
            _ => format!("{c}*exp(-x{i})"),
        };
        src.push_str(" + ");
        src.push_str(&term);
    }
    (floored(&src, dim, 0.1), src)
}

fn random_seeds(rng: &mut ChaCha8Rng, dim: usize) -> Vec<ScalarField> {
    let mut seeds = vec![field("1", dim)];
    for _ in 0..rng.gen_range(0..=3) {
        let i = coord(rng, dim);
        let src = match rng.gen_range(0..3) {
            0 => format!("x{i}^{}", rng.gen_range(1..4)),
            1 => format!("cos({}*x{i})", rng.gen_range(1.0..5.0)),
            _ => format!("x1*x{i}"),
        };
        seeds.push(field(&src, dim));
    }
    seeds
}

// 1

fn integrator_oracles() -> Outcome {
    let s = settings();
    let mut worst = 0.0f64;
    for d in 1..=3 {
        let est = integrate(&ScalarField::constant(1.0, d), &Region::unit_box(d), &s).unwrap();
        let e = (est.value - 1.0).abs();
        check(e <= UNIT_TOL, || format!("unit cube d={d}: {}", est.value))?;
        worst = worst.max(e);
    }
    let disk = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
    let est = integrate(&ScalarField::constant(1.0, 2), &disk, &s).unwrap();
    let disk_err = (est.value - std::f64::consts::PI).abs();
    check(disk_err <= DISK_TOL, || format!("disk: {}", est.value))?;
    for k in 0..=9 {
        let est = integrate(&field(&format!("x1^{k}"), 1), &Region::unit_box(1), &s).unwrap();
        let e = (est.value - 1.0 / (k as f64 + 1.0)).abs();
        check(e <= MONOMIAL_TOL, || format!("x^{k}: {}", est.value))?;
        worst = worst.max(e);
    }
    Ok(format!("worst cube/monomial error {worst:.1e}, disk error {disk_err:.1e}"))
}

// 2

fn random_region(rng: &mut ChaCha8Rng, dim: usize) -> Region {
    if rng.gen_bool(0.5) {
        let lo: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..0.0)).collect();
        let hi = lo.iter().map(|l| l + rng.gen_range(0.5..2.0)).collect();
        Region::boxed(lo, hi).unwrap()
    } else {
        let c = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        Region::ball(c, rng.gen_range(0.3..1.2)).unwrap()
    }
}

/// Sign-changing, or vanishing on part of the region.
fn random_test_function(rng: &mut ChaCha8Rng, dim: usize) -> ScalarField {
    let i = coord(rng, dim);
    let t = rng.gen_range(-0.5..0.5);
    match rng.gen_range(0..5) {
        0 => field(&format!("{} + {}*x{i}", rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0)), dim),
        1 => field(&format!("sin({}*x{i} + {t})", rng.gen_range(1.0..6.0)), dim),
        2 => field(&format!("max(0, x{i} - {t})"), dim),
        3 => field(&format!("x{i}^2 - {}", rng.gen_range(0.0..0.5)), dim),
        _ => {
            let c = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let blob = Region::ball(c, rng.gen_range(0.2..0.6)).unwrap();
            field(&format!("1 + x{i}"), dim).masked(&blob).unwrap()
        }
    }
}

fn cauchy_schwarz() -> Outcome {
    let s = settings();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut least = f64::INFINITY;
    let mut equalities = 0;
    for k in 0..CS_INSTANCES {
        let dim = 1 + k % 2;
        let e = random_region(&mut rng, dim);
        let g = random_test_function(&mut rng, dim);
        let h = random_test_function(&mut rng, dim);
        let r = cauchy_schwarz_gap(&g, &h, &e, &s).map_err(|e| e.to_string())?;
        check(r.gap.value >= -r.gap.err, || format!("instance {k}: gap {:?}", r.gap))?;
        check(r.comparison.verdict != Verdict::Fails, || format!("instance {k}: {:?}", r.comparison))?;
        least = least.min(r.gap.value + r.gap.err);

        let lambda = rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r = cauchy_schwarz_gap(&g, &g.scale(lambda), &e, &s).map_err(|e| e.to_string())?;
        check(r.equality, || format!("instance {k}: h = {lambda}·g gap {:?}", r.gap))?;
        equalities += 1;
    }
    Ok(format!(
        "{CS_INSTANCES} instances, min gap + err {least:.2e}, {equalities} proportional pairs at equality"
    ))
}

// 3

fn bessel_identity() -> Outcome {
    let s = settings();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 0..BESSEL_INSTANCES {
        let dim = 1 + k % 2;
        let (f, src) = random_positive(&mut rng, dim);
        let seeds = random_seeds(&mut rng, dim);
        let x = expansion(&f, &seeds, &Region::unit_box(dim))?;
        let n = rng.gen_range(0..=x.len());
        let link = deviation_identity(&x, n, &s).map_err(|e| e.to_string())?;
        check(link.verdict == Verdict::Equality, || format!("instance {k} ({src}, N={n}): {link:?}"))?;
        worst = worst.max((link.lhs.value - link.rhs.value).abs() / link.slack.max(f64::MIN_POSITIVE));

        let mut prev = bessel_gap(&x, 0).unwrap();
        for m in 1..=x.len() {
            let gap = bessel_gap(&x, m).unwrap();
            check(gap.value <= prev.value + gap.err + prev.err + s.abs_tol, || {
                format!("instance {k} ({src}): gap rises at N={m}: {prev:?} -> {gap:?}")
            })?;
            prev = gap;
        }
    }
    Ok(format!(
        "{BESSEL_INSTANCES} instances, worst |deviation - gap| / combined err {worst:.2}, gaps nonincreasing"
    ))
}

// 4

fn deviation_anchor() -> Outcome {
    let s = settings();
    let f = floored("1 + x1", 1, 1.0);
    let x = expansion(&f, &[field("1", 1)], &Region::unit_box(1))?;
    let d = mean_square_deviation(&x, 1, &s).map_err(|e| e.to_string())?;
    let exact = 1.5 - 1.0 / 2f64.ln();
    let e = (d.value - exact).abs();
    check(e <= ANCHOR_TOL, || format!("deviation {} vs {exact}", d.value))?;
    Ok(format!("deviation {:.9} vs {exact:.9}, error {e:.1e}", d.value))
}

// 5

fn parseval_exactness() -> Outcome {
    let s = settings();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for k in 0..PARSEVAL_INSTANCES {
        let (dim, basis): (usize, &[&str]) = if k % 2 == 0 {
            (1, &["1", "x1", "x1^2"])
        } else {
            (2, &["1", "x1", "x2", "x1*x2"])
        };
        let coeffs: Vec<f64> = basis.iter().map(|_| rng.gen_range(0.1..2.0)).collect();
        let src = basis
            .iter()
            .zip(&coeffs)
            .map(|(b, c)| format!("{c}*{b}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let f = floored(&src, dim, coeffs[0]);
        let seeds: Vec<_> = basis.iter().map(|b| field(b, dim)).collect();
        let unit = Region::unit_box(dim);
        let x = expansion(&f, &seeds, &unit)?;
        check(x.len() == basis.len(), || format!("instance {k}: family lost members"))?;
        let r = parseval_residual(&x, &s).map_err(|e| e.to_string())?;
        let slack = r.residual.err + s.abs_tol;
        check(r.residual.value.abs() <= slack, || format!("instance {k} ({src}): {:?}", r.residual))?;
        worst = worst.max(r.residual.value.abs());
    }
    Ok(format!("{PARSEVAL_INSTANCES} instances, worst |residual| {worst:.1e}"))
}

// 6

fn partitioned() -> Outcome {
    let s = settings();
    let run = |f: &ScalarField, region: &Region, depth: u32| {
        let p = sign_partition(f, region, depth, default_zeta(f), 0).map_err(|e| e.to_string())?;
        partitioned_parseval(f, &p, &CellSeeds::Restricted, region, &s).map_err(|e| e.to_string())
    };
    let unit = Region::unit_box(1);
    let depth = s.max_depth_for(1);

    let r = run(&field("x1 - 0.5", 1), &unit, depth)?;
    check(r.total.value.abs() <= LINEAR_PARTITION_TOL, || format!("x1 - 0.5: {:?}", r.total))?;
    let linear = r.total.value;

    let r = run(&field("abs(x1 - 0.5)", 1), &unit, depth)?;
    check((r.total.value - 0.25).abs() <= ABS_PARTITION_TOL, || format!("|x1 - 0.5|: {:?}", r.total))?;
    let absolute = r.total.value;

    let square = Region::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let r = run(&field("x1*x2", 2), &square, s.max_depth_for(2))?;
    check(r.total.value.abs() <= PRODUCT_PARTITION_TOL, || format!("x1*x2: {:?}", r.total))?;
    let signs: Vec<i8> = r.cells.iter().map(|c| c.sign).collect();
    let quadrants = signs.len() == 4
        && signs.iter().filter(|&&v| v == 1).count() == 2
        && signs.iter().filter(|&&v| v == -1).count() == 2;
    check(quadrants, || format!("x1*x2: cell signs {signs:?}"))?;
    Ok(format!(
        "totals {linear:.1e}, {absolute:.9}, {:.1e} over {} signed quadrants",
        r.total.value,
        signs.len()
    ))
}

// 7

fn product_criterion() -> Outcome {
    let s = settings();
    let unit = Region::unit_box(1);
    let seeds = [field("1", 1), field("x1", 1)];

    let f = floored("1 + x1", 1, 1.0);
    let fam = family(&f, &seeds, &unit)?;
    let r = product_criterion_check(&f, &f, &fam, &fam, 2, &unit, &s, false).map_err(|e| e.to_string())?;
    let c = &r.conclusion;
    check((c.lhs.value - 7.0 / 3.0).abs() < 1e-9 && (c.rhs.value - 2.25).abs() < 1e-9, || {
        format!("comonotone values {c:?}")
    })?;
    check(r.conclusion_holds && c.margin > COMONOTONE_MARGIN, || format!("comonotone margin {c:?}"))?;
    let comonotone = c.margin;

    let g = floored("2 - x1", 1, 1.0);
    let gam = family(&g, &seeds, &unit)?;
    let r = product_criterion_check(&f, &g, &fam, &gam, 2, &unit, &s, false).map_err(|e| e.to_string())?;
    check(!r.conclusion_holds, || format!("opposite pair conclusion {:?}", r.conclusion))?;
    check(!r.all_criteria_hold, || "opposite pair: every criterion flag is true".into())?;
    let false_flags = r.grid.iter().filter(|e| !(e.crit_a_holds && e.crit_b_holds)).count();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..COROLLARY_INSTANCES {
        let dim = 1 + k % 2;
        let unit = Region::unit_box(dim);
        let (f, fs) = random_positive(&mut rng, dim);
        let (g, gs) = random_positive(&mut rng, dim);
        let phi = family(&f, &random_seeds(&mut rng, dim), &unit)?;
        let psi = family(&g, &random_seeds(&mut rng, dim), &unit)?;
        let n = rng.gen_range(1..=phi.len().min(psi.len()));
        let r = corollary_check(&f, &g, &phi, &psi, n, &unit, &s).map_err(|e| e.to_string())?;
        check(r.all_hold, || format!("corollary instance {k} (f = {fs}, g = {gs}, N = {n}) fails"))?;
    }

    let one = family(&f, &[field("1", 1)], &unit)?;
    let r = corollary_check(&f, &f, &one, &one, 1, &unit, &s).map_err(|e| e.to_string())?;
    let sub = &r.phi_conditions[0];
    let ln2sq = 2f64.ln().powi(2);
    check(
        !sub.holds
            && sub.comparison.verdict == Verdict::Fails
            && (sub.comparison.lhs.value - 0.5).abs() < 1e-9
            && (sub.comparison.rhs.value - ln2sq).abs() < 1e-9,
        || format!("sub-condition anchor {:?}", sub.comparison),
    )?;
    let mut out = String::new();
    let _ = write!(
        out,
        "comonotone margin {comonotone:.4}, opposite pair has {false_flags} false grid cells, \
         corollary holds on {COROLLARY_INSTANCES} instances, sub-condition {:.4} > {:.4} fails",
        sub.comparison.lhs.value, sub.comparison.rhs.value
    );
    Ok(out)
}

// 8

fn optimality() -> Outcome {
    let s = settings();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut least = f64::INFINITY;
    let mut trials = 0;
    for k in 0..OPTIMALITY_INSTANCES {
        let dim = 1 + k % 2;
        let (f, src) = random_positive(&mut rng, dim);
        let seeds = random_seeds(&mut rng, dim);
        let x = expansion(&f, &seeds, &Region::unit_box(dim))?;
        let best = mean_square_deviation(&x, x.len(), &s).map_err(|e| e.to_string())?;
        for i in 0..x.len() {
            for factor in [1.0 + PERTURBATION, 1.0 - PERTURBATION] {
                let mut coeffs = x.coefficient_values();
                coeffs[i] *= factor;
                let worse = deviation_with_coefficients(&x, &coeffs, &s).map_err(|e| e.to_string())?;
                let rise = worse.value - best.value;
                check(rise >= -(best.err + worse.err + s.abs_tol), || {
                    format!("instance {k} ({src}): c_{} × {factor} lowers deviation by {:.2e}", i + 1, -rise)
                })?;
                least = least.min(rise);
                trials += 1;
            }
        }
    }
    Ok(format!("{trials} perturbations over {OPTIMALITY_INSTANCES} instances, least rise {least:.2e}"))
}

// 9

const SCENARIOS: [(&str, &str); 2] = [
    (
        "criterion.toml",
        r#"
task = "product-criterion"
dim = 1
truncation = 2
diagnostics = true

[fields]
f = { expr = "1 + x1", floor = 1 }
g = { expr = "1 + x1^2", floor = 1 }

[families]
phi = ["1", "x1"]

[output]
report = "criterion.json"
csv = "criterion.csv"
"#,
    ),
    (
        "stochastic.toml",
        r#"
task = "expand"
dim = 2
region = "diff(ball([0, 0], 1), box([0, 1], [0, 1]))"

[fields]
f = { expr = "2 + x1*x2", floor = 1 }

[families]
phi = ["1", "x1", "x2"]

[settings]
method = "stochastic"
samples = 20000
seed = 42

[output]
report = "stochastic.json"
csv = "stochastic.csv"
"#,
    ),
];

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, body) in SCENARIOS {
        let path = dir.path().join(name);
        fs::write(&path, body).map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for _ in 0..2 {
            let o = Command::new(env!("CARGO_BIN_EXE_mfourier"))
                .arg("run")
                .arg(&path)
                .output()
                .map_err(|e| e.to_string())?;
            check(o.status.success(), || {
                format!("{name}: exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr))
            })?;
            let stem = name.trim_end_matches(".toml");
            let mut bytes = Vec::new();
            for ext in ["json", "txt", "csv"] {
                bytes.push(fs::read(dir.path().join(format!("{stem}.{ext}"))).map_err(|e| e.to_string())?);
            }
            bytes.push(o.stdout);
            runs.push(bytes);
        }
        check(runs[0] == runs[1], || format!("{name}: outputs differ between runs"))?;
    }
    Ok(format!("{} scenarios, report, summary, CSV and stdout byte-identical", SCENARIOS.len()))
}
