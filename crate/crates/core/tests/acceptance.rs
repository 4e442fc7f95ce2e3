//! Acceptance suite. Runs without the libtest harness so the one line per
//! criterion is always printed; exits nonzero if any criterion fails. Tolerances are pinned here and in the suite records.

use std::time::{Duration, Instant};

use hcontent::verify::{estimate_constant, run_suite, SuiteConfig, SuiteReport};
use hcontent::Result;

const STABILITY: f64 = 0.25;
const BLOWUP: f64 = 2.0;

struct Verdict {
    ok: bool,
    detail: String,
}

fn run(id: &str, cfg: SuiteConfig) -> Result<SuiteReport> {
    run_suite(id, &cfg)
}

fn samples(k: usize) -> SuiteConfig {
    SuiteConfig { samples: Some(k), ..Default::default() }
}

// every suite passes, with at least `min` records each
fn all_pass(ids: &[&str], cfg: impl Fn() -> SuiteConfig, min: usize) -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        let r = run(id, cfg())?;
        let s = &r.summary;
        let good = s.violations == 0 && s.count >= min && s.verdict == "pass";
        ok &= good;
        parts.push(format!("{id} {}/{} max={:.3e}", s.count - s.violations, s.count, s.max_ratio));
    }
    Ok(Verdict { ok, detail: parts.join("; ") })
}

fn dyadic_dp() -> Result<Verdict> {
    all_pass(&["dyadic-dp"], || samples(200), 200)
}

fn ball_value() -> Result<Verdict> {
    all_pass(&["ball-value"], SuiteConfig::default, 1)
}

fn exact_identities() -> Result<Verdict> {
    all_pass(&["i1-homogeneity", "i3-indicator", "power-change", "layer-cake"], || samples(1000), 1000)
}

fn explicit_inequalities() -> Result<Verdict> {
    all_pass(
        &["i6-quasi-subadditivity", "i7-holder", "sublinearity", "strong-subadditivity", "prop-3.5"],
        || samples(1000),
        1000,
    )
}

fn distinct(r: &SuiteReport, key: impl Fn(&hcontent::verify::InstanceRecord) -> String) -> usize {
    let mut keys: Vec<String> = r.records.iter().map(key).collect();
    keys.sort();
    keys.dedup();
    keys.len()
}

fn pointwise() -> Result<Verdict> {
    let cfg = || SuiteConfig { n: Some(2), level: Some(4), samples: Some(100), ..Default::default() };
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["prop-4.5", "lemma-5.1"] {
        let r = run(id, cfg())?;
        let points = distinct(&r, |x| ["delta", "kappa", "alpha", "p", "q"].map(|k| x.params[k].to_string()).join(","));
        let functions = distinct(&r, |x| x.digest.clone());
        let s = &r.summary;
        ok &= s.verdict == "pass" && points >= 12 && functions >= 100;
        parts.push(format!(
            "{id} {}/{} max={:.3e} grid points={points} functions={functions}",
            s.count - s.violations,
            s.count,
            s.max_ratio
        ));
    }
    let ball = all_pass(&["hedberg-ball-part"], SuiteConfig::default, 1)?;
    Ok(Verdict { ok: ok && ball.ok, detail: format!("{}; {}", parts.join("; "), ball.detail) })
}

fn bounded() -> Result<Verdict> {
    let ids = ["thm-4.3", "thm-4.6", "thm-4.7", "cor-4.9", "prop-4.10", "thm-5.2", "thm-5.4", "thm-5.5"];
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        let at = |level| run(id, SuiteConfig { n: Some(2), level: Some(level), samples: Some(50), ..Default::default() });
        let (a, b) = (at(4)?.summary, at(5)?.summary);
        let change = (b.max_ratio - a.max_ratio).abs() / a.max_ratio;
        let good = a.count == 50 && a.verdict == "pass" && b.verdict == "pass" && change < STABILITY;
        ok &= good;
        parts.push(format!("{id} {:.3}->{:.3} ({:+.0}%)", a.max_ratio, b.max_ratio, 100.0 * (b.max_ratio / a.max_ratio - 1.0)));
    }
    let (n, delta) = (2.0, 1.5);
    let base = SuiteConfig { n: Some(2), delta: Some(delta), level: Some(4), samples: Some(50), ..Default::default() };
    let sweep = estimate_constant("thm-4.3", &base, "p", &[1.05 * delta / n, 2.0 * delta / n])?;
    let factor = sweep.end_ratio();
    ok &= factor >= BLOWUP;
    parts.push(format!("thm-4.3 constant at p=1.05*delta/n over p=2*delta/n = {factor:.2}"));
    Ok(Verdict { ok, detail: parts.join("; ") })
}

fn operator_oracles() -> Result<Verdict> {
    all_pass(
        &["operator-oracles"],
        || SuiteConfig { n: Some(2), level: Some(4), samples: Some(20), ..Default::default() },
        20,
    )
}

fn determinism() -> Result<Verdict> {
    let ids = ["i7-holder", "thm-5.2", "prop-4.10", "operator-oracles"];
    let cfg = || SuiteConfig { seed: Some(1234), level: Some(3), samples: Some(10), ..Default::default() };
    let render = |pool: &rayon::ThreadPool| -> Result<Vec<String>> {
        pool.install(|| ids.iter().map(|id| Ok(run(id, cfg())?.to_json(None).to_string())).collect())
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = render(&one)?;
    let b = render(&one)?;
    let c = render(&four)?;
    let repeat = a == b;
    let threads = a == c;
    Ok(Verdict { ok: repeat && threads, detail: format!("repeat identical={repeat}; 1 vs 4 threads identical={threads}") })
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Result<Verdict>); 8] = [
        ("dyadic DP equals cover enumeration", Duration::from_secs(60), dyadic_dp),
        ("ball value r^delta", Duration::from_secs(60), ball_value),
        ("exact integral identities", Duration::from_secs(60), exact_identities),
        ("inequalities with explicit constants", Duration::from_secs(300), explicit_inequalities),
        ("pointwise estimates with traced constants", Duration::from_secs(600), pointwise),
        ("boundedness: finite, refinement-stable, blow-up", Duration::from_secs(1800), bounded),
        ("operators match brute force", Duration::from_secs(300), operator_oracles),
        ("determinism across runs and thread counts", Duration::from_secs(600), determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let v = check().unwrap_or_else(|e| Verdict { ok: false, detail: format!("error: {e}") });
        let took = t.elapsed();
        let ok = v.ok && took < limit;
        println!(
            "[{}] criterion {}: {name} ({:.1}s, limit {}s) {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            limit.as_secs(),
            v.detail
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
