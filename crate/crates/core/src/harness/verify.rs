//! The built-in self-check suite behind `collisim verify`: quick property
//! checks with independent mini-oracles, printable as one line each.

use crate::analysis::{capacity_region, rateless_region, tdma_region};
use crate::channel::{case_of, mirror_case, quadruple_of_case, CaseIndex, ChannelState};
use crate::field::{Gf, Matrix};
use crate::observe::NullObserver;
use crate::packet::Probability;
use crate::queues::expected_queue_sizes;
use crate::rng::Rng;

use super::{run_experiment, Mode, Scheme, SimConfig, FIELD_MODULUS};

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn case_table() -> CheckOutcome {
    let mut seen = [false; 17];
    let mut ok = true;
    for bits in 0..16u8 {
        let s = ChannelState::from_flags(bits & 8 != 0, bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
        let c = case_of(&s).get();
        if seen[c as usize] {
            ok = false;
        }
        seen[c as usize] = true;
    }
    for i in 1..=16u8 {
        let c = CaseIndex::new(i);
        if mirror_case(mirror_case(c)) != c {
            ok = false;
        }
        let (a11, a12, a21, a22) = quadruple_of_case(c);
        if case_of(&ChannelState::from_flags(a11, a12, a21, a22)) != c {
            ok = false;
        }
    }
    check("case-table", ok, "bijection + mirror involution".into())
}

/// Independent textbook row-reduction, kept free of the column-pivot search
/// the main kernel uses.
fn naive_rank(mut rows: Vec<Vec<Gf>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let Some(pos) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pos);
        let inv = rows[rank][c].inv();
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c] * inv;
                for (x, pv) in row.iter_mut().zip(pivot.iter()) {
                    *x -= f * *pv;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn field_kernel() -> CheckOutcome {
    let mut rng = Rng::new(0xFEED);
    let mut ok = true;
    for _ in 0..200 {
        let a = rng.field_nonzero();
        if a * a.inv() != Gf::ONE {
            ok = false;
        }
        let r = 1 + rng.below(6) as usize;
        let c = 1 + rng.below(6) as usize;
        let rows: Vec<Vec<Gf>> = (0..r)
            .map(|_| (0..c).map(|_| Gf::new(rng.below(5) as u64)).collect())
            .collect();
        if Matrix::from_rows(&rows).rank() != naive_rank(rows) {
            ok = false;
        }
    }
    check("field-kernel", ok, "inverses + rank vs naive reduction".into())
}

fn queue_expectations() -> CheckOutcome {
    use crate::queues::{run_phase1, Phase1Config, Phase1Mode};
    let p = Probability::HALF;
    let m = 2_000u32;
    let trials = 20;
    let mut mean = 0.0;
    for seed in 0..trials {
        let cfg = Phase1Config { p, m, mode: Phase1Mode::Adaptive };
        let mut rng = Rng::new(555_000 + seed);
        let res = run_phase1(&cfg, &mut rng, None, &mut NullObserver);
        mean += res.counts[0].collided as f64;
    }
    mean /= trials as f64;
    let expected = expected_queue_sizes(p, m as u64).unwrap().collided;
    let ok = (mean - expected).abs() < 0.1 * expected;
    check(
        "queue-expectations",
        ok,
        format!("collided mean {mean:.1} vs {expected:.1}"),
    )
}

fn regions() -> CheckOutcome {
    let cap = capacity_region(Probability::HALF);
    let mut vs = cap.vertices();
    vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = vec![
        (0.0, 0.0),
        (0.0, 0.5),
        (0.375, 0.5),
        (0.45, 0.45),
        (0.5, 0.0),
        (0.5, 0.375),
    ];
    let mut ok = vs == want;
    for (x, y) in tdma_region(Probability::HALF).vertices() {
        ok &= cap.contains(x, y, 1e-9);
    }
    for (x, y) in rateless_region(Probability::HALF).vertices() {
        ok &= cap.contains(x, y, 1e-9);
    }
    check("regions", ok, format!("{} capacity vertices", vs.len()))
}

fn pipeline_smoke() -> CheckOutcome {
    let cfg = SimConfig {
        scheme: Scheme::Theorem1,
        p: 0.5,
        m: 2_000,
        seed: 424_242,
        trials: 1,
        mode: Mode::Adaptive,
        workers: 1,
        field_modulus: FIELD_MODULUS,
    };
    match run_experiment(&cfg) {
        Ok(res) => {
            let a = res.aggregate;
            let ok = a.fully_decoded == 1 && a.mean_r1 > 0.40 && a.mean_r1 < 0.50;
            check(
                "pipeline-smoke",
                ok,
                format!("throughput {:.4}, decoded {}/1", a.mean_r1, a.fully_decoded),
            )
        }
        Err(e) => check("pipeline-smoke", false, e.to_string()),
    }
}

fn determinism() -> CheckOutcome {
    let mut csvs = Vec::new();
    for workers in [1usize, 4] {
        let cfg = SimConfig {
            scheme: Scheme::Theorem1,
            p: 0.5,
            m: 400,
            seed: 99,
            trials: 4,
            mode: Mode::Adaptive,
            workers,
            field_modulus: FIELD_MODULUS,
        };
        match run_experiment(&cfg) {
            Ok(res) => csvs.push(res.to_csv(&cfg)),
            Err(e) => return check("determinism", false, e.to_string()),
        }
    }
    let ok = csvs[0] == csvs[1];
    check("determinism", ok, "csv identical for 1 vs 4 workers".into())
}

fn trace_roundtrip() -> CheckOutcome {
    let cfg = SimConfig {
        scheme: Scheme::Theorem1,
        p: 0.5,
        m: 80,
        seed: 3,
        trials: 1,
        mode: Mode::Adaptive,
        workers: 1,
        field_modulus: FIELD_MODULUS,
    };
    let p = match cfg.validate() {
        Ok(p) => p,
        Err(e) => return check("trace-roundtrip", false, e.to_string()),
    };
    let text = super::trace::trace_trial(&cfg, p, 0);
    let path = std::env::temp_dir().join(format!("collisim_verify_{}.jsonl", std::process::id()));
    let outcome = std::fs::write(&path, &text)
        .map_err(crate::error::TraceError::from)
        .and_then(|_| super::trace::replay(&path));
    std::fs::remove_file(&path).ok();
    match outcome {
        Ok(_) => check("trace-roundtrip", true, "replay byte-identical".into()),
        Err(e) => check("trace-roundtrip", false, e.to_string()),
    }
}

/// Run every suite.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        case_table(),
        field_kernel(),
        queue_expectations(),
        regions(),
        pipeline_smoke(),
        determinism(),
        trace_roundtrip(),
    ]
}
