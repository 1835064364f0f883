//! Closed-form analytics and statistical verifiers: the optimal throughput
//! region, the two benchmark regions, finite-size time and throughput
//! prediction, the delayed-knowledge rank inequality checker, and the
//! concentration bound behind the halting guarantees.

use crate::error::AnalysisError;
use crate::field::{rank_mixed, Gf};
use crate::packet::Probability;
use crate::queues::{phase1_deadline, two_thirds_power};
use std::collections::BTreeSet;

/// One constraint `c1 * R1 + c2 * R2 <= rhs`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub c1: f64,
    pub c2: f64,
    pub rhs: f64,
    pub id: &'static str,
}

/// A conjunction of half-planes in the nonnegative quadrant.
#[derive(Clone, Debug)]
pub struct ThroughputRegion {
    half_planes: Vec<HalfPlane>,
}

const GEOM_TOL: f64 = 1e-9;

impl ThroughputRegion {
    pub fn from_half_planes(half_planes: Vec<HalfPlane>) -> Self {
        ThroughputRegion { half_planes }
    }

    pub fn half_planes(&self) -> &[HalfPlane] {
        &self.half_planes
    }

    pub fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        r1 >= -tol
            && r2 >= -tol
            && self.half_planes.iter().all(|h| h.c1 * r1 + h.c2 * r2 <= h.rhs + tol)
    }

    /// Membership with every constraint loosened by `slack` in rate units.
    pub fn contains_inflated(&self, r1: f64, r2: f64, slack: f64) -> bool {
        r1 >= -slack
            && r2 >= -slack
            && self
                .half_planes
                .iter()
                .all(|h| h.c1 * r1 + h.c2 * r2 <= h.rhs + (h.c1.abs() + h.c2.abs()) * slack)
    }

    fn all_constraints(&self) -> Vec<HalfPlane> {
        let mut cs = self.half_planes.clone();
        cs.push(HalfPlane { c1: -1.0, c2: 0.0, rhs: 0.0, id: "nonneg_r1" });
        cs.push(HalfPlane { c1: 0.0, c2: -1.0, rhs: 0.0, id: "nonneg_r2" });
        cs
    }

    /// Vertices with the ids of their active constraints. Enumerated by
    /// pairwise half-plane intersection with feasibility filtering; the
    /// regions here have at most six vertices, so no LP machinery.
    pub fn vertices_with_constraints(&self) -> Vec<(f64, f64, Vec<&'static str>)> {
        let cs = self.all_constraints();
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let (a, b) = (&cs[i], &cs[j]);
                let det = a.c1 * b.c2 - a.c2 * b.c1;
                if det.abs() < GEOM_TOL {
                    continue;
                }
                // the `+ 0.0` folds negative zero into plain zero
                let x = (a.rhs * b.c2 - a.c2 * b.rhs) / det + 0.0;
                let y = (a.c1 * b.rhs - a.rhs * b.c1) / det + 0.0;
                if !self.contains(x, y, GEOM_TOL) {
                    continue;
                }
                if !pts.iter().any(|&(px, py)| (px - x).abs() < GEOM_TOL && (py - y).abs() < GEOM_TOL) {
                    pts.push((x, y));
                }
            }
        }
        // counterclockwise around the centroid, starting at angle -pi
        let n = pts.len().max(1) as f64;
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
        pts.sort_by(|a, b| {
            let aa = (a.1 - cy).atan2(a.0 - cx);
            let ab = (b.1 - cy).atan2(b.0 - cx);
            aa.partial_cmp(&ab).unwrap()
        });
        pts.into_iter()
            .map(|(x, y)| {
                let active: Vec<&'static str> = cs
                    .iter()
                    .filter(|h| (h.c1 * x + h.c2 * y - h.rhs).abs() < GEOM_TOL)
                    .map(|h| h.id)
                    .collect();
                (x, y, active)
            })
            .collect()
    }

    pub fn vertices(&self) -> Vec<(f64, f64)> {
        self.vertices_with_constraints()
            .into_iter()
            .map(|(x, y, _)| (x, y))
            .collect()
    }
}

/// The optimal throughput region: individual caps `R_i <= p` and the two
/// weighted-sum constraints `R_i + (2-p) R_other <= p (2-p)^2`.
pub fn capacity_region(p: Probability) -> ThroughputRegion {
    let p = p.get();
    let w = 2.0 - p;
    let rhs = p * w * w;
    ThroughputRegion::from_half_planes(vec![
        HalfPlane { c1: 1.0, c2: 0.0, rhs: p, id: "cap_r1" },
        HalfPlane { c1: 0.0, c2: 1.0, rhs: p, id: "cap_r2" },
        HalfPlane { c1: 1.0, c2: w, rhs, id: "wsum_1" },
        HalfPlane { c1: w, c2: 1.0, rhs, id: "wsum_2" },
    ])
}

/// Time-division benchmark: one transmitter speaks at a time and lands a
/// packet only when its direct link is on, so the rates trade off along
/// `R1 + R2 <= p`.
pub fn tdma_region(p: Probability) -> ThroughputRegion {
    ThroughputRegion::from_half_planes(vec![HalfPlane {
        c1: 1.0,
        c2: 1.0,
        rhs: p.get(),
        id: "tdma_sum",
    }])
}

/// Rateless benchmark: both transmitters stream random combinations and both
/// receivers decode everything; a receiver banks useful information whenever
/// at least one incoming link is on, giving the sum bound `1 - (1-p)^2`.
pub fn rateless_region(p: Probability) -> ThroughputRegion {
    let p = p.get();
    let sum = 1.0 - (1.0 - p) * (1.0 - p);
    ThroughputRegion::from_half_planes(vec![
        HalfPlane { c1: 1.0, c2: 0.0, rhs: p, id: "cap_r1" },
        HalfPlane { c1: 0.0, c2: 1.0, rhs: p, id: "cap_r2" },
        HalfPlane { c1: 1.0, c2: 1.0, rhs: sum, id: "rateless_sum" },
    ])
}

/// Exact finite-size slot counts of the two-phase strategy at the symmetric
/// design point, ceiling conventions included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimePrediction {
    pub phase1_slots: u64,
    pub phase2_slots: u64,
    pub total_slots: u64,
}

impl TimePrediction {
    pub fn implied_symmetric_throughput(&self, m: u64) -> f64 {
        if self.total_slots == 0 {
            0.0
        } else {
            m as f64 / self.total_slots as f64
        }
    }
}

/// Phase-2 slot count: the padded common totals `2/3 m + 16/3 m^(2/3)`
/// delivered at sum rate 3/4.
pub fn phase2_duration(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let m23 = two_thirds_power(m);
    // keep the division by 3 on exactly-representable integers so perfect
    // cubes evaluate without float dust
    let commons = (2.0 * m as f64 + 16.0 * m23) / 3.0;
    (commons / 0.75).ceil() as u64
}

pub fn predict_total_time(m: u64) -> TimePrediction {
    let phase1_slots = phase1_deadline(Probability::HALF, m);
    let phase2_slots = phase2_duration(m);
    TimePrediction {
        phase1_slots,
        phase2_slots,
        total_slots: phase1_slots + phase2_slots,
    }
}

/// One transmitter's precoding history: what it put on the air each slot and
/// which of its two outgoing links were on.
#[derive(Clone, Debug)]
pub enum PrecoderRow {
    Silent,
    /// A single uncoded packet (unit coefficient on one unknown).
    Unit(u32),
    /// A dense combination over the transmitter's unknowns.
    Dense(Vec<Gf>),
}

#[derive(Clone, Debug)]
pub struct PrecoderTrace {
    pub columns: u32,
    pub rows: Vec<PrecoderRow>,
    /// Link to the intended receiver, per slot.
    pub own_on: Vec<bool>,
    /// Link to the unintended receiver, per slot.
    pub cross_on: Vec<bool>,
    /// Whether every row depended only on strictly earlier channel states.
    pub causal: bool,
}

impl PrecoderTrace {
    fn selected_rank(&self, select: &[bool]) -> usize {
        // nonzero gains scale rows without changing rank, so the rank of the
        // gain-weighted selection equals the rank of the selected rows
        let mut units: BTreeSet<u32> = BTreeSet::new();
        let mut dense: Vec<Vec<Gf>> = Vec::new();
        for (row, &on) in self.rows.iter().zip(select.iter()) {
            if !on {
                continue;
            }
            match row {
                PrecoderRow::Silent => {}
                PrecoderRow::Unit(c) => {
                    units.insert(*c);
                }
                PrecoderRow::Dense(v) => dense.push(v.clone()),
            }
        }
        rank_mixed(&units, &dense, self.columns as usize)
    }
}

/// Monte-Carlo check of the delayed-knowledge rank inequality: the expected
/// rank seen at the unintended receiver is at least 1/(2-p) times the
/// expected rank at the intended one, for any causal precoder.
#[derive(Clone, Copy, Debug)]
pub struct RankInequalityReport {
    pub trials: usize,
    pub cross_rank_mean: f64,
    pub own_rank_scaled_mean: f64,
    pub margin_mean: f64,
    pub margin_stderr: f64,
    pub holds: bool,
}

pub fn rank_inequality_check(
    traces: &[PrecoderTrace],
    p: Probability,
) -> Result<RankInequalityReport, AnalysisError> {
    use rayon::prelude::*;
    if traces.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if let Some(index) = traces.iter().position(|t| !t.causal) {
        return Err(AnalysisError::NonCausalTrace { index });
    }
    let scale = 1.0 / (2.0 - p.get());
    // per-trace ranks are independent; the reduction stays in trace order
    let ranks: Vec<(f64, f64)> = traces
        .par_iter()
        .map(|t| {
            (
                t.selected_rank(&t.cross_on) as f64,
                t.selected_rank(&t.own_on) as f64,
            )
        })
        .collect();
    let mut margins = Vec::with_capacity(traces.len());
    let (mut cross_sum, mut own_sum) = (0.0, 0.0);
    for (cross, own) in ranks {
        cross_sum += cross;
        own_sum += own * scale;
        margins.push(cross - own * scale);
    }
    let n = traces.len() as f64;
    let mean = margins.iter().sum::<f64>() / n;
    let var = margins.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / n.max(2.0);
    let stderr = (var / n).sqrt();
    Ok(RankInequalityReport {
        trials: traces.len(),
        cross_rank_mean: cross_sum / n,
        own_rank_scaled_mean: own_sum / n,
        margin_mean: mean,
        margin_stderr: stderr,
        holds: mean >= -3.0 * stderr,
    })
}

/// Two-sided concentration bound for a sum of independent variables:
/// `Pr[|w - E w| > alpha] <= 2 exp(-alpha^2 / (4 sum Var))`, clamped to 1.
pub fn chernoff_bound(alpha: f64, variances: &[f64]) -> f64 {
    assert!(variances.iter().all(|v| *v >= 0.0), "variances must be nonnegative");
    if alpha <= 0.0 {
        return 1.0;
    }
    let total: f64 = variances.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    (2.0 * (-alpha * alpha / (4.0 * total)).exp()).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn sorted(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn capacity_vertices_at_the_design_point_are_exact() {
        let vs = sorted(capacity_region(Probability::HALF).vertices());
        let want = [
            (0.0, 0.0),
            (0.0, 0.5),
            (0.375, 0.5),
            (0.45, 0.45),
            (0.5, 0.0),
            (0.5, 0.375),
        ];
        assert_eq!(vs.len(), want.len());
        for (got, want) in vs.iter().zip(want.iter()) {
            assert_eq!(got.0, want.0, "exact x");
            assert_eq!(got.1, want.1, "exact y");
        }
    }

    #[test]
    fn capacity_degenerate_probabilities() {
        let vs = capacity_region(Probability::new(0.0).unwrap()).vertices();
        assert_eq!(vs, vec![(0.0, 0.0)]);

        let vs = sorted(capacity_region(Probability::new(1.0).unwrap()).vertices());
        assert_eq!(vs, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn benchmark_regions() {
        let vs = sorted(tdma_region(Probability::HALF).vertices());
        assert_eq!(vs, vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.0)]);
        let vs = sorted(tdma_region(Probability::new(1.0).unwrap()).vertices());
        assert_eq!(vs, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);

        let r = rateless_region(Probability::HALF);
        assert!(r.contains(0.375, 0.375, 1e-12));
        assert!(!r.contains(0.4, 0.4, 1e-12));
        let r3 = rateless_region(Probability::new(0.3).unwrap());
        let sum = r3.half_planes().iter().find(|h| h.id == "rateless_sum").unwrap();
        assert!((sum.rhs - 0.51).abs() < 1e-12);
        let r1 = rateless_region(Probability::new(1.0).unwrap());
        let sum = r1.half_planes().iter().find(|h| h.id == "rateless_sum").unwrap();
        assert_eq!(sum.rhs, 1.0);
    }

    #[test]
    fn capacity_contains_the_benchmarks() {
        for k in 0..=100 {
            let p = Probability::new(k as f64 / 100.0).unwrap();
            let cap = capacity_region(p);
            for (x, y) in tdma_region(p).vertices() {
                assert!(cap.contains(x, y, 1e-9), "tdma vertex ({x},{y}) at p {p}");
            }
        }
        let cap = capacity_region(Probability::HALF);
        for (x, y) in rateless_region(Probability::HALF).vertices() {
            assert!(cap.contains(x, y, 1e-9), "rateless vertex ({x},{y})");
        }
    }

    #[test]
    fn time_prediction_examples() {
        // perfect cube: every intermediate quantity is integral
        let t = predict_total_time(729);
        assert_eq!(t.phase1_slots, 1053);
        assert_eq!(t.phase2_slots, 1224);
        assert_eq!(t.total_slots, 2277);
        let thr = t.implied_symmetric_throughput(729);
        assert!((thr - 729.0 / 2277.0).abs() < 1e-15);

        let t = predict_total_time(0);
        assert_eq!(t.total_slots, 0);
        assert_eq!(t.implied_symmetric_throughput(0), 0.0);

        // the large-size limit of the implied throughput
        let m = 1_000_000_000_000_000u64;
        let thr = predict_total_time(m).implied_symmetric_throughput(m);
        assert!((thr - 0.45).abs() < 1e-4, "limit {thr}");
    }

    #[test]
    fn chernoff_examples() {
        // slack = m^(2/3) against the phase-1 departure variance reproduces
        // the exponent m^(4/3) / (m + (3/4) m^(2/3))
        for m in [729u64, 10_000, 100_000] {
            let m23 = two_thirds_power(m);
            let slots = (4.0 * m as f64 / 3.0 + m23).ceil() as usize;
            let vars = vec![3.0 / 16.0; slots];
            let bound = chernoff_bound(m23, &vars);
            let total_var: f64 = vars.iter().sum();
            let direct = 2.0 * (-(m23 * m23) / (4.0 * total_var)).exp();
            assert!((bound - direct.min(1.0)).abs() < 1e-15);
            // closed-form denominator, up to the ceiling on the slot count
            let denom = m as f64 + 0.75 * m23;
            let closed = 2.0 * (-(m23 * m23) / denom).exp();
            assert!((bound.ln() - closed.ln()).abs() < 0.01, "m {m}");
        }
        // vacuous and degenerate limits
        assert_eq!(chernoff_bound(0.0, &[1.0]), 1.0);
        assert_eq!(chernoff_bound(-1.0, &[1.0]), 1.0);
        assert_eq!(chernoff_bound(5.0, &[]), 0.0);
        assert_eq!(chernoff_bound(5.0, &[0.0, 0.0]), 0.0);
        // m = 10^4: numeric value is deep below 1e-8
        let m = 10_000u64;
        let m23 = two_thirds_power(m);
        let slots = (4.0 * m as f64 / 3.0 + m23).ceil() as usize;
        let b = chernoff_bound(m23, &vec![3.0 / 16.0; slots]);
        assert!(b < 1e-8, "bound {b}");
    }

    #[test]
    fn halting_frequency_stays_under_the_bound() {
        use crate::observe::NullObserver;
        use crate::queues::{run_phase1, Phase1Config, Phase1Mode};
        let m = 10_000u32;
        let m23 = two_thirds_power(m as u64);
        let slots = (4.0 * m as f64 / 3.0 + m23).ceil() as usize;
        let bound = chernoff_bound(m23, &vec![3.0 / 16.0; slots]);
        let mut halts = 0u32;
        for seed in 0..500u64 {
            let cfg = Phase1Config { p: Probability::HALF, m, mode: Phase1Mode::PaperFaithful };
            let mut rng = Rng::new(31_000 + seed);
            if run_phase1(&cfg, &mut rng, None, &mut NullObserver).halted.is_some() {
                halts += 1;
            }
        }
        assert!((halts as f64 / 500.0) <= bound.max(1.0 / 500.0), "halts {halts}");
        assert_eq!(halts, 0);
    }

    #[test]
    fn rank_inequality_is_tight_at_full_connectivity() {
        // p = 1: both links always on, identical selections, scale 1
        let mut rng = Rng::new(12);
        let traces: Vec<PrecoderTrace> = (0..20)
            .map(|_| {
                let n = 30;
                let cols = 10u32;
                let rows: Vec<PrecoderRow> =
                    (0..n).map(|_| PrecoderRow::Unit(rng.below(cols))).collect();
                PrecoderTrace {
                    columns: cols,
                    rows,
                    own_on: vec![true; n],
                    cross_on: vec![true; n],
                    causal: true,
                }
            })
            .collect();
        let rep = rank_inequality_check(&traces, Probability::new(1.0).unwrap()).unwrap();
        assert_eq!(rep.margin_mean, 0.0);
        assert!(rep.holds);
    }

    #[test]
    fn non_causal_traces_are_rejected() {
        let t = PrecoderTrace {
            columns: 1,
            rows: vec![PrecoderRow::Unit(0)],
            own_on: vec![true],
            cross_on: vec![false],
            causal: false,
        };
        assert!(matches!(
            rank_inequality_check(&[t], Probability::HALF),
            Err(AnalysisError::NonCausalTrace { index: 0 })
        ));
        assert!(matches!(rank_inequality_check(&[], Probability::HALF), Err(AnalysisError::Empty)));
    }
}
