//! Couples chromosomes to forced simulations and scores them on the indoor
//! air temperature.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ga::{self, compare_candidates, Chromosome, GaConfig, GaHistory, ScoredIndividual};
use crate::model::{NodeId, StateMatrices};
use crate::simulate::{self, ForcingSet, MeasurementSeries, Trajectory, WeatherSeries};

/// Exhaustive search enumerates `2^k` subsets; refuse beyond this `k`.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Sum of squared residuals `Σ (measured − simulated)²`, °C².
pub fn objective(simulated: &[f64], measured: &[f64]) -> Result<f64> {
    if simulated.len() != measured.len() {
        return Err(Error::LengthMismatch {
            what: "objective series",
            left: simulated.len(),
            right: measured.len(),
        });
    }
    if simulated.is_empty() {
        return Err(Error::Objective("no samples".into()));
    }
    Ok(measured
        .iter()
        .zip(simulated)
        .map(|(m, s)| (m - s) * (m - s))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    /// Mean of measured − simulated, °C.
    pub mean: f64,
    /// Sample standard deviation (N − 1), °C.
    pub sd: f64,
}

pub fn residual_stats(simulated: &[f64], measured: &[f64]) -> Result<ResidualStats> {
    if simulated.len() != measured.len() {
        return Err(Error::LengthMismatch {
            what: "residual series",
            left: simulated.len(),
            right: measured.len(),
        });
    }
    let n = simulated.len();
    if n < 2 {
        return Err(Error::Objective(format!("need at least 2 samples, got {n}")));
    }
    let residuals: Vec<f64> = measured.iter().zip(simulated).map(|(m, s)| m - s).collect();
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(ResidualStats {
        mean,
        sd: var.sqrt(),
    })
}

/// Everything needed to score a forcing set against measurements.
#[derive(Debug, Clone)]
pub struct DiagnosisContext {
    pub sm: StateMatrices,
    pub weather: WeatherSeries,
    pub measurements: MeasurementSeries,
    /// Leading samples excluded from J and the residual statistics.
    pub skip_steps: usize,
}

impl DiagnosisContext {
    pub fn new(
        sm: StateMatrices,
        weather: WeatherSeries,
        measurements: MeasurementSeries,
        skip_steps: usize,
    ) -> Result<Self> {
        weather.validate()?;
        if measurements.get(sm.air).is_none() {
            return Err(Error::InvalidSeries(format!(
                "no measurement for the air node {}",
                sm.air
            )));
        }
        if measurements.len() != weather.len() {
            return Err(Error::LengthMismatch {
                what: "measurements vs weather",
                left: measurements.len(),
                right: weather.len(),
            });
        }
        if (measurements.dt - weather.dt).abs() > 1e-6 {
            return Err(Error::InvalidSeries(format!(
                "measurement step {} s differs from weather step {} s",
                measurements.dt, weather.dt
            )));
        }
        if let Some(node) = measurements.nodes().find(|n| n.0 == 0 || n.0 > sm.node_count()) {
            return Err(Error::NodeOutOfRange {
                node,
                count: sm.node_count(),
            });
        }
        if skip_steps + 2 > weather.len() {
            return Err(Error::InvalidConfig(format!(
                "skip-steps {skip_steps} leaves fewer than 2 samples"
            )));
        }
        Ok(Self {
            sm,
            weather,
            measurements,
            skip_steps,
        })
    }

    /// Chromosome length: every node except the air (output) node.
    pub fn chromosome_len(&self) -> usize {
        self.sm.node_count() - 1
    }

    /// Measured nodes that may be forced.
    pub fn measurable_nodes(&self) -> Vec<NodeId> {
        self.measurements.nodes().filter(|n| *n != self.sm.air).collect()
    }

    pub fn measurable_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.chromosome_len()];
        for n in self.measurable_nodes() {
            mask[n.index()] = true;
        }
        mask
    }

    pub fn measured_air(&self) -> &[f64] {
        &self.measurements.get(self.sm.air).expect("checked in new")[self.skip_steps..]
    }

    pub fn simulate(&self, forcing: &ForcingSet) -> Result<Trajectory> {
        simulate::simulate_from_rest(&self.sm, &self.weather, forcing, Some(&self.measurements))
    }

    pub fn simulated_air(&self, forcing: &ForcingSet) -> Result<Vec<f64>> {
        let traj = self.simulate(forcing)?;
        Ok(traj.node(self.sm.air)[self.skip_steps..].to_vec())
    }

    pub fn evaluate_forcing(&self, forcing: &ForcingSet) -> Result<f64> {
        objective(&self.simulated_air(forcing)?, self.measured_air())
    }

    pub fn evaluate_chromosome(&self, c: &Chromosome) -> Result<f64> {
        if c.len() != self.chromosome_len() {
            return Err(Error::LengthMismatch {
                what: "chromosome",
                left: c.len(),
                right: self.chromosome_len(),
            });
        }
        self.evaluate_forcing(&ga::decode(c))
    }

    pub fn residuals(&self, forcing: &ForcingSet) -> Result<ResidualStats> {
        residual_stats(&self.simulated_air(forcing)?, self.measured_air())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub best: ScoredIndividual,
    /// Every subset in enumeration order (bit `i` of the index selects the
    /// `i`-th measurable node).
    pub table: Vec<(ForcingSet, f64)>,
}

/// Scores every subset of `measurable`. The winner is the lowest J, with
/// near-ties going to fewer forced nodes, then the lowest bit pattern.
pub fn exhaustive_search<F>(
    measurable: &[NodeId],
    chromosome_len: usize,
    evaluator: &F,
    parallel: bool,
) -> Result<ExhaustiveResult>
where
    F: Fn(&Chromosome) -> Result<f64> + Sync,
{
    if measurable.len() > EXHAUSTIVE_LIMIT {
        return Err(Error::TooManyNodes(measurable.len()));
    }
    if let Some(&node) = measurable.iter().find(|n| n.0 == 0 || n.0 > chromosome_len) {
        return Err(Error::NodeOutOfRange {
            node,
            count: chromosome_len,
        });
    }
    let subsets: Vec<Chromosome> = (0..1u64 << measurable.len())
        .map(|mask| {
            let nodes = measurable
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, n)| *n);
            Chromosome::from_nodes(chromosome_len, nodes)
        })
        .collect();
    let eval = |c: &Chromosome| evaluator(c);
    let scores: Vec<Result<f64>> = if parallel {
        subsets.par_iter().map(eval).collect()
    } else {
        subsets.iter().map(eval).collect()
    };

    let mut table = Vec::with_capacity(subsets.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, (c, s)) in subsets.iter().zip(scores).enumerate() {
        let j = s?;
        let replace = match best {
            None => true,
            Some((b, bj)) => compare_candidates(j, c, bj, &subsets[b]).is_lt(),
        };
        if replace {
            best = Some((i, j));
        }
        table.push((ga::decode(c), j));
    }
    let (b, bj) = best.expect("at least the empty subset");
    Ok(ExhaustiveResult {
        best: ScoredIndividual::new(subsets[b].clone(), bj)?,
        table,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeScores {
    /// J without any forcing.
    pub unforced: f64,
    /// J with exactly one node forced.
    pub single: BTreeMap<NodeId, f64>,
}

pub fn per_node_scores<F>(
    measurable: &[NodeId],
    chromosome_len: usize,
    evaluator: &F,
    parallel: bool,
) -> Result<NodeScores>
where
    F: Fn(&Chromosome) -> Result<f64> + Sync,
{
    let unforced = evaluator(&Chromosome::zeros(chromosome_len))?;
    let eval = |n: &NodeId| evaluator(&Chromosome::from_nodes(chromosome_len, [*n])).map(|j| (*n, j));
    let single: Result<BTreeMap<_, _>> = if parallel {
        measurable.par_iter().map(eval).collect()
    } else {
        measurable.iter().map(eval).collect()
    };
    Ok(NodeScores {
        unforced,
        single: single?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisReport {
    pub best: ScoredIndividual,
    pub best_forcing: ForcingSet,
    pub unforced_objective: f64,
    pub node_scores: NodeScores,
    pub residuals_unforced: ResidualStats,
    pub residuals_best: ResidualStats,
    pub history: GaHistory,
    pub exhaustive: Option<ExhaustiveResult>,
    pub measurable: Vec<NodeId>,
}

impl DiagnosisReport {
    /// `J(best) / J(unforced)`; 0 when both vanish.
    pub fn improvement_ratio(&self) -> f64 {
        if self.unforced_objective > 0.0 {
            self.best.objective / self.unforced_objective
        } else {
            0.0
        }
    }
}

/// GA diagnosis with per-node scores, residual statistics and, when asked,
/// the exhaustive oracle. `config.measurable_mask` is replaced by the
/// context's mask.
pub fn diagnose(ctx: &DiagnosisContext, config: &GaConfig, exhaustive: bool) -> Result<DiagnosisReport> {
    let mut config = config.clone();
    config.measurable_mask = ctx.measurable_mask();
    let evaluator = |c: &Chromosome| ctx.evaluate_chromosome(c);
    let (best, history) = ga::run_ga(&config, &evaluator)?;
    let measurable = ctx.measurable_nodes();
    let len = ctx.chromosome_len();
    let node_scores = per_node_scores(&measurable, len, &evaluator, config.parallel)?;
    let exhaustive = if exhaustive {
        Some(exhaustive_search(&measurable, len, &evaluator, config.parallel)?)
    } else {
        None
    };
    let best_forcing = ga::decode(&best.chromosome);
    Ok(DiagnosisReport {
        residuals_unforced: ctx.residuals(&ForcingSet::empty())?,
        residuals_best: ctx.residuals(&best_forcing)?,
        unforced_objective: node_scores.unforced,
        best_forcing,
        best,
        node_scores,
        history,
        exhaustive,
        measurable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_examples() {
        let a = [20.0, 21.0, 22.0];
        assert_eq!(objective(&a, &a).unwrap(), 0.0);
        assert_eq!(objective(&[1.0; 4], &[1.5; 4]).unwrap(), 1.0);
        // residuals measured − simulated = 1, −2, 2
        assert_eq!(objective(&[0.0, 2.0, 0.0], &[1.0, 0.0, 2.0]).unwrap(), 9.0);
        assert!(objective(&[1.0], &[1.0, 2.0]).is_err());
        assert!(objective(&[], &[]).is_err());
    }

    #[test]
    fn residual_stats_examples() {
        let s = residual_stats(&[0.0, 0.0], &[0.2, 0.3]).unwrap();
        assert!((s.mean - 0.25).abs() < 1e-12);
        assert!((s.sd - 0.05f64.sqrt() / 10.0f64.sqrt()).abs() < 1e-12);
        assert!((s.sd - 0.070_710_678_118_654_75).abs() < 1e-12);
        let z = residual_stats(&[3.0, 4.0, 5.0], &[3.0, 4.0, 5.0]).unwrap();
        assert_eq!((z.mean, z.sd), (0.0, 0.0));
        assert!(residual_stats(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn exhaustive_counts_and_ties() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let calls = AtomicUsize::new(0);
        let nodes = [NodeId(1), NodeId(3), NodeId(4), NodeId(7), NodeId(9)];
        // J = 0 whenever node 3 is forced, so {3} must win the tie
        let eval = |c: &Chromosome| {
            calls.fetch_add(1, Ordering::Relaxed);
            Ok(if c.bits[2] { 0.0 } else { 5.0 + c.count_ones() as f64 })
        };
        let r = exhaustive_search(&nodes, 10, &eval, false).unwrap();
        assert_eq!(calls.load(Ordering::Relaxed), 32);
        assert_eq!(r.table.len(), 32);
        assert_eq!(ga::decode(&r.best.chromosome), [NodeId(3)].into_iter().collect());
        let par = exhaustive_search(&nodes, 10, &eval, true).unwrap();
        assert_eq!(par, r);
    }

    #[test]
    fn exhaustive_rejects_large_sets() {
        let nodes: Vec<NodeId> = (1..=21).map(NodeId).collect();
        let err = exhaustive_search(&nodes, 30, &|_: &Chromosome| Ok(0.0), false).unwrap_err();
        assert!(matches!(err, Error::TooManyNodes(21)));
    }

    #[test]
    fn per_node_scores_include_unforced() {
        let nodes = [NodeId(2), NodeId(5)];
        let eval = |c: &Chromosome| Ok(10.0 - c.bits.iter().rposition(|b| *b).map_or(0.0, |i| i as f64));
        let s = per_node_scores(&nodes, 6, &eval, false).unwrap();
        assert_eq!(s.unforced, 10.0);
        assert_eq!(s.single[&NodeId(2)], 9.0);
        assert_eq!(s.single[&NodeId(5)], 6.0);
        assert_eq!(per_node_scores(&nodes, 6, &eval, true).unwrap(), s);
    }
}
