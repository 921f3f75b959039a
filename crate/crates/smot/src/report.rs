//! Per-episode records, aggregates, and the two output renderings: a
//! fixed-width human table and tab-separated machine-readable rows.
//! Rows carry integers only, so identical runs render byte-identically.

use std::fmt::Write as _;
use std::time::Duration;

use crate::search::BackendCalls;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeStatus {
    Solved,
    Exhausted,
    StepLimit,
    Aborted,
}

impl EpisodeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            EpisodeStatus::Solved => "solved",
            EpisodeStatus::Exhausted => "exhausted",
            EpisodeStatus::StepLimit => "step_limit",
            EpisodeStatus::Aborted => "aborted",
        }
    }
}

impl From<crate::search::SearchStatus> for EpisodeStatus {
    fn from(s: crate::search::SearchStatus) -> Self {
        match s {
            crate::search::SearchStatus::Solved => EpisodeStatus::Solved,
            crate::search::SearchStatus::Exhausted => EpisodeStatus::Exhausted,
            crate::search::SearchStatus::StepLimit => EpisodeStatus::StepLimit,
        }
    }
}

/// One episode's metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeReport {
    pub instance: String,
    pub repetition: u32,
    pub status: EpisodeStatus,
    pub solved: bool,
    /// Length of the solution trajectory (zero unless solved).
    pub steps: usize,
    /// Size of the explored tree.
    pub nodes: usize,
    pub backend_calls: BackendCalls,
    /// Verified solution rendering (the equation, for solved 24-game runs).
    pub detail: Option<String>,
    pub abort_error: Option<String>,
}

/// Aggregates derived from the per-episode rows, recomputable exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub solved: usize,
    pub total: usize,
    pub avg_proposer_calls: f64,
    pub avg_evaluator_calls: f64,
    pub avg_total_calls: f64,
}

impl Aggregates {
    pub fn success_ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.solved as f64 / self.total as f64
        }
    }

    pub fn from_episodes(episodes: &[EpisodeReport]) -> Self {
        let total = episodes.len();
        let solved = episodes.iter().filter(|e| e.solved).count();
        let sum_p: usize = episodes.iter().map(|e| e.backend_calls.proposer).sum();
        let sum_e: usize = episodes.iter().map(|e| e.backend_calls.evaluator).sum();
        let denom = total.max(1) as f64;
        Aggregates {
            solved,
            total,
            avg_proposer_calls: sum_p as f64 / denom,
            avg_evaluator_calls: sum_e as f64 / denom,
            avg_total_calls: (sum_p + sum_e) as f64 / denom,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config_echo: String,
    /// Sorted by instance order, then repetition.
    pub episodes: Vec<EpisodeReport>,
    pub elapsed: Duration,
}

pub const ROW_COLUMNS: &str =
    "instance\trep\tsolved\tstatus\tsteps\tnodes\tproposer_calls\tevaluator_calls\ttotal_calls\tdetail";

fn episode_row(e: &EpisodeReport) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        e.instance,
        e.repetition,
        u8::from(e.solved),
        e.status.as_str(),
        e.steps,
        e.nodes,
        e.backend_calls.proposer,
        e.backend_calls.evaluator,
        e.backend_calls.total(),
        e.detail.as_deref().unwrap_or("-"),
    )
}

impl ExperimentReport {
    pub fn aggregates(&self) -> Aggregates {
        Aggregates::from_episodes(&self.episodes)
    }

    pub fn aborted(&self) -> bool {
        self.episodes
            .iter()
            .any(|e| e.status == EpisodeStatus::Aborted)
    }

    /// Machine-readable rows: `#`-prefixed comment header, one tab-separated
    /// line per episode. No timing, no floats — byte-stable across re-runs.
    pub fn render_rows(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# config: {}", self.config_echo);
        let _ = writeln!(out, "# columns: {ROW_COLUMNS}");
        for e in &self.episodes {
            let _ = writeln!(out, "{}", episode_row(e));
        }
        out
    }

    /// Fixed-width table plus the aggregate line and timing.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config: {}", self.config_echo);
        let _ = writeln!(
            out,
            "{:<14} {:>4} {:>8} {:>11} {:>6} {:>7} {:>9} {:>9} {:>9}",
            "instance", "rep", "solved", "status", "steps", "nodes", "p-calls", "e-calls", "calls"
        );
        for e in &self.episodes {
            let _ = writeln!(
                out,
                "{:<14} {:>4} {:>8} {:>11} {:>6} {:>7} {:>9} {:>9} {:>9}",
                e.instance,
                e.repetition,
                if e.solved { "yes" } else { "no" },
                e.status.as_str(),
                e.steps,
                e.nodes,
                e.backend_calls.proposer,
                e.backend_calls.evaluator,
                e.backend_calls.total(),
            );
        }
        let a = self.aggregates();
        let _ = writeln!(
            out,
            "success ratio: {}/{} ({:.2}%)   avg calls: proposer {:.2}, evaluator {:.2}, total {:.2}",
            a.solved,
            a.total,
            a.success_ratio() * 100.0,
            a.avg_proposer_calls,
            a.avg_evaluator_calls,
            a.avg_total_calls,
        );
        let _ = writeln!(out, "elapsed: {:.3}s", self.elapsed.as_secs_f64());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Ablation,
    Noise,
}

impl SweepKind {
    fn label(&self) -> &'static str {
        match self {
            SweepKind::Ablation => "fraction",
            SweepKind::Noise => "noise",
        }
    }
}

/// One (fraction, seed) cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub fraction: f64,
    pub seed: u64,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub config_echo: String,
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn aborted(&self) -> bool {
        self.cells.iter().any(|c| c.report.aborted())
    }

    /// Episode rows with the sweep coordinates prefixed.
    pub fn render_rows(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# config: {}", self.config_echo);
        let _ = writeln!(out, "# columns: {}\tseed\t{}", self.kind.label(), ROW_COLUMNS);
        for cell in &self.cells {
            for e in &cell.report.episodes {
                let _ = writeln!(out, "{}\t{}\t{}", cell.fraction, cell.seed, episode_row(e));
            }
        }
        out
    }

    /// Grid: one line per (fraction, seed), then per-fraction means.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config: {}", self.config_echo);
        let _ = writeln!(
            out,
            "{:>9} {:>6} {:>12} {:>11} {:>11} {:>11}",
            self.kind.label(),
            "seed",
            "success",
            "p-calls",
            "e-calls",
            "calls"
        );
        for cell in &self.cells {
            let a = cell.report.aggregates();
            let _ = writeln!(
                out,
                "{:>9} {:>6} {:>7}/{:<4} {:>11.2} {:>11.2} {:>11.2}",
                cell.fraction,
                cell.seed,
                a.solved,
                a.total,
                a.avg_proposer_calls,
                a.avg_evaluator_calls,
                a.avg_total_calls,
            );
        }
        // Per-fraction means over seeds, in first-appearance order.
        let mut fractions: Vec<f64> = Vec::new();
        for cell in &self.cells {
            if !fractions.iter().any(|f| f == &cell.fraction) {
                fractions.push(cell.fraction);
            }
        }
        let _ = writeln!(out, "-- means over seeds --");
        for f in fractions {
            let group: Vec<&SweepCell> =
                self.cells.iter().filter(|c| c.fraction == f).collect();
            let n = group.len() as f64;
            let ratio: f64 = group
                .iter()
                .map(|c| c.report.aggregates().success_ratio())
                .sum::<f64>()
                / n;
            let calls: f64 = group
                .iter()
                .map(|c| c.report.aggregates().avg_total_calls)
                .sum::<f64>()
                / n;
            let _ = writeln!(
                out,
                "{:>9} {:>6} {:>11.2}% {:>35.2}",
                f,
                "-",
                ratio * 100.0,
                calls
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn episode(instance: &str, rep: u32, solved: bool, p: usize, e: usize) -> EpisodeReport {
        EpisodeReport {
            instance: instance.to_string(),
            repetition: rep,
            status: if solved {
                EpisodeStatus::Solved
            } else {
                EpisodeStatus::Exhausted
            },
            solved,
            steps: if solved { 3 } else { 0 },
            nodes: 10,
            backend_calls: BackendCalls {
                proposer: p,
                evaluator: e,
            },
            detail: solved.then(|| "(3*8)".to_string()),
            abort_error: None,
        }
    }

    #[test]
    fn aggregates_recompute_from_rows_exactly() {
        let episodes = vec![
            episode("901", 0, true, 1, 4),
            episode("902", 0, false, 3, 17),
            episode("903", 0, true, 0, 0),
        ];
        let report = ExperimentReport {
            config_echo: "test".into(),
            episodes: episodes.clone(),
            elapsed: Duration::from_millis(5),
        };
        let rows = report.render_rows();
        // Re-parse the rows and recompute.
        let mut solved = 0usize;
        let mut p = 0usize;
        let mut e = 0usize;
        let mut total = 0usize;
        for line in rows.lines().filter(|l| !l.starts_with('#')) {
            let cols: Vec<&str> = line.split('\t').collect();
            total += 1;
            solved += cols[2].parse::<usize>().unwrap();
            p += cols[6].parse::<usize>().unwrap();
            e += cols[7].parse::<usize>().unwrap();
        }
        let a = report.aggregates();
        assert_eq!(a.total, total);
        assert_eq!(a.solved, solved);
        assert_eq!(a.avg_proposer_calls, p as f64 / total as f64);
        assert_eq!(a.avg_evaluator_calls, e as f64 / total as f64);
        assert_eq!(a.avg_total_calls, (p + e) as f64 / total as f64);
    }

    #[test]
    fn rows_exclude_timing() {
        let mut report = ExperimentReport {
            config_echo: "test".into(),
            episodes: vec![episode("1", 0, true, 1, 1)],
            elapsed: Duration::from_millis(111),
        };
        let first = report.render_rows();
        report.elapsed = Duration::from_millis(999);
        assert_eq!(first, report.render_rows());
        assert!(report.render_human().contains("elapsed"));
    }
}
