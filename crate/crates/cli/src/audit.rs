//! Measured reads against configured ceilings.

use serde::{Deserialize, Serialize};

use crate::campaign::CampaignResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub campaign: String,
    pub trial: usize,
    pub queries: u64,
    pub ceiling: f64,
    /// `queries / ceiling`.
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditTable {
    pub rows: Vec<AuditRow>,
    pub violations: usize,
    pub max_ratio: f64,
}

/// Flags every run whose reads exceed its ceiling. Runs that failed (no
/// query count) are skipped.
pub fn audit_queries<'a>(results: impl IntoIterator<Item = &'a CampaignResult>) -> AuditTable {
    let rows: Vec<AuditRow> = results
        .into_iter()
        .flat_map(|c| {
            c.rows.iter().filter_map(move |r| {
                let queries = r.queries?;
                let ratio = if r.ceiling > 0.0 {
                    queries as f64 / r.ceiling
                } else {
                    f64::INFINITY
                };
                Some(AuditRow {
                    campaign: c.name.clone(),
                    trial: r.trial,
                    queries,
                    ceiling: r.ceiling,
                    ratio,
                    flagged: queries as f64 > r.ceiling,
                })
            })
        })
        .collect();
    AuditTable {
        violations: rows.iter().filter(|r| r.flagged).count(),
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        rows,
    }
}

/// Ratio of mean reads between two campaigns, `after / before`.
pub fn query_growth(before: &CampaignResult, after: &CampaignResult) -> f64 {
    after.aggregate.mean_queries / before.aggregate.mean_queries
}
