//! CSV renderings of the metric, dataset, faithfulness and harness tables.

use acnli_core::agreement::{AgreementReport, FlatTable, GedMatrix};
use acnli_core::cae::NodeType;
use acnli_core::faithfulness::{format_mean_sd, MethodAggregate, MetricBreakdown};
use acnli_core::harness::{format_percent, SuccessRow};
use acnli_core::pairgen::HopCounts;

/// p-value below which the correct column gets a `*`.
pub const SIGNIFICANCE: f64 = 0.001;

fn render<R, I, S>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_default()
}

/// One row per report, full precision.
pub fn agreement_csv(reports: &[AgreementReport]) -> String {
    let mut header = vec!["scope", "model_a", "model_b", "requirement", "pairs"];
    header.extend(NodeType::ALL.iter().map(|t| t.as_str()));
    header.extend(["ged", "ged_exact"]);
    render(
        &header,
        reports.iter().map(|r| {
            let mut row = vec![
                r.scope.as_str().to_string(),
                r.model_a.clone(),
                r.model_b.clone(),
                r.requirement.clone().unwrap_or_default(),
                r.pair_count.to_string(),
            ];
            row.extend(r.mean_flat.0.iter().map(|x| format!("{x:.6}")));
            row.push(opt(r.mean_ged, 6));
            row.push(r.ged_exact.to_string());
            row
        }),
    )
}

/// `Type,Intra-model,Inter-model` with two decimals.
pub fn flat_table_csv(table: &FlatTable) -> String {
    render(
        &["Type", "Intra-model", "Inter-model"],
        NodeType::ALL.iter().map(|&t| {
            [
                t.as_str().to_string(),
                opt(table.intra.map(|m| m.get(t)), 2),
                opt(table.inter.map(|m| m.get(t)), 2),
            ]
        }),
    )
}

/// Square model x model table of mean GED, two decimals; empty cells have no
/// pairs.
pub fn ged_matrix_csv(m: &GedMatrix) -> String {
    let mut header = vec!["model"];
    header.extend(m.models.iter().map(String::as_str));
    render(
        &header,
        m.models.iter().zip(&m.values).map(|(name, row)| {
            let mut r = vec![name.clone()];
            r.extend(row.iter().map(|v| opt(*v, 2)));
            r
        }),
    )
}

fn cells(b: &MetricBreakdown) -> [String; 3] {
    let f = |s: &Option<acnli_core::stats::Summary>| s.as_ref().map(format_mean_sd).unwrap_or_default();
    let star = if b.p_value.is_some_and(|p| p < SIGNIFICANCE) { "*" } else { "" };
    [f(&b.overall), format!("{}{star}", f(&b.correct)), f(&b.incorrect)]
}

/// `mean(sd)` per `(model, explainer)`; a `*` on the correct column marks a
/// correct-vs-incorrect difference with p below [`SIGNIFICANCE`].
pub fn faithfulness_table_csv(rows: &[(String, MethodAggregate)]) -> String {
    render(
        &[
            "Model",
            "Explainer",
            "Compr Overall",
            "Compr Correct",
            "Compr Incorrect",
            "Suff Overall",
            "Suff Correct",
            "Suff Incorrect",
        ],
        rows.iter().map(|(model, agg)| {
            let mut r = vec![model.clone(), agg.method.clone()];
            r.extend(cells(&agg.comprehensiveness));
            r.extend(cells(&agg.sufficiency));
            r
        }),
    )
}

/// Correct-vs-incorrect permutation p-values behind the table stars.
pub fn faithfulness_pvalues_csv(rows: &[(String, MethodAggregate)]) -> String {
    render(
        &["Model", "Explainer", "Compr p", "Suff p"],
        rows.iter().map(|(model, agg)| {
            [
                model.clone(),
                agg.method.clone(),
                agg.comprehensiveness.p_value.map(|p| format!("{p:.6}")).unwrap_or_default(),
                agg.sufficiency.p_value.map(|p| format!("{p:.6}")).unwrap_or_default(),
            ]
        }),
    )
}

/// `Model,Err Cnt,Success %`.
pub fn success_table_csv(rows: &[SuccessRow]) -> String {
    render(
        &["Model", "Err Cnt", "Success %"],
        rows.iter()
            .map(|r| [r.model.clone(), r.error_count.to_string(), format_percent(r.success_percent)]),
    )
}

/// `Metric,Count` with error and total file counts.
pub fn error_summary_csv(errors: usize, total: usize) -> String {
    render(
        &["Metric", "Count"],
        [
            ["Number of error files".to_string(), errors.to_string()],
            ["Total files".to_string(), total.to_string()],
        ],
    )
}

/// `All` then `#k_hop` rows for k in 1..=max_hop, one column per named
/// partition (e.g. Train, Test).
pub fn hop_table_csv(columns: &[(&str, &HopCounts)], max_hop: usize) -> String {
    let mut header = vec![""];
    header.extend(columns.iter().map(|c| c.0));
    let mut rows = vec![std::iter::once("All".to_string())
        .chain(columns.iter().map(|c| c.1.all.to_string()))
        .collect::<Vec<_>>()];
    for k in 1..=max_hop {
        rows.push(
            std::iter::once(format!("#{k}_hop"))
                .chain(columns.iter().map(|c| c.1.hop(k).to_string()))
                .collect(),
        );
    }
    render(&header, rows)
}
