//! Report rendering: fixed-column tables (text, CSV, JSON) and
//! self-contained SVG bar charts with embedded value labels. All output is
//! deterministic for a fixed report.

use super::{BenchReport, OutputFormat};

fn fmt_metric(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "n/a".to_string(),
    }
}

/// Renders the comparison table. Columns are
/// Classifier | Accuracy | Sensitivity | Precision | Specificity,
/// rows in canonical variant order, metrics at 4 decimal places.
pub fn render_table(report: &BenchReport, format: OutputFormat) -> String {
    let rows: Vec<[String; 5]> = report
        .entries
        .iter()
        .map(|e| {
            let m = e.result.as_ref().map(|r| r.pooled);
            [
                e.display_name.clone(),
                fmt_metric(m.and_then(|m| m.accuracy)),
                fmt_metric(m.and_then(|m| m.sensitivity)),
                fmt_metric(m.and_then(|m| m.precision)),
                fmt_metric(m.and_then(|m| m.specificity)),
            ]
        })
        .collect();
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("Classifier,Accuracy,Sensitivity,Precision,Specificity\n");
            for row in &rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => report.to_json(),
        _ => {
            let header = [
                "Classifier",
                "Accuracy",
                "Sensitivity",
                "Precision",
                "Specificity",
            ];
            let name_width = rows
                .iter()
                .map(|r| r[0].len())
                .chain([header[0].len()])
                .max()
                .unwrap();
            let mut out = format!(
                "{:<name_width$}  {:>11}  {:>11}  {:>11}  {:>11}\n",
                header[0], header[1], header[2], header[3], header[4]
            );
            for row in &rows {
                out.push_str(&format!(
                    "{:<name_width$}  {:>11}  {:>11}  {:>11}  {:>11}\n",
                    row[0], row[1], row[2], row[3], row[4]
                ));
            }
            out
        }
    }
}

pub struct ChartSet {
    /// One accuracy bar per classifier.
    pub accuracy: String,
    /// Grouped sensitivity/precision/specificity bars.
    pub metrics: String,
}

const CHART_HEIGHT: u32 = 400;
const PLOT_TOP: u32 = 40;
const PLOT_BOTTOM: u32 = 330;
const PLOT_LEFT: u32 = 60;

fn svg_header(width: u32, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{CHART_HEIGHT}\" viewBox=\"0 0 {width} {CHART_HEIGHT}\">\n\
         <style>text {{ font-family: monospace; }}</style>\n\
         <text x=\"{PLOT_LEFT}\" y=\"20\" font-size=\"14\">{title}</text>\n"
    )
}

fn svg_axes(width: u32) -> String {
    let mut out = String::new();
    let plot_h = (PLOT_BOTTOM - PLOT_TOP) as f64;
    for i in 0..=4 {
        let v = i as f64 * 0.25;
        let y = PLOT_BOTTOM as f64 - v * plot_h;
        out.push_str(&format!(
            "<line x1=\"{PLOT_LEFT}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n\
             <text x=\"{}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{v:.2}</text>\n",
            width - 10,
            PLOT_LEFT - 6,
            y + 3.0
        ));
    }
    out.push_str(&format!(
        "<line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_TOP}\" x2=\"{PLOT_LEFT}\" y2=\"{PLOT_BOTTOM}\" stroke=\"#000000\" stroke-width=\"1\"/>\n\
         <line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_BOTTOM}\" x2=\"{}\" y2=\"{PLOT_BOTTOM}\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
        width - 10
    ));
    out
}

fn bar(x: f64, width: f64, value: f64, color: &str, label: bool) -> String {
    let plot_h = (PLOT_BOTTOM - PLOT_TOP) as f64;
    let h = value.clamp(0.0, 1.0) * plot_h;
    let y = PLOT_BOTTOM as f64 - h;
    let mut out = format!(
        "<rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{width:.2}\" height=\"{h:.2}\" fill=\"{color}\" data-value=\"{value:.6}\"/>\n"
    );
    if label {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" text-anchor=\"middle\">{value:.4}</text>\n",
            x + width / 2.0,
            y - 4.0
        ));
    }
    out
}

fn x_label(x: f64, text: &str) -> String {
    format!(
        "<text x=\"{x:.2}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-35 {x:.2} {})\">{text}</text>\n",
        PLOT_BOTTOM + 14,
        PLOT_BOTTOM + 14
    )
}

/// Builds the per-classifier accuracy chart and the grouped
/// sensitivity/precision/specificity chart. Byte-deterministic for a
/// fixed report; bars carry class="bar" and a data-value attribute so the
/// geometry can be checked by re-parsing.
pub fn render_charts(report: &BenchReport) -> ChartSet {
    let n = report.entries.len() as u32;
    let band = 70u32;
    let width = PLOT_LEFT + n * band + 40;

    let mut accuracy = svg_header(width, "Predictive accuracy");
    accuracy.push_str(&svg_axes(width));
    for (i, e) in report.entries.iter().enumerate() {
        let x0 = PLOT_LEFT as f64 + i as f64 * band as f64 + 12.0;
        if let Some(acc) = e.pooled_accuracy() {
            accuracy.push_str(&bar(x0, band as f64 - 24.0, acc, "#4878a8", true));
        }
        accuracy.push_str(&x_label(x0 + (band as f64 - 24.0), &e.display_name));
    }
    accuracy.push_str("</svg>\n");

    let mut metrics = svg_header(width, "Sensitivity, precision and specificity");
    metrics.push_str(&svg_axes(width));
    let series = [
        ("sensitivity", "#4878a8"),
        ("precision", "#e49444"),
        ("specificity", "#6a9f58"),
    ];
    let sub = (band as f64 - 24.0) / 3.0;
    for (i, e) in report.entries.iter().enumerate() {
        let x0 = PLOT_LEFT as f64 + i as f64 * band as f64 + 12.0;
        if let Some(r) = &e.result {
            let values = [
                r.pooled.sensitivity,
                r.pooled.precision,
                r.pooled.specificity,
            ];
            for (s, (value, (_, color))) in values.iter().zip(series.iter().map(|x| *x)).enumerate()
            {
                if let Some(v) = value {
                    metrics.push_str(&bar(x0 + s as f64 * sub, sub - 2.0, *v, color, false));
                }
            }
        }
        metrics.push_str(&x_label(x0 + (band as f64 - 24.0), &e.display_name));
    }
    // legend
    for (i, (name, color)) in series.iter().enumerate() {
        let x = PLOT_LEFT as f64 + 140.0 * i as f64 + 60.0;
        metrics.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"26\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n\
             <text x=\"{:.1}\" y=\"35\" font-size=\"10\">{name}</text>\n",
            x + 14.0
        ));
    }
    metrics.push_str("</svg>\n");

    ChartSet { accuracy, metrics }
}

#[cfg(test)]
mod tests {
    use super::super::tests::entry_with_accuracy;
    use super::*;
    use crate::classifiers::Variant;

    fn stub_report(entries: Vec<super::super::BenchEntry>) -> BenchReport {
        let ranking = entries.iter().map(|e| e.classifier.clone()).collect();
        BenchReport {
            schema_version: 1,
            code_version: "test".into(),
            config: crate::bench::parse_config("[dataset]\npath = x\n").unwrap(),
            dataset_summary: crate::dataset::summarize(
                &crate::dataset::synth_generate(
                    &crate::dataset::SynthSpec::two_gaussians(1, 5.0),
                    4,
                    1,
                )
                .unwrap(),
            ),
            plan_hash: "0".into(),
            entries,
            ranking,
        }
    }

    #[test]
    fn csv_row_format_matches_contract() {
        let report = stub_report(vec![entry_with_accuracy(Variant::DecisionTree, 97, 100)]);
        let csv = render_table(&report, OutputFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "Classifier,Accuracy,Sensitivity,Precision,Specificity"
        );
        // tp=97 fn=3 fp=0 tn=100 over 200: acc 0.9850, sens 0.9700, prec 1, spec 1
        assert_eq!(
            lines.next().unwrap(),
            "Decision Tree,0.9850,0.9700,1.0000,1.0000"
        );
    }

    #[test]
    fn decision_tree_table2_style_row() {
        // the canonical pooled counts (243,7,0,150) scaled onto this helper
        // are exercised end-to-end in the acceptance suite; here we check
        // the exact 4-decimal formatting rules
        assert_eq!(fmt_metric(Some(243.0 / 250.0)), "0.9720");
        assert_eq!(fmt_metric(Some(1.0)), "1.0000");
        assert_eq!(fmt_metric(Some(393.0 / 400.0)), "0.9825");
        assert_eq!(fmt_metric(None), "n/a");
    }

    #[test]
    fn text_table_has_header_and_aligned_rows() {
        let report = stub_report(vec![
            entry_with_accuracy(Variant::DecisionTree, 90, 90),
            entry_with_accuracy(Variant::QuadraticSvm, 95, 80),
        ]);
        let text = render_table(&report, OutputFormat::Text);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("Classifier"));
        assert!(lines[1].starts_with("Decision Tree"));
        assert!(lines[2].starts_with("Quadratic SVM"));
    }

    #[test]
    fn json_round_trips_to_the_same_report() {
        let report = stub_report(vec![entry_with_accuracy(Variant::FineKnn, 88, 92)]);
        let json = render_table(&report, OutputFormat::Json);
        let back = BenchReport::from_json(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn accuracy_chart_has_one_bar_per_classifier() {
        let entries: Vec<_> = [
            Variant::DecisionTree,
            Variant::LinearDiscriminant,
            Variant::FineKnn,
        ]
        .into_iter()
        .map(|v| entry_with_accuracy(v, 90, 90))
        .collect();
        let report = stub_report(entries);
        let charts = render_charts(&report);
        assert_eq!(charts.accuracy.matches("class=\"bar\"").count(), 3);
        assert_eq!(charts.metrics.matches("class=\"bar\"").count(), 9);
    }

    #[test]
    fn single_classifier_chart_keeps_full_axis() {
        let report = stub_report(vec![entry_with_accuracy(Variant::CubicKnn, 50, 60)]);
        let charts = render_charts(&report);
        assert_eq!(charts.accuracy.matches("class=\"bar\"").count(), 1);
        // the 1.00 gridline is still drawn
        assert!(charts.accuracy.contains(">1.00</text>"));
    }

    #[test]
    fn chart_bytes_are_deterministic() {
        let report = stub_report(vec![entry_with_accuracy(Variant::MediumKnn, 77, 77)]);
        let a = render_charts(&report);
        let b = render_charts(&report);
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!(a.metrics, b.metrics);
    }

    #[test]
    fn bar_heights_proportional_to_values() {
        let report = stub_report(vec![
            entry_with_accuracy(Variant::DecisionTree, 100, 100), // 1.0
            entry_with_accuracy(Variant::FineKnn, 50, 50),        // 0.5
        ]);
        let charts = render_charts(&report);
        let heights: Vec<f64> = charts
            .accuracy
            .lines()
            .filter(|l| l.contains("class=\"bar\""))
            .map(|l| {
                let h = l.split("height=\"").nth(1).unwrap();
                h[..h.find('"').unwrap()].parse::<f64>().unwrap()
            })
            .collect();
        assert_eq!(heights.len(), 2);
        let plot_h = (PLOT_BOTTOM - PLOT_TOP) as f64;
        assert!((heights[0] - plot_h).abs() / plot_h < 0.005);
        assert!((heights[1] - 0.5 * plot_h).abs() / plot_h < 0.005);
    }
}
