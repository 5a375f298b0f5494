//! Figure panels built from a finished preset run.

use dstbench_core::dst::{asymptotic_pure, bias_estimate};
use dstbench_core::harness::{detect_elbow, ExperimentConfig, SummaryRow, TrueState};
use dstbench_core::{Method, PointerKind, Result};

use crate::commands::Outcome;
use crate::svg::{Arrow, HLine, Marker, Panel, Series};

fn config_rows(summary: &[SummaryRow], config: usize) -> impl Iterator<Item = &SummaryRow> {
    summary.iter().filter(move |r| r.config == config)
}

fn dst_label(cfg: &ExperimentConfig) -> String {
    format!("{} {} phi={}", cfg.method, cfg.pointer, cfg.phi)
}

/// Bias floor drawn for a DST curve: the mean D' at the largest N, or for
/// general DST (no D' column) the pure-state formula applied to the pure
/// asymptotic state, which is only indicative.
fn bias_floor(cfg: &ExperimentConfig, rows: &[&SummaryRow], truth: &TrueState) -> Option<f64> {
    match cfg.method {
        Method::PureDst => rows.iter().rev().find_map(|r| r.mean_dprime),
        Method::GeneralDst => {
            let psi = asymptotic_pure(&truth.density(), cfg.phi, cfg.pointer, 0).ok()?;
            bias_estimate(&psi, cfg.phi, cfg.pointer).ok().map(|b| b.d_prime)
        }
        Method::Tomography => None,
    }
}

/// D vs N on log-log axes with D' floors and elbow arrows.
fn comparison_panel(title: &str, out: &Outcome, error_bars: bool) -> Panel {
    let mut panel = Panel {
        title: title.into(),
        x_label: "N".into(),
        y_label: "D".into(),
        x_log: true,
        y_log: true,
        ..Panel::default()
    };
    for (ci, cfg) in out.sweep.configs().iter().enumerate() {
        let rows: Vec<&SummaryRow> = config_rows(&out.summary, ci).collect();
        let points: Vec<(f64, f64, Option<f64>)> = rows
            .iter()
            .filter_map(|r| Some((r.n as f64, r.mean_d?, if error_bars { r.std_d } else { None })))
            .collect();
        let (marker, label) = match cfg.method {
            Method::Tomography => (Marker::Star, "tomography".to_string()),
            _ if error_bars && cfg.phi <= 0.05 => (Marker::Square, dst_label(cfg)),
            _ if error_bars => (Marker::Circle, dst_label(cfg)),
            _ if cfg.phi <= 0.05 => (Marker::Circle, dst_label(cfg)),
            _ => (Marker::Triangle, dst_label(cfg)),
        };
        panel.series.push(Series {
            label,
            points,
            marker,
            dashed: cfg.pointer == PointerKind::Qubit,
            filled: cfg.pointer != PointerKind::Gaussian,
            color: ci,
        });
        if error_bars {
            continue;
        }
        if let Some(floor) = bias_floor(cfg, &rows, out.sweep.truth(ci)) {
            if floor > 0.0 {
                panel.hlines.push(HLine { y: floor, color: ci });
                let curve: Vec<(u64, f64)> = rows.iter().filter_map(|r| Some((r.n, r.mean_d?))).collect();
                if let Ok(n_star) = detect_elbow(&curve, floor) {
                    let y = curve
                        .iter()
                        .min_by(|a, b| {
                            ((a.0 as f64).ln() - n_star.ln())
                                .abs()
                                .total_cmp(&((b.0 as f64).ln() - n_star.ln()).abs())
                        })
                        .map_or(floor, |p| p.1);
                    panel.arrows.push(Arrow { x: n_star, y });
                }
            }
        }
    }
    panel
}

/// D, D' and D(rho_a, rho_t) against phi for one sign of alpha.
fn coupling_panel(out: &Outcome, alpha_sign: f64) -> Panel {
    let mut panel = Panel {
        title: format!("alpha = {}", 2.0 * alpha_sign),
        x_label: "phi".into(),
        y_label: "trace distance".into(),
        x_log: false,
        y_log: true,
        ..Panel::default()
    };
    for (pi, pointer) in [PointerKind::Qubit, PointerKind::Gaussian].into_iter().enumerate() {
        let pick = |exact: bool| -> Vec<(&ExperimentConfig, usize)> {
            out.sweep
                .configs()
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    c.pointer == pointer && c.exact == exact && c.state.alpha().is_some_and(|a| a.re * alpha_sign > 0.0)
                })
                .map(|(i, c)| (c, i))
                .collect()
        };
        let mean_of = |cfgs: &[(&ExperimentConfig, usize)], f: &dyn Fn(&SummaryRow) -> Option<f64>| {
            cfgs.iter()
                .filter_map(|(c, i)| Some((c.phi, f(config_rows(&out.summary, *i).next()?)?, None)))
                .collect::<Vec<_>>()
        };
        let sampled = pick(false);
        let exact = pick(true);
        let dashed = pointer == PointerKind::Qubit;
        let filled = dashed;
        let base = 3 * pi;
        panel.series.push(Series {
            label: format!("{pointer}: D"),
            points: mean_of(&sampled, &|r| r.mean_d),
            marker: Marker::Square,
            dashed,
            filled,
            color: base,
        });
        panel.series.push(Series {
            label: format!("{pointer}: D'"),
            points: mean_of(&sampled, &|r| r.mean_dprime),
            marker: Marker::Star,
            dashed,
            filled,
            color: base + 1,
        });
        panel.series.push(Series {
            label: format!("{pointer}: D(rho_a,rho_t)"),
            points: mean_of(&exact, &|r| r.mean_d),
            marker: Marker::Circle,
            dashed,
            filled,
            color: base + 2,
        });
    }
    panel
}

pub fn figure_panels(name: &str, out: &Outcome) -> Result<Vec<Panel>> {
    Ok(match name {
        "fig1a" => vec![comparison_panel("pure DST vs tomography, d = 2", out, false)],
        "fig1b" => vec![comparison_panel("pure DST vs tomography, d = 10", out, false)],
        "fig2a" => vec![comparison_panel("general DST vs tomography, d = 2", out, false)],
        "fig2b" => vec![comparison_panel("general DST vs tomography, d = 10", out, false)],
        "fig3a" => vec![comparison_panel("DST error bars, d = 2", out, true)],
        "fig3b" => vec![comparison_panel("tomography error bars, d = 2", out, true)],
        "fig4" => vec![coupling_panel(out, -1.0), coupling_panel(out, 1.0)],
        other => return Err(dstbench_core::Error::UnknownPreset(other.into())),
    })
}
