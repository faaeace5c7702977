//! Deterministic SVG rendering of trace columns over time.
//!
//! Columns are grouped into stacked panels by unit — speeds (m/s),
//! distances (m), acceleration (m/s²), and the mode signal — all sharing
//! the time axis. Every mode change is drawn as a dashed vertical rule
//! across every panel, and a collision ends the plot with a labelled red
//! marker. Output depends only on the trace contents and the column
//! selection, so identical inputs produce identical bytes.

use std::fmt::Write;

use cruisecheck::harness::Trace;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const WIDTH: f64 = 880.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const TITLE_HEIGHT: f64 = 32.0;
const PANEL_HEIGHT: f64 = 190.0;
const PANEL_GAP: f64 = 40.0;
const BOTTOM: f64 = 26.0;

/// Unit families, in fixed panel order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Speed,
    Distance,
    Accel,
    Mode,
}

const FAMILY_ORDER: [Family; 4] = [Family::Speed, Family::Distance, Family::Accel, Family::Mode];

fn family(column: &str) -> Family {
    match column {
        "v_ego" | "v_lead" => Family::Speed,
        "x_ego" | "x_lead" | "d_rel" | "d_safe" => Family::Distance,
        "a_ego" => Family::Accel,
        "mode" => Family::Mode,
        other => unreachable!("column `{other}` validated before plotting"),
    }
}

fn family_label(f: Family) -> &'static str {
    match f {
        Family::Speed => "speed [m/s]",
        Family::Distance => "distance [m]",
        Family::Accel => "acceleration [m/s²]",
        Family::Mode => "mode",
    }
}

/// Largest 1/2/5×10^k step that yields at most `target` intervals.
fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let normalized = raw / magnitude;
    let factor = if normalized <= 1.0 {
        1.0
    } else if normalized <= 2.0 {
        2.0
    } else if normalized <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * magnitude
}

/// Tick positions covering `[lo, hi]`, computed as exact integer multiples
/// of the step so repeated runs agree bit-for-bit.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Decimal places needed for labels on a 1/2/5×10^k step.
fn tick_decimals(step: f64) -> usize {
    let floor = step.log10().floor();
    if floor >= 0.0 {
        0
    } else {
        (-floor) as usize
    }
}

fn fmt_tick(v: f64, decimals: usize) -> String {
    // Avoid the "-0" label at the origin.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.decimals$}")
}

struct Panel {
    family: Family,
    /// (column name, palette color) in request order.
    columns: Vec<(String, &'static str)>,
    y_min: f64,
    y_max: f64,
    top: f64,
}

/// Renders the selected columns as a standalone SVG document.
///
/// `columns` must be non-empty, deduplicated, and contain only known trace
/// column names (the caller validates); the trace must have at least one
/// sample, which `Trace` parsing and the simulator both guarantee.
pub fn render_svg(trace: &Trace, columns: &[String]) -> String {
    let samples = &trace.samples;
    assert!(!samples.is_empty(), "cannot plot an empty trace");

    // Time range, padded when degenerate so the scale stays finite.
    let t0 = samples[0].t;
    let t1 = samples[samples.len() - 1].t;
    let (t_lo, t_hi) = if t1 > t0 { (t0, t1) } else { (t0 - 0.5, t0 + 0.5) };

    // Group the request into panels, keeping request order inside each.
    let mut panels: Vec<Panel> = Vec::new();
    for fam in FAMILY_ORDER {
        let cols: Vec<(String, &'static str)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| family(c) == fam)
            .map(|(i, c)| (c.clone(), PALETTE[i % PALETTE.len()]))
            .collect();
        if cols.is_empty() {
            continue;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (name, _) in &cols {
            for s in samples {
                let v = s.field(name).expect("validated column");
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        panels.push(Panel {
            family: fam,
            columns: cols,
            y_min: lo - pad,
            y_max: hi + pad,
            top: 0.0,
        });
    }

    let mut y_cursor = TITLE_HEIGHT;
    for p in &mut panels {
        p.top = y_cursor;
        y_cursor += PANEL_HEIGHT + PANEL_GAP;
    }
    let height = y_cursor - PANEL_GAP + BOTTOM;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let sx = |t: f64| MARGIN_LEFT + (t - t_lo) / (t_hi - t_lo) * plot_w;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="DejaVu Sans, Helvetica, Arial, sans-serif" font-size="12">"##
    );
    let _ = writeln!(svg, r##"<rect width="{WIDTH}" height="{height}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<text x="{MARGIN_LEFT}" y="20" font-size="14">trace plot: {}</text>"##,
        columns.join(", ")
    );

    // Mode-change times, marked in every panel.
    let switch_times: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[0].mode != w[1].mode)
        .map(|w| w[1].t)
        .collect();

    let x_ticks = ticks(t_lo, t_hi);
    let x_decimals = tick_decimals(nice_step(t_hi - t_lo, 5));

    for (pi, panel) in panels.iter().enumerate() {
        let py = panel.top;
        let sy = |v: f64| py + PANEL_HEIGHT - (v - panel.y_min) / (panel.y_max - panel.y_min) * PANEL_HEIGHT;
        let _ = writeln!(svg, r##"<g class="panel" data-unit="{}">"##, family_label(panel.family));

        // Horizontal grid and y tick labels.
        let y_ticks = ticks(panel.y_min, panel.y_max);
        let y_decimals = tick_decimals(nice_step(panel.y_max - panel.y_min, 5));
        for v in &y_ticks {
            let y = sy(*v);
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e6e6e6"/>"##,
                MARGIN_LEFT + plot_w
            );
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                fmt_tick(*v, y_decimals)
            );
        }

        // X ticks under the panel.
        for t in &x_ticks {
            let x = sx(*t);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333333"/>"##,
                py + PANEL_HEIGHT,
                py + PANEL_HEIGHT + 4.0
            );
            let _ = writeln!(
                svg,
                r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                py + PANEL_HEIGHT + 17.0,
                fmt_tick(*t, x_decimals)
            );
        }

        // Mode switches as dashed rules.
        for t in &switch_times {
            let x = sx(*t);
            let _ = writeln!(
                svg,
                r##"<line class="mode-switch" x1="{x:.2}" y1="{py:.2}" x2="{x:.2}" y2="{:.2}" stroke="#999999" stroke-dasharray="4 3"/>"##,
                py + PANEL_HEIGHT
            );
        }

        // Collision marker.
        if let Some(c) = trace.collision {
            let x = sx(c.time);
            let _ = writeln!(
                svg,
                r##"<line class="collision" x1="{x:.2}" y1="{py:.2}" x2="{x:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
                py + PANEL_HEIGHT
            );
            if pi == 0 {
                let _ = writeln!(
                    svg,
                    r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">collision t={}s</text>"##,
                    x + 5.0,
                    py + 14.0,
                    c.time
                );
            }
        }

        // The data series.
        for (name, color) in &panel.columns {
            let mut points = String::new();
            for s in samples {
                let v = s.field(name).expect("validated column");
                let _ = write!(points, "{:.2},{:.2} ", sx(s.t), sy(v));
            }
            let _ = writeln!(
                svg,
                r##"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"##,
                points.trim_end()
            );
        }

        // Panel frame, unit label, legend.
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN_LEFT}" y="{py:.2}" width="{plot_w:.2}" height="{PANEL_HEIGHT}" fill="none" stroke="#333333"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<text transform="translate(14,{:.2}) rotate(-90)" text-anchor="middle">{}</text>"##,
            py + PANEL_HEIGHT / 2.0,
            family_label(panel.family)
        );
        let mut legend_x = MARGIN_LEFT + 10.0;
        let legend_y = py + 16.0;
        for (name, color) in &panel.columns {
            let _ = writeln!(
                svg,
                r##"<line x1="{legend_x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"##,
                legend_y - 4.0,
                legend_x + 16.0,
                legend_y - 4.0
            );
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{legend_y:.2}">{name}</text>"##,
                legend_x + 21.0
            );
            legend_x += 21.0 + 7.0 * name.len() as f64 + 16.0;
        }
        let _ = writeln!(svg, "</g>");
    }

    // Shared x axis label under the last panel.
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">t [s]</text>"##,
        MARGIN_LEFT + plot_w / 2.0,
        height - 6.0
    );
    let _ = writeln!(svg, "</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use cruisecheck::harness::{Collision, Sample};

    fn sample(t: f64, v_ego: f64, d_rel: f64, mode: i8) -> Sample {
        Sample {
            t,
            x_ego: t,
            v_ego,
            a_ego: 0.0,
            x_lead: t + d_rel,
            v_lead: 5.0,
            d_rel,
            d_safe: 10.0 + 1.4 * v_ego,
            mode,
        }
    }

    fn two_mode_trace() -> Trace {
        Trace {
            samples: vec![
                sample(0.0, 3.0, 20.0, 1),
                sample(0.1, 3.5, 19.0, 1),
                sample(0.2, 4.0, 18.0, -1),
                sample(0.3, 4.5, 17.0, -1),
            ],
            collision: None,
            fingerprint: None,
        }
    }

    #[test]
    fn nice_step_picks_one_two_five() {
        assert_eq!(nice_step(10.0, 5), 2.0);
        assert_eq!(nice_step(45.0, 5), 10.0);
        assert_eq!(nice_step(1.0, 5), 0.2);
        assert_eq!(nice_step(0.7, 5), 0.2);
    }

    #[test]
    fn ticks_cover_range_with_exact_multiples() {
        assert_eq!(ticks(0.0, 45.0), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        assert_eq!(ticks(-1.1, 1.1), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn tick_labels_match_step_resolution() {
        assert_eq!(fmt_tick(0.5, tick_decimals(0.5)), "0.5");
        assert_eq!(fmt_tick(10.0, tick_decimals(10.0)), "10");
        assert_eq!(fmt_tick(-0.0, tick_decimals(1.0)), "0");
    }

    #[test]
    fn speed_and_distance_columns_get_separate_panels() {
        let svg = render_svg(
            &two_mode_trace(),
            &["v_ego".to_string(), "d_rel".to_string()],
        );
        assert_eq!(svg.matches(r##"<g class="panel""##).count(), 2);
        assert!(svg.contains("speed [m/s]"));
        assert!(svg.contains("distance [m]"));
        // The single mode change shows up once per panel.
        assert_eq!(svg.matches(r##"class="mode-switch""##).count(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let trace = two_mode_trace();
        let cols = vec!["v_ego".to_string(), "v_lead".to_string()];
        assert_eq!(render_svg(&trace, &cols), render_svg(&trace, &cols));
    }

    #[test]
    fn collision_marker_is_labelled() {
        let mut trace = two_mode_trace();
        trace.collision = Some(Collision { time: 0.3 });
        let svg = render_svg(&trace, &["d_rel".to_string()]);
        assert!(svg.contains(r##"class="collision""##));
        assert!(svg.contains("collision t=0.3s"));
    }
}
