//! Minimal SVG line charts: an estimate with a shaded `+- 3 se` band
//! against a theory curve.

use std::fmt::Write as _;

use crate::campaign::CampaignSummary;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

pub struct Series<'a> {
    pub x: &'a [f64],
    pub estimate: &'a [f64],
    pub se: &'a [f64],
    pub theory: &'a [f64],
}

pub fn band_chart(title: &str, x_label: &str, s: &Series<'_>) -> String {
    let lo = s.estimate.iter().zip(s.se).map(|(e, se)| e - 3.0 * se).chain(s.theory.iter().copied());
    let hi = s.estimate.iter().zip(s.se).map(|(e, se)| e + 3.0 * se).chain(s.theory.iter().copied());
    let (mut y0, mut y1) = (lo.fold(f64::INFINITY, f64::min), hi.fold(f64::NEG_INFINITY, f64::max));
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let (x0, x1) = (s.x.iter().copied().fold(f64::INFINITY, f64::min), s.x.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let line = |ys: &mut dyn Iterator<Item = f64>| {
        s.x.iter().zip(ys).map(|(&x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect::<Vec<_>>().join(" ")
    };

    let upper = line(&mut s.estimate.iter().zip(s.se).map(|(e, se)| e + 3.0 * se));
    let lower: Vec<String> = s
        .x
        .iter()
        .zip(s.estimate.iter().zip(s.se))
        .rev()
        .map(|(&x, (e, se))| format!("{:.2},{:.2}", px(x), py(e - 3.0 * se)))
        .collect();

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        svg,
        r#"<path d="M{} {} {} {} {}" stroke="black" fill="none"/>"#,
        PAD, PAD, PAD, H - PAD, format_args!("L{} {}", W - PAD, H - PAD)
    );
    let _ = writeln!(svg, r##"<polygon points="{upper} {}" fill="#9ecae1" fill-opacity="0.6"/>"##, lower.join(" "));
    let _ = writeln!(svg, r##"<polyline points="{}" stroke="#08519c" fill="none" stroke-width="2"/>"##, line(&mut s.estimate.iter().copied()));
    let _ = writeln!(svg, r##"<polyline points="{}" stroke="#d62728" fill="none" stroke-dasharray="6 4" stroke-width="2"/>"##, line(&mut s.theory.iter().copied()));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, PAD - 4.0, PAD + 4.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y0:.4}</text>"#, PAD - 4.0, H - PAD);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x0:.3}</text>"#, PAD, H - PAD + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.3}</text>"#, W - PAD, H - PAD + 16.0);
    svg.push_str("</svg>\n");
    svg
}

/// Mean and variance overlays for every vertex count in the campaign.
pub fn campaign_plots(summary: &CampaignSummary) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for s in &summary.sizes {
        if !s.mean.is_empty() {
            let x: Vec<f64> = s.mean.iter().map(|m| m.t).collect();
            let est: Vec<f64> = s.mean.iter().map(|m| m.mean).collect();
            let se: Vec<f64> = s.mean.iter().map(|m| m.se).collect();
            let th: Vec<f64> = s.mean.iter().map(|m| m.theory).collect();
            let series = Series { x: &x, estimate: &est, se: &se, theory: &th };
            out.push((format!("mean_n{}.svg", s.n), band_chart(&format!("mean eigenvalue, N = {}", s.n), "t", &series)));
        }
        if let Some(c) = &s.covariance {
            let diag: Vec<_> = c.entries.iter().filter(|e| e.t1 == e.t2).collect();
            let x: Vec<f64> = diag.iter().map(|e| e.t1).collect();
            let est: Vec<f64> = diag.iter().map(|e| e.cov_hat).collect();
            let se: Vec<f64> = diag.iter().map(|e| e.se).collect();
            let th: Vec<f64> = diag.iter().map(|e| e.theory).collect();
            let series = Series { x: &x, estimate: &est, se: &se, theory: &th };
            out.push((format!("variance_n{}.svg", s.n), band_chart(&format!("eigenvalue variance, N = {}", s.n), "t", &series)));
        }
    }
    out
}
