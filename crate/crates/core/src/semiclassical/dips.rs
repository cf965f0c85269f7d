use super::SpectrumPoint;

/// Only minima with T below this count as dips.
pub const DIP_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceDip {
    /// Δpc of the refined minimum, rad/s.
    pub position: f64,
    /// 1 − T at the minimum.
    pub depth: f64,
    /// Full width at half depth, rad/s.
    pub fwhm: f64,
}

/// Local transmission minima below [`DIP_THRESHOLD`], ordered by detuning.
///
/// Positions are refined with a parabola through the three bracketing
/// samples. Widths are taken at half depth between the minimum and the
/// unit baseline, interpolating linearly between samples. When a shoulder
/// merges into a neighbouring dip before reaching half depth, that side is
/// mirrored from the other.
pub fn find_dips(spectrum: &[SpectrumPoint]) -> Vec<ResonanceDip> {
    let x: Vec<f64> = spectrum.iter().map(|p| p.delta_pc).collect();
    let y: Vec<f64> = spectrum.iter().map(|p| p.transmission).collect();
    let n = y.len();
    let mut dips = Vec::new();
    if n < 3 {
        return dips;
    }
    for i in 1..n - 1 {
        if !(y[i] < y[i - 1] && y[i] <= y[i + 1] && y[i] < DIP_THRESHOLD) {
            continue;
        }
        let (pos, tmin) = parabolic_vertex(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1]);
        let tmin = tmin.clamp(0.0, y[i]);
        let depth = (1.0 - tmin).clamp(0.0, 1.0);
        let level = tmin + 0.5 * depth;

        let left = half_crossing(&x, &y, i, level, Side::Left).map(|xl| pos - xl);
        let right = half_crossing(&x, &y, i, level, Side::Right).map(|xr| xr - pos);
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => l + r,
            (Some(l), None) => 2.0 * l,
            (None, Some(r)) => 2.0 * r,
            (None, None) => x[n - 1] - x[0],
        };
        if fwhm > 0.0 {
            dips.push(ResonanceDip { position: pos, depth, fwhm });
        }
    }
    dips
}

fn parabolic_vertex(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let h = 0.5 * (x2 - x0);
    let curv = y0 - 2.0 * y1 + y2;
    if curv <= 0.0 || h <= 0.0 {
        return (x1, y1);
    }
    let off = 0.5 * (y0 - y2) / curv;
    let off = off.clamp(-1.0, 1.0);
    (x1 + off * h, y1 - 0.25 * (y0 - y2) * off)
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// Walks away from the minimum until T reaches `level`; gives up at the
/// first local maximum below `level` or at the grid edge.
fn half_crossing(x: &[f64], y: &[f64], i: usize, level: f64, side: Side) -> Option<f64> {
    let n = y.len();
    let mut k = i;
    loop {
        let next = match side {
            Side::Left if k > 0 => k - 1,
            Side::Right if k + 1 < n => k + 1,
            _ => return None,
        };
        if y[next] >= level {
            let f = (level - y[k]) / (y[next] - y[k]);
            return Some(x[k] + f * (x[next] - x[k]));
        }
        if y[next] < y[k] {
            return None;
        }
        k = next;
    }
}
