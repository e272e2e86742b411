use super::IntegralResult;
use crate::error::{Error, Result};

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

struct Acc {
    value: f64,
    /// Sum of `|value|` over accepted panels, a refined `∫|f|` estimate.
    abs: f64,
    error: f64,
    evaluations: u64,
    exhausted: bool,
}

/// Adaptive Simpson on `[a, b]` to relative tolerance `rel_tol`.
///
/// The tolerance is taken relative to a 16-panel Simpson estimate of `∫|f|`,
/// so integrands with cancelling lobes still get a meaningful target. When
/// that coarse scale overshoots (sharp peaks, integrable singularities) the
/// pass is repeated against the refined scale from the accepted panels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<IntegralResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("adaptive Simpson needs finite a < b, got [{a}, {b}]")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Usage(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numeric(format!("integrand is not finite at {x}"), v, f64::NAN))
        }
    };

    const SCALE_PANELS: usize = 16;
    let h = (b - a) / (2 * SCALE_PANELS) as f64;
    let mut samples = Vec::with_capacity(2 * SCALE_PANELS + 1);
    for k in 0..=2 * SCALE_PANELS {
        let x = if k == 2 * SCALE_PANELS { b } else { a + k as f64 * h };
        samples.push(eval(x)?);
    }
    let scale: f64 = (0..SCALE_PANELS)
        .map(|p| {
            let (f0, f1, f2) = (samples[2 * p], samples[2 * p + 1], samples[2 * p + 2]);
            h / 3.0 * (f0.abs() + 4.0 * f1.abs() + f2.abs())
        })
        .sum();
    let mut tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut evaluations = samples.len() as u64;
    let mut pass = 0;
    let acc = loop {
        let mut acc = Acc {
            value: 0.0,
            abs: 0.0,
            error: 0.0,
            evaluations: 0,
            exhausted: false,
        };
        let panel_tol = tol / SCALE_PANELS as f64;
        for p in 0..SCALE_PANELS {
            let pa = a + (2 * p) as f64 * h;
            let pb = if p + 1 == SCALE_PANELS { b } else { a + (2 * p + 2) as f64 * h };
            let (fa, fm, fb) = (samples[2 * p], samples[2 * p + 1], samples[2 * p + 2]);
            let panel = Panel {
                a: pa,
                m: 0.5 * (pa + pb),
                b: pb,
                fa,
                fm,
                fb,
                whole: (pb - pa) / 6.0 * (fa + 4.0 * fm + fb),
            };
            refine(&eval, panel, panel_tol, max_depth, &mut acc)?;
        }
        evaluations += acc.evaluations;
        pass += 1;
        let refined = rel_tol * acc.abs.max(f64::MIN_POSITIVE);
        if acc.exhausted || pass == 4 || refined >= 0.5 * tol {
            break acc;
        }
        tol = refined;
    };

    if acc.exhausted {
        return Err(Error::numeric(
            format!("adaptive Simpson exceeded max_depth {max_depth} on [{a}, {b}]"),
            acc.value,
            acc.error,
        ));
    }
    Ok(IntegralResult {
        value: acc.value,
        error_estimate: acc.error,
        evaluations,
    })
}

fn refine<F: Fn(f64) -> Result<f64>>(f: &F, p: Panel, tol: f64, depth: u32, acc: &mut Acc) -> Result<()> {
    let lm = 0.5 * (p.a + p.m);
    let rm = 0.5 * (p.m + p.b);
    let (flm, frm) = (f(lm)?, f(rm)?);
    acc.evaluations += 2;
    let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let diff = left + right - p.whole;
    // Stop once the midpoint no longer separates from the ends in floating point.
    if diff.abs() <= 15.0 * tol || lm <= p.a || rm >= p.b {
        acc.value += left + right + diff / 15.0;
        acc.abs += (left + right).abs();
        acc.error += diff.abs() / 15.0;
        return Ok(());
    }
    if depth == 0 {
        acc.exhausted = true;
        acc.value += left + right + diff / 15.0;
        acc.abs += (left + right).abs();
        acc.error += diff.abs() / 15.0;
        return Ok(());
    }
    let l = Panel {
        a: p.a,
        m: lm,
        b: p.m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let r = Panel {
        a: p.m,
        m: rm,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    refine(f, l, tol / 2.0, depth - 1, acc)?;
    refine(f, r, tol / 2.0, depth - 1, acc)
}
